#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cavtherm/scenario.hpp"
#include "cavtherm/units.hpp"

using namespace cavtherm;
namespace fs = std::filesystem;

namespace {

const double kOmegaC = units::ghz_to_rad_per_ns(2.69);

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("cavtherm_" + name);
    fs::remove_all(dir);
    return dir;
}

// column values of a named CSV column
std::vector<double> csv_column(const std::string& text, const std::string& col) {
    std::istringstream is(text);
    std::string line;
    REQUIRE(std::getline(is, line));
    std::vector<std::string> names;
    std::stringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ','))
        names.push_back(cell);
    std::size_t idx = names.size();
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == col)
            idx = i;
    REQUIRE(idx < names.size());
    std::vector<double> out;
    while (std::getline(is, line)) {
        std::stringstream ls(line);
        for (std::size_t i = 0; i <= idx; ++i)
            REQUIRE(std::getline(ls, cell, ','));
        out.push_back(std::stod(cell));
    }
    return out;
}

} // namespace

TEST_CASE("presets carry the reference experiment parameters") {
    const auto names = preset_names();
    CHECK(names.size() == 8);

    const Scenario fig2 = preset_scenario("fig2");
    CHECK(fig2.omega_c == doctest::Approx(kOmegaC).epsilon(1e-12));
    CHECK(fig2.omega_s == doctest::Approx(kOmegaC).epsilon(1e-12));
    CHECK(fig2.Omega == doctest::Approx(units::mhz_to_rad_per_ns(8.6)).epsilon(1e-12));
    CHECK(fig2.kappa == doctest::Approx(units::mhz_to_rad_per_ns(0.4)).epsilon(1e-12));
    CHECK(fig2.d == doctest::Approx(units::mhz_to_rad_per_ns(9.4)).epsilon(1e-12));
    CHECK(fig2.T0 == 0.1);
    CHECK(fig2.q == 1.39);
    CHECK(fig2.z0 == Complex{10.0, 0.0});
    CHECK_FALSE(fig2.drive.on);
    CHECK(fig2.grid.dt == 0.25);
    CHECK(fig2.grid.n_steps == 2001);

    const Scenario fig5 = preset_scenario("fig5");
    CHECK(fig5.Omega == doctest::Approx(units::mhz_to_rad_per_ns(0.86)).epsilon(1e-12));
    CHECK(fig5.omega_s == doctest::Approx(0.998 * kOmegaC).epsilon(1e-12));

    const Scenario fig6 = preset_scenario("fig6");
    CHECK(fig6.drive.on);
    CHECK(fig6.drive.f_m == doctest::Approx(0.1 * kOmegaC).epsilon(1e-12));
    CHECK(fig6.drive.freq_mode == DriveFreqMode::OmegaC);
    CHECK(fig6.drive.t_s == 900.0);
    CHECK(fig6.z0 == Complex{0.0, 0.0});
    CHECK(fig6.grid.n_steps == 4801);

    CHECK(preset_scenario("fig8").drive.freq_mode == DriveFreqMode::OmegaRSteady);
    CHECK_THROWS_AS(preset_scenario("fig99"), ValidationError);
}

TEST_CASE("scenario validation names the offending field") {
    const auto reject = [](const std::string& json, const std::string& needle) {
        try {
            load_scenario(json);
            FAIL("expected rejection of " << json);
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };

    reject(R"({"physical": {"omega_c_GHz": 2.69, "Omega_MHz": 8.6, "d_MHz": 9.4,
               "q": 2.5}})",
           "(1, 2)");
    reject(R"({"physical": {"omega_c_GHz": 2.69, "Omega_MHz": 8.6, "d_MHz": 9.4,
               "bogus": 1}})",
           "$.physical.bogus");
    // GHz typed where MHz belongs
    reject(R"({"physical": {"omega_c_GHz": 2690, "Omega_MHz": 8.6, "d_MHz": 9.4}})",
           "omega_c_GHz");
    reject(R"({"physical": {"omega_c_GHz": 2.69, "Omega_MHz": 8600, "d_MHz": 9.4}})",
           "Omega_MHz");
    reject("not json at all", "malformed");
    reject(R"({"physical": {"Omega_MHz": 8.6, "d_MHz": 9.4}})", "omega_c_GHz");

    // horizon must cover the drive
    reject(R"({"physical": {"omega_c_GHz": 2.69, "Omega_MHz": 8.6, "d_MHz": 9.4},
               "drive": {"kind": "tone", "f_m_hbar_omega_c": 0.1, "t_s_ns": 900},
               "grid": {"dt_ns": 0.25, "horizon_ns": 500}})",
           "horizon");
}

TEST_CASE("user document overlays a preset") {
    const std::string overlay =
        R"({"grid": {"horizon_ns": 100}, "physical": {"T0_K": 0}})";
    const std::string preset = "fig3";
    const Scenario sc = resolve_scenario(&overlay, &preset);
    CHECK(sc.grid.n_steps == 401);
    CHECK(sc.T0 == 0.0);
    // untouched preset fields survive
    CHECK(sc.Omega == doctest::Approx(units::mhz_to_rad_per_ns(0.86)).epsilon(1e-12));
    CHECK_THROWS_AS(resolve_scenario(nullptr, nullptr), ValidationError);
}

TEST_CASE("runs are deterministic and fully manifested") {
    const std::string overlay = R"({"grid": {"horizon_ns": 120}})";
    const std::string preset = "fig3";
    const Scenario sc = resolve_scenario(&overlay, &preset);

    const fs::path d1 = fresh_dir("det1");
    const fs::path d2 = fresh_dir("det2");
    write_outputs(run_scenario(sc), d1.string());
    write_outputs(run_scenario(sc), d2.string());
    for (const char* name :
         {"greens.csv", "coefficients.csv", "thermo.csv", "kernels.csv"}) {
        CHECK(slurp(d1 / name) == slurp(d2 / name));
        // RFC-4180: LF endings only
        CHECK(slurp(d1 / name).find('\r') == std::string::npos);
    }

    const std::string manifest = slurp(d1 / "manifest.json");
    for (const char* key :
         {"version", "omega_c", "Omega", "kappa", "T0_K", "dt_ns", "n_steps",
          "u_floor", "quadrature_panels", "max_rel_balance_residual"})
        CHECK(manifest.find(key) != std::string::npos);

    fs::remove_all(d1);
    fs::remove_all(d2);
}

TEST_CASE("temperature sweep: zero-temperature point has no fluctuation heat") {
    const std::string overlay = R"({"grid": {"horizon_ns": 100}})";
    const std::string preset = "fig3";
    const Scenario base = resolve_scenario(&overlay, &preset);

    const fs::path dir = fresh_dir("sweep");
    run_sweep(base, "T0", {0.0, 0.1}, dir.string(), 2);

    const std::string index = slurp(dir / "index.json");
    CHECK(index.find("\"param\": \"T0\"") != std::string::npos);
    CHECK(index.find("point_000") != std::string::npos);
    CHECK(index.find("point_001") != std::string::npos);
    CHECK(index.find("failed") == std::string::npos);

    const auto cold = csv_column(slurp(dir / "point_000" / "thermo.csv"), "I_h_F");
    for (double x : cold)
        CHECK(x == 0.0);
    const auto warm = csv_column(slurp(dir / "point_001" / "thermo.csv"), "I_h_F");
    double warm_max = 0.0;
    for (double x : warm)
        warm_max = std::max(warm_max, std::abs(x));
    CHECK(warm_max > 0.0);

    CHECK_THROWS_AS(run_sweep(base, "T0", {}, dir.string()), ValidationError);
    CHECK_THROWS_AS(run_sweep(base, "detuning", {1.0}, dir.string()),
                    ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("sweep records point failures without aborting") {
    const std::string overlay = R"({"grid": {"horizon_ns": 50}})";
    const std::string preset = "fig3";
    const Scenario base = resolve_scenario(&overlay, &preset);
    const fs::path dir = fresh_dir("sweep_fail");
    // second point is out of range and must fail in isolation
    run_sweep(base, "omega_s_ratio", {1.0, 25.0}, dir.string(), 1);
    const std::string index = slurp(dir / "index.json");
    CHECK(index.find("\"status\": \"ok\"") != std::string::npos);
    CHECK(index.find("\"status\": \"failed\"") != std::string::npos);
    CHECK(fs::exists(dir / "point_000" / "thermo.csv"));
    CHECK_FALSE(fs::exists(dir / "point_001" / "thermo.csv"));
    fs::remove_all(dir);
}

TEST_CASE("drive at the steady renormalized frequency resolves by two passes") {
    const std::string doc = R"({
        "physical": {"omega_c_GHz": 2.69, "Omega_MHz": 0.86, "kappa_MHz": 0.4,
                     "T0_K": 0, "q": 1.39, "d_MHz": 9.4, "omega_s_ratio": 0.998},
        "drive": {"kind": "tone", "f_m_hbar_omega_c": 0.01,
                  "omega_d": "omega_r_steady", "t_on_ns": 0, "t_s_ns": 80},
        "grid": {"dt_ns": 0.25, "horizon_ns": 100}})";
    const Scenario sc = load_scenario(doc);
    const RunResult r = run_scenario(sc);
    REQUIRE(r.omega_r_steady.has_value());
    CHECK(r.resolved_drive.drive_freq == *r.omega_r_steady);
    // weak coupling: the steady frequency sits within a line width of omega_c
    CHECK(std::abs(*r.omega_r_steady - sc.omega_c) < units::mhz_to_rad_per_ns(9.4));
}

TEST_CASE("discrete-bath cross-validation runs from a scenario") {
    const std::string overlay = R"({"grid": {"horizon_ns": 60}})";
    const std::string preset = "fig2";
    const Scenario sc = resolve_scenario(&overlay, &preset);

    const fs::path dir = fresh_dir("oracle");
    const OracleReport rep = run_oracle(sc, 64, dir.string());
    CHECK(rep.modes == 64);
    CHECK(rep.horizon <= 0.5 * rep.recurrence_time);
    CHECK(rep.max_du < 1e-3);
    CHECK(rep.max_dv < 5e-3);
    CHECK(rep.max_du_refined <= rep.max_du);
    CHECK(fs::exists(dir / "oracle.csv"));
    CHECK(slurp(dir / "report.json").find("max_du") != std::string::npos);
    fs::remove_all(dir);

    // a spinless scenario has nothing to discretize
    Scenario bare = sc;
    bare.Omega = 0.0;
    CHECK_THROWS_AS(run_oracle(bare, 64, ""), ValidationError);
}
