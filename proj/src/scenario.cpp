#include "cavtherm/scenario.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "cavtherm/units.hpp"
#include "csv_util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace cavtherm {

namespace detail {
const std::string& preset_json(const std::string& name);
std::vector<std::string> preset_name_list();
} // namespace detail

std::string version_string() { return "cavtherm 0.1.0"; }

// ---------------------------------------------------------------------------
// scenario loading

namespace {

void require_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    if (!obj.is_object())
        throw ValidationError("scenario: " + path + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok)
            throw ValidationError("scenario: unknown field " + path + "." + key);
    }
}

double get_number(const json& obj, const std::string& path, const char* key,
                  double fallback, bool required = false) {
    if (!obj.contains(key)) {
        if (required)
            throw ValidationError("scenario: missing field " + path + "." + key);
        return fallback;
    }
    if (!obj[key].is_number())
        throw ValidationError("scenario: field " + path + "." + key +
                              " must be a number");
    return obj[key].get<double>();
}

void check_range(double v, double lo, double hi, const std::string& field) {
    if (!(v >= lo && v <= hi)) {
        std::ostringstream msg;
        msg << "scenario: " << field << " = " << v << " outside the accepted range ["
            << lo << ", " << hi << "] (check units)";
        throw ValidationError(msg.str());
    }
}

Scenario scenario_from_json(const json& doc) {
    require_keys(doc, "$",
                 {"name", "physical", "drive", "initial_state", "grid",
                  "tolerances", "environment"});
    Scenario sc;
    if (doc.contains("name")) {
        if (!doc["name"].is_string())
            throw ValidationError("scenario: $.name must be a string");
        sc.name = doc["name"].get<std::string>();
    }

    if (!doc.contains("physical"))
        throw ValidationError("scenario: missing field $.physical");
    const json& ph = doc["physical"];
    require_keys(ph, "$.physical",
                 {"omega_c_GHz", "omega_s_ratio", "Omega_MHz", "kappa_MHz", "T0_K",
                  "q", "d_MHz"});
    const double omega_c_ghz = get_number(ph, "$.physical", "omega_c_GHz", 0, true);
    check_range(omega_c_ghz, 0.05, 100.0, "$.physical.omega_c_GHz");
    const double ratio = get_number(ph, "$.physical", "omega_s_ratio", 1.0);
    check_range(ratio, 0.5, 2.0, "$.physical.omega_s_ratio");
    const double omega_mhz = get_number(ph, "$.physical", "Omega_MHz", 0, true);
    check_range(omega_mhz, 0.0, 1000.0, "$.physical.Omega_MHz");
    const double kappa_mhz = get_number(ph, "$.physical", "kappa_MHz", 0.0);
    check_range(kappa_mhz, 0.0, 1000.0, "$.physical.kappa_MHz");
    sc.T0 = get_number(ph, "$.physical", "T0_K", 0.0);
    check_range(sc.T0, 0.0, 10.0, "$.physical.T0_K");
    sc.q = get_number(ph, "$.physical", "q", 1.39);
    if (!(sc.q > 1.0 && sc.q < 2.0))
        throw ValidationError(
            "scenario: $.physical.q must lie strictly inside (1, 2)");
    const double d_mhz = get_number(ph, "$.physical", "d_MHz", 0, omega_mhz > 0.0);
    check_range(d_mhz, omega_mhz > 0.0 ? 1e-6 : 0.0, 1000.0, "$.physical.d_MHz");

    sc.omega_c = units::ghz_to_rad_per_ns(omega_c_ghz);
    sc.omega_s = ratio * sc.omega_c;
    sc.Omega = units::mhz_to_rad_per_ns(omega_mhz);
    sc.kappa = units::mhz_to_rad_per_ns(kappa_mhz);
    sc.d = units::mhz_to_rad_per_ns(d_mhz);

    if (doc.contains("grid")) {
        const json& g = doc["grid"];
        require_keys(g, "$.grid", {"dt_ns", "horizon_ns"});
        sc.grid.dt = get_number(g, "$.grid", "dt_ns", 0.25);
        check_range(sc.grid.dt, 1e-4, 10.0, "$.grid.dt_ns");
        const double horizon = get_number(g, "$.grid", "horizon_ns", 500.0);
        check_range(horizon, sc.grid.dt, 1e7, "$.grid.horizon_ns");
        sc.grid.n_steps = static_cast<std::size_t>(std::llround(horizon / sc.grid.dt)) + 1;
    } else {
        sc.grid.dt = 0.25;
        sc.grid.n_steps = 2001;
    }

    if (doc.contains("drive")) {
        const json& dr = doc["drive"];
        require_keys(dr, "$.drive",
                     {"kind", "f_m_hbar_omega_c", "omega_d", "t_on_ns", "t_s_ns",
                      "phase_rad"});
        std::string kind = "off";
        if (dr.contains("kind")) {
            if (!dr["kind"].is_string())
                throw ValidationError("scenario: $.drive.kind must be a string");
            kind = dr["kind"].get<std::string>();
        }
        if (kind == "tone") {
            sc.drive.on = true;
            const double fm_hwc =
                get_number(dr, "$.drive", "f_m_hbar_omega_c", 0, true);
            check_range(fm_hwc, 0.0, 100.0, "$.drive.f_m_hbar_omega_c");
            sc.drive.f_m = fm_hwc * sc.omega_c;
            sc.drive.t_on = get_number(dr, "$.drive", "t_on_ns", 0.0);
            sc.drive.t_s = get_number(dr, "$.drive", "t_s_ns", 0, true);
            sc.drive.phase = get_number(dr, "$.drive", "phase_rad", 0.0);
            if (!dr.contains("omega_d")) {
                sc.drive.freq_mode = DriveFreqMode::OmegaC;
            } else if (dr["omega_d"].is_string()) {
                const std::string s = dr["omega_d"].get<std::string>();
                if (s == "omega_c")
                    sc.drive.freq_mode = DriveFreqMode::OmegaC;
                else if (s == "omega_r_steady")
                    sc.drive.freq_mode = DriveFreqMode::OmegaRSteady;
                else
                    throw ValidationError(
                        "scenario: $.drive.omega_d must be \"omega_c\", "
                        "\"omega_r_steady\" or a number in rad/ns");
            } else if (dr["omega_d"].is_number()) {
                sc.drive.freq_mode = DriveFreqMode::Explicit;
                sc.drive.omega_d = dr["omega_d"].get<double>();
                check_range(sc.drive.omega_d, 0.1, 1000.0, "$.drive.omega_d");
            } else {
                throw ValidationError("scenario: $.drive.omega_d has a bad type");
            }
        } else if (kind != "off") {
            throw ValidationError("scenario: $.drive.kind must be \"off\" or \"tone\"");
        }
    }

    if (doc.contains("initial_state")) {
        const json& st = doc["initial_state"];
        require_keys(st, "$.initial_state", {"type", "re", "im"});
        std::string type = "vacuum";
        if (st.contains("type")) {
            if (!st["type"].is_string())
                throw ValidationError("scenario: $.initial_state.type must be a string");
            type = st["type"].get<std::string>();
        }
        if (type == "coherent") {
            sc.z0 = Complex{get_number(st, "$.initial_state", "re", 0.0),
                            get_number(st, "$.initial_state", "im", 0.0)};
        } else if (type != "vacuum") {
            throw ValidationError(
                "scenario: $.initial_state.type must be \"vacuum\" or \"coherent\"");
        }
    }

    if (doc.contains("tolerances")) {
        const json& tl = doc["tolerances"];
        require_keys(tl, "$.tolerances", {"quadrature", "step_halving", "u_floor"});
        sc.tol.quadrature = get_number(tl, "$.tolerances", "quadrature", 1e-9);
        check_range(sc.tol.quadrature, 1e-14, 1e-3, "$.tolerances.quadrature");
        sc.tol.step_halving = get_number(tl, "$.tolerances", "step_halving", 1e-6);
        sc.tol.u_floor = get_number(tl, "$.tolerances", "u_floor", 1e-8);
        check_range(sc.tol.u_floor, 0.0, 0.1, "$.tolerances.u_floor");
    }

    if (doc.contains("environment")) {
        const json& en = doc["environment"];
        require_keys(en, "$.environment", {"cut_mult", "thermal_includes_leakage"});
        sc.cut_mult = get_number(en, "$.environment", "cut_mult", 50.0);
        check_range(sc.cut_mult, 5.0, 1000.0, "$.environment.cut_mult");
        if (en.contains("thermal_includes_leakage")) {
            if (!en["thermal_includes_leakage"].is_boolean())
                throw ValidationError(
                    "scenario: $.environment.thermal_includes_leakage must be a bool");
            sc.thermal_includes_leakage = en["thermal_includes_leakage"].get<bool>();
        }
    }

    sc.validate();
    return sc;
}

json parse_doc(const std::string& text) {
    json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded())
        throw ValidationError("scenario: malformed JSON document");
    return doc;
}

} // namespace

void Scenario::validate() const {
    grid.validate();
    if (drive.on) {
        if (!(drive.t_on < drive.t_s))
            throw ValidationError("scenario: drive t_on must precede t_s");
        if (drive.t_s > grid.horizon() + 1e-9)
            throw ValidationError("scenario: horizon must cover the drive (t_s)");
    }
}

Scenario load_scenario(const std::string& json_text) {
    return scenario_from_json(parse_doc(json_text));
}

Scenario preset_scenario(const std::string& name) {
    return load_scenario(detail::preset_json(name));
}

std::vector<std::string> preset_names() { return detail::preset_name_list(); }

Scenario resolve_scenario(const std::string* json_text, const std::string* preset) {
    if (!json_text && !preset)
        throw ValidationError("scenario: provide a config document, a preset, or both");
    if (!preset)
        return load_scenario(*json_text);
    json doc = parse_doc(detail::preset_json(*preset));
    if (json_text) {
        const json overlay = parse_doc(*json_text);
        doc.merge_patch(overlay);
    }
    return scenario_from_json(doc);
}

// ---------------------------------------------------------------------------
// pipeline execution

namespace {

SpectralEnvironment environment_of(const Scenario& sc) {
    std::optional<QGaussianSpectrum> spin;
    if (sc.Omega > 0.0)
        spin = build_qgaussian(sc.Omega, sc.omega_s, sc.q, sc.d);
    SpectralEnvironment env =
        make_environment(std::move(spin), sc.kappa, sc.T0, sc.cut_mult);
    env.thermal_includes_leakage = sc.thermal_includes_leakage;
    return env;
}

DriveProtocol resolve_drive(const Scenario& sc, std::optional<double>& steady_out);

RunResult run_resolved(const Scenario& sc, const DriveProtocol& drive,
                       std::optional<double> steady) {
    RunResult r;
    r.scenario = sc;
    r.resolved_drive = drive;
    r.omega_r_steady = steady;
    const SpectralEnvironment env = environment_of(sc);
    r.kernels = build_kernels(env, sc.grid.dt, sc.grid.n_steps, sc.omega_c,
                              sc.tol.quadrature);
    r.kernel_diag = r.kernels.diag;
    r.greens = solve_greens(r.kernels, sc.grid, drive);
    r.coeffs = extract_coefficients(r.greens, sc.omega_c, drive, sc.tol.u_floor);
    r.moments = compute_moments(r.greens, sc.z0);
    r.thermo = compute_thermo(r.coeffs, r.moments, r.greens, drive);
    return r;
}

DriveProtocol resolve_drive(const Scenario& sc, std::optional<double>& steady_out) {
    DriveProtocol drive;
    if (!sc.drive.on)
        return drive;
    drive.kind = DriveProtocol::Kind::Tone;
    drive.amplitude = sc.drive.f_m;
    drive.t_on = sc.grid.t0 + sc.drive.t_on;
    drive.t_off = sc.grid.t0 + sc.drive.t_s;
    drive.phase = sc.drive.phase;
    switch (sc.drive.freq_mode) {
    case DriveFreqMode::OmegaC:
        drive.drive_freq = sc.omega_c;
        break;
    case DriveFreqMode::Explicit:
        drive.drive_freq = sc.drive.omega_d;
        break;
    case DriveFreqMode::OmegaRSteady: {
        // preliminary undriven pass; steady renormalized frequency is the
        // mean over the final 20% of the horizon (unflagged points)
        Scenario pre = sc;
        pre.drive = DriveSpec{};
        RunResult r = run_resolved(pre, DriveProtocol{}, std::nullopt);
        const std::size_t n = pre.grid.n_steps;
        const std::size_t start = n - n / 5;
        double sum = 0.0;
        std::size_t count = 0;
        for (std::size_t i = start; i < n; ++i)
            if (!r.coeffs.flag[i]) {
                sum += r.coeffs.omega_r[i];
                ++count;
            }
        if (count == 0)
            throw NumericalError(
                "run_scenario: cannot resolve omega_r_steady (all points flagged)");
        drive.drive_freq = sum / static_cast<double>(count);
        steady_out = drive.drive_freq;
        break;
    }
    }
    return drive;
}

} // namespace

RunResult run_scenario(const Scenario& sc) {
    sc.validate();
    std::optional<double> steady;
    const DriveProtocol drive = resolve_drive(sc, steady);
    return run_resolved(sc, drive, steady);
}

// ---------------------------------------------------------------------------
// outputs

namespace {

json manifest_json(const RunResult& r) {
    const Scenario& sc = r.scenario;
    json m;
    m["version"] = version_string();
    m["name"] = sc.name;
    m["internal_units"] = "hbar = 1, k_B = 1; time ns; angular frequency rad/ns";
    m["kB_over_hbar_rad_per_ns_K"] = units::kB_over_hbar;
    json p;
    p["omega_c"] = sc.omega_c;
    p["omega_s"] = sc.omega_s;
    p["Omega"] = sc.Omega;
    p["kappa"] = sc.kappa;
    p["T0_K"] = sc.T0;
    p["q"] = sc.q;
    p["d"] = sc.d;
    p["cut_mult"] = sc.cut_mult;
    p["thermal_includes_leakage"] = sc.thermal_includes_leakage;
    m["physical_rad_per_ns"] = p;
    json g;
    g["t0_ns"] = sc.grid.t0;
    g["dt_ns"] = sc.grid.dt;
    g["n_steps"] = sc.grid.n_steps;
    m["grid"] = g;
    json d;
    d["on"] = sc.drive.on;
    if (sc.drive.on) {
        d["f_m"] = sc.drive.f_m;
        d["omega_d"] = r.resolved_drive.drive_freq;
        d["t_on_ns"] = sc.drive.t_on;
        d["t_s_ns"] = sc.drive.t_s;
        d["phase_rad"] = sc.drive.phase;
    }
    if (r.omega_r_steady)
        d["omega_r_steady"] = *r.omega_r_steady;
    m["drive"] = d;
    json st;
    st["z0_re"] = r.moments.z0.real();
    st["z0_im"] = r.moments.z0.imag();
    m["initial_state"] = st;
    json tol;
    tol["quadrature"] = sc.tol.quadrature;
    tol["step_halving"] = sc.tol.step_halving;
    tol["u_floor"] = sc.tol.u_floor;
    m["tolerances"] = tol;
    json diag;
    diag["quadrature_panels"] = r.kernel_diag.panels;
    diag["quadrature_max_rel_change"] = r.kernel_diag.max_rel_change;
    diag["max_rel_balance_residual"] = r.thermo.max_rel_residual;
    std::size_t flagged = 0;
    for (auto f : r.coeffs.flag)
        flagged += f;
    diag["flagged_points"] = flagged;
    m["diagnostics"] = diag;
    return m;
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os)
        throw NumericalError("write_outputs: cannot open " + path.string());
    os << text;
}

} // namespace

void write_outputs(const RunResult& result, const std::string& out_dir) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    std::vector<fs::path> written;
    try {
        const auto emit = [&](const char* name, auto&& writer) {
            const fs::path p = dir / name;
            std::ostringstream os;
            writer(os);
            write_text_file(p, os.str());
            written.push_back(p);
        };
        emit("greens.csv", [&](std::ostream& os) { write_greens_csv(result.greens, os); });
        emit("coefficients.csv",
             [&](std::ostream& os) { write_coefficients_csv(result.coeffs, os); });
        emit("thermo.csv", [&](std::ostream& os) {
            write_thermo_csv(result.thermo, result.scenario.omega_c, os);
        });
        emit("kernels.csv",
             [&](std::ostream& os) { write_kernels_csv(result.kernels, os); });
        emit("manifest.json",
             [&](std::ostream& os) { os << manifest_json(result).dump(2) << "\n"; });
    } catch (...) {
        for (const auto& p : written) {
            std::error_code ec;
            fs::remove(p, ec);
        }
        throw;
    }
}

// ---------------------------------------------------------------------------
// sweeps

namespace {

Scenario apply_sweep_param(const Scenario& base, const std::string& param,
                           double value) {
    Scenario sc = base;
    if (param == "Omega") {
        sc.Omega = units::mhz_to_rad_per_ns(value);
    } else if (param == "omega_s_ratio") {
        check_range(value, 0.5, 2.0, "sweep omega_s_ratio");
        sc.omega_s = value * sc.omega_c;
    } else if (param == "T0") {
        check_range(value, 0.0, 10.0, "sweep T0");
        sc.T0 = value;
    } else if (param == "omega_d") {
        if (!sc.drive.on)
            throw ValidationError("sweep: omega_d sweep requires a drive");
        sc.drive.freq_mode = DriveFreqMode::Explicit;
        sc.drive.omega_d = value;
    } else if (param == "f_m") {
        if (!sc.drive.on)
            throw ValidationError("sweep: f_m sweep requires a drive");
        sc.drive.f_m = value * sc.omega_c;
    } else {
        throw ValidationError(
            "sweep: param must be one of Omega, omega_s_ratio, T0, omega_d, f_m");
    }
    return sc;
}

} // namespace

void run_sweep(const Scenario& base, const std::string& param,
               const std::vector<double>& values, const std::string& out_dir,
               unsigned threads) {
    if (values.empty())
        throw ValidationError("sweep: empty value list");
    base.validate();
    // fail fast on a bad parameter name before spawning workers
    apply_sweep_param(base, param, values.front());

    const fs::path dir(out_dir);
    fs::create_directories(dir);

    struct PointStatus {
        std::string dir;
        std::string status;
        std::string error;
    };
    std::vector<PointStatus> status(values.size());

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(values.size()));

    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= values.size())
                return;
            char sub[32];
            std::snprintf(sub, sizeof(sub), "point_%03zu", i);
            status[i].dir = sub;
            try {
                const Scenario sc = apply_sweep_param(base, param, values[i]);
                sc.validate();
                const RunResult r = run_scenario(sc);
                write_outputs(r, (dir / sub).string());
                status[i].status = "ok";
            } catch (const std::exception& e) {
                status[i].status = "failed";
                status[i].error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto& t : pool)
        t.join();

    json index;
    index["version"] = version_string();
    index["param"] = param;
    index["base"] = base.name;
    json pts = json::array();
    for (std::size_t i = 0; i < values.size(); ++i) {
        json p;
        p["value"] = values[i];
        p["dir"] = status[i].dir;
        p["status"] = status[i].status;
        if (!status[i].error.empty())
            p["error"] = status[i].error;
        pts.push_back(p);
    }
    index["points"] = pts;
    // atomic index update: write aside, then rename into place
    const fs::path tmp = dir / "index.json.tmp";
    write_text_file(tmp, index.dump(2) + "\n");
    fs::rename(tmp, dir / "index.json");
}

// ---------------------------------------------------------------------------
// discrete-bath cross-validation

OracleReport run_oracle(const Scenario& sc, std::size_t modes,
                        const std::string& out_dir) {
    if (modes < 2)
        throw ValidationError("oracle: need at least 2 modes");
    if (!(sc.Omega > 0.0))
        throw ValidationError("oracle: scenario has no spin ensemble to discretize");

    // leakage excluded: the flat spectrum would need enormous M
    Scenario probe = sc;
    probe.kappa = 0.0;
    probe.cut_mult = 5.0; // window shared by solver and discretization
    const SpectralEnvironment env = environment_of(probe);

    OracleReport rep;
    rep.modes = modes;
    const double width = (env.omega_cut_high - env.omega_cut_low) /
                         static_cast<double>(modes);
    rep.recurrence_time = 2.0 * units::pi / width;
    // recurrence honesty: never compare beyond half the recurrence time
    const double horizon =
        std::min({probe.grid.horizon(), 200.0, 0.5 * rep.recurrence_time});
    rep.horizon = horizon;

    TimeGrid grid;
    grid.dt = probe.grid.dt;
    grid.n_steps = static_cast<std::size_t>(std::floor(horizon / grid.dt)) + 1;
    grid.validate();

    const KernelTable kernels =
        build_kernels(env, grid.dt, grid.n_steps, probe.omega_c, probe.tol.quadrature);
    const ComplexSeries u = solve_u(kernels, grid);
    RealSeries v, vdot;
    solve_v_diag(u, kernels, grid, v, vdot);

    ComplexSeries u_ref[2];
    RealSeries v_ref[2];
    double du[2] = {0.0, 0.0};
    double dv[2] = {0.0, 0.0};
    for (int pass = 0; pass < 2; ++pass) {
        const std::size_t M = pass == 0 ? modes : 2 * modes;
        const DiscreteBath bath =
            discretize(env, M, env.omega_cut_low, env.omega_cut_high);
        u_ref[pass] = propagate_u(bath, probe.omega_c, grid, probe.omega_c);
        v_ref[pass] = propagate_v(bath, probe.omega_c, grid);
        for (std::size_t i = 0; i < grid.n_steps; ++i) {
            du[pass] = std::max(du[pass], std::abs(u[i] - u_ref[pass][i]));
            dv[pass] = std::max(dv[pass], std::abs(v[i] - v_ref[pass][i]));
        }
    }
    rep.max_du = du[0];
    rep.max_dv = dv[0];
    rep.max_du_refined = du[1];
    rep.max_dv_refined = dv[1];

    if (!out_dir.empty()) {
        const fs::path dir(out_dir);
        fs::create_directories(dir);
        std::ostringstream os;
        detail::put_row(os,
                        "t_ns,re_u_solver,im_u_solver,re_u_oracle,im_u_oracle,"
                        "v_solver,v_oracle");
        for (std::size_t i = 0; i < grid.n_steps; ++i) {
            std::string row = detail::fmt(grid.time(i));
            row += "," + detail::fmt(u[i].real());
            row += "," + detail::fmt(u[i].imag());
            row += "," + detail::fmt(u_ref[0][i].real());
            row += "," + detail::fmt(u_ref[0][i].imag());
            row += "," + detail::fmt(v[i]);
            row += "," + detail::fmt(v_ref[0][i]);
            detail::put_row(os, row);
        }
        write_text_file(dir / "oracle.csv", os.str());
        json rj;
        rj["version"] = version_string();
        rj["modes"] = rep.modes;
        rj["horizon_ns"] = rep.horizon;
        rj["recurrence_time_ns"] = rep.recurrence_time;
        rj["max_du"] = rep.max_du;
        rj["max_dv"] = rep.max_dv;
        rj["max_du_refined"] = rep.max_du_refined;
        rj["max_dv_refined"] = rep.max_dv_refined;
        write_text_file(dir / "report.json", rj.dump(2) + "\n");
    }
    return rep;
}

} // namespace cavtherm
