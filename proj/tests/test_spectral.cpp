#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "cavtherm/spectral.hpp"
#include "cavtherm/units.hpp"

using namespace cavtherm;

namespace {

// paper-sheet parameters: Omega = 17.2pi MHz, d = 18.8pi MHz, q = 1.39,
// omega_s = omega_c = 2pi*2.69 GHz
const double kOmega = units::mhz_to_rad_per_ns(8.6);
const double kD = units::mhz_to_rad_per_ns(9.4);
const double kOmegaC = units::ghz_to_rad_per_ns(2.69);
const double kQ = 1.39;

QGaussianSpectrum reference_spin() {
    return build_qgaussian(kOmega, kOmegaC, kQ, kD);
}

// independent composite Simpson quadrature of fn over [a, b]
template <typename Fn>
auto simpson(Fn&& fn, double a, double b, std::size_t n) {
    if (n % 2)
        ++n;
    const double h = (b - a) / static_cast<double>(n);
    auto sum = fn(a) + fn(b);
    for (std::size_t i = 1; i < n; ++i)
        sum += fn(a + h * static_cast<double>(i)) * ((i % 2) ? 4.0 : 2.0);
    return sum * (h / 3.0);
}

} // namespace

TEST_CASE("q-Gaussian width parameter inverts the FWHM relation") {
    const QGaussianSpectrum s = reference_spin();
    // arbitrary-precision reference for d = 18.8pi MHz, q = 1.39
    CHECK(s.Delta == doctest::Approx(0.03310196598292504).epsilon(1e-12));
    // round trip: recompute d from Delta through the forward relation
    const double d_back =
        2.0 * s.Delta * std::sqrt((std::pow(2.0, kQ) - 2.0) / (2.0 * kQ - 2.0));
    CHECK(d_back == doctest::Approx(kD).epsilon(1e-12));
    // half maximum exactly at omega_s +- d/2
    CHECK(s.density(s.omega_s + kD / 2.0) ==
          doctest::Approx(0.5 * s.density(s.omega_s)).epsilon(1e-12));
    CHECK(s.density(s.omega_s - kD / 2.0) ==
          doctest::Approx(0.5 * s.density(s.omega_s)).epsilon(1e-12));
}

TEST_CASE("q-Gaussian peak and tail values") {
    const QGaussianSpectrum s = reference_spin();
    CHECK(s.C == doctest::Approx(14.40158749368206).epsilon(1e-12));
    // peak: bracket reduces to 1
    CHECK(s.density(s.omega_s) ==
          doctest::Approx(2.0 * units::pi * kOmega * kOmega * s.C).epsilon(1e-14));
    // far tail matches the direct power-law evaluation
    const double x = 10.0 * kD;
    const double direct =
        s.density(s.omega_s) *
        std::pow(1.0 + (kQ - 1.0) * x * x / (s.Delta * s.Delta), -1.0 / (kQ - 1.0));
    CHECK(s.density(s.omega_s + x) == doctest::Approx(direct).epsilon(1e-13));
    // even about the center
    CHECK(s.density(s.omega_s - x) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("q-Gaussian normalization: integral J_s domega / 2pi = Omega^2") {
    const QGaussianSpectrum s = reference_spin();
    // at 200 line widths the truncated tail mass is below 1e-10
    const double span = 200.0 * kD;
    const double integral = simpson(
        [&](double w) { return s.density(w); }, s.omega_s - span, s.omega_s + span,
        400000);
    CHECK(integral / (2.0 * units::pi) ==
          doctest::Approx(kOmega * kOmega).epsilon(1e-8));
}

TEST_CASE("q-Gaussian parameter validation") {
    CHECK_THROWS_AS(build_qgaussian(kOmega, kOmegaC, 2.5, kD), ValidationError);
    CHECK_THROWS_AS(build_qgaussian(kOmega, kOmegaC, 1.0, kD), ValidationError);
    CHECK_THROWS_AS(build_qgaussian(0.0, kOmegaC, kQ, kD), ValidationError);
    CHECK_THROWS_AS(build_qgaussian(kOmega, -1.0, kQ, kD), ValidationError);
    CHECK_THROWS_AS(build_qgaussian(kOmega, kOmegaC, kQ, 0.0), ValidationError);
}

TEST_CASE("total spectral density composes spin and leakage parts") {
    const double kappa = units::mhz_to_rad_per_ns(0.4);
    const SpectralEnvironment leak_only = make_environment(std::nullopt, kappa, 0.0);
    CHECK(spectral_density(leak_only, kOmegaC) == doctest::Approx(2.0 * kappa));
    CHECK(spectral_density(leak_only, 1.0) == doctest::Approx(2.0 * kappa));
    CHECK_THROWS_AS(spectral_density(leak_only, 0.0), ValidationError);

    const SpectralEnvironment env = make_environment(reference_spin(), kappa, 0.1);
    CHECK(env.thermal_scale == doctest::Approx(0.1 * units::kB_over_hbar));
    CHECK(spectral_density(env, kOmegaC) ==
          doctest::Approx(reference_spin().density(kOmegaC) + 2.0 * kappa));
    CHECK(env.omega_cut_low == doctest::Approx(kOmegaC - 50.0 * kD));
    CHECK(env.omega_cut_high == doctest::Approx(kOmegaC + 50.0 * kD));
    CHECK_THROWS_AS(make_environment(reference_spin(), kappa, 0.1, 2.0),
                    ValidationError);
    CHECK_THROWS_AS(make_environment(std::nullopt, -1.0, 0.1), ValidationError);
    CHECK_THROWS_AS(make_environment(std::nullopt, 0.0, -0.5), ValidationError);
}

TEST_CASE("Bose occupation") {
    const double scale_100mK = units::thermal_scale(0.1);
    // arbitrary-precision reference for omega_c at 0.1 K
    CHECK(bose_occupation(kOmegaC, scale_100mK) ==
          doctest::Approx(0.3793022096284879).epsilon(1e-12));
    // the 25 mK exponent matches the quoted one-fifth excitation ratio
    CHECK(kOmegaC / units::thermal_scale(0.025) ==
          doctest::Approx(5.163998923407604).epsilon(1e-12));
    CHECK(bose_occupation(kOmegaC, 0.0) == 0.0);
    CHECK(bose_occupation(1e-6, scale_100mK) > 1e4); // classical limit ~ kT/hw
    CHECK_THROWS_AS(bose_occupation(0.0, scale_100mK), ValidationError);
    CHECK_THROWS_AS(bose_occupation(-1.0, scale_100mK), ValidationError);
}

TEST_CASE("kernels: leakage-only environment has no memory") {
    const double kappa = units::mhz_to_rad_per_ns(0.4);
    const SpectralEnvironment env = make_environment(std::nullopt, kappa, 0.1);
    const KernelTable table = build_kernels(env, 0.25, 200, kOmegaC);
    CHECK(table.kappa_local == doctest::Approx(kappa));
    for (const auto& g : table.g_vals)
        CHECK(std::abs(g) == 0.0);
    for (const auto& gt : table.gt_vals)
        CHECK(std::abs(gt) == 0.0);
}

TEST_CASE("kernels: zero temperature silences the thermal kernel") {
    const SpectralEnvironment env = make_environment(reference_spin(), 0.0, 0.0);
    const KernelTable table = build_kernels(env, 0.25, 100, kOmegaC);
    for (const auto& gt : table.gt_vals)
        CHECK(std::abs(gt) == 0.0);
    CHECK(std::abs(table.g_vals[0]) > 0.0);
}

TEST_CASE("kernels: zero lag equals the spectral weight Omega^2") {
    const SpectralEnvironment env = make_environment(reference_spin(), 0.0, 0.0);
    const KernelTable table = build_kernels(env, 0.25, 50, kOmegaC);
    CHECK(table.g_vals[0].real() ==
          doctest::Approx(kOmega * kOmega).epsilon(1e-6));
    CHECK(std::abs(table.g_vals[0].imag()) < 1e-10 * std::abs(table.g_vals[0]));
}

TEST_CASE("kernels: symmetric spectrum in its own frame is real") {
    const SpectralEnvironment env = make_environment(reference_spin(), 0.0, 0.0);
    const KernelTable table = build_kernels(env, 0.25, 401, kOmegaC);
    const double scale = std::abs(table.g_vals[0]);
    for (const auto& g : table.g_vals)
        CHECK(std::abs(g.imag()) < 1e-8 * scale);
}

TEST_CASE("kernels: unrotated kernel is Hermitian, table matches direct quadrature") {
    const QGaussianSpectrum spin = reference_spin();
    const SpectralEnvironment env = make_environment(spin, 0.0, 0.1);
    const double frame = 0.97 * kOmegaC; // off-center frame, complex kernels
    const double dt = 0.25;
    const KernelTable table = build_kernels(env, dt, 40, frame);

    const auto direct = [&](double s) {
        return simpson(
            [&](double w) {
                const double phi = (w - frame) * s;
                return spin.density(w) / (2.0 * units::pi) *
                       Complex{std::cos(phi), -std::sin(phi)};
            },
            env.omega_cut_low, env.omega_cut_high, 200000);
    };
    for (std::size_t k : {1ul, 7ul, 39ul}) {
        const double s = dt * static_cast<double>(k);
        const Complex ref = direct(s);
        CHECK(std::abs(table.g_vals[k] - ref) < 1e-8 * std::abs(table.g_vals[0]));
        // g(-s) = conj(g(s)) for the unrotated kernel
        const Complex unrot = direct(s) * std::polar(1.0, -frame * s);
        const Complex unrot_neg = direct(-s) * std::polar(1.0, frame * s);
        CHECK(std::abs(unrot_neg - std::conj(unrot)) < 1e-10 * std::abs(unrot));
    }
}

TEST_CASE("kernels: stationary, deterministic, converged in quadrature") {
    const SpectralEnvironment env = make_environment(reference_spin(), 0.0, 0.1);
    const KernelTable a = build_kernels(env, 0.25, 301, kOmegaC);
    const KernelTable b = build_kernels(env, 0.25, 301, kOmegaC);
    REQUIRE(a.g_vals.size() == b.g_vals.size());
    for (std::size_t k = 0; k < a.g_vals.size(); ++k) {
        CHECK(a.g_vals[k] == b.g_vals[k]);
        CHECK(a.gt_vals[k] == b.gt_vals[k]);
    }
    CHECK(a.diag.max_rel_change < 1e-9);

    // tightening the tolerance (finer quadrature) moves nothing beyond 1e-8
    const KernelTable fine = build_kernels(env, 0.25, 301, kOmegaC, 1e-12);
    const double scale = std::abs(fine.g_vals[0]);
    for (std::size_t k = 0; k < a.g_vals.size(); ++k)
        CHECK(std::abs(a.g_vals[k] - fine.g_vals[k]) < 1e-8 * scale);
}
