#include "cavtherm/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "cavtherm/units.hpp"
#include "csv_util.hpp"

namespace cavtherm {

namespace {

// 16-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kGlWeights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

struct KernelPair {
    ComplexSeries g, gt;
};

// Integrates both kernels over [lo, hi] with `panels` composite GL panels.
// Nodes are laid out symmetrically within each panel, so a window symmetric
// about the line center keeps the imaginary parts at rounding level.
KernelPair integrate_kernels(const SpectralEnvironment& env, double lo, double hi,
                             std::size_t panels, double dt, std::size_t n_steps,
                             double frame_freq) {
    KernelPair out;
    out.g.assign(n_steps, Complex{0.0, 0.0});
    out.gt.assign(n_steps, Complex{0.0, 0.0});
    const auto& spin = *env.spin;
    const double h = (hi - lo) / static_cast<double>(panels);
    const double inv2pi = 1.0 / (2.0 * units::pi);
    const bool thermal = env.thermal_scale > 0.0;

    for (std::size_t p = 0; p < panels; ++p) {
        const double c = lo + h * (static_cast<double>(p) + 0.5);
        for (std::size_t m = 0; m < 16; ++m) {
            const std::size_t half = m / 2;
            const double sign = (m % 2 == 0) ? -1.0 : 1.0;
            const double omega = c + sign * 0.5 * h * kGlNodes[half];
            const double w = 0.5 * h * kGlWeights[half];
            double js = spin.density(omega);
            double jt = 0.0;
            if (thermal && omega > 0.0) {
                double j_for_thermal = js;
                if (env.thermal_includes_leakage)
                    j_for_thermal += 2.0 * env.kappa;
                jt = j_for_thermal * bose_occupation(omega, env.thermal_scale);
            }
            const double a = w * js * inv2pi;
            const double at = w * jt * inv2pi;
            const double phi = (omega - frame_freq) * dt;
            const Complex rot{std::cos(phi), -std::sin(phi)};
            Complex ph{1.0, 0.0};
            for (std::size_t k = 0; k < n_steps; ++k) {
                out.g[k] += a * ph;
                out.gt[k] += at * ph;
                ph *= rot;
            }
        }
    }
    return out;
}

double max_abs(const ComplexSeries& s) {
    double m = 0.0;
    for (const auto& z : s)
        m = std::max(m, std::abs(z));
    return m;
}

// max_k |a_k - b_k| / scale, with the offending index.
std::pair<double, std::size_t> max_rel_diff(const ComplexSeries& a,
                                            const ComplexSeries& b, double scale) {
    double m = 0.0;
    std::size_t idx = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = std::abs(a[k] - b[k]) / scale;
        if (d > m) {
            m = d;
            idx = k;
        }
    }
    return {m, idx};
}

} // namespace

double QGaussianSpectrum::line_shape(double omega) const {
    const double x = omega - omega_s;
    const double bracket = 1.0 + (q - 1.0) * x * x / (Delta * Delta);
    return C * std::pow(bracket, -1.0 / (q - 1.0));
}

double QGaussianSpectrum::density(double omega) const {
    return 2.0 * units::pi * Omega * Omega * line_shape(omega);
}

QGaussianSpectrum build_qgaussian(double Omega, double omega_s, double q, double d) {
    if (!(Omega > 0.0))
        throw ValidationError("build_qgaussian: Omega must be positive");
    if (!(omega_s > 0.0))
        throw ValidationError("build_qgaussian: omega_s must be positive");
    if (!(q > 1.0 && q < 2.0))
        throw ValidationError("build_qgaussian: q must lie in (1,2)");
    if (!(d > 0.0))
        throw ValidationError("build_qgaussian: d must be positive");

    QGaussianSpectrum s;
    s.Omega = Omega;
    s.omega_s = omega_s;
    s.q = q;
    s.d = d;
    // invert d = 2*Delta*sqrt((2^q-2)/(2q-2))
    s.Delta = d / (2.0 * std::sqrt((std::exp2(q) - 2.0) / (2.0 * q - 2.0)));
    // unit-area normalization of the line shape:
    // integral [1+(q-1)x^2/Delta^2]^(-1/(q-1)) dx
    //   = Delta/sqrt(q-1) * sqrt(pi) * Gamma(nu-1/2)/Gamma(nu),  nu = 1/(q-1)
    const double nu = 1.0 / (q - 1.0);
    const double area = s.Delta / std::sqrt(q - 1.0) * std::sqrt(units::pi) *
                        std::exp(std::lgamma(nu - 0.5) - std::lgamma(nu));
    s.C = 1.0 / area;
    return s;
}

SpectralEnvironment make_environment(std::optional<QGaussianSpectrum> spin,
                                     double kappa, double T0, double cut_mult) {
    if (kappa < 0.0)
        throw ValidationError("make_environment: kappa must be non-negative");
    if (T0 < 0.0)
        throw ValidationError("make_environment: T0 must be non-negative");
    SpectralEnvironment env;
    env.spin = std::move(spin);
    env.kappa = kappa;
    env.T0 = T0;
    env.thermal_scale = units::thermal_scale(T0);
    if (env.spin) {
        if (cut_mult < 5.0)
            throw ValidationError("make_environment: cut_mult must be >= 5");
        env.omega_cut_low = std::max(0.0, env.spin->omega_s - cut_mult * env.spin->d);
        env.omega_cut_high = env.spin->omega_s + cut_mult * env.spin->d;
    }
    return env;
}

double spectral_density(const SpectralEnvironment& env, double omega) {
    if (!(omega > 0.0))
        throw ValidationError("spectral_density: omega must be positive");
    double j = 2.0 * env.kappa;
    if (env.spin)
        j += env.spin->density(omega);
    return j;
}

double bose_occupation(double omega, double thermal_scale) {
    if (!(omega > 0.0))
        throw ValidationError("bose_occupation: omega must be positive");
    if (thermal_scale < 0.0)
        throw ValidationError("bose_occupation: thermal_scale must be non-negative");
    if (thermal_scale == 0.0)
        return 0.0;
    const double x = omega / thermal_scale;
    if (x > 700.0)
        return 0.0;
    return 1.0 / std::expm1(x);
}

KernelTable build_kernels(const SpectralEnvironment& env, double dt,
                          std::size_t n_steps, double frame_freq,
                          double quad_tol) {
    if (!(dt > 0.0))
        throw ValidationError("build_kernels: dt must be positive");
    if (!(frame_freq > 0.0))
        throw ValidationError("build_kernels: frame_freq must be positive");
    if (n_steps < 1)
        throw ValidationError("build_kernels: n_steps must be at least 1");

    KernelTable table;
    table.dt = dt;
    table.n_steps = n_steps;
    table.frame_freq = frame_freq;
    table.kappa_local = env.kappa;

    if (!env.spin || env.spin->Omega == 0.0) {
        table.g_vals.assign(n_steps, Complex{0.0, 0.0});
        table.gt_vals.assign(n_steps, Complex{0.0, 0.0});
        return table;
    }

    const double lo = env.omega_cut_low;
    const double hi = env.omega_cut_high;
    const double t_max = dt * static_cast<double>(n_steps - 1);
    // panel width small enough that the phase across a panel stays within
    // the 16-point rule's oscillatory accuracy range
    const double h0 = std::min(env.spin->Delta / 2.0, 4.0 / std::max(t_max, 1.0));
    std::size_t panels = std::max<std::size_t>(
        16, static_cast<std::size_t>(std::ceil((hi - lo) / h0)));

    KernelPair coarse = integrate_kernels(env, lo, hi, panels, dt, n_steps, frame_freq);
    for (int level = 0; level < 5; ++level) {
        KernelPair fine =
            integrate_kernels(env, lo, hi, panels * 2, dt, n_steps, frame_freq);
        const double gscale = std::max(max_abs(fine.g), 1e-300);
        auto [dg, kg] = max_rel_diff(coarse.g, fine.g, gscale);
        double dgt = 0.0;
        std::size_t kgt = 0;
        const double gtscale = max_abs(fine.gt);
        if (gtscale > 0.0)
            std::tie(dgt, kgt) = max_rel_diff(coarse.gt, fine.gt, gtscale);
        const double worst = std::max(dg, dgt);
        panels *= 2;
        if (worst < quad_tol) {
            table.g_vals = std::move(fine.g);
            table.gt_vals = std::move(fine.gt);
            table.diag.panels = panels;
            table.diag.max_rel_change = worst;
            return table;
        }
        if (level == 4) {
            std::ostringstream msg;
            msg << "build_kernels: quadrature did not converge (residual " << worst
                << " at lag index " << (dg >= dgt ? kg : kgt) << ", " << panels
                << " panels)";
            throw NumericalError(msg.str());
        }
        coarse = std::move(fine);
    }
    return table; // unreachable
}

void write_kernels_csv(const KernelTable& table, std::ostream& os) {
    using detail::fmt;
    detail::put_row(os, "lag_ns,re_g,im_g,re_gt,im_gt");
    for (std::size_t k = 0; k < table.n_steps; ++k) {
        std::string row = fmt(table.dt * static_cast<double>(k));
        row += "," + fmt(table.g_vals[k].real());
        row += "," + fmt(table.g_vals[k].imag());
        row += "," + fmt(table.gt_vals[k].real());
        row += "," + fmt(table.gt_vals[k].imag());
        detail::put_row(os, row);
    }
}

} // namespace cavtherm
