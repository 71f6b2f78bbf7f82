#include "cavtherm/thermo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cavtherm/series.hpp"
#include "csv_util.hpp"

namespace cavtherm {

MomentTrace compute_moments(const GreensSolution& sol, Complex z0) {
    const std::size_t n = sol.grid.n_steps;
    MomentTrace m;
    m.z0 = z0;
    m.a_mean.resize(n);
    m.n_mean.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        m.a_mean[i] = sol.u[i] * z0 + sol.y[i];
        m.n_mean[i] = std::norm(m.a_mean[i]) + sol.v_diag[i];
    }
    return m;
}

ThermoTrace compute_thermo(const MasterEqCoefficients& coeffs,
                           const MomentTrace& moments,
                           const GreensSolution& sol,
                           const DriveProtocol& drive) {
    const std::size_t n = coeffs.grid.n_steps;
    const double wf = coeffs.frame_freq;
    ThermoTrace t;
    t.grid = coeffs.grid;
    t.E_r.assign(n, 0.0);
    t.E_r_T0.assign(n, 0.0);
    t.P_w_e.assign(n, 0.0);
    t.P_w_d.assign(n, 0.0);
    t.I_h_D.assign(n, 0.0);
    t.I_h_F.assign(n, 0.0);
    t.I_h.assign(n, 0.0);
    t.flag = coeffs.flag;

    double consistency_scale = 0.0;
    double consistency_worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Complex a = moments.a_mean[i];
        const double wr = coeffs.omega_r[i];
        const double drv = (std::conj(coeffs.f_r[i]) * a).real(); // Re[f_r* a]
        t.E_r[i] = wr * moments.n_mean[i] + 2.0 * drv;
        t.E_r_T0[i] = wr * std::norm(a) + 2.0 * drv;
        t.P_w_e[i] = moments.n_mean[i] * coeffs.domega_r[i];
        // lab-frame d f_r*/dt folded into the rotating frame:
        // conj(df_r) + i*frame_freq*conj(f_r)
        const Complex dfr_lab_conj =
            std::conj(coeffs.df_r[i]) + Complex{0.0, wf} * std::conj(coeffs.f_r[i]);
        t.P_w_d[i] = 2.0 * (a * dfr_lab_conj).real();
        t.I_h_F[i] = wr * sol.v_dot[i];
        t.I_h_D[i] = -2.0 * coeffs.gamma[i] * (wr * std::norm(a) + drv);
        t.I_h[i] = t.I_h_D[i] + t.I_h_F[i];

        if (!t.flag[i]) {
            // algebraic consistency of the channel split with the direct
            // heat-current expression
            const double direct =
                wr * coeffs.gamma_t[i] - 2.0 * coeffs.gamma[i] * (t.E_r[i] - drv);
            consistency_worst = std::max(consistency_worst, std::abs(t.I_h[i] - direct));
            consistency_scale = std::max({consistency_scale, std::abs(t.I_h[i]),
                                          std::abs(direct)});
        }
    }
    if (consistency_scale > 0.0 && consistency_worst > 1e-9 * consistency_scale) {
        std::ostringstream msg;
        msg << "compute_thermo: heat-current channel sum disagrees with the direct "
               "expression (residual "
            << consistency_worst / consistency_scale << " relative); wiring bug";
        throw NumericalError(msg.str());
    }

    const std::vector<std::size_t> breaks = drive_breakpoints(drive, coeffs.grid);
    const RealSeries dE = differentiate(t.E_r, coeffs.grid.dt, breaks);
    t.balance_residual.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        t.balance_residual[i] =
            dE[i] - (t.P_w_e[i] + t.P_w_d[i] + t.I_h_D[i] + t.I_h_F[i]);

    // summary statistic: skip flagged points, two points at each grid end,
    // and +-2 points around each drive discontinuity
    std::vector<bool> skip(n, false);
    for (std::size_t i = 0; i < n; ++i)
        if (t.flag[i])
            skip[i] = true;
    for (std::size_t i = 0; i < std::min<std::size_t>(2, n); ++i) {
        skip[i] = true;
        skip[n - 1 - i] = true;
    }
    for (std::size_t b : breaks)
        for (std::ptrdiff_t o = -2; o <= 2; ++o) {
            const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(b) + o;
            if (j >= 0 && j < static_cast<std::ptrdiff_t>(n))
                skip[static_cast<std::size_t>(j)] = true;
        }
    double max_res = 0.0;
    double max_dE = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (skip[i])
            continue;
        max_res = std::max(max_res, std::abs(t.balance_residual[i]));
        max_dE = std::max(max_dE, std::abs(dE[i]));
    }
    t.max_rel_residual = max_dE > 0.0 ? max_res / max_dE : 0.0;
    return t;
}

ThermoTrace closed_cavity_oracle(Complex z0, Complex A, double omega_c,
                                 double omega_d, const TimeGrid& grid) {
    grid.validate();
    const std::size_t n = grid.n_steps;
    const double delta = omega_c - omega_d;
    ThermoTrace t;
    t.grid = grid;
    t.E_r.assign(n, 0.0);
    t.E_r_T0.assign(n, 0.0);
    t.P_w_e.assign(n, 0.0);
    t.P_w_d.assign(n, 0.0);
    t.I_h_D.assign(n, 0.0);
    t.I_h_F.assign(n, 0.0);
    t.I_h.assign(n, 0.0);
    t.balance_residual.assign(n, 0.0);
    t.flag.assign(n, 0);

    const Complex Acz0 = std::conj(A) * z0;
    for (std::size_t i = 0; i < n; ++i) {
        const double tt = grid.time(i) - grid.t0;
        double E, P;
        if (delta != 0.0) {
            const Complex e{std::cos(delta * tt), -std::sin(delta * tt)};
            E = omega_c * std::norm(z0) +
                (2.0 / delta) * (Acz0 * (omega_c - omega_d * e)).real() +
                (2.0 * std::norm(A) * omega_d / (delta * delta)) *
                    (1.0 - std::cos(delta * tt));
            P = (2.0 * std::norm(A) / delta) * omega_d * std::sin(delta * tt) -
                2.0 * omega_d * (Acz0 * e).imag();
        } else {
            // exact detuning->0 limit
            E = omega_c * std::norm(z0) + 2.0 * Acz0.real() -
                2.0 * omega_c * tt * Acz0.imag() +
                omega_c * std::norm(A) * tt * tt;
            P = 2.0 * std::norm(A) * omega_c * tt - 2.0 * omega_c * Acz0.imag();
        }
        t.E_r[i] = E;
        t.E_r_T0[i] = E;
        t.P_w_d[i] = P;
    }
    return t;
}

void write_thermo_csv(const ThermoTrace& t, double omega_c, std::ostream& os) {
    using detail::fmt;
    detail::put_row(os,
                    "t_ns,E_r,P_w_e,P_w_d,I_h_D,I_h_F,I_h,balance_residual,flag,"
                    "E_r_hwc,P_w_e_hwc,P_w_d_hwc,I_h_D_hwc,I_h_F_hwc,I_h_hwc");
    const double s = 1.0 / omega_c; // energies in hbar*omega_c, currents in hbar*omega_c/ns
    for (std::size_t i = 0; i < t.grid.n_steps; ++i) {
        std::string row = fmt(t.grid.time(i));
        row += "," + fmt(t.E_r[i]);
        row += "," + fmt(t.P_w_e[i]);
        row += "," + fmt(t.P_w_d[i]);
        row += "," + fmt(t.I_h_D[i]);
        row += "," + fmt(t.I_h_F[i]);
        row += "," + fmt(t.I_h[i]);
        row += "," + fmt(t.balance_residual[i]);
        row += t.flag[i] ? ",1" : ",0";
        row += "," + fmt(t.E_r[i] * s);
        row += "," + fmt(t.P_w_e[i] * s);
        row += "," + fmt(t.P_w_d[i] * s);
        row += "," + fmt(t.I_h_D[i] * s);
        row += "," + fmt(t.I_h_F[i] * s);
        row += "," + fmt(t.I_h[i] * s);
        detail::put_row(os, row);
    }
}

} // namespace cavtherm
