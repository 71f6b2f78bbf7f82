#include "cavtherm/coefficients.hpp"

#include <algorithm>
#include <cmath>

#include "cavtherm/series.hpp"
#include "csv_util.hpp"

namespace cavtherm {

std::vector<std::size_t> drive_breakpoints(const DriveProtocol& drive,
                                           const TimeGrid& grid) {
    std::vector<std::size_t> breaks;
    if (drive.kind == DriveProtocol::Kind::Off)
        return breaks;
    const auto push = [&](double t) {
        const double x = (t - grid.t0) / grid.dt;
        const auto j = static_cast<std::ptrdiff_t>(std::llround(x));
        if (j > 0 && j < static_cast<std::ptrdiff_t>(grid.n_steps))
            breaks.push_back(static_cast<std::size_t>(j));
    };
    push(drive.t_on);
    // the field is still on at t_s itself; the jump sits just after it
    push(drive.t_off + grid.dt);
    return breaks;
}

MasterEqCoefficients extract_coefficients(const GreensSolution& sol,
                                          double omega_c,
                                          const DriveProtocol& drive,
                                          double u_floor) {
    const std::size_t n = sol.grid.n_steps;
    MasterEqCoefficients c;
    c.grid = sol.grid;
    c.omega_c = omega_c;
    c.frame_freq = sol.frame_freq;
    c.omega_r.assign(n, 0.0);
    c.gamma.assign(n, 0.0);
    c.gamma_t.assign(n, 0.0);
    c.f_r.assign(n, Complex{0.0, 0.0});
    c.flag.assign(n, 0);

    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(sol.u[i]) <= u_floor) {
            // coefficients are singular at zeros of u; flag, do not regularize
            c.flag[i] = 1;
            c.omega_r[i] = c.frame_freq;
            continue;
        }
        const Complex r = sol.udot[i] / sol.u[i];
        c.omega_r[i] = c.frame_freq - r.imag();
        c.gamma[i] = -r.real();
        c.gamma_t[i] = sol.v_dot[i] + 2.0 * c.gamma[i] * sol.v_diag[i];
        c.f_r[i] = Complex{0.0, 1.0} * (sol.ydot[i] - r * sol.y[i]);
    }

    // bridge flagged points for the derivative stencils by treating each
    // maximal unflagged span as its own piece
    std::vector<std::size_t> breaks = drive_breakpoints(drive, sol.grid);
    for (std::size_t i = 0; i < n; ++i)
        if (c.flag[i]) {
            if (i > 0)
                breaks.push_back(i);
            if (i + 1 < n)
                breaks.push_back(i + 1);
        }
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    c.domega_r = differentiate(c.omega_r, sol.grid.dt, breaks);
    c.df_r = differentiate(c.f_r, sol.grid.dt, breaks);
    return c;
}

void write_coefficients_csv(const MasterEqCoefficients& c, std::ostream& os) {
    using detail::fmt;
    detail::put_row(os, "t_ns,omega_r,gamma,gamma_tilde,re_fr,im_fr,flag");
    for (std::size_t i = 0; i < c.grid.n_steps; ++i) {
        std::string row = fmt(c.grid.time(i));
        row += "," + fmt(c.omega_r[i]);
        row += "," + fmt(c.gamma[i]);
        row += "," + fmt(c.gamma_t[i]);
        row += "," + fmt(c.f_r[i].real());
        row += "," + fmt(c.f_r[i].imag());
        row += c.flag[i] ? ",1" : ",0";
        detail::put_row(os, row);
    }
}

} // namespace cavtherm
