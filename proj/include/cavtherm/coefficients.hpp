#pragma once

#include <cstdint>
#include <ostream>

#include "cavtherm/greens.hpp"

namespace cavtherm {

// Time-dependent coefficients of the exact master equation, extracted from
// the Green functions via the logarithmic derivative of the propagator:
//   omega_r(t) = frame_freq - Im[udot/u]   (renormalized frequency)
//   gamma(t)   = -Re[udot/u]               (dissipation)
//   gamma_t(t) = v_dot + 2*gamma*v         (fluctuation)
//   f_r(t)     = i*(ydot - (udot/u)*y)     (renormalized drive, rotating frame)
// Points where |u| falls below u_floor are singular and flagged; flagged
// points carry no trusted coefficient values and are excluded from
// derivative stencils.
struct MasterEqCoefficients {
    TimeGrid grid;
    double omega_c = 0.0;
    double frame_freq = 0.0;
    RealSeries omega_r;       // rad/ns
    RealSeries gamma;         // 1/ns
    RealSeries gamma_t;       // 1/ns
    ComplexSeries f_r;        // rotating frame, rad/ns
    RealSeries domega_r;      // d omega_r/dt
    ComplexSeries df_r;       // d f_r/dt of the rotating-frame series
    std::vector<std::uint8_t> flag; // 1 = |u| below floor
};

// Breakpoints for the derivative stencils (drive turn-on/off indices)
// are derived from the drive protocol.
MasterEqCoefficients extract_coefficients(const GreensSolution& sol,
                                          double omega_c,
                                          const DriveProtocol& drive,
                                          double u_floor = 1e-8);

// CSV: t_ns, omega_r, gamma, gamma_tilde, re_fr, im_fr, flag
void write_coefficients_csv(const MasterEqCoefficients& c, std::ostream& os);

// Drive-support breakpoint indices on the grid (empty when undriven).
std::vector<std::size_t> drive_breakpoints(const DriveProtocol& drive,
                                           const TimeGrid& grid);

} // namespace cavtherm
