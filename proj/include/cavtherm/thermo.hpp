#pragma once

#include <ostream>

#include "cavtherm/coefficients.hpp"

namespace cavtherm {

// First and second moments of the cavity field (rotating frame):
//   a_mean(t) = u(t)*z0 + y(t),  n_mean(t) = |a_mean|^2 + v(t,t).
struct MomentTrace {
    Complex z0;
    ComplexSeries a_mean;
    RealSeries n_mean;
};

MomentTrace compute_moments(const GreensSolution& sol, Complex z0);

// Transient thermodynamic observables (all in internal units, hbar = 1):
//   E_r     internal energy  <H_r> = omega_r*n + 2 Re[f_r* a]
//   P_w_e   intrinsic work power    n * d(omega_r)/dt
//   P_w_d   driving-induced power   2 Re[a * d(f_r*)/dt]  (lab-frame derivative)
//   I_h_F   fluctuation heat current  omega_r * v_dot
//   I_h_D   dissipation heat current  -2 gamma * (omega_r|a|^2 + Re[f_r* a])
// balance_residual = dE_r/dt - (P_w_e + P_w_d + I_h_D + I_h_F).
struct ThermoTrace {
    TimeGrid grid;
    RealSeries E_r;
    RealSeries E_r_T0;  // zero-temperature part of E_r
    RealSeries P_w_e;
    RealSeries P_w_d;
    RealSeries I_h_D;
    RealSeries I_h_F;
    RealSeries I_h;
    RealSeries balance_residual;
    std::vector<std::uint8_t> flag;
    // max|residual|/max|dE_r/dt|, excluding flagged points, two points at
    // each grid end, and +-2 points around drive discontinuities
    double max_rel_residual = 0.0;
};

ThermoTrace compute_thermo(const MasterEqCoefficients& coeffs,
                           const MomentTrace& moments,
                           const GreensSolution& sol,
                           const DriveProtocol& drive);

// Decoupled driven cavity (J = 0), initial coherent state z0, drive
// A*exp(-i*omega_d*t) on the whole horizon: analytic energy, work power
// and (zero) heat current, with an exact detuning->0 limit branch.
ThermoTrace closed_cavity_oracle(Complex z0, Complex A, double omega_c,
                                 double omega_d, const TimeGrid& grid);

// Primary CSV: t_ns, E_r, P_w_e, P_w_d, I_h_D, I_h_F, I_h,
// balance_residual, flag, plus the same quantities normalized to the
// paper-style hbar*omega_c units (suffix _hwc).
void write_thermo_csv(const ThermoTrace& t, double omega_c, std::ostream& os);

} // namespace cavtherm
