#pragma once

#include <ostream>

#include "cavtherm/drive.hpp"
#include "cavtherm/grid.hpp"
#include "cavtherm/spectral.hpp"

namespace cavtherm {

// Nonequilibrium Green functions of the cavity, all stored in the frame
// rotating at frame_freq:
//   u: survival amplitude u_bar(t), with u(t,t0) = exp(-i*frame_freq*(t-t0))*u_bar(t)
//   udot: d u_bar/dt, evaluated from the solved equation's right-hand side
//   y: driving-induced field y_bar(t); ydot its analytic derivative
//   v_diag: equal-time thermal correlation v(t,t) (frame-independent)
//   v_dot: d/dt v(t,t) by second-order finite differences
struct GreensSolution {
    TimeGrid grid;
    double frame_freq = 0.0;
    ComplexSeries u;
    ComplexSeries udot;
    ComplexSeries y;
    ComplexSeries ydot;
    RealSeries v_diag;
    RealSeries v_dot;
};

// Volterra integro-differential equation for the propagator, rotating frame:
//   d u_bar/dt = -kappa*u_bar - integral_0^t g_bar(t-tau) u_bar(tau) dtau,
// u_bar(0) = 1, integrated by an implicit trapezoidal (second-order
// predictor-corrector) scheme with trapezoidal memory quadrature.
ComplexSeries solve_u(const KernelTable& kernels, const TimeGrid& grid);

// d u_bar/dt from the equation's right-hand side given the solved history.
ComplexSeries u_derivative(const ComplexSeries& u, const KernelTable& kernels,
                           const TimeGrid& grid);

// y_bar(t) = -i * integral_0^t u_bar(t-tau) f_bar(tau) dtau by trapezoidal
// convolution over the drive support; also returns the analytic derivative
//   ydot_bar(t) = -i f_bar(t) - i * integral_0^t udot_bar(t-tau) f_bar(tau) dtau.
// Rejects drives too detuned from the rotating frame to be resolved.
void solve_y(const ComplexSeries& u, const ComplexSeries& udot,
             const DriveProtocol& drive, const TimeGrid& grid, double frame_freq,
             ComplexSeries& y_out, ComplexSeries& ydot_out);

// Equal-time thermal correlation
//   v(t,t) = integral_0^t dt1 integral_0^t dt2 u(t,t1) gt(t1-t2) u*(t,t2),
// evaluated per grid point as a Hermitian Toeplitz quadratic form with
// trapezoidal edge weights; the Toeplitz matrix-vector product uses an FFT
// circulant embedding (O(N^2 log N) total). v_dot by finite differences.
void solve_v_diag(const ComplexSeries& u, const KernelTable& kernels,
                  const TimeGrid& grid, RealSeries& v_out, RealSeries& vdot_out);

// Full pipeline over one kernel table.
GreensSolution solve_greens(const KernelTable& kernels, const TimeGrid& grid,
                            const DriveProtocol& drive);

// Debug CSV: t_ns, re_u, im_u, re_y, im_y, v, v_dot
void write_greens_csv(const GreensSolution& sol, std::ostream& os);

} // namespace cavtherm
