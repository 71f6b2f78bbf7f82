#pragma once

#include <cstddef>

#include "cavtherm/grid.hpp"
#include "cavtherm/spectral.hpp"

namespace cavtherm {

// Brute-force verifier: the continuum J_s(w) is binned into M discrete
// modes and the closed (M+1)-mode linear system is propagated exactly by
// eigendecomposition. Valid only before the recurrence time
// t_rec = 2*pi/(bin spacing).
struct DiscreteBath {
    RealSeries freqs;      // bin-center frequencies, strictly increasing (rad/ns)
    RealSeries couplings;  // g_j >= 0, |g_j|^2 = integral_bin J dw / 2pi
    double thermal_scale = 0.0;
    double recurrence_time = 0.0; // ns
};

// Midpoint binning of J_s over [window_low, window_high]. The window must
// cover at least 99.9% of the total spectral weight. Leakage is excluded
// unless include_leakage is set (then the flat 2*kappa is added to every bin).
DiscreteBath discretize(const SpectralEnvironment& env, std::size_t M,
                        double window_low, double window_high,
                        bool include_leakage = false);

// Cavity-cavity element of the single-excitation propagator exp(-iHt),
// returned in the frame rotating at frame_freq.
ComplexSeries propagate_u(const DiscreteBath& bath, double omega_c,
                          const TimeGrid& grid, double frame_freq);

// v(t,t) = sum_j n_bar(w_j,T0) |U_{cavity,j}(t)|^2 (frame-independent).
RealSeries propagate_v(const DiscreteBath& bath, double omega_c,
                       const TimeGrid& grid);

} // namespace cavtherm
