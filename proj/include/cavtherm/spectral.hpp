#pragma once

#include <cstddef>
#include <optional>
#include <ostream>

#include "cavtherm/grid.hpp"

namespace cavtherm {

// q-Gaussian line shape of the spin-ensemble spectrum,
//   J_s(w) = 2*pi*Omega^2*C * [1 + (q-1)(w-omega_s)^2/Delta^2]^(-1/(q-1)),
// with q in (1,2) interpolating between Gaussian and Lorentzian.
// C normalizes the bare line shape to unit area, so the total weight is
// integral J_s dw = 2*pi*Omega^2 and Omega is the collective coupling.
struct QGaussianSpectrum {
    double Omega = 0.0;    // collective coupling strength (rad/ns)
    double omega_s = 0.0;  // ensemble center frequency (rad/ns)
    double q = 1.39;       // shape parameter
    double d = 0.0;        // full width at half maximum (rad/ns)
    double Delta = 0.0;    // width parameter, derived from d and q (rad/ns)
    double C = 0.0;        // normalization constant (ns), derived

    // normalized line shape (peak value C, unit area)
    double line_shape(double omega) const;
    // J_s(omega), valid for all omega
    double density(double omega) const;
};

QGaussianSpectrum build_qgaussian(double Omega, double omega_s, double q, double d);

// Environment seen by the cavity: structured spin spectrum plus flat
// leakage 2*kappa, at initial temperature T0.
struct SpectralEnvironment {
    std::optional<QGaussianSpectrum> spin; // absent => J_s = 0
    double kappa = 0.0;          // leakage decay constant (rad/ns)
    double T0 = 0.0;             // initial temperature (K)
    double thermal_scale = 0.0;  // k_B*T0/hbar (rad/ns)
    double omega_cut_low = 0.0;  // frequency-integration window (rad/ns)
    double omega_cut_high = 0.0;
    // The flat leakage spectrum makes n_bar(w)*2*kappa log-divergent at
    // w -> 0; by default the thermal kernel carries only J_s. Opting in
    // integrates the leakage part above omega_cut_low.
    bool thermal_includes_leakage = false;
};

// cut_mult: integration window spans omega_s +- cut_mult*d (clipped at 0).
SpectralEnvironment make_environment(std::optional<QGaussianSpectrum> spin,
                                     double kappa, double T0,
                                     double cut_mult = 50.0);

// J(omega) = J_s(omega) + 2*kappa for omega > 0.
double spectral_density(const SpectralEnvironment& env, double omega);

// Bose-Einstein occupation 1/(exp(omega/thermal_scale)-1); 0 at zero
// temperature. Rejects omega <= 0.
double bose_occupation(double omega, double thermal_scale);

// Stationary memory kernels sampled on the lag grid k*dt, in the frame
// rotating at frame_freq:
//   g_bar(s)  = integral dw/2pi J_s(w) exp(-i(w-frame_freq)s)
//   gt_bar(s) = same with the integrand weighted by n_bar(w,T0).
// The flat leakage is not integrated numerically; its delta-function
// kernel enters the Volterra equation as the local term kappa_local.
struct KernelTable {
    double dt = 0.0;
    std::size_t n_steps = 0;
    double frame_freq = 0.0;
    ComplexSeries g_vals;
    ComplexSeries gt_vals;
    double kappa_local = 0.0;

    struct Diagnostics {
        std::size_t panels = 0;       // converged panel count
        double max_rel_change = 0.0;  // last refinement delta
    } diag;
};

KernelTable build_kernels(const SpectralEnvironment& env, double dt,
                          std::size_t n_steps, double frame_freq,
                          double quad_tol = 1e-9);

// Debug CSV: lag_ns, re_g, im_g, re_gt, im_gt
void write_kernels_csv(const KernelTable& table, std::ostream& os);

} // namespace cavtherm
