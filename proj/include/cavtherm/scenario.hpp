#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cavtherm/discrete_bath.hpp"
#include "cavtherm/thermo.hpp"

namespace cavtherm {

struct Tolerances {
    double quadrature = 1e-9;
    double step_halving = 1e-6;
    double u_floor = 1e-8;
};

// How the drive frequency is resolved at run time.
enum class DriveFreqMode { OmegaC, OmegaRSteady, Explicit };

struct DriveSpec {
    bool on = false;
    double f_m = 0.0;   // rad/ns (internal units)
    DriveFreqMode freq_mode = DriveFreqMode::OmegaC;
    double omega_d = 0.0; // rad/ns, used when freq_mode == Explicit
    double t_on = 0.0;   // ns
    double t_s = 0.0;    // ns (turn-off)
    double phase = 0.0;  // rad
};

// Full experiment description, all values in internal units after loading.
struct Scenario {
    std::string name = "custom";
    double omega_c = 0.0;  // rad/ns
    double omega_s = 0.0;  // rad/ns
    double Omega = 0.0;    // rad/ns; 0 disables the spin ensemble
    double kappa = 0.0;    // rad/ns
    double T0 = 0.0;       // K
    double q = 1.39;
    double d = 0.0;        // rad/ns
    double cut_mult = 50.0;
    bool thermal_includes_leakage = false;
    DriveSpec drive;
    Complex z0{0.0, 0.0};
    TimeGrid grid;
    Tolerances tol;

    void validate() const;
};

// Parse and validate a scenario document (JSON text). Unknown fields are
// rejected; unit errors are caught by range validation.
Scenario load_scenario(const std::string& json_text);

// Embedded paper-figure presets, addressable as fig2..fig9.
Scenario preset_scenario(const std::string& name);
std::vector<std::string> preset_names();

// Preset document optionally overlaid with a user document.
Scenario resolve_scenario(const std::string* json_text, const std::string* preset);

struct RunResult {
    Scenario scenario;
    KernelTable kernels;
    GreensSolution greens;
    MasterEqCoefficients coeffs;
    MomentTrace moments;
    ThermoTrace thermo;
    KernelTable::Diagnostics kernel_diag;
    std::optional<double> omega_r_steady; // resolved two-pass drive frequency
    DriveProtocol resolved_drive;
};

// Execute the full pipeline. A drive at "omega_r_steady" triggers a
// preliminary undriven run whose steady renormalized frequency (mean over
// the final 20% of the horizon) fixes the drive tone.
RunResult run_scenario(const Scenario& sc);

// Write greens.csv, coefficients.csv, thermo.csv, kernels.csv and
// manifest.json under out_dir; on failure partial outputs are removed.
void write_outputs(const RunResult& result, const std::string& out_dir);

// Parameter sweep: one subdirectory per value plus an index.json. Point
// failures are recorded in the index without aborting the sweep.
// param is one of Omega, omega_s_ratio, T0, omega_d, f_m (values in the
// scenario-file units: MHz, ratio, K, rad/ns, hbar*omega_c).
void run_sweep(const Scenario& base, const std::string& param,
               const std::vector<double>& values, const std::string& out_dir,
               unsigned threads = 0);

struct OracleReport {
    std::size_t modes = 0;
    double horizon = 0.0;       // ns actually compared
    double recurrence_time = 0.0;
    double max_du = 0.0;        // max |u_solver - u_oracle|
    double max_dv = 0.0;        // max |v_solver - v_oracle|
    double max_du_refined = 0.0; // at 2M modes
    double max_dv_refined = 0.0;
};

// Discrete-bath cross-validation of a scenario (kappa forced to 0, window
// omega_s +- 5d shared by solver and discretization). Compares at M and 2M
// modes and, when out_dir is non-empty, writes a deviation report.
OracleReport run_oracle(const Scenario& sc, std::size_t modes,
                        const std::string& out_dir);

std::string version_string();

} // namespace cavtherm
