/* C API for the cavtherm shared library: non-Markovian cavity
 * thermodynamics simulations behind opaque handles and error codes.
 *
 * All functions return CAVTHERM_OK (0) on success. On failure the
 * thread-local message from cavtherm_error_message() describes the
 * problem. Handles must be released with cavtherm_run_destroy().
 */
#ifndef CAVTHERM_H
#define CAVTHERM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
    CAVTHERM_OK = 0,
    CAVTHERM_ERR_INVALID = 2,   /* bad arguments / malformed scenario */
    CAVTHERM_ERR_NUMERICAL = 3  /* quadrature or solver failure */
};

typedef struct cavtherm_run cavtherm_run;

/* Last error message for the calling thread ("" when none). */
const char* cavtherm_error_message(void);

const char* cavtherm_version(void);

/* Comma-separated preset names (static storage). */
const char* cavtherm_preset_names(void);

/* Build a run handle from a scenario JSON document, a preset name, or
 * both (the document overlays the preset). Either argument may be NULL,
 * but not both. The run is not executed yet. */
int cavtherm_run_create(const char* config_json, const char* preset,
                        cavtherm_run** out);

/* Execute the pipeline. out_dir may be NULL (no files written). */
int cavtherm_run_execute(cavtherm_run* run, const char* out_dir);

void cavtherm_run_destroy(cavtherm_run* run);

/* Number of time steps of an executed run. */
int cavtherm_run_num_steps(const cavtherm_run* run, size_t* n);

/* Copy a named series of an executed run into buf (capacity cap doubles);
 * *written receives the element count. Names: t_ns, re_u, im_u, re_y,
 * im_y, v, v_dot, omega_r, gamma, gamma_tilde, re_fr, im_fr, E_r, P_w_e,
 * P_w_d, I_h_D, I_h_F, I_h, balance_residual, flag. */
int cavtherm_run_series(const cavtherm_run* run, const char* name,
                        double* buf, size_t cap, size_t* written);

/* Parameter sweep over values of param (Omega, omega_s_ratio, T0,
 * omega_d, f_m), one subdirectory per point plus index.json.
 * threads = 0 picks the hardware concurrency. */
int cavtherm_sweep(const char* config_json, const char* preset,
                   const char* param, const double* values, size_t n_values,
                   const char* out_dir, unsigned threads);

/* Discrete-bath cross-validation of a preset/scenario at `modes` modes
 * (and a refinement at 2x modes). Deviations are returned through the
 * optional out parameters; a report is written when out_dir is non-NULL. */
int cavtherm_oracle(const char* config_json, const char* preset,
                    unsigned modes, const char* out_dir,
                    double* max_du, double* max_dv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CAVTHERM_H */
