#include "cavtherm.h"

#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "cavtherm/scenario.hpp"

using namespace cavtherm;

struct cavtherm_run {
    Scenario scenario;
    bool executed = false;
    RunResult result;
};

namespace {

thread_local std::string g_last_error;

int fail(int code, const char* what) {
    g_last_error = what;
    return code;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return CAVTHERM_OK;
    } catch (const ValidationError& e) {
        return fail(CAVTHERM_ERR_INVALID, e.what());
    } catch (const NumericalError& e) {
        return fail(CAVTHERM_ERR_NUMERICAL, e.what());
    } catch (const std::exception& e) {
        return fail(CAVTHERM_ERR_NUMERICAL, e.what());
    }
}

int copy_series(const std::vector<double>& src, double* buf, size_t cap,
                size_t* written) {
    if (written)
        *written = src.size();
    if (!buf)
        return CAVTHERM_OK;
    if (cap < src.size())
        return fail(CAVTHERM_ERR_INVALID, "cavtherm_run_series: buffer too small");
    std::memcpy(buf, src.data(), src.size() * sizeof(double));
    return CAVTHERM_OK;
}

} // namespace

extern "C" {

const char* cavtherm_error_message(void) { return g_last_error.c_str(); }

const char* cavtherm_version(void) {
    static const std::string v = version_string();
    return v.c_str();
}

const char* cavtherm_preset_names(void) {
    static const std::string names = [] {
        std::string s;
        for (const auto& n : preset_names()) {
            if (!s.empty())
                s += ",";
            s += n;
        }
        return s;
    }();
    return names.c_str();
}

int cavtherm_run_create(const char* config_json, const char* preset,
                        cavtherm_run** out) {
    if (!out)
        return fail(CAVTHERM_ERR_INVALID, "cavtherm_run_create: out is NULL");
    *out = nullptr;
    return guarded([&] {
        const std::string cfg = config_json ? config_json : "";
        const std::string pre = preset ? preset : "";
        auto run = std::make_unique<cavtherm_run>();
        run->scenario = resolve_scenario(config_json ? &cfg : nullptr,
                                         preset ? &pre : nullptr);
        *out = run.release();
    });
}

int cavtherm_run_execute(cavtherm_run* run, const char* out_dir) {
    if (!run)
        return fail(CAVTHERM_ERR_INVALID, "cavtherm_run_execute: run is NULL");
    return guarded([&] {
        run->result = run_scenario(run->scenario);
        run->executed = true;
        if (out_dir)
            write_outputs(run->result, out_dir);
    });
}

void cavtherm_run_destroy(cavtherm_run* run) { delete run; }

int cavtherm_run_num_steps(const cavtherm_run* run, size_t* n) {
    if (!run || !n)
        return fail(CAVTHERM_ERR_INVALID, "cavtherm_run_num_steps: NULL argument");
    if (!run->executed)
        return fail(CAVTHERM_ERR_INVALID, "cavtherm_run_num_steps: run not executed");
    *n = run->result.scenario.grid.n_steps;
    return CAVTHERM_OK;
}

int cavtherm_run_series(const cavtherm_run* run, const char* name, double* buf,
                        size_t cap, size_t* written) {
    if (!run || !name)
        return fail(CAVTHERM_ERR_INVALID, "cavtherm_run_series: NULL argument");
    if (!run->executed)
        return fail(CAVTHERM_ERR_INVALID, "cavtherm_run_series: run not executed");
    const RunResult& r = run->result;
    const std::size_t n = r.scenario.grid.n_steps;
    const std::string key = name;

    std::vector<double> tmp;
    tmp.reserve(n);
    const auto real_of = [&](const ComplexSeries& s) {
        for (const auto& z : s)
            tmp.push_back(z.real());
    };
    const auto imag_of = [&](const ComplexSeries& s) {
        for (const auto& z : s)
            tmp.push_back(z.imag());
    };

    if (key == "t_ns") {
        for (std::size_t i = 0; i < n; ++i)
            tmp.push_back(r.scenario.grid.time(i));
    } else if (key == "re_u") {
        real_of(r.greens.u);
    } else if (key == "im_u") {
        imag_of(r.greens.u);
    } else if (key == "re_y") {
        real_of(r.greens.y);
    } else if (key == "im_y") {
        imag_of(r.greens.y);
    } else if (key == "v") {
        tmp = r.greens.v_diag;
    } else if (key == "v_dot") {
        tmp = r.greens.v_dot;
    } else if (key == "omega_r") {
        tmp = r.coeffs.omega_r;
    } else if (key == "gamma") {
        tmp = r.coeffs.gamma;
    } else if (key == "gamma_tilde") {
        tmp = r.coeffs.gamma_t;
    } else if (key == "re_fr") {
        real_of(r.coeffs.f_r);
    } else if (key == "im_fr") {
        imag_of(r.coeffs.f_r);
    } else if (key == "E_r") {
        tmp = r.thermo.E_r;
    } else if (key == "P_w_e") {
        tmp = r.thermo.P_w_e;
    } else if (key == "P_w_d") {
        tmp = r.thermo.P_w_d;
    } else if (key == "I_h_D") {
        tmp = r.thermo.I_h_D;
    } else if (key == "I_h_F") {
        tmp = r.thermo.I_h_F;
    } else if (key == "I_h") {
        tmp = r.thermo.I_h;
    } else if (key == "balance_residual") {
        tmp = r.thermo.balance_residual;
    } else if (key == "flag") {
        for (auto f : r.coeffs.flag)
            tmp.push_back(static_cast<double>(f));
    } else {
        return fail(CAVTHERM_ERR_INVALID,
                    "cavtherm_run_series: unknown series name");
    }
    return copy_series(tmp, buf, cap, written);
}

int cavtherm_sweep(const char* config_json, const char* preset, const char* param,
                   const double* values, size_t n_values, const char* out_dir,
                   unsigned threads) {
    if (!param || !out_dir || (!values && n_values > 0))
        return fail(CAVTHERM_ERR_INVALID, "cavtherm_sweep: NULL argument");
    return guarded([&] {
        const std::string cfg = config_json ? config_json : "";
        const std::string pre = preset ? preset : "";
        const Scenario base = resolve_scenario(config_json ? &cfg : nullptr,
                                               preset ? &pre : nullptr);
        run_sweep(base, param, std::vector<double>(values, values + n_values),
                  out_dir, threads);
    });
}

int cavtherm_oracle(const char* config_json, const char* preset, unsigned modes,
                    const char* out_dir, double* max_du, double* max_dv) {
    return guarded([&] {
        const std::string cfg = config_json ? config_json : "";
        const std::string pre = preset ? preset : "";
        const Scenario sc = resolve_scenario(config_json ? &cfg : nullptr,
                                             preset ? &pre : nullptr);
        const OracleReport rep =
            run_oracle(sc, modes, out_dir ? std::string(out_dir) : std::string());
        if (max_du)
            *max_du = rep.max_du;
        if (max_dv)
            *max_dv = rep.max_dv;
    });
}

} // extern "C"
