// Command-line front end for the cavtherm shared library. Talks to the
// C API only. Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cavtherm.h"

namespace {

int report(int rc) {
    if (rc != CAVTHERM_OK)
        std::fprintf(stderr, "error: %s\n", cavtherm_error_message());
    return rc;
}

bool read_file(const std::string& path, std::string& out) {
    std::ifstream is(path, std::ios::binary);
    if (!is)
        return false;
    std::ostringstream ss;
    ss << is.rdbuf();
    out = ss.str();
    return true;
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        try {
            values.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw CLI::ValidationError("--values", "'" + item + "' is not a number");
        }
    }
    return values;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cavtherm: transient quantum heat and work in a driven cavity "
                 "strongly coupled to a spin ensemble"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(cavtherm_version()));

    std::string config_path, preset, out_dir, param, values_csv;
    unsigned threads = 0;
    unsigned modes = 64;

    auto add_source = [&](CLI::App* cmd, bool out_required) {
        cmd->add_option("--config", config_path, "scenario JSON file");
        cmd->add_option("--preset", preset,
                        std::string("preset name (") + cavtherm_preset_names() + ")");
        auto* o = cmd->add_option("--out", out_dir, "output directory");
        if (out_required)
            o->required();
    };

    CLI::App* simulate = app.add_subcommand("simulate", "run one scenario");
    add_source(simulate, true);

    CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
    add_source(sweep, true);
    sweep->add_option("--param", param,
                      "swept parameter: Omega, omega_s_ratio, T0, omega_d, f_m")
        ->required();
    sweep->add_option("--values", values_csv, "comma-separated value list")->required();
    sweep->add_option("--threads", threads, "worker threads (0 = hardware)");

    CLI::App* oracle = app.add_subcommand(
        "oracle", "discrete-bath cross-validation of a scenario");
    add_source(oracle, true);
    oracle->add_option("--modes", modes, "number of bath modes (compared to 2x)");

    CLI11_PARSE(app, argc, argv);

    std::string config_text;
    const char* config_arg = nullptr;
    if (!config_path.empty()) {
        if (!read_file(config_path, config_text)) {
            std::fprintf(stderr, "error: cannot read %s\n", config_path.c_str());
            return CAVTHERM_ERR_INVALID;
        }
        config_arg = config_text.c_str();
    }
    const char* preset_arg = preset.empty() ? nullptr : preset.c_str();
    if (!config_arg && !preset_arg) {
        std::fprintf(stderr, "error: provide --config, --preset, or both\n");
        return CAVTHERM_ERR_INVALID;
    }

    if (simulate->parsed()) {
        cavtherm_run* run = nullptr;
        int rc = cavtherm_run_create(config_arg, preset_arg, &run);
        if (rc == CAVTHERM_OK)
            rc = cavtherm_run_execute(run, out_dir.c_str());
        if (rc == CAVTHERM_OK) {
            size_t n = 0;
            cavtherm_run_num_steps(run, &n);
            std::printf("wrote %s (%zu steps)\n", out_dir.c_str(), n);
        }
        cavtherm_run_destroy(run);
        return report(rc);
    }

    if (sweep->parsed()) {
        std::vector<double> values;
        try {
            values = parse_values(values_csv);
        } catch (const CLI::ValidationError& e) {
            std::fprintf(stderr, "error: %s\n", e.what());
            return CAVTHERM_ERR_INVALID;
        }
        const int rc = cavtherm_sweep(config_arg, preset_arg, param.c_str(),
                                      values.data(), values.size(), out_dir.c_str(),
                                      threads);
        if (rc == CAVTHERM_OK)
            std::printf("wrote %s (%zu points)\n", out_dir.c_str(), values.size());
        return report(rc);
    }

    // oracle
    double max_du = 0.0, max_dv = 0.0;
    const int rc = cavtherm_oracle(config_arg, preset_arg, modes, out_dir.c_str(),
                                   &max_du, &max_dv);
    if (rc == CAVTHERM_OK)
        std::printf("oracle deviation: max|du| = %.3e, max|dv| = %.3e (%s)\n",
                    max_du, max_dv, out_dir.c_str());
    return report(rc);
}
