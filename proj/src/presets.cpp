#include <map>
#include <string>
#include <vector>

#include "cavtherm/errors.hpp"

namespace cavtherm::detail {

// Paper-figure presets. Frequencies are ordinary frequencies nu (omega =
// 2*pi*nu): Omega = 17.2pi MHz (angular) is Omega_MHz = 8.6, the spin
// line width d = 18.8pi MHz is d_MHz = 9.4, kappa = 0.8pi MHz is 0.4.
namespace {

const std::string kCommonPhysical =
    R"("omega_c_GHz": 2.69, "kappa_MHz": 0.4, "T0_K": 0.1, "q": 1.39, "d_MHz": 9.4)";

std::string undriven(const std::string& name, double omega_mhz, double ratio) {
    return std::string("{\"name\": \"") + name + "\", \"physical\": {" +
           kCommonPhysical + ", \"Omega_MHz\": " + std::to_string(omega_mhz) +
           ", \"omega_s_ratio\": " + std::to_string(ratio) +
           "}, \"drive\": {\"kind\": \"off\"},"
           " \"initial_state\": {\"type\": \"coherent\", \"re\": 10, \"im\": 0},"
           " \"grid\": {\"dt_ns\": 0.25, \"horizon_ns\": 500}}";
}

std::string driven(const std::string& name, double omega_mhz, double ratio,
                   const std::string& omega_d) {
    return std::string("{\"name\": \"") + name + "\", \"physical\": {" +
           kCommonPhysical + ", \"Omega_MHz\": " + std::to_string(omega_mhz) +
           ", \"omega_s_ratio\": " + std::to_string(ratio) +
           "}, \"drive\": {\"kind\": \"tone\", \"f_m_hbar_omega_c\": 0.1, "
           "\"omega_d\": " + omega_d + ", \"t_on_ns\": 0, \"t_s_ns\": 900},"
           " \"initial_state\": {\"type\": \"vacuum\"},"
           " \"grid\": {\"dt_ns\": 0.25, \"horizon_ns\": 1200}}";
}

const std::map<std::string, std::string>& preset_map() {
    static const std::map<std::string, std::string> presets = {
        {"fig2", undriven("fig2", 8.6, 1.0)},
        {"fig3", undriven("fig3", 0.86, 1.0)},
        {"fig4", undriven("fig4", 8.6, 0.998)},
        {"fig5", undriven("fig5", 0.86, 0.998)},
        {"fig6", driven("fig6", 8.6, 0.998, "\"omega_c\"")},
        {"fig7", driven("fig7", 0.86, 0.998, "\"omega_c\"")},
        {"fig8", driven("fig8", 8.6, 0.998, "\"omega_r_steady\"")},
        {"fig9", driven("fig9", 8.6, 1.0, "\"omega_c\"")},
    };
    return presets;
}

} // namespace

const std::string& preset_json(const std::string& name) {
    const auto& m = preset_map();
    const auto it = m.find(name);
    if (it == m.end())
        throw ValidationError("unknown preset '" + name + "'");
    return it->second;
}

std::vector<std::string> preset_name_list() {
    std::vector<std::string> names;
    for (const auto& [k, v] : preset_map())
        names.push_back(k);
    return names;
}

} // namespace cavtherm::detail
