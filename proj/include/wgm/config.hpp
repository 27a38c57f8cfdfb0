#pragma once

// JSON configuration. Rates are given as "/2pi" values in Hz and converted to
// rad/s on ingestion; the missing member of each (Gamma | g) and
// (h | epsilon) pair is filled in by the parameter bridge.
//
//   {
//     "geometry": {"radius_m", "n_eff", "fsr_over_2pi_hz", "resonance_over_2pi_hz"},
//     "rates": {"kappa_in_over_2pi_hz", "kappa_ex_over_2pi_hz", "gamma_over_2pi_hz",
//               "Gamma_over_2pi_hz" | "g_over_2pi_hz", "h_over_2pi_hz" | "epsilon",
//               "omega_qe_over_2pi_hz"},
//     "drive": {"alpha_in"}, "direction", "sigma_z", "bridge_form",
//     "sweep": {"min_over_kappa_tot", "max_over_kappa_tot", "points", "methods", "master_stride"},
//     "truncation": {"n_max_a", "n_max_b"},
//     "compare": {"default_tolerance", "tolerances": {"tm:spt": 1e-2, ...}},
//     "description"
//   }

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wgm/model.hpp"
#include "wgm/sweep.hpp"

namespace wgm {

struct LoadedConfig {
    SystemConfig system;
    SweepSpec sweep;
    CompareOptions compare;
    nlohmann::json source;
    std::vector<std::string> warnings;
};

// Relative tolerance when both members of a bridged pair are supplied.
inline constexpr double kPairConsistencyTolerance = 1e-6;

// Throws ConfigError carrying the offending key path.
LoadedConfig parse_config(const nlohmann::json& document);

// Throws IoError when the file cannot be read and ConfigError when it is not
// valid JSON or fails validation.
LoadedConfig load_config(const std::filesystem::path& path);

// Derived parameters in the units users quote (/2pi Hz where applicable).
nlohmann::json describe(const SystemConfig& config);

}  // namespace wgm
