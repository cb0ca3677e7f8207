#pragma once

#include "mpox/model.hpp"
#include "mpox/optimal_control.hpp"

#include <stdexcept>
#include <string>

namespace mpox {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Everything a run can read from a config file: model rates, the initial
/// state, effort weights, and sweep settings. Defaults are the simulation
/// values baked into ModelParams plus the standard initial densities.
struct RunConfig {
    ModelParams params;
    State x0{0.8, 0.1, 0.1, 0.0, 0.0, 0.8, 0.15, 0.05};
    Weights weights;
    std::size_t max_iters = 200;
    double tolerance = 1e-4;
    double relaxation = 0.5;
};

/// Parse flat `key = value` text. Blank lines and lines starting with `#`
/// or `;` are skipped; unknown keys raise ConfigError; a repeated key keeps
/// the last value.
RunConfig parse_config(const std::string& text);

/// Load and parse a config file; a missing or unreadable file raises
/// ConfigError.
RunConfig load_config(const std::string& path);

} // namespace mpox
