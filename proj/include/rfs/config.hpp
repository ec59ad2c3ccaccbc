#pragma once

#include "rfs/filters.hpp"
#include "rfs/metrics.hpp"
#include "rfs/scenario.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rfs {

/// Configuration problems: bad schema, unknown keys, missing required
/// sections. The CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CampaignConfig {
    int runs = 100;
    std::uint64_t base_seed = 0;
    std::vector<SamplerMode> modes = {SamplerMode::herded, SamplerMode::stochastic};
};

struct AppConfig {
    ScenarioConfig scenario;
    FilterConfig filter;
    MetricConfig metrics;
    CampaignConfig campaign;
};

/// Parse a JSON config file. Unknown keys anywhere are errors; every
/// section except scenario.sensors has defaults. Parse failures carry the
/// file path and line number.
AppConfig load_config(const std::string& path);

/// Same schema from an in-memory JSON string (no file context in errors).
AppConfig parse_config_text(const std::string& text);

SamplerMode parse_sampler_mode(const std::string& name);

/// Point both the assignment and birth samplers at the given mode.
void apply_sampler_mode(FilterConfig& filter, SamplerMode mode);

const char* sampler_mode_name(SamplerMode mode);

}  // namespace rfs
