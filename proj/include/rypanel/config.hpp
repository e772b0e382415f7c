#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rypanel/model_spec.hpp"
#include "rypanel/panel_data.hpp"
#include "rypanel/report.hpp"
#include "rypanel/synthetic.hpp"

namespace rypanel {

enum class Command { Estimate, Study, Simulate, Validate, Generate };

/// One resolved run. Populated from a key=value config file first, then CLI
/// flags on top (flags win).
struct RunConfig {
    std::string data_path;
    std::string out_path;                 // empty -> stdout
    std::optional<std::string> study;     // study id, e.g. "1980-1985"
    std::optional<std::string> dependent; // explicit-spec route
    std::vector<std::string> regressors;
    std::vector<EventDummy> event_dummies;
    std::optional<Effects> effects;
    double alpha = 0.05;
    ZeroPolicy zero_policy = ZeroPolicy::Error;
    OutputFormat format = OutputFormat::Text;
    std::uint64_t seed = 1;
    std::optional<std::string> preset;    // simulate harness
    int reps = 1000;
    DgpSpec dgp;
    std::optional<std::string> labor_variable;

    ModelSpec to_model_spec() const; // explicit-spec route only

    /// Throws ConfigError when the config cannot drive the given command
    /// (missing data path, alpha out of range, reps below 100, ...).
    void validate_for(Command command) const;
};

/// Minimal key = value format, one pair per line, '#' comments. Unknown keys
/// are rejected so typos surface instead of silently using defaults.
void apply_config_file(RunConfig& config, const std::string& path);

/// Shared key handling for config files; returns false for unknown keys.
bool apply_config_key(RunConfig& config, const std::string& key, const std::string& value);

Effects parse_effects(const std::string& text);         // throws ConfigError
ZeroPolicy parse_zero_policy(const std::string& text);  // throws ConfigError
OutputFormat parse_output_format(const std::string& text);
McHarness parse_mc_preset(const std::string& text);
EventDummy parse_event_dummy(const std::string& text);  // "Name:year"

} // namespace rypanel
