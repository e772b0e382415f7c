#include "rypanel/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "rypanel/errors.hpp"
#include "rypanel/rybczynski.hpp"

namespace rypanel {

namespace {

std::string trim(const std::string& text) {
    size_t first = text.find_first_not_of(" \t\r");
    size_t last = text.find_last_not_of(" \t\r");
    if (first == std::string::npos) return {};
    return text.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> items;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (!item.empty()) items.push_back(item);
    }
    return items;
}

double parse_double(const std::string& key, const std::string& value) {
    const char* first = value.data();
    const char* last = first + value.size();
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        fail(ErrorCode::ConfigError, "'" + key + "' expects a number, got '" + value + "'");
    return out;
}

long long parse_int(const std::string& key, const std::string& value) {
    const char* first = value.data();
    const char* last = first + value.size();
    long long out = 0;
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last)
        fail(ErrorCode::ConfigError, "'" + key + "' expects an integer, got '" + value + "'");
    return out;
}

} // namespace

Effects parse_effects(const std::string& text) {
    if (text == "auto") return Effects::Auto;
    if (text == "fe" || text == "fixed" || text == "fixed_dummies") return Effects::FixedDummies;
    if (text == "within" || text == "fixed_within") return Effects::FixedWithin;
    if (text == "re" || text == "random") return Effects::Random;
    if (text == "pooled") return Effects::Pooled;
    fail(ErrorCode::ConfigError, "unknown effects mode '" + text + "' (auto|fe|re|pooled|within)");
}

ZeroPolicy parse_zero_policy(const std::string& text) {
    if (text == "error") return ZeroPolicy::Error;
    if (text == "drop") return ZeroPolicy::Drop;
    fail(ErrorCode::ConfigError, "unknown zero policy '" + text + "' (error|drop)");
}

OutputFormat parse_output_format(const std::string& text) {
    if (text == "text") return OutputFormat::Text;
    if (text == "csv") return OutputFormat::Csv;
    if (text == "json") return OutputFormat::Json;
    fail(ErrorCode::ConfigError, "unknown output format '" + text + "' (text|csv|json)");
}

McHarness parse_mc_preset(const std::string& text) {
    if (text == "hausman-size") return McHarness::HausmanSize;
    if (text == "hausman-power") return McHarness::HausmanPower;
    if (text == "estimator-recovery") return McHarness::EstimatorRecovery;
    fail(ErrorCode::ConfigError,
         "unknown preset '" + text + "' (hausman-size|hausman-power|estimator-recovery)");
}

EventDummy parse_event_dummy(const std::string& text) {
    const size_t colon = text.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 >= text.size())
        fail(ErrorCode::ConfigError, "event dummy must be Name:year, got '" + text + "'");
    EventDummy dummy;
    dummy.name = text.substr(0, colon);
    dummy.from_year = static_cast<int>(parse_int("dummy", text.substr(colon + 1)));
    return dummy;
}

bool apply_config_key(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "data") config.data_path = value;
    else if (key == "out") config.out_path = value;
    else if (key == "study") config.study = value;
    else if (key == "dependent") config.dependent = value;
    else if (key == "regressors") config.regressors = split_list(value);
    else if (key == "dummies") {
        config.event_dummies.clear();
        for (const auto& item : split_list(value)) config.event_dummies.push_back(parse_event_dummy(item));
    }
    else if (key == "effects") config.effects = parse_effects(value);
    else if (key == "alpha") config.alpha = parse_double(key, value);
    else if (key == "zero_policy") config.zero_policy = parse_zero_policy(value);
    else if (key == "format") config.format = parse_output_format(value);
    else if (key == "seed") config.seed = static_cast<std::uint64_t>(parse_int(key, value));
    else if (key == "preset") config.preset = value;
    else if (key == "reps") config.reps = static_cast<int>(parse_int(key, value));
    else if (key == "labor_variable") config.labor_variable = value;
    else if (key == "dgp.entities") config.dgp.entities = static_cast<int>(parse_int(key, value));
    else if (key == "dgp.periods") config.dgp.periods = static_cast<int>(parse_int(key, value));
    else if (key == "dgp.beta") {
        config.dgp.beta.clear();
        for (const auto& item : split_list(value)) config.dgp.beta.push_back(parse_double(key, item));
    }
    else if (key == "dgp.intercept") config.dgp.intercept = parse_double(key, value);
    else if (key == "dgp.sigma2_u") config.dgp.sigma2_u = parse_double(key, value);
    else if (key == "dgp.sigma2_e") config.dgp.sigma2_e = parse_double(key, value);
    else if (key == "dgp.process") {
        if (value == "iid") config.dgp.regressor_process = RegressorProcess::IIDLogNormal;
        else if (value == "random_walk") config.dgp.regressor_process = RegressorProcess::RandomWalkLevels;
        else fail(ErrorCode::ConfigError, "unknown dgp.process '" + value + "' (iid|random_walk)");
    }
    else if (key == "dgp.correlated_effects") {
        if (value == "true") config.dgp.effects_correlated_with_x = true;
        else if (value == "false") config.dgp.effects_correlated_with_x = false;
        else fail(ErrorCode::ConfigError, "dgp.correlated_effects expects true or false");
    }
    else if (key == "dgp.effect_correlation") config.dgp.effect_x_correlation = parse_double(key, value);
    else return false;
    return true;
}

void apply_config_file(RunConfig& config, const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::ConfigError, "cannot open config file '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ConfigError,
                 "config line " + std::to_string(line_no) + " is not key = value: '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!apply_config_key(config, key, value))
            fail(ErrorCode::ConfigError, "unknown config key '" + key + "' (line " +
                                             std::to_string(line_no) + ")");
    }
}

ModelSpec RunConfig::to_model_spec() const {
    ModelSpec spec;
    spec.dependent = dependent.value_or("");
    spec.regressors = regressors;
    spec.event_dummies = event_dummies;
    spec.effects = effects.value_or(Effects::Auto);
    spec.alpha = alpha;
    spec.validate();
    return spec;
}

void RunConfig::validate_for(Command command) const {
    if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorCode::ConfigError, "alpha must lie in (0,1)");
    switch (command) {
        case Command::Estimate:
            if (data_path.empty()) fail(ErrorCode::ConfigError, "estimate needs --data");
            if (study.has_value())
                fail(ErrorCode::ConfigError, "estimate takes an explicit spec, not a study id");
            if (!dependent || regressors.empty())
                fail(ErrorCode::ConfigError, "estimate needs --dependent and --regressors");
            break;
        case Command::Study: {
            if (data_path.empty()) fail(ErrorCode::ConfigError, "study needs --data");
            if (dependent.has_value() || !regressors.empty())
                fail(ErrorCode::ConfigError, "study and an explicit spec are mutually exclusive");
            if (!study) fail(ErrorCode::ConfigError, "study needs --study <id>");
            if (!parse_study_id(*study)) {
                std::string valid;
                for (const auto& period : study_periods()) {
                    if (!valid.empty()) valid += ", ";
                    valid += period.label;
                }
                fail(ErrorCode::ConfigError, "unknown study '" + *study + "'; valid ids: " + valid);
            }
            break;
        }
        case Command::Simulate:
            if (!preset) fail(ErrorCode::ConfigError, "simulate needs --preset");
            parse_mc_preset(*preset);
            if (reps < 100) fail(ErrorCode::ConfigError, "simulate needs at least 100 reps");
            dgp.validate();
            break;
        case Command::Validate:
            if (data_path.empty()) fail(ErrorCode::ConfigError, "validate needs --data");
            break;
        case Command::Generate:
            if (out_path.empty()) fail(ErrorCode::ConfigError, "generate needs --out");
            break;
    }
}

} // namespace rypanel
