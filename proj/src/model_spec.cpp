#include "rypanel/model_spec.hpp"

#include <set>

#include "rypanel/errors.hpp"

namespace rypanel {

const char* effects_name(Effects e) {
    switch (e) {
        case Effects::Pooled: return "pooled";
        case Effects::FixedDummies: return "fixed_dummies";
        case Effects::FixedWithin: return "fixed_within";
        case Effects::Random: return "random";
        case Effects::Auto: return "auto";
    }
    return "unknown";
}

void ModelSpec::validate() const {
    if (dependent.empty()) fail(ErrorCode::ConfigError, "model spec has no dependent variable");
    if (regressors.empty()) fail(ErrorCode::ConfigError, "model spec has no regressors");
    std::set<std::string> seen;
    for (const auto& name : regressors) {
        if (name == dependent)
            fail(ErrorCode::ConfigError, "dependent variable '" + name + "' also listed as regressor");
        if (!seen.insert(name).second)
            fail(ErrorCode::ConfigError, "regressor '" + name + "' listed more than once");
    }
    std::set<std::string> dummy_names;
    for (const auto& dummy : event_dummies) {
        if (dummy.name.empty()) fail(ErrorCode::ConfigError, "event dummy with empty name");
        if (!dummy_names.insert(dummy.name).second)
            fail(ErrorCode::ConfigError, "event dummy '" + dummy.name + "' listed more than once");
    }
    if (!(alpha > 0.0 && alpha < 1.0))
        fail(ErrorCode::ConfigError, "alpha must lie in (0,1)");
}

} // namespace rypanel
