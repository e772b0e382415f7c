#include "rypanel/rybczynski.hpp"

#include <algorithm>

#include "rypanel/errors.hpp"

namespace rypanel {

const std::vector<Industry>& industry_registry() {
    // Table column order. The legend omits IAL; "food industries" follows the
    // food-industry/agriculture pairing discussed alongside the model.
    static const std::vector<Industry> registry{
        {IndustryCode::IMT, "IMT", "metals industries", false},
        {IndustryCode::IMI, "IMI", "industrial mineral", false},
        {IndustryCode::IPQ, "IPQ", "chemicals industries", false},
        {IndustryCode::IEE, "IEE", "equipment and electrical goods industries", false},
        {IndustryCode::IET, "IET", "transport equipment industry", false},
        {IndustryCode::IAL, "IAL", "food industries", true},
        {IndustryCode::ITE, "ITE", "textiles industries", false},
        {IndustryCode::IPA, "IPA", "paper industry", false},
        {IndustryCode::IPD, "IPD", "manufacturing of various products", false},
    };
    return registry;
}

const Industry& industry_info(IndustryCode code) {
    for (const auto& industry : industry_registry())
        if (industry.code == code) return industry;
    fail(ErrorCode::DomainError, "unknown industry code");
}

std::optional<IndustryCode> parse_industry(const std::string& abbrev) {
    for (const auto& industry : industry_registry())
        if (industry.abbrev == abbrev) return industry.code;
    return std::nullopt;
}

const std::vector<StudyPeriod>& study_periods() {
    // The 4-regressor specification serves every window up to 1994; the
    // 1995-1999 window switches to the 8-regressor specification. The
    // 1994/1995 statistical-methodology break is why no window spans it.
    static const std::vector<StudyPeriod> periods{
        {StudyPeriodId::P1980_1985, "1980-1985", 1980, 1985,
         {"Agriculture", "Energy", "Construction"}, {}},
        {StudyPeriodId::P1986_1994, "1986-1994", 1986, 1994,
         {"Agriculture", "Energy", "Construction"}, {}},
        {StudyPeriodId::P1980_1994, "1980-1994", 1980, 1994,
         {"Agriculture", "Energy", "Construction"}, {{"Dummy1986", 1986}}},
        {StudyPeriodId::P1995_1999, "1995-1999", 1995, 1999,
         {"Agriculture", "Florestry", "Extraction1", "Extraction2", "Energy", "Construction",
          "Capital"}, {}},
    };
    return periods;
}

const StudyPeriod& study_period(StudyPeriodId id) {
    for (const auto& period : study_periods())
        if (period.id == id) return period;
    fail(ErrorCode::DomainError, "unknown study period");
}

std::optional<StudyPeriodId> parse_study_id(const std::string& label) {
    for (const auto& period : study_periods())
        if (period.label == label) return period.id;
    return std::nullopt;
}

ModelSpec spec_for_period(StudyPeriodId period_id, IndustryCode industry,
                          const StudyOptions& options) {
    const StudyPeriod& period = study_period(period_id);
    const Industry& info = industry_info(industry);

    ModelSpec spec;
    spec.dependent = "GVA_" + info.abbrev;
    spec.regressors.push_back(options.labor_variable.value_or("Labor_" + info.abbrev));
    for (const auto& resource : period.resource_regressors) spec.regressors.push_back(resource);
    spec.event_dummies = period.event_dummies;
    spec.effects = options.effects;
    spec.alpha = options.alpha;
    spec.log_all = true;
    return spec;
}

bool IndustryOutcome::operator==(const IndustryOutcome& other) const {
    return result == other.result && error_code == other.error_code && error == other.error;
}

const IndustryOutcome* StudyResult::outcome(IndustryCode code) const {
    for (const auto& [industry, outcome] : per_industry)
        if (industry == code) return &outcome;
    return nullptr;
}

bool StudyResult::operator==(const StudyResult& other) const {
    return period == other.period && per_industry == other.per_industry &&
           data_source == other.data_source && n_rows == other.n_rows && events == other.events;
}

StudyResult run_study(const PanelDataset& ds, StudyPeriodId period_id, const StudyOptions& options) {
    const StudyPeriod& period = study_period(period_id);

    StudyResult study;
    study.period = period_id;

    std::optional<PanelDataset> window;
    std::string subset_error_code;
    std::string subset_error;
    try {
        window = subset_period(ds, period.start_year, period.end_year);
        study.n_rows = window->n_rows();
    } catch (const Error& e) {
        subset_error_code = error_code_name(e.code());
        subset_error = e.what();
        study.events.push_back(std::string("period subset failed: ") + e.what());
    }

    for (const auto& industry : industry_registry()) {
        IndustryOutcome outcome;
        if (!window) {
            outcome.error_code = subset_error_code;
            outcome.error = subset_error;
        } else {
            try {
                const ModelSpec spec = spec_for_period(period_id, industry.code, options);
                outcome.result = estimate(*window, spec, options.zero_policy);
                for (const auto& note : outcome.result->notes)
                    study.events.push_back(industry.abbrev + ": " + note);
            } catch (const Error& e) {
                outcome.error_code = error_code_name(e.code());
                outcome.error = e.what();
            }
        }
        study.per_industry.emplace_back(industry.code, std::move(outcome));
    }
    return study;
}

} // namespace rypanel
