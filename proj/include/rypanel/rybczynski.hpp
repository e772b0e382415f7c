#pragma once

#include <optional>
#include <string>
#include <vector>

#include "rypanel/estimators.hpp"

namespace rypanel {

enum class IndustryCode { IMT, IMI, IPQ, IEE, IET, IAL, ITE, IPA, IPD };

struct Industry {
    IndustryCode code;
    std::string abbrev;
    std::string label;
    bool label_inferred = false; // IAL is absent from the reference legend
};

/// The nine manufacturing industries in table column order (IMT first).
const std::vector<Industry>& industry_registry();

const Industry& industry_info(IndustryCode code);
std::optional<IndustryCode> parse_industry(const std::string& abbrev);

enum class StudyPeriodId { P1980_1985, P1986_1994, P1980_1994, P1995_1999 };

struct StudyPeriod {
    StudyPeriodId id;
    std::string label;     // "1980-1985" etc.
    int start_year = 0;
    int end_year = 0;
    std::vector<std::string> resource_regressors; // region-level variables
    std::vector<EventDummy> event_dummies;
};

const std::vector<StudyPeriod>& study_periods();
const StudyPeriod& study_period(StudyPeriodId id);
std::optional<StudyPeriodId> parse_study_id(const std::string& label);

struct StudyOptions {
    Effects effects = Effects::Auto;
    double alpha = 0.05;
    ZeroPolicy zero_policy = ZeroPolicy::Error;
    /// Override for the labor regressor; by default each industry uses its
    /// own employment series Labor_<code>.
    std::optional<std::string> labor_variable;
};

/// ln GVA_<code> on the period's regressor set, effects Auto, alpha per
/// options. Labor is industry-specific unless overridden.
ModelSpec spec_for_period(StudyPeriodId period, IndustryCode industry,
                          const StudyOptions& options = {});

struct IndustryOutcome {
    std::optional<EstimationResult> result;
    std::string error_code;  // empty on success
    std::string error;

    bool ok() const { return result.has_value(); }
    bool operator==(const IndustryOutcome& other) const;
};

struct StudyResult {
    StudyPeriodId period = StudyPeriodId::P1980_1985;
    std::vector<std::pair<IndustryCode, IndustryOutcome>> per_industry; // registry order
    std::string data_source;
    int n_rows = 0;
    std::vector<std::string> events; // dropped rows, clamps, fallbacks

    const IndustryOutcome* outcome(IndustryCode code) const;
    bool operator==(const StudyResult& other) const;
};

/// Runs all nine industries for one study window. Per-industry failures are
/// recorded without aborting the siblings.
StudyResult run_study(const PanelDataset& ds, StudyPeriodId period,
                      const StudyOptions& options = {});

} // namespace rypanel
