#include "rypanel/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

#include "rypanel/errors.hpp"

namespace rypanel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using nlohmann::json;

json json_number(double v) {
    if (std::isnan(v)) return nullptr;
    return v;
}

double number_from(const json& j) {
    if (j.is_null()) return kNaN;
    return j.get<double>();
}

std::string star(Significance s) {
    switch (s) {
        case Significance::FivePercent: return "*";
        case Significance::TenPercent: return "**";
        case Significance::None: return "";
    }
    return "";
}

Significance significance_from(const std::string& text) {
    if (text == "5%") return Significance::FivePercent;
    if (text == "10%") return Significance::TenPercent;
    return Significance::None;
}

TermRole role_from(const std::string& text) {
    if (text == "intercept") return TermRole::Intercept;
    if (text == "event_dummy") return TermRole::EventDummy;
    return TermRole::Regressor;
}

const char* role_name(TermRole role) {
    switch (role) {
        case TermRole::Intercept: return "intercept";
        case TermRole::EventDummy: return "event_dummy";
        case TermRole::Regressor: return "regressor";
    }
    return "regressor";
}

Effects effects_from(const std::string& text) {
    if (text == "pooled") return Effects::Pooled;
    if (text == "fixed_dummies") return Effects::FixedDummies;
    if (text == "fixed_within") return Effects::FixedWithin;
    if (text == "random") return Effects::Random;
    return Effects::Auto;
}

HausmanDecision decision_from(const std::string& text) {
    if (text == "accept_random") return HausmanDecision::AcceptRandom;
    if (text == "reject_random") return HausmanDecision::RejectRandom;
    return HausmanDecision::NotStatisticallyAcceptable;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    const int rows = static_cast<int>(j.size());
    const int cols = rows > 0 ? static_cast<int>(j.at(0).size()) : 0;
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = j.at(static_cast<size_t>(r)).at(static_cast<size_t>(c)).get<double>();
    return m;
}

/// Paper-style cell: "1.121* (4.685)"; the t statistic stays in brackets.
std::string coefficient_cell(double beta, double t, Significance sig) {
    std::string cell = format_fixed3(beta) + star(sig);
    if (!std::isnan(t)) cell += " (" + format_fixed3(t) + ")";
    return cell;
}

std::string hausman_cell(const HausmanResult& h) {
    switch (h.decision) {
        case HausmanDecision::AcceptRandom: return format_fixed3(h.statistic) + " (a)";
        case HausmanDecision::RejectRandom: return format_fixed3(h.statistic) + " (b)";
        case HausmanDecision::NotStatisticallyAcceptable: return "(c)";
    }
    return "(c)";
}

const char* effects_marker(Effects e) {
    switch (e) {
        case Effects::FixedDummies: return "(1)";
        case Effects::Random: return "(2)";
        case Effects::Pooled: return "(p)";
        case Effects::FixedWithin: return "(w)";
        case Effects::Auto: return "";
    }
    return "";
}

std::string csv_escape(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

struct TableWriter {
    std::vector<std::vector<std::string>> cells; // [row][col]

    void add_row(std::vector<std::string> row) { cells.push_back(std::move(row)); }

    std::string render() const {
        std::vector<size_t> widths;
        for (const auto& row : cells)
            for (size_t c = 0; c < row.size(); ++c) {
                if (widths.size() <= c) widths.resize(c + 1, 0);
                widths[c] = std::max(widths[c], row[c].size());
            }
        std::ostringstream out;
        for (const auto& row : cells) {
            std::string line;
            for (size_t c = 0; c < row.size(); ++c) {
                std::string cell = row[c];
                cell.resize(widths[c], ' ');
                line += cell;
                if (c + 1 < row.size()) line += "  ";
            }
            while (!line.empty() && line.back() == ' ') line.pop_back();
            out << line << '\n';
        }
        return out.str();
    }
};

json spec_to_json(const ModelSpec& spec) {
    json dummies = json::array();
    for (const auto& d : spec.event_dummies) dummies.push_back({{"name", d.name}, {"from_year", d.from_year}});
    return json{{"dependent", spec.dependent},
                {"regressors", spec.regressors},
                {"event_dummies", std::move(dummies)},
                {"effects", effects_name(spec.effects)},
                {"alpha", spec.alpha},
                {"log_all", spec.log_all}};
}

ModelSpec spec_from_json(const json& j) {
    ModelSpec spec;
    spec.dependent = j.at("dependent").get<std::string>();
    spec.regressors = j.at("regressors").get<std::vector<std::string>>();
    for (const auto& d : j.at("event_dummies"))
        spec.event_dummies.push_back({d.at("name").get<std::string>(), d.at("from_year").get<int>()});
    spec.effects = effects_from(j.at("effects").get<std::string>());
    spec.alpha = j.at("alpha").get<double>();
    spec.log_all = j.at("log_all").get<bool>();
    return spec;
}

json hausman_to_json(const HausmanResult& h) {
    return json{{"statistic", h.statistic},
                {"df", h.df},
                {"p_value", h.p_value},
                {"decision", hausman_decision_name(h.decision)},
                {"detail", h.detail}};
}

HausmanResult hausman_from_json(const json& j) {
    HausmanResult h;
    h.statistic = j.at("statistic").get<double>();
    h.df = j.at("df").get<int>();
    h.p_value = j.at("p_value").get<double>();
    h.decision = decision_from(j.at("decision").get<std::string>());
    h.detail = j.at("detail").get<std::string>();
    return h;
}

} // namespace

std::string format_fixed3(double v) {
    if (std::isnan(v)) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return std::string(buf);
}

std::string format_full(double v) {
    if (std::isnan(v)) return "";
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

json estimation_to_json(const EstimationResult& result) {
    json coefficients = json::array();
    for (const auto& term : result.coefficients)
        coefficients.push_back({{"label", term.label},
                                {"role", role_name(term.role)},
                                {"beta", term.beta},
                                {"se", term.se},
                                {"t", json_number(term.t)},
                                {"significance", significance_name(term.significance)}});
    json dummies = json::array();
    for (const auto& e : result.entity_dummies)
        dummies.push_back({{"entity", e.entity},
                           {"value", e.value},
                           {"se", e.se},
                           {"t", json_number(e.t)}});
    json rows = json::array();
    for (const auto& key : result.row_index) rows.push_back({key.entity, key.year});

    json j{{"spec", spec_to_json(result.spec)},
           {"effects_used", effects_name(result.effects_used)},
           {"coefficients", std::move(coefficients)},
           {"entity_dummies", std::move(dummies)},
           {"r2_adj", result.r2_adj},
           {"residual_part", result.residual_part},
           {"durbin_watson", json_number(result.durbin_watson)},
           {"sum_elasticities", result.sum_elasticities},
           {"n", result.n},
           {"k", result.k},
           {"residual_df", result.residual_df},
           {"sigma2", result.sigma2},
           {"notes", result.notes},
           {"row_index", std::move(rows)},
           {"regressor_labels", result.regressor_labels},
           {"regressor_betas", result.regressor_betas},
           {"regressor_cov", matrix_to_json(result.regressor_cov)}};
    if (result.hausman) j["hausman"] = hausman_to_json(*result.hausman);
    if (result.variance) {
        json theta = json::object();
        for (const auto& [entity, value] : result.variance->theta) theta[entity] = value;
        j["variance"] = json{{"sigma2_e", result.variance->sigma2_e},
                             {"sigma2_u", result.variance->sigma2_u},
                             {"clamped", result.variance->clamped},
                             {"theta", std::move(theta)}};
    }
    return j;
}

EstimationResult estimation_from_json(const json& j) {
    EstimationResult result;
    result.spec = spec_from_json(j.at("spec"));
    result.effects_used = effects_from(j.at("effects_used").get<std::string>());
    for (const auto& c : j.at("coefficients"))
        result.coefficients.push_back({c.at("label").get<std::string>(),
                                       role_from(c.at("role").get<std::string>()),
                                       c.at("beta").get<double>(), c.at("se").get<double>(),
                                       number_from(c.at("t")),
                                       significance_from(c.at("significance").get<std::string>())});
    for (const auto& e : j.at("entity_dummies"))
        result.entity_dummies.push_back({e.at("entity").get<std::string>(),
                                         e.at("value").get<double>(), e.at("se").get<double>(),
                                         number_from(e.at("t"))});
    result.r2_adj = j.at("r2_adj").get<double>();
    result.residual_part = j.at("residual_part").get<double>();
    result.durbin_watson = number_from(j.at("durbin_watson"));
    result.sum_elasticities = j.at("sum_elasticities").get<double>();
    result.n = j.at("n").get<int>();
    result.k = j.at("k").get<int>();
    result.residual_df = j.at("residual_df").get<int>();
    result.sigma2 = j.at("sigma2").get<double>();
    result.notes = j.at("notes").get<std::vector<std::string>>();
    for (const auto& row : j.at("row_index"))
        result.row_index.push_back({row.at(0).get<std::string>(), row.at(1).get<int>()});
    result.regressor_labels = j.at("regressor_labels").get<std::vector<std::string>>();
    result.regressor_betas = j.at("regressor_betas").get<Vector>();
    result.regressor_cov = matrix_from_json(j.at("regressor_cov"));
    if (j.contains("hausman")) result.hausman = hausman_from_json(j.at("hausman"));
    if (j.contains("variance")) {
        VarianceComponents vc;
        vc.sigma2_e = j.at("variance").at("sigma2_e").get<double>();
        vc.sigma2_u = j.at("variance").at("sigma2_u").get<double>();
        vc.clamped = j.at("variance").at("clamped").get<bool>();
        for (const auto& [entity, value] : j.at("variance").at("theta").items())
            vc.theta[entity] = value.get<double>();
        result.variance = std::move(vc);
    }
    return result;
}

json study_to_json(const StudyResult& result) {
    json industries = json::array();
    for (const auto& [code, outcome] : result.per_industry) {
        json entry{{"industry", industry_info(code).abbrev}};
        if (outcome.ok()) {
            entry["status"] = "ok";
            entry["result"] = estimation_to_json(*outcome.result);
        } else {
            entry["status"] = "error";
            entry["error_code"] = outcome.error_code;
            entry["error"] = outcome.error;
        }
        industries.push_back(std::move(entry));
    }
    return json{{"period", study_period(result.period).label},
                {"data_source", result.data_source},
                {"n_rows", result.n_rows},
                {"events", result.events},
                {"industries", std::move(industries)}};
}

StudyResult study_from_json(const json& j) {
    StudyResult result;
    const auto period = parse_study_id(j.at("period").get<std::string>());
    if (!period) fail(ErrorCode::ParseError, "unknown study period in JSON document");
    result.period = *period;
    result.data_source = j.at("data_source").get<std::string>();
    result.n_rows = j.at("n_rows").get<int>();
    result.events = j.at("events").get<std::vector<std::string>>();
    for (const auto& entry : j.at("industries")) {
        const auto code = parse_industry(entry.at("industry").get<std::string>());
        if (!code) fail(ErrorCode::ParseError, "unknown industry in JSON document");
        IndustryOutcome outcome;
        if (entry.at("status").get<std::string>() == "ok") {
            outcome.result = estimation_from_json(entry.at("result"));
        } else {
            outcome.error_code = entry.at("error_code").get<std::string>();
            outcome.error = entry.at("error").get<std::string>();
        }
        result.per_industry.emplace_back(*code, std::move(outcome));
    }
    return result;
}

namespace {

std::string render_estimation_text(const EstimationResult& result) {
    std::ostringstream out;
    out << "Estimation of " << result.spec.dependent << (result.spec.log_all ? " (log-log)" : "") << '\n';
    out << "Effects: " << effects_name(result.effects_used);
    if (result.hausman) {
        out << "  [Hausman ";
        if (result.hausman->decision == HausmanDecision::NotStatisticallyAcceptable)
            out << "(c) " << result.hausman->detail;
        else
            out << format_fixed3(result.hausman->statistic) << ", p = "
                << format_fixed3(result.hausman->p_value) << ", "
                << (result.hausman->decision == HausmanDecision::AcceptRandom ? "(a)" : "(b)");
        out << "]";
    }
    out << '\n';
    out << "Observations: " << result.n << ", parameters: " << result.k
        << ", residual df: " << result.residual_df << "\n\n";

    TableWriter table;
    table.add_row({"term", "coefficient", ""});
    for (const auto& term : result.coefficients)
        table.add_row({term.label, coefficient_cell(term.beta, term.t, term.significance), ""});
    for (size_t i = 0; i < result.entity_dummies.size(); ++i) {
        const auto& e = result.entity_dummies[i];
        const Significance sig =
            std::isnan(e.t) ? Significance::None : significance_mark(e.t, result.residual_df);
        table.add_row({"Dummy" + std::to_string(i + 1) + " [" + e.entity + "]",
                       coefficient_cell(e.value, e.t, sig), ""});
    }
    table.add_row({"Sum of the elasticities", format_fixed3(result.sum_elasticities), ""});
    table.add_row({"R2 adjusted", format_fixed3(result.r2_adj), ""});
    table.add_row({"Residual part", format_fixed3(result.residual_part), ""});
    table.add_row({"Durbin-Watson", format_fixed3(result.durbin_watson), ""});
    if (result.hausman) table.add_row({"Hausman test", hausman_cell(*result.hausman), ""});
    out << table.render();

    if (!result.notes.empty()) {
        out << '\n';
        for (const auto& note : result.notes) out << "note: " << note << '\n';
    }
    out << "\n(*) significant at 5%; (**) significant at 10%; t-statistics in brackets\n";
    return out.str();
}

void estimation_csv_rows(std::ostringstream& out, const std::string& column_id,
                         const EstimationResult& result) {
    auto line = [&](const std::string& row, const std::string& value, const std::string& t,
                    const std::string& sig, const std::string& code, const std::string& detail) {
        out << csv_escape(column_id) << ',' << csv_escape(row) << ',' << value << ',' << t << ','
            << sig << ',' << code << ',' << csv_escape(detail) << '\n';
    };
    line("effects", "", "", "", effects_name(result.effects_used), "");
    for (const auto& term : result.coefficients)
        line(term.label, format_full(term.beta), format_full(term.t),
             significance_name(term.significance), role_name(term.role), "");
    for (size_t i = 0; i < result.entity_dummies.size(); ++i) {
        const auto& e = result.entity_dummies[i];
        line("Dummy" + std::to_string(i + 1), format_full(e.value), format_full(e.t), "",
             "entity_dummy", e.entity);
    }
    line("Sum of the elasticities", format_full(result.sum_elasticities), "", "", "", "");
    line("R2 adjusted", format_full(result.r2_adj), "", "", "", "");
    line("Residual part", format_full(result.residual_part), "", "", "", "");
    line("Durbin-Watson", format_full(result.durbin_watson), "", "", "", "");
    if (result.hausman) {
        const char* code = result.hausman->decision == HausmanDecision::AcceptRandom     ? "a"
                           : result.hausman->decision == HausmanDecision::RejectRandom   ? "b"
                                                                                         : "c";
        line("Hausman test",
             result.hausman->decision == HausmanDecision::NotStatisticallyAcceptable
                 ? ""
                 : format_full(result.hausman->statistic),
             "", "", code, result.hausman->detail);
    }
}

constexpr const char* kCsvHeader = "column,row,value,t_stat,significance,code,detail\n";

std::string render_study_text(const StudyResult& result) {
    const StudyPeriod& period = study_period(result.period);

    std::ostringstream out;
    out << "Results of estimations for the years " << period.label << '\n';
    if (!result.data_source.empty()) out << "Data: " << result.data_source << '\n';
    out << '\n';

    // Row inventory across industries.
    size_t n_entity_dummies = 0;
    size_t n_regressors = 0;
    bool any_alpha = false;
    bool any_hausman = false;
    for (const auto& [code, outcome] : result.per_industry) {
        if (!outcome.ok()) continue;
        n_entity_dummies = std::max(n_entity_dummies, outcome.result->entity_dummies.size());
        n_regressors = std::max(n_regressors, outcome.result->regressor_labels.size());
        any_alpha = any_alpha || outcome.result->find_term("alpha") != nullptr;
        any_hausman = any_hausman || outcome.result->hausman.has_value();
    }
    std::vector<std::string> event_rows;
    for (const auto& dummy : period.event_dummies) event_rows.push_back(dummy.name);

    TableWriter table;
    {
        std::vector<std::string> header{""};
        for (const auto& [code, outcome] : result.per_industry) {
            std::string cell = industry_info(code).abbrev;
            cell += outcome.ok() ? std::string(" ") + effects_marker(outcome.result->effects_used)
                                 : std::string(" (x)");
            header.push_back(std::move(cell));
        }
        table.add_row(std::move(header));
    }

    auto row_cells = [&](const std::string& label,
                         auto&& cell_for) { // cell_for(const EstimationResult&) -> std::string
        std::vector<std::string> row{label};
        for (const auto& [code, outcome] : result.per_industry)
            row.push_back(outcome.ok() ? cell_for(*outcome.result) : std::string("(x)"));
        table.add_row(std::move(row));
    };

    if (any_alpha)
        row_cells("alpha", [](const EstimationResult& r) {
            const Term* term = r.find_term("alpha");
            return term ? coefficient_cell(term->beta, term->t, term->significance) : std::string();
        });
    for (size_t i = 0; i < n_entity_dummies; ++i)
        row_cells("Dummy" + std::to_string(i + 1), [&](const EstimationResult& r) {
            if (i >= r.entity_dummies.size()) return std::string();
            const auto& e = r.entity_dummies[i];
            const Significance sig =
                std::isnan(e.t) ? Significance::None : significance_mark(e.t, r.residual_df);
            return coefficient_cell(e.value, e.t, sig);
        });
    for (const auto& name : event_rows)
        row_cells(name, [&](const EstimationResult& r) {
            const Term* term = r.find_term(name);
            return term ? coefficient_cell(term->beta, term->t, term->significance) : std::string();
        });
    for (size_t j = 0; j < n_regressors; ++j)
        row_cells("beta_" + std::to_string(j + 1), [&](const EstimationResult& r) {
            if (j >= r.regressor_labels.size()) return std::string();
            const Term* term = r.find_term(r.regressor_labels[j]);
            return term ? coefficient_cell(term->beta, term->t, term->significance) : std::string();
        });
    row_cells("Sum of the elasticities",
              [](const EstimationResult& r) { return format_fixed3(r.sum_elasticities); });
    row_cells("R2 adjusted", [](const EstimationResult& r) { return format_fixed3(r.r2_adj); });
    row_cells("Residual part",
              [](const EstimationResult& r) { return format_fixed3(r.residual_part); });
    row_cells("Durbin-Watson",
              [](const EstimationResult& r) { return format_fixed3(r.durbin_watson); });
    if (any_hausman)
        row_cells("Hausman test", [](const EstimationResult& r) {
            return r.hausman ? hausman_cell(*r.hausman) : std::string();
        });
    out << table.render();

    // Regressor legend: shared names printed as-is, per-industry names abbreviated.
    out << '\n';
    for (size_t j = 0; j < n_regressors; ++j) {
        std::set<std::string> labels;
        for (const auto& [code, outcome] : result.per_industry)
            if (outcome.ok() && j < outcome.result->regressor_labels.size())
                labels.insert(outcome.result->regressor_labels[j]);
        out << "beta_" << (j + 1) << ": ";
        if (labels.size() == 1)
            out << *labels.begin();
        else
            out << "industry-specific (" << *labels.begin() << ", ...)";
        out << '\n';
    }
    out << "(1) estimation with entity dummies; (2) estimation with random effects; "
           "(p) pooled; (w) within transform\n";
    out << "(*) significant at 5%; (**) significant at 10%; t-statistics in brackets\n";
    out << "(a) accepted the hypothesis of random effects; (b) rejected the hypothesis of "
           "random effects; (c) amount not statistically acceptable\n";
    bool any_failure = false;
    for (const auto& [code, outcome] : result.per_industry)
        if (!outcome.ok()) {
            if (!any_failure) out << '\n';
            any_failure = true;
            out << "(x) " << industry_info(code).abbrev << ": " << outcome.error << '\n';
        }
    return out.str();
}

std::string render_mc_text(const McSummary& summary) {
    std::ostringstream out;
    out << "Monte-Carlo harness: " << mc_harness_name(summary.harness) << '\n';
    out << "reps: " << summary.reps << " (failed: " << summary.failed_reps
        << ", hausman not computable: " << summary.not_acceptable << ")\n";
    out << "seed: " << summary.seed << '\n';
    if (summary.harness == McHarness::EstimatorRecovery) {
        out << "true beta:";
        for (double b : summary.true_beta) out << ' ' << format_fixed3(b);
        out << "\n\n";
        TableWriter table;
        table.add_row({"estimator", "rmse", "mean beta", "mc se"});
        for (const auto& stats : summary.estimators) {
            std::string means, ses;
            for (size_t j = 0; j < stats.mean_beta.size(); ++j) {
                if (j) means += ", ", ses += ", ";
                means += format_fixed3(stats.mean_beta[j]);
                ses += format_fixed3(stats.mc_se[j]);
            }
            table.add_row({stats.name, format_fixed3(stats.rmse), means, ses});
        }
        out << table.render();
    } else {
        out << "rejection rate at alpha " << format_fixed3(summary.alpha) << ": "
            << format_fixed3(summary.rejection_rate) << " (mc se "
            << format_fixed3(summary.rejection_mc_se) << ")\n";
    }
    return out.str();
}

json mc_to_json(const McSummary& summary) {
    json j{{"harness", mc_harness_name(summary.harness)},
           {"reps", summary.reps},
           {"failed_reps", summary.failed_reps},
           {"not_acceptable", summary.not_acceptable},
           {"alpha", summary.alpha},
           {"seed", summary.seed},
           {"true_beta", summary.true_beta}};
    if (summary.harness == McHarness::EstimatorRecovery) {
        json estimators = json::array();
        for (const auto& stats : summary.estimators)
            estimators.push_back({{"name", stats.name},
                                  {"rmse", stats.rmse},
                                  {"mean_beta", stats.mean_beta},
                                  {"mc_se", stats.mc_se}});
        j["estimators"] = std::move(estimators);
    } else {
        j["rejection_rate"] = summary.rejection_rate;
        j["rejection_mc_se"] = summary.rejection_mc_se;
    }
    return j;
}

} // namespace

std::string render_estimation(const EstimationResult& result, OutputFormat format) {
    switch (format) {
        case OutputFormat::Text: return render_estimation_text(result);
        case OutputFormat::Json: return estimation_to_json(result).dump(2) + "\n";
        case OutputFormat::Csv: {
            std::ostringstream out;
            out << kCsvHeader;
            estimation_csv_rows(out, result.spec.dependent, result);
            return out.str();
        }
    }
    return {};
}

std::string render_study(const StudyResult& result, OutputFormat format) {
    switch (format) {
        case OutputFormat::Text: return render_study_text(result);
        case OutputFormat::Json: return study_to_json(result).dump(2) + "\n";
        case OutputFormat::Csv: {
            std::ostringstream out;
            out << kCsvHeader;
            for (const auto& [code, outcome] : result.per_industry) {
                const std::string id = industry_info(code).abbrev;
                if (outcome.ok()) {
                    estimation_csv_rows(out, id, *outcome.result);
                } else {
                    out << id << ",error,,,," << outcome.error_code << ',' << csv_escape(outcome.error)
                        << '\n';
                }
            }
            return out.str();
        }
    }
    return {};
}

std::string render_mc(const McSummary& summary, OutputFormat format) {
    switch (format) {
        case OutputFormat::Text: return render_mc_text(summary);
        case OutputFormat::Json: return mc_to_json(summary).dump(2) + "\n";
        case OutputFormat::Csv: {
            std::ostringstream out;
            if (summary.harness == McHarness::EstimatorRecovery) {
                out << "estimator,rmse,mean_beta,mc_se\n";
                for (const auto& stats : summary.estimators) {
                    std::string means, ses;
                    for (size_t j = 0; j < stats.mean_beta.size(); ++j) {
                        if (j) means += ";", ses += ";";
                        means += format_full(stats.mean_beta[j]);
                        ses += format_full(stats.mc_se[j]);
                    }
                    out << stats.name << ',' << format_full(stats.rmse) << ',' << means << ',' << ses
                        << '\n';
                }
            } else {
                out << "harness,reps,failed,not_acceptable,rejection_rate,mc_se\n";
                out << mc_harness_name(summary.harness) << ',' << summary.reps << ','
                    << summary.failed_reps << ',' << summary.not_acceptable << ','
                    << format_full(summary.rejection_rate) << ','
                    << format_full(summary.rejection_mc_se) << '\n';
            }
            return out.str();
        }
    }
    return {};
}

std::string render_balance(const BalanceReport& report, OutputFormat format) {
    if (format == OutputFormat::Json) {
        json pairs = json::array();
        for (const auto& key : report.missing_pairs) pairs.push_back({key.entity, key.year});
        json spans = json::object();
        for (const auto& [entity, span] : report.per_entity_span)
            spans[entity] = {{"first_year", span.first_year},
                             {"last_year", span.last_year},
                             {"count", span.count}};
        json j{{"balanced", report.balanced},
               {"missing_pairs", std::move(pairs)},
               {"per_entity_span", std::move(spans)},
               {"missing_cells", report.missing_cells}};
        return j.dump(2) + "\n";
    }
    std::ostringstream out;
    out << "balanced: " << (report.balanced ? "yes" : "no") << '\n';
    if (!report.missing_pairs.empty()) {
        out << "missing pairs (" << report.missing_pairs.size() << "):";
        for (const auto& key : report.missing_pairs) out << " (" << key.entity << ", " << key.year << ")";
        out << '\n';
    }
    for (const auto& [entity, span] : report.per_entity_span)
        out << entity << ": " << span.first_year << "-" << span.last_year << " (" << span.count
            << " rows)\n";
    for (const auto& [variable, count] : report.missing_cells)
        out << "missing cells in " << variable << ": " << count << '\n';
    return out.str();
}

} // namespace rypanel
