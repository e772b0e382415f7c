#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "rypanel/config.hpp"
#include "rypanel/diagnostics.hpp"
#include "rypanel/estimators.hpp"
#include "rypanel/panel_data.hpp"
#include "rypanel/report.hpp"
#include "rypanel/rybczynski.hpp"
#include "rypanel/synthetic.hpp"

namespace py = pybind11;
using namespace rypanel;

namespace {

std::vector<RowKey> keys_from_tuples(const std::vector<std::pair<std::string, int>>& pairs) {
    std::vector<RowKey> keys;
    keys.reserve(pairs.size());
    for (const auto& [entity, year] : pairs) keys.push_back({entity, year});
    return keys;
}

std::vector<std::pair<std::string, int>> tuples_from_keys(const std::vector<RowKey>& keys) {
    std::vector<std::pair<std::string, int>> pairs;
    pairs.reserve(keys.size());
    for (const auto& key : keys) pairs.emplace_back(key.entity, key.year);
    return pairs;
}

std::vector<std::vector<double>> matrix_rows(const Matrix& m) {
    std::vector<std::vector<double>> rows(static_cast<size_t>(m.rows()));
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) rows[static_cast<size_t>(r)].push_back(m(r, c));
    return rows;
}

StudyPeriodId period_from_label(const std::string& label) {
    const auto id = parse_study_id(label);
    if (!id) fail(ErrorCode::ConfigError, "unknown study id '" + label + "'");
    return *id;
}

OutputFormat format_from_label(const std::string& label) { return parse_output_format(label); }

} // namespace

PYBIND11_MODULE(_rypanel, m) {
    m.doc() = "Panel-data engine for Rybczynski-equation estimation";

    static py::exception<Error> exc(m, "Error");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::set_error(exc, e.what());
        }
    });

    py::class_<PanelDataset>(m, "PanelDataset")
        .def_readonly("entities", &PanelDataset::entities)
        .def_readonly("periods", &PanelDataset::periods)
        .def_readonly("column_names", &PanelDataset::column_names)
        .def_property_readonly("n_rows", &PanelDataset::n_rows)
        .def_property_readonly("row_index",
                               [](const PanelDataset& ds) { return tuples_from_keys(ds.row_index); })
        .def("is_balanced", &PanelDataset::is_balanced)
        .def("has_column", &PanelDataset::has_column)
        .def("column", [](const PanelDataset& ds, const std::string& name) { return ds.column(name); })
        .def("to_csv",
             [](const PanelDataset& ds) {
                 std::ostringstream out;
                 write_panel(ds, out);
                 return out.str();
             })
        .def("__eq__", [](const PanelDataset& a, const PanelDataset& b) { return a == b; })
        .def("__repr__", [](const PanelDataset& ds) {
            return "<PanelDataset " + std::to_string(ds.entities.size()) + " entities x " +
                   std::to_string(ds.periods.size()) + " periods, " + std::to_string(ds.n_rows()) +
                   " rows>";
        });

    py::class_<EntitySpan>(m, "EntitySpan")
        .def_readonly("first_year", &EntitySpan::first_year)
        .def_readonly("last_year", &EntitySpan::last_year)
        .def_readonly("count", &EntitySpan::count);

    py::class_<BalanceReport>(m, "BalanceReport")
        .def_readonly("balanced", &BalanceReport::balanced)
        .def_property_readonly(
            "missing_pairs",
            [](const BalanceReport& r) { return tuples_from_keys(r.missing_pairs); })
        .def_readonly("per_entity_span", &BalanceReport::per_entity_span)
        .def_readonly("missing_cells", &BalanceReport::missing_cells);

    py::class_<CsvSchema>(m, "CsvSchema")
        .def(py::init([](std::string entity, std::string year) {
                 return CsvSchema{std::move(entity), std::move(year)};
             }),
             py::arg("entity_column") = "", py::arg("year_column") = "")
        .def_readwrite("entity_column", &CsvSchema::entity_column)
        .def_readwrite("year_column", &CsvSchema::year_column);

    m.def("load_panel", &load_panel_file, py::arg("path"), py::arg("schema") = CsvSchema{},
          "Load a panel CSV from disk");
    m.def(
        "load_panel_csv",
        [](const std::string& text, const CsvSchema& schema) {
            std::istringstream in(text);
            return load_panel(in, schema);
        },
        py::arg("text"), py::arg("schema") = CsvSchema{}, "Parse a panel CSV from a string");
    m.def("write_panel", &write_panel_file, py::arg("dataset"), py::arg("path"));

    m.def(
        "log_transform",
        [](const PanelDataset& ds, const std::vector<std::string>& variables,
           const std::string& zero_policy) {
            std::vector<RowKey> dropped;
            PanelDataset out = log_transform(ds, variables, parse_zero_policy(zero_policy), &dropped);
            return py::make_tuple(out, tuples_from_keys(dropped));
        },
        py::arg("dataset"), py::arg("variables"), py::arg("zero_policy") = "error",
        "Returns (dataset with ln_<name> columns, dropped (entity, year) pairs)");
    m.def("subset_period", &subset_period, py::arg("dataset"), py::arg("start_year"),
          py::arg("end_year"));
    m.def("balance_check", &balance_check, py::arg("dataset"));

    py::class_<EventDummy>(m, "EventDummy")
        .def(py::init([](std::string name, int from_year) {
                 return EventDummy{std::move(name), from_year};
             }),
             py::arg("name"), py::arg("from_year"))
        .def_readwrite("name", &EventDummy::name)
        .def_readwrite("from_year", &EventDummy::from_year);

    py::class_<ModelSpec>(m, "ModelSpec")
        .def(py::init([](std::string dependent, std::vector<std::string> regressors,
                         std::vector<EventDummy> event_dummies, const std::string& effects,
                         double alpha, bool log_all) {
                 ModelSpec spec;
                 spec.dependent = std::move(dependent);
                 spec.regressors = std::move(regressors);
                 spec.event_dummies = std::move(event_dummies);
                 spec.effects = parse_effects(effects);
                 spec.alpha = alpha;
                 spec.log_all = log_all;
                 spec.validate();
                 return spec;
             }),
             py::arg("dependent"), py::arg("regressors"),
             py::arg("event_dummies") = std::vector<EventDummy>{}, py::arg("effects") = "auto",
             py::arg("alpha") = 0.05, py::arg("log_all") = true)
        .def_readonly("dependent", &ModelSpec::dependent)
        .def_readonly("regressors", &ModelSpec::regressors)
        .def_readonly("event_dummies", &ModelSpec::event_dummies)
        .def_property_readonly("effects",
                               [](const ModelSpec& s) { return std::string(effects_name(s.effects)); })
        .def_readonly("alpha", &ModelSpec::alpha)
        .def_readonly("log_all", &ModelSpec::log_all);

    py::class_<Term>(m, "Term")
        .def_readonly("label", &Term::label)
        .def_property_readonly("role",
                               [](const Term& t) {
                                   switch (t.role) {
                                       case TermRole::Intercept: return "intercept";
                                       case TermRole::EventDummy: return "event_dummy";
                                       case TermRole::Regressor: return "regressor";
                                   }
                                   return "regressor";
                               })
        .def_readonly("beta", &Term::beta)
        .def_readonly("se", &Term::se)
        .def_readonly("t", &Term::t)
        .def_property_readonly(
            "significance",
            [](const Term& t) { return std::string(significance_name(t.significance)); });

    py::class_<EntityEffect>(m, "EntityEffect")
        .def_readonly("entity", &EntityEffect::entity)
        .def_readonly("value", &EntityEffect::value)
        .def_readonly("se", &EntityEffect::se)
        .def_readonly("t", &EntityEffect::t);

    py::class_<HausmanResult>(m, "HausmanResult")
        .def_readonly("statistic", &HausmanResult::statistic)
        .def_readonly("df", &HausmanResult::df)
        .def_readonly("p_value", &HausmanResult::p_value)
        .def_property_readonly(
            "decision",
            [](const HausmanResult& h) { return std::string(hausman_decision_name(h.decision)); })
        .def_readonly("detail", &HausmanResult::detail);

    py::class_<VarianceComponents>(m, "VarianceComponents")
        .def_readonly("sigma2_e", &VarianceComponents::sigma2_e)
        .def_readonly("sigma2_u", &VarianceComponents::sigma2_u)
        .def_readonly("theta", &VarianceComponents::theta)
        .def_readonly("clamped", &VarianceComponents::clamped);

    py::class_<EstimationResult>(m, "EstimationResult")
        .def_readonly("spec", &EstimationResult::spec)
        .def_property_readonly(
            "effects_used",
            [](const EstimationResult& r) { return std::string(effects_name(r.effects_used)); })
        .def_readonly("coefficients", &EstimationResult::coefficients)
        .def_readonly("entity_dummies", &EstimationResult::entity_dummies)
        .def_readonly("r2_adj", &EstimationResult::r2_adj)
        .def_readonly("residual_part", &EstimationResult::residual_part)
        .def_readonly("durbin_watson", &EstimationResult::durbin_watson)
        .def_readonly("sum_elasticities", &EstimationResult::sum_elasticities)
        .def_readonly("hausman", &EstimationResult::hausman)
        .def_readonly("n", &EstimationResult::n)
        .def_readonly("k", &EstimationResult::k)
        .def_readonly("residual_df", &EstimationResult::residual_df)
        .def_readonly("sigma2", &EstimationResult::sigma2)
        .def_readonly("variance", &EstimationResult::variance)
        .def_readonly("notes", &EstimationResult::notes)
        .def_readonly("regressor_labels", &EstimationResult::regressor_labels)
        .def_readonly("regressor_betas", &EstimationResult::regressor_betas)
        .def_property_readonly(
            "regressor_cov",
            [](const EstimationResult& r) { return matrix_rows(r.regressor_cov); })
        .def("to_json",
             [](const EstimationResult& r) { return estimation_to_json(r).dump(); });

    auto zero = [](const std::string& text) { return parse_zero_policy(text); };
    m.def(
        "pooled_ols",
        [zero](const PanelDataset& ds, const ModelSpec& spec, const std::string& zp) {
            return pooled_ols(ds, spec, zero(zp));
        },
        py::arg("dataset"), py::arg("spec"), py::arg("zero_policy") = "error");
    m.def(
        "fixed_effects_lsdv",
        [zero](const PanelDataset& ds, const ModelSpec& spec, const std::string& zp) {
            return fixed_effects_lsdv(ds, spec, zero(zp));
        },
        py::arg("dataset"), py::arg("spec"), py::arg("zero_policy") = "error");
    m.def(
        "fixed_effects_within",
        [zero](const PanelDataset& ds, const ModelSpec& spec, const std::string& zp) {
            return fixed_effects_within(ds, spec, zero(zp));
        },
        py::arg("dataset"), py::arg("spec"), py::arg("zero_policy") = "error");
    m.def(
        "variance_components",
        [zero](const PanelDataset& ds, const ModelSpec& spec, const std::string& zp) {
            return variance_components(ds, spec, zero(zp));
        },
        py::arg("dataset"), py::arg("spec"), py::arg("zero_policy") = "error");
    m.def(
        "random_effects_gls",
        [zero](const PanelDataset& ds, const ModelSpec& spec, const std::string& zp) {
            return random_effects_gls(ds, spec, zero(zp));
        },
        py::arg("dataset"), py::arg("spec"), py::arg("zero_policy") = "error");
    m.def(
        "random_effects_gls_forced",
        [zero](const PanelDataset& ds, const ModelSpec& spec, double theta, const std::string& zp) {
            return random_effects_gls_forced(ds, spec, theta, zero(zp));
        },
        py::arg("dataset"), py::arg("spec"), py::arg("theta"), py::arg("zero_policy") = "error");
    m.def(
        "estimate",
        [zero](const PanelDataset& ds, const ModelSpec& spec, const std::string& zp) {
            return estimate(ds, spec, zero(zp));
        },
        py::arg("dataset"), py::arg("spec"), py::arg("zero_policy") = "error");
    m.def("hausman_test", &hausman_test, py::arg("fe"), py::arg("re"), py::arg("alpha") = 0.05);

    m.def("chi_square_sf", &chi_square_sf, py::arg("x"), py::arg("df"));
    m.def("student_t_two_sided_p", &student_t_two_sided_p, py::arg("t"), py::arg("df"));
    m.def("residual_part", &residual_part, py::arg("r2_adj"));
    m.def("sum_elasticities", &sum_elasticities, py::arg("regressor_betas"));
    m.def(
        "durbin_watson",
        [](const Vector& residuals, const std::vector<std::pair<std::string, int>>& index) {
            return durbin_watson(residuals, keys_from_tuples(index));
        },
        py::arg("residuals"), py::arg("row_index"),
        "Panel Durbin-Watson over (entity, year) tuples");

    py::class_<Industry>(m, "Industry")
        .def_readonly("abbrev", &Industry::abbrev)
        .def_readonly("label", &Industry::label)
        .def_readonly("label_inferred", &Industry::label_inferred);
    m.def("industry_registry", [] { return industry_registry(); });

    m.def(
        "spec_for_period",
        [](const std::string& period, const std::string& industry, double alpha,
           const std::optional<std::string>& labor_variable) {
            const auto code = parse_industry(industry);
            if (!code) fail(ErrorCode::ConfigError, "unknown industry '" + industry + "'");
            StudyOptions options;
            options.alpha = alpha;
            options.labor_variable = labor_variable;
            return spec_for_period(period_from_label(period), *code, options);
        },
        py::arg("period"), py::arg("industry"), py::arg("alpha") = 0.05,
        py::arg("labor_variable") = std::nullopt);

    py::class_<IndustryOutcome>(m, "IndustryOutcome")
        .def_property_readonly("ok", &IndustryOutcome::ok)
        .def_readonly("result", &IndustryOutcome::result)
        .def_readonly("error_code", &IndustryOutcome::error_code)
        .def_readonly("error", &IndustryOutcome::error);

    py::class_<StudyResult>(m, "StudyResult")
        .def_property_readonly(
            "period", [](const StudyResult& s) { return study_period(s.period).label; })
        .def_readonly("data_source", &StudyResult::data_source)
        .def_readonly("n_rows", &StudyResult::n_rows)
        .def_readonly("events", &StudyResult::events)
        .def_property_readonly("industries",
                               [](const StudyResult& s) {
                                   std::vector<std::pair<std::string, IndustryOutcome>> out;
                                   for (const auto& [code, outcome] : s.per_industry)
                                       out.emplace_back(industry_info(code).abbrev, outcome);
                                   return out;
                               })
        .def("__eq__", [](const StudyResult& a, const StudyResult& b) { return a == b; });

    m.def(
        "run_study",
        [zero](const PanelDataset& ds, const std::string& period, const std::string& effects,
               double alpha, const std::string& zp,
               const std::optional<std::string>& labor_variable) {
            StudyOptions options;
            options.effects = parse_effects(effects);
            options.alpha = alpha;
            options.zero_policy = zero(zp);
            options.labor_variable = labor_variable;
            return run_study(ds, period_from_label(period), options);
        },
        py::arg("dataset"), py::arg("period"), py::arg("effects") = "auto", py::arg("alpha") = 0.05,
        py::arg("zero_policy") = "error", py::arg("labor_variable") = std::nullopt);

    m.def(
        "render_study",
        [](const StudyResult& result, const std::string& format) {
            return render_study(result, format_from_label(format));
        },
        py::arg("result"), py::arg("format") = "text");
    m.def(
        "render_estimation",
        [](const EstimationResult& result, const std::string& format) {
            return render_estimation(result, format_from_label(format));
        },
        py::arg("result"), py::arg("format") = "text");
    m.def("study_to_json", [](const StudyResult& s) { return study_to_json(s).dump(); });
    m.def("study_from_json",
          [](const std::string& text) { return study_from_json(nlohmann::json::parse(text)); });

    py::class_<DgpSpec>(m, "DgpSpec")
        .def(py::init([](int entities, int periods, Vector beta, double intercept,
                         Vector fixed_intercepts, double sigma2_u, double sigma2_e,
                         const std::string& process, double x_between_sd, bool correlated,
                         double correlation, std::uint64_t seed) {
                 DgpSpec dgp;
                 dgp.entities = entities;
                 dgp.periods = periods;
                 dgp.beta = std::move(beta);
                 dgp.intercept = intercept;
                 dgp.fixed_intercepts = std::move(fixed_intercepts);
                 dgp.sigma2_u = sigma2_u;
                 dgp.sigma2_e = sigma2_e;
                 if (process == "iid") dgp.regressor_process = RegressorProcess::IIDLogNormal;
                 else if (process == "random_walk")
                     dgp.regressor_process = RegressorProcess::RandomWalkLevels;
                 else fail(ErrorCode::ConfigError, "process must be iid or random_walk");
                 dgp.x_between_sd = x_between_sd;
                 dgp.effects_correlated_with_x = correlated;
                 dgp.effect_x_correlation = correlation;
                 dgp.seed = seed;
                 dgp.validate();
                 return dgp;
             }),
             py::arg("entities") = 30, py::arg("periods") = 10, py::arg("beta") = Vector{1.0},
             py::arg("intercept") = 1.0, py::arg("fixed_intercepts") = Vector{},
             py::arg("sigma2_u") = 1.0, py::arg("sigma2_e") = 1.0, py::arg("process") = "iid",
             py::arg("x_between_sd") = 2.0, py::arg("effects_correlated_with_x") = false,
             py::arg("effect_x_correlation") = 0.7, py::arg("seed") = 1)
        .def_readonly("entities", &DgpSpec::entities)
        .def_readonly("periods", &DgpSpec::periods)
        .def_readonly("beta", &DgpSpec::beta)
        .def_readonly("seed", &DgpSpec::seed);

    py::class_<EstimatorStats>(m, "EstimatorStats")
        .def_readonly("name", &EstimatorStats::name)
        .def_readonly("mean_beta", &EstimatorStats::mean_beta)
        .def_readonly("mc_se", &EstimatorStats::mc_se)
        .def_readonly("rmse", &EstimatorStats::rmse);

    py::class_<McSummary>(m, "McSummary")
        .def_property_readonly(
            "harness", [](const McSummary& s) { return std::string(mc_harness_name(s.harness)); })
        .def_readonly("reps", &McSummary::reps)
        .def_readonly("failed_reps", &McSummary::failed_reps)
        .def_readonly("not_acceptable", &McSummary::not_acceptable)
        .def_readonly("alpha", &McSummary::alpha)
        .def_readonly("rejection_rate", &McSummary::rejection_rate)
        .def_readonly("rejection_mc_se", &McSummary::rejection_mc_se)
        .def_readonly("true_beta", &McSummary::true_beta)
        .def_readonly("estimators", &McSummary::estimators);

    m.def("generate_panel", &generate_panel, py::arg("dgp"));
    m.def("generate_study_panel", &generate_study_panel, py::arg("seed") = 1);
    m.def(
        "monte_carlo",
        [](const std::string& harness, const DgpSpec& dgp, int reps) {
            return monte_carlo(parse_mc_preset(harness), dgp, reps);
        },
        py::arg("harness"), py::arg("dgp"), py::arg("reps"));
    m.def(
        "render_mc",
        [](const McSummary& summary, const std::string& format) {
            return render_mc(summary, format_from_label(format));
        },
        py::arg("summary"), py::arg("format") = "text");
}
