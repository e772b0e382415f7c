#include "rypanel/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "rypanel/errors.hpp"

namespace rypanel {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::map<std::string, std::vector<int>> group_by_entity(const std::vector<RowKey>& row_index) {
    std::map<std::string, std::vector<int>> groups;
    for (size_t i = 0; i < row_index.size(); ++i)
        groups[row_index[i].entity].push_back(static_cast<int>(i));
    return groups;
}

bool same_value(double a, double b) {
    if (std::isnan(a) && std::isnan(b)) return true;
    return a == b;
}

double safe_durbin_watson(const Vector& residuals, const std::vector<RowKey>& row_index,
                          std::vector<std::string>& notes) {
    try {
        return durbin_watson(residuals, row_index);
    } catch (const Error& e) {
        notes.push_back(std::string("durbin_watson unavailable: ") + e.what());
        return kNaN;
    }
}

/// Shared result assembly: splits the coefficient vector by column role,
/// attaches significance marks at the model's residual df, and fills the
/// diagnostic rows the study tables print.
EstimationResult assemble_result(const ModelSpec& spec, Effects used, const DesignMatrix& design,
                                 const OlsFit& fit, int residual_df, double r2_adj,
                                 std::vector<std::string> notes) {
    EstimationResult result;
    result.spec = spec;
    result.effects_used = used;
    result.n = fit.n;
    result.k = fit.k;
    result.residual_df = residual_df;
    result.sigma2 = fit.sigma2;
    result.r2_adj = r2_adj;
    result.residual_part = 1.0 - r2_adj;
    result.row_index = design.row_index;
    result.notes = std::move(notes);

    auto term_stats = [&](int col) {
        const double beta = fit.beta[static_cast<size_t>(col)];
        const double se = fit.se[static_cast<size_t>(col)];
        double t = kNaN;
        Significance sig = Significance::None;
        if (se > 0.0) {
            t = beta / se;
            sig = significance_mark(t, residual_df);
        }
        return std::tuple<double, double, double, Significance>(beta, se, t, sig);
    };

    int col = 0;
    for (; col < design.intercept_cols; ++col) {
        auto [beta, se, t, sig] = term_stats(col);
        result.coefficients.push_back({"alpha", TermRole::Intercept, beta, se, t, sig});
    }
    for (int e = 0; e < design.entity_dummy_cols; ++e, ++col) {
        auto [beta, se, t, sig] = term_stats(col);
        (void)sig;
        result.entity_dummies.push_back({design.entities[static_cast<size_t>(e)], beta, se, t});
    }
    for (size_t d = 0; d < spec.event_dummies.size(); ++d, ++col) {
        auto [beta, se, t, sig] = term_stats(col);
        result.coefficients.push_back({spec.event_dummies[d].name, TermRole::EventDummy, beta, se, t, sig});
    }
    for (size_t r = 0; r < spec.regressors.size(); ++r, ++col) {
        auto [beta, se, t, sig] = term_stats(col);
        result.coefficients.push_back({spec.regressors[r], TermRole::Regressor, beta, se, t, sig});
        result.regressor_labels.push_back(spec.regressors[r]);
        result.regressor_betas.push_back(beta);
    }

    const int first_reg = design.first_regressor_col();
    result.regressor_cov = Matrix(design.regressor_cols, design.regressor_cols);
    for (int i = 0; i < design.regressor_cols; ++i)
        for (int j = 0; j < design.regressor_cols; ++j)
            result.regressor_cov(i, j) = fit.cov_beta(first_reg + i, first_reg + j);

    result.sum_elasticities = sum_elasticities(result.regressor_betas);
    result.durbin_watson = safe_durbin_watson(fit.residuals, design.row_index, result.notes);

    if (!design.dropped_rows.empty())
        result.notes.push_back("excluded " + std::to_string(design.dropped_rows.size()) +
                               " observation(s) with missing or nonpositive values");
    return result;
}

void require_entities(const DesignMatrix& design) {
    if (design.entities.size() < 2)
        fail(ErrorCode::PrereqEntities, "panel estimators need at least 2 entities, have " +
                                            std::to_string(design.entities.size()));
}

std::vector<std::string> singleton_warnings(const DesignMatrix& design) {
    std::vector<std::string> notes;
    for (const auto& [entity, rows] : group_by_entity(design.row_index))
        if (rows.size() == 1)
            notes.push_back("SingletonEntity: '" + entity + "' has one observation; its effect absorbs it exactly");
    return notes;
}

/// Within-transform workspace shared by the within estimator and the
/// variance-component builder.
struct WithinCore {
    DesignMatrix raw;        // bare design: event dummies + regressors
    DesignMatrix demeaned;   // same shape, entity means removed
    OlsFit fit;              // solved on demeaned data, df-corrected
    std::map<std::string, std::vector<int>> groups;
    std::map<std::string, double> mean_y;      // entity means of the response
    std::map<std::string, Vector> mean_x;      // entity means of every column
    int residual_df = 0;                       // n - k - |entities|
    double ssr = 0.0;
};

WithinCore within_core(const PanelDataset& ds, const ModelSpec& spec, ZeroPolicy zero_policy) {
    WithinCore core;
    core.raw = build_design(ds, spec, DesignMode::Bare, zero_policy);
    require_entities(core.raw);
    core.groups = group_by_entity(core.raw.row_index);

    const int n = core.raw.rows();
    const int k = core.raw.cols();
    const int n_entities = static_cast<int>(core.groups.size());
    core.residual_df = n - k - n_entities;
    if (core.residual_df <= 0)
        fail(ErrorCode::InsufficientObservations,
             "within estimator needs n > k + entities (n = " + std::to_string(n) +
                 ", k = " + std::to_string(k) + ", entities = " + std::to_string(n_entities) + ")");

    core.demeaned = core.raw;
    for (const auto& [entity, rows] : core.groups) {
        Vector means(static_cast<size_t>(k), 0.0);
        double my = 0.0;
        for (int r : rows) {
            for (int c = 0; c < k; ++c) means[static_cast<size_t>(c)] += core.raw.x(r, c);
            my += core.raw.response[static_cast<size_t>(r)];
        }
        for (double& m : means) m /= static_cast<double>(rows.size());
        my /= static_cast<double>(rows.size());
        core.mean_x[entity] = means;
        core.mean_y[entity] = my;
        for (int r : rows) {
            for (int c = 0; c < k; ++c) core.demeaned.x(r, c) -= means[static_cast<size_t>(c)];
            core.demeaned.response[static_cast<size_t>(r)] -= my;
        }
    }

    // A column wiped out by demeaning is time-invariant: not estimable here.
    for (int c = 0; c < k; ++c) {
        double norm = 0.0;
        for (int r = 0; r < n; ++r) norm = std::max(norm, std::abs(core.demeaned.x(r, c)));
        if (norm < 1e-12)
            fail(ErrorCode::DegenerateColumn,
                 "column '" + core.raw.column_labels[static_cast<size_t>(c)] +
                     "' is time-invariant within entities (demeaned to zero)");
    }

    core.demeaned.intercept_like = false;
    core.fit = least_squares(core.demeaned);
    core.ssr = core.fit.sigma2 * (n - k);

    // Downstream inference counts the absorbed entity means against df.
    const double scale = static_cast<double>(n - k) / core.residual_df;
    core.fit.sigma2 *= scale;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) core.fit.cov_beta(i, j) *= scale;
    for (double& s : core.fit.se) s *= std::sqrt(scale);
    return core;
}

double centered_r2(const Vector& response, double ssr) {
    double mean = 0.0;
    for (double v : response) mean += v;
    mean /= static_cast<double>(response.size());
    double tss = 0.0;
    for (double v : response) tss += (v - mean) * (v - mean);
    if (tss <= 0.0) return ssr <= 1e-24 ? 1.0 : 0.0;
    return std::min(1.0, 1.0 - ssr / tss);
}

} // namespace

const Term* EstimationResult::find_term(const std::string& label) const {
    for (const auto& term : coefficients)
        if (term.label == label) return &term;
    return nullptr;
}

bool EstimationResult::operator==(const EstimationResult& other) const {
    auto vec_eq = [](const Vector& a, const Vector& b) {
        if (a.size() != b.size()) return false;
        for (size_t i = 0; i < a.size(); ++i)
            if (!same_value(a[i], b[i])) return false;
        return true;
    };
    auto term_eq = [](const Term& a, const Term& b) {
        return a.label == b.label && a.role == b.role && same_value(a.beta, b.beta) &&
               same_value(a.se, b.se) && same_value(a.t, b.t) && a.significance == b.significance;
    };
    if (!(spec == other.spec) || effects_used != other.effects_used) return false;
    if (coefficients.size() != other.coefficients.size()) return false;
    for (size_t i = 0; i < coefficients.size(); ++i)
        if (!term_eq(coefficients[i], other.coefficients[i])) return false;
    if (entity_dummies.size() != other.entity_dummies.size()) return false;
    for (size_t i = 0; i < entity_dummies.size(); ++i) {
        const auto& a = entity_dummies[i];
        const auto& b = other.entity_dummies[i];
        if (a.entity != b.entity || !same_value(a.value, b.value) || !same_value(a.se, b.se) ||
            !same_value(a.t, b.t))
            return false;
    }
    return same_value(r2_adj, other.r2_adj) && same_value(residual_part, other.residual_part) &&
           same_value(durbin_watson, other.durbin_watson) &&
           same_value(sum_elasticities, other.sum_elasticities) && hausman == other.hausman &&
           n == other.n && k == other.k && residual_df == other.residual_df &&
           same_value(sigma2, other.sigma2) &&
           variance == other.variance && notes == other.notes && row_index == other.row_index &&
           regressor_labels == other.regressor_labels && vec_eq(regressor_betas, other.regressor_betas) &&
           regressor_cov == other.regressor_cov;
}

EstimationResult pooled_ols(const PanelDataset& ds, const ModelSpec& spec, ZeroPolicy zero_policy) {
    const DesignMatrix design = build_design(ds, spec, DesignMode::Intercept, zero_policy);
    const OlsFit fit = least_squares(design);
    return assemble_result(spec, Effects::Pooled, design, fit, fit.n - fit.k, fit.r2_adj, {});
}

constexpr const char* kOverallR2Note = "r2_adj is the overall adjusted R2, not the within-R2";

EstimationResult fixed_effects_lsdv(const PanelDataset& ds, const ModelSpec& spec,
                                    ZeroPolicy zero_policy) {
    const DesignMatrix design = build_design(ds, spec, DesignMode::EntityDummies, zero_policy);
    require_entities(design);
    const OlsFit fit = least_squares(design);
    std::vector<std::string> notes = singleton_warnings(design);
    notes.push_back(kOverallR2Note);
    return assemble_result(spec, Effects::FixedDummies, design, fit, fit.n - fit.k, fit.r2_adj,
                           std::move(notes));
}

EstimationResult fixed_effects_within(const PanelDataset& ds, const ModelSpec& spec,
                                      ZeroPolicy zero_policy) {
    WithinCore core = within_core(ds, spec, zero_policy);
    const int k = core.raw.cols();
    const int n_entities = static_cast<int>(core.groups.size());

    // Overall fit statistics against the raw response; the demeaned fit's own
    // R2 would be the within-R2, which is not what the tables report.
    const double r2 = centered_r2(core.raw.response, core.ssr);
    const double r2_adj = r_squared_adjusted(r2, core.raw.rows(), n_entities + k - 1);

    std::vector<std::string> notes = singleton_warnings(core.raw);
    notes.push_back(kOverallR2Note);
    EstimationResult result = assemble_result(spec, Effects::FixedWithin, core.raw, core.fit,
                                              core.residual_df, r2_adj, std::move(notes));
    result.k = k + n_entities; // absorbed entity means are parameters too

    // Recovered entity effects: alpha_i = mean_y_i - mean_x_i' beta, with
    // var = sigma2 / T_i + mean_x' cov mean_x.
    for (const auto& [entity, rows] : core.groups) {
        const Vector& mx = core.mean_x[entity];
        double value = core.mean_y[entity];
        for (int c = 0; c < k; ++c) value -= mx[static_cast<size_t>(c)] * core.fit.beta[static_cast<size_t>(c)];
        double var = core.fit.sigma2 / static_cast<double>(rows.size());
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j)
                var += mx[static_cast<size_t>(i)] * core.fit.cov_beta(i, j) * mx[static_cast<size_t>(j)];
        const double se = std::sqrt(std::max(0.0, var));
        result.entity_dummies.push_back({entity, value, se, se > 0.0 ? value / se : kNaN});
    }
    return result;
}

VarianceComponents variance_components(const PanelDataset& ds, const ModelSpec& spec,
                                       ZeroPolicy zero_policy) {
    WithinCore core = within_core(ds, spec, zero_policy);
    const double sigma2_e = core.fit.sigma2;
    if (!(sigma2_e >= 0.0)) fail(ErrorCode::DomainError, "negative within variance");

    const int n_entities = static_cast<int>(core.groups.size());
    const int k_reg = core.raw.regressor_cols;
    if (n_entities <= k_reg + 1)
        fail(ErrorCode::InsufficientObservations,
             "between regression needs more entities than regressors + 1 (entities = " +
                 std::to_string(n_entities) + ", regressors = " + std::to_string(k_reg) + ")");

    // Between regression on entity means: intercept + regressors. Event
    // dummies are left out; their entity means carry no between variation in
    // a balanced panel and would only shadow the intercept.
    Matrix bx(n_entities, k_reg + 1);
    Vector by(static_cast<size_t>(n_entities));
    std::vector<std::string> labels{"alpha"};
    const int first_reg = core.raw.first_regressor_col();
    for (int j = 0; j < k_reg; ++j)
        labels.push_back(core.raw.column_labels[static_cast<size_t>(first_reg + j)]);
    int row = 0;
    for (const auto& [entity, rows] : core.groups) {
        (void)rows;
        bx(row, 0) = 1.0;
        for (int j = 0; j < k_reg; ++j) bx(row, 1 + j) = core.mean_x[entity][static_cast<size_t>(first_reg + j)];
        by[static_cast<size_t>(row)] = core.mean_y[entity];
        ++row;
    }
    const OlsFit between = least_squares(make_design(bx, by, labels, true));
    const double sigma2_between = between.sigma2;

    double harmonic = 0.0;
    for (const auto& [entity, rows] : core.groups) {
        (void)entity;
        harmonic += 1.0 / static_cast<double>(rows.size());
    }
    const double t_bar = n_entities / harmonic;

    VarianceComponents vc;
    vc.sigma2_e = sigma2_e;
    vc.sigma2_u = sigma2_between - sigma2_e / t_bar;
    if (vc.sigma2_u < 0.0) {
        vc.sigma2_u = 0.0;
        vc.clamped = true;
    }
    for (const auto& [entity, rows] : core.groups) {
        const double t_i = static_cast<double>(rows.size());
        vc.theta[entity] = 1.0 - std::sqrt(sigma2_e / (sigma2_e + t_i * vc.sigma2_u));
    }
    return vc;
}

namespace {

EstimationResult random_effects_impl(const PanelDataset& ds, const ModelSpec& spec,
                                     ZeroPolicy zero_policy,
                                     const std::optional<VarianceComponents>& components,
                                     const std::optional<double>& forced_theta) {
    DesignMatrix design = build_design(ds, spec, DesignMode::Intercept, zero_policy);
    require_entities(design);

    std::map<std::string, double> theta;
    if (forced_theta) {
        for (const auto& entity : design.entities) theta[entity] = *forced_theta;
    } else {
        theta = components->theta;
    }

    const auto groups = group_by_entity(design.row_index);
    const int k = design.cols();
    DesignMatrix transformed = design;
    for (const auto& [entity, rows] : groups) {
        auto it = theta.find(entity);
        if (it == theta.end())
            fail(ErrorCode::SpecMismatch, "no quasi-demeaning weight for entity '" + entity + "'");
        const double th = it->second;
        Vector means(static_cast<size_t>(k), 0.0);
        double my = 0.0;
        for (int r : rows) {
            for (int c = 0; c < k; ++c) means[static_cast<size_t>(c)] += design.x(r, c);
            my += design.response[static_cast<size_t>(r)];
        }
        for (double& m : means) m /= static_cast<double>(rows.size());
        my /= static_cast<double>(rows.size());
        for (int r : rows) {
            for (int c = 0; c < k; ++c) transformed.x(r, c) -= th * means[static_cast<size_t>(c)];
            transformed.response[static_cast<size_t>(r)] -= th * my;
        }
    }
    transformed.intercept_like = true;

    const OlsFit fit = least_squares(transformed);
    std::vector<std::string> notes;
    if (components && components->clamped)
        notes.push_back("sigma2_u estimate was negative and clamped to zero");
    if (forced_theta)
        notes.push_back("theta forced to " + std::to_string(*forced_theta) + " (test harness)");
    EstimationResult result =
        assemble_result(spec, Effects::Random, transformed, fit, fit.n - fit.k, fit.r2_adj, notes);
    if (components) result.variance = components;
    return result;
}

} // namespace

EstimationResult random_effects_gls(const PanelDataset& ds, const ModelSpec& spec,
                                    ZeroPolicy zero_policy) {
    const VarianceComponents vc = variance_components(ds, spec, zero_policy);
    return random_effects_impl(ds, spec, zero_policy, vc, std::nullopt);
}

EstimationResult random_effects_gls_forced(const PanelDataset& ds, const ModelSpec& spec,
                                           double forced_theta, ZeroPolicy zero_policy) {
    if (forced_theta < 0.0 || forced_theta >= 1.0)
        fail(ErrorCode::DomainError, "forced theta must lie in [0, 1)");
    return random_effects_impl(ds, spec, zero_policy, std::nullopt, forced_theta);
}

HausmanResult hausman_test(const EstimationResult& fe, const EstimationResult& re, double alpha) {
    if (fe.regressor_labels != re.regressor_labels)
        fail(ErrorCode::SpecMismatch, "estimations compare different regressor sets");
    if (fe.row_index != re.row_index)
        fail(ErrorCode::SpecMismatch, "estimations were run on different observation sets");

    Matrix cov_fe = fe.regressor_cov;
    if (fe.sigma2 > 0.0 && re.sigma2 > 0.0) {
        const double scale = re.sigma2 / fe.sigma2;
        for (int i = 0; i < cov_fe.rows(); ++i)
            for (int j = 0; j < cov_fe.cols(); ++j) cov_fe(i, j) *= scale;
    }
    return hausman_statistic(fe.regressor_betas, cov_fe, re.regressor_betas, re.regressor_cov,
                             alpha);
}

EstimationResult estimate(const PanelDataset& ds, const ModelSpec& spec, ZeroPolicy zero_policy) {
    switch (spec.effects) {
        case Effects::Pooled: return pooled_ols(ds, spec, zero_policy);
        case Effects::FixedDummies: return fixed_effects_lsdv(ds, spec, zero_policy);
        case Effects::FixedWithin: return fixed_effects_within(ds, spec, zero_policy);
        case Effects::Random: return random_effects_gls(ds, spec, zero_policy);
        case Effects::Auto: break;
    }

    EstimationResult fe = fixed_effects_lsdv(ds, spec, zero_policy);
    try {
        EstimationResult re = random_effects_gls(ds, spec, zero_policy);
        const HausmanResult hausman = hausman_test(fe, re, spec.alpha);
        if (hausman.decision == HausmanDecision::AcceptRandom) {
            re.hausman = hausman;
            return re;
        }
        fe.hausman = hausman;
        if (hausman.decision == HausmanDecision::NotStatisticallyAcceptable)
            fe.notes.push_back("Hausman test not computable; kept fixed effects");
        return fe;
    } catch (const Error& e) {
        HausmanResult failed;
        failed.df = static_cast<int>(spec.regressors.size());
        failed.decision = HausmanDecision::NotStatisticallyAcceptable;
        failed.detail = e.what();
        fe.hausman = failed;
        fe.notes.push_back(std::string("random effects unavailable, kept fixed effects: ") + e.what());
        return fe;
    }
}

Vector quasi_demean(const Vector& values, const std::vector<RowKey>& row_index,
                    const std::map<std::string, double>& theta) {
    if (values.size() != row_index.size())
        fail(ErrorCode::DomainError, "values and row index must align");
    Vector out = values;
    for (const auto& [entity, rows] : group_by_entity(row_index)) {
        auto it = theta.find(entity);
        if (it == theta.end())
            fail(ErrorCode::SpecMismatch, "no quasi-demeaning weight for entity '" + entity + "'");
        double mean = 0.0;
        for (int r : rows) mean += values[static_cast<size_t>(r)];
        mean /= static_cast<double>(rows.size());
        for (int r : rows) out[static_cast<size_t>(r)] -= it->second * mean;
    }
    return out;
}

} // namespace rypanel
