#include "rypanel/linreg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "rypanel/errors.hpp"

namespace rypanel {

namespace {

// Resolves a model variable to its observation vector. With log_all the
// ln_<name> column is preferred; otherwise the level column is logged on the
// fly (values <= 0 handled per policy, NaN passes through as missing).
struct ResolvedColumn {
    const std::vector<double>* values = nullptr; // when a stored column serves directly
    std::vector<double> computed;                // on-the-fly logs
    std::string source_name;

    double at(size_t r) const { return values ? (*values)[r] : computed[r]; }
};

ResolvedColumn resolve_column(const PanelDataset& ds, const std::string& name, bool log_all,
                              ZeroPolicy zero_policy, std::vector<DroppedRow>& dropped) {
    ResolvedColumn out;
    if (!log_all) {
        if (!ds.has_column(name)) fail(ErrorCode::UnknownVariable, "no column named '" + name + "'");
        out.values = &ds.column(name);
        out.source_name = name;
        return out;
    }
    const std::string log_name = "ln_" + name;
    if (ds.has_column(log_name)) {
        out.values = &ds.column(log_name);
        out.source_name = log_name;
        return out;
    }
    if (!ds.has_column(name))
        fail(ErrorCode::UnknownVariable, "no column named '" + name + "' (or '" + log_name + "')");
    const auto& levels = ds.column(name);
    out.source_name = log_name;
    out.computed.resize(levels.size());
    for (size_t r = 0; r < levels.size(); ++r) {
        const double v = levels[r];
        if (std::isnan(v)) {
            out.computed[r] = v;
        } else if (v <= 0.0) {
            if (zero_policy == ZeroPolicy::Error)
                fail(ErrorCode::NonPositiveValue,
                     "variable '" + name + "' is " + std::to_string(v) + " at (" +
                         ds.row_index[r].entity + ", " + std::to_string(ds.row_index[r].year) + ")");
            out.computed[r] = std::numeric_limits<double>::quiet_NaN();
            dropped.push_back({ds.row_index[r], name, DropReason::NonPositive});
        } else {
            out.computed[r] = std::log(v);
        }
    }
    return out;
}

} // namespace

DesignMatrix build_design(const PanelDataset& ds, const ModelSpec& spec, DesignMode mode,
                          ZeroPolicy zero_policy) {
    spec.validate();

    std::vector<DroppedRow> nonpositive;
    const ResolvedColumn dep = resolve_column(ds, spec.dependent, spec.log_all, zero_policy, nonpositive);
    std::vector<ResolvedColumn> regs;
    regs.reserve(spec.regressors.size());
    for (const auto& name : spec.regressors)
        regs.push_back(resolve_column(ds, name, spec.log_all, zero_policy, nonpositive));

    DesignMatrix design;

    std::set<RowKey> nonpositive_keys;
    for (const auto& row : nonpositive) nonpositive_keys.insert(row.key);

    // Row selection: any NaN in the dependent or a regressor excludes the row.
    // Nonpositive-dropped rows were recorded by resolve_column already.
    std::vector<int> rows;
    for (int r = 0; r < ds.n_rows(); ++r) {
        const RowKey& key = ds.row_index[static_cast<size_t>(r)];
        const bool from_nonpositive = nonpositive_keys.count(key) > 0;
        bool ok = true;
        if (std::isnan(dep.at(static_cast<size_t>(r)))) {
            ok = false;
            if (!from_nonpositive)
                design.dropped_rows.push_back({key, spec.dependent, DropReason::MissingValue});
        }
        for (size_t j = 0; j < regs.size() && ok; ++j) {
            if (std::isnan(regs[j].at(static_cast<size_t>(r)))) {
                ok = false;
                if (!from_nonpositive)
                    design.dropped_rows.push_back({key, spec.regressors[j], DropReason::MissingValue});
            }
        }
        if (ok) rows.push_back(r);
    }
    for (const auto& row : nonpositive) design.dropped_rows.push_back(row);

    const int n = static_cast<int>(rows.size());
    std::set<std::string> entity_set;
    for (int r : rows) entity_set.insert(ds.row_index[static_cast<size_t>(r)].entity);
    design.entities.assign(entity_set.begin(), entity_set.end());

    design.intercept_cols = (mode == DesignMode::Intercept) ? 1 : 0;
    design.entity_dummy_cols = (mode == DesignMode::EntityDummies) ? static_cast<int>(design.entities.size()) : 0;
    design.event_dummy_cols = static_cast<int>(spec.event_dummies.size());
    design.regressor_cols = static_cast<int>(spec.regressors.size());
    const int k = design.intercept_cols + design.entity_dummy_cols + design.event_dummy_cols +
                  design.regressor_cols;
    if (n <= k)
        fail(ErrorCode::InsufficientObservations,
             std::to_string(n) + " usable rows for " + std::to_string(k) + " parameters");

    design.x = Matrix(n, k);
    design.response.resize(static_cast<size_t>(n));
    design.row_index.reserve(static_cast<size_t>(n));

    int c = 0;
    if (design.intercept_cols) {
        design.column_labels.push_back("alpha");
        for (int i = 0; i < n; ++i) design.x(i, c) = 1.0;
        ++c;
    }
    if (design.entity_dummy_cols) {
        for (const auto& entity : design.entities) {
            design.column_labels.push_back("Dummy:" + entity);
            for (int i = 0; i < n; ++i)
                design.x(i, c) = (ds.row_index[static_cast<size_t>(rows[static_cast<size_t>(i)])].entity == entity)
                                     ? 1.0
                                     : 0.0;
            ++c;
        }
    }
    for (const auto& dummy : spec.event_dummies) {
        design.column_labels.push_back(dummy.name);
        for (int i = 0; i < n; ++i)
            design.x(i, c) =
                (ds.row_index[static_cast<size_t>(rows[static_cast<size_t>(i)])].year >= dummy.from_year) ? 1.0
                                                                                                          : 0.0;
        ++c;
    }
    for (size_t j = 0; j < regs.size(); ++j) {
        design.column_labels.push_back(regs[j].source_name);
        for (int i = 0; i < n; ++i)
            design.x(i, c) = regs[j].at(static_cast<size_t>(rows[static_cast<size_t>(i)]));
        ++c;
    }
    for (int i = 0; i < n; ++i) {
        design.response[static_cast<size_t>(i)] = dep.at(static_cast<size_t>(rows[static_cast<size_t>(i)]));
        design.row_index.push_back(ds.row_index[static_cast<size_t>(rows[static_cast<size_t>(i)])]);
    }

    // Constant event-dummy or regressor columns cannot be told apart from an
    // intercept (and demean to zero under fixed effects): report, don't solve.
    for (int col = design.first_event_dummy_col(); col < k; ++col) {
        const double first = design.x(0, col);
        bool constant = true;
        for (int i = 1; i < n && constant; ++i) constant = (design.x(i, col) == first);
        if (constant)
            fail(ErrorCode::DegenerateColumn,
                 "column '" + design.column_labels[static_cast<size_t>(col)] + "' is constant (" +
                     std::to_string(first) + ") over the estimation sample");
    }

    design.intercept_like = design.intercept_cols > 0 || design.entity_dummy_cols > 0;
    return design;
}

DesignMatrix build_design(const PanelDataset& ds, const ModelSpec& spec) {
    DesignMode mode = DesignMode::Intercept;
    if (spec.effects == Effects::FixedDummies) mode = DesignMode::EntityDummies;
    if (spec.effects == Effects::FixedWithin) mode = DesignMode::Bare;
    return build_design(ds, spec, mode);
}

DesignMatrix make_design(const Matrix& x, const Vector& y, std::vector<std::string> labels,
                         bool intercept_like) {
    DesignMatrix design;
    design.x = x;
    design.response = y;
    if (labels.empty())
        for (int c = 0; c < x.cols(); ++c) labels.push_back("x" + std::to_string(c));
    design.column_labels = std::move(labels);
    design.regressor_cols = x.cols();
    design.intercept_like = intercept_like;
    for (int r = 0; r < x.rows(); ++r) design.row_index.push_back({"_", r});
    return design;
}

OlsFit least_squares(const DesignMatrix& design) {
    const int n = design.rows();
    const int k = design.cols();
    if (n <= k)
        fail(ErrorCode::InsufficientObservations,
             std::to_string(n) + " rows for " + std::to_string(k) + " parameters");
    for (int c = 0; c < k; ++c)
        for (int r = 0; r < n; ++r)
            if (!std::isfinite(design.x(r, c)))
                fail(ErrorCode::DomainError, "non-finite value in design column '" +
                                                 design.column_labels[static_cast<size_t>(c)] + "'");

    QrSolution sol = qr_least_squares(design.x, design.response);
    if (sol.min_abs_diag < kRankTolerance * sol.max_abs_diag)
        fail(ErrorCode::RankDeficient,
             "design column '" + design.column_labels[static_cast<size_t>(sol.min_diag_index)] +
                 "' is collinear with the preceding columns");

    OlsFit fit;
    fit.n = n;
    fit.k = k;
    fit.column_labels = design.column_labels;
    fit.beta = sol.beta;

    fit.residuals.resize(static_cast<size_t>(n));
    const Vector fitted = mat_vec(design.x, fit.beta);
    double ssr = 0.0;
    for (int i = 0; i < n; ++i) {
        fit.residuals[static_cast<size_t>(i)] = design.response[static_cast<size_t>(i)] - fitted[static_cast<size_t>(i)];
        ssr += fit.residuals[static_cast<size_t>(i)] * fit.residuals[static_cast<size_t>(i)];
    }
    fit.sigma2 = ssr / (n - k);

    // cov = sigma2 (X'X)^-1 = sigma2 R^-1 R^-T, still inversion-free of X'X.
    const Matrix rinv = invert_upper_triangular(sol.r);
    fit.cov_beta = Matrix(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            double s = 0.0;
            for (int p = std::max(i, j); p < k; ++p) s += rinv(i, p) * rinv(j, p);
            fit.cov_beta(i, j) = fit.sigma2 * s;
            fit.cov_beta(j, i) = fit.cov_beta(i, j);
        }

    fit.se.resize(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j) fit.se[static_cast<size_t>(j)] = std::sqrt(std::max(0.0, fit.cov_beta(j, j)));

    double tss = 0.0;
    if (design.intercept_like) {
        double mean = 0.0;
        for (double v : design.response) mean += v;
        mean /= n;
        for (double v : design.response) tss += (v - mean) * (v - mean);
    } else {
        for (double v : design.response) tss += v * v;
    }
    if (tss > 0.0) {
        fit.r2 = 1.0 - ssr / tss;
    } else {
        fit.r2 = (ssr <= 1e-24) ? 1.0 : 0.0; // constant response edge
    }
    fit.r2 = std::min(fit.r2, 1.0);

    if (design.intercept_like) {
        fit.r2_adj = r_squared_adjusted(fit.r2, n, k - 1);
    } else {
        fit.r2_adj = 1.0 - (1.0 - fit.r2) * static_cast<double>(n) / (n - k);
    }
    return fit;
}

Vector t_statistics(const OlsFit& fit) {
    Vector t(fit.beta.size());
    for (size_t j = 0; j < fit.beta.size(); ++j) {
        if (!(fit.se[j] > 0.0))
            fail(ErrorCode::DegenerateVariance,
                 "zero standard error for coefficient '" + fit.column_labels[j] + "'");
        t[j] = fit.beta[j] / fit.se[j];
    }
    return t;
}

double r_squared_adjusted(double r2, int n, int k) {
    if (k < 1 || n <= k + 1)
        fail(ErrorCode::InsufficientObservations,
             "adjusted R2 needs n > k + 1 (n = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
    if (r2 < -1e-12 || r2 > 1.0 + 1e-12)
        fail(ErrorCode::DomainError, "r2 outside [0, 1]");
    return 1.0 - (1.0 - r2) * (n - 1.0) / (n - k - 1.0);
}

} // namespace rypanel
