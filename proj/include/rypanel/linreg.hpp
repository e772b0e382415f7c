#pragma once

#include <string>
#include <vector>

#include "rypanel/linalg.hpp"
#include "rypanel/model_spec.hpp"
#include "rypanel/panel_data.hpp"

namespace rypanel {

enum class DropReason { MissingValue, NonPositive };

struct DroppedRow {
    RowKey key;
    std::string variable;
    DropReason reason = DropReason::MissingValue;
};

/// Assembled regression problem. Column order is deterministic: intercept,
/// entity dummies, event dummies, then regressors in spec order.
struct DesignMatrix {
    Matrix x;
    Vector response;
    std::vector<std::string> column_labels;
    std::vector<RowKey> row_index;
    std::vector<std::string> entities;  // dummy order when entity dummies present
    int intercept_cols = 0;
    int entity_dummy_cols = 0;
    int event_dummy_cols = 0;
    int regressor_cols = 0;
    /// True when the column span contains the constant vector (an intercept
    /// or a full entity-dummy set); selects centered vs uncentered R².
    bool intercept_like = false;
    std::vector<DroppedRow> dropped_rows;

    int rows() const { return x.rows(); }
    int cols() const { return x.cols(); }
    int first_event_dummy_col() const { return intercept_cols + entity_dummy_cols; }
    int first_regressor_col() const { return intercept_cols + entity_dummy_cols + event_dummy_cols; }
};

enum class DesignMode { Intercept, EntityDummies, Bare };

DesignMatrix build_design(const PanelDataset& ds, const ModelSpec& spec, DesignMode mode,
                          ZeroPolicy zero_policy = ZeroPolicy::Error);

/// Mode derived from spec.effects (FixedDummies -> entity dummies,
/// FixedWithin -> bare, everything else -> intercept).
DesignMatrix build_design(const PanelDataset& ds, const ModelSpec& spec);

/// Wraps a raw system for direct solver use (tests, oracles).
DesignMatrix make_design(const Matrix& x, const Vector& y, std::vector<std::string> labels = {},
                         bool intercept_like = false);

struct OlsFit {
    Vector beta;
    Vector se;
    Vector residuals;
    double sigma2 = 0.0;   // SSR / (n - k)
    Matrix cov_beta;       // sigma2 * (X'X)^-1
    double r2 = 0.0;
    double r2_adj = 0.0;
    int n = 0;
    int k = 0;
    std::vector<std::string> column_labels;
};

/// Least squares through Householder QR; X'X is never formed. Rank failures
/// (smallest R diagonal < 1e-10 x largest) name the offending column.
OlsFit least_squares(const DesignMatrix& design);

Vector t_statistics(const OlsFit& fit);

/// 1 - (1 - r2)(n - 1)/(n - k - 1), k counting non-intercept parameters.
double r_squared_adjusted(double r2, int n, int k);

inline constexpr double kRankTolerance = 1e-10;

} // namespace rypanel
