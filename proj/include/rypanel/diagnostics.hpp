#pragma once

#include <string>
#include <vector>

#include "rypanel/linalg.hpp"
#include "rypanel/panel_data.hpp"

namespace rypanel {

enum class HausmanDecision { AcceptRandom, RejectRandom, NotStatisticallyAcceptable };

const char* hausman_decision_name(HausmanDecision d);

struct HausmanResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    HausmanDecision decision = HausmanDecision::NotStatisticallyAcceptable;
    std::string detail; // reason when NotStatisticallyAcceptable

    bool operator==(const HausmanResult&) const = default;
};

/// Panel Durbin-Watson: squared differences are taken only between
/// consecutive years within the same entity. Result lies in [0, 4].
double durbin_watson(const Vector& residuals, const std::vector<RowKey>& row_index);

/// Chi-square survival function via the regularized upper incomplete gamma.
double chi_square_sf(double x, int df);

/// Two-sided p-value of a t statistic with `df` residual degrees of freedom.
double student_t_two_sided_p(double t, int df);

enum class Significance { None, FivePercent, TenPercent };

const char* significance_name(Significance s);

/// Strongest two-sided level reached: 5% beats 10%.
Significance significance_mark(double t, int df);

/// H = d' [V_fe - V_re]^-1 d over the compared coefficients. A difference
/// matrix that is singular or not positive definite yields the
/// NotStatisticallyAcceptable outcome instead of a forced number.
HausmanResult hausman_statistic(const Vector& beta_fe, const Matrix& cov_fe,
                                const Vector& beta_re, const Matrix& cov_re,
                                double alpha);

double residual_part(double r2_adj);

double sum_elasticities(const Vector& regressor_betas);

} // namespace rypanel
