#include "rypanel/diagnostics.hpp"

#include <cmath>
#include <cstdlib>

#include "rypanel/errors.hpp"
#include "rypanel/linreg.hpp"

namespace rypanel {

namespace {

constexpr double kEps = 1e-15;
constexpr int kMaxIter = 500;

// Regularized lower incomplete gamma P(a, x) by series expansion; valid for
// x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by Lentz continued fraction;
// valid for x >= a + 1.
double gamma_q_continued_fraction(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for the regularized incomplete beta function (modified
// Lentz), used with the symmetry reduction in regularized_beta below.
double beta_continued_fraction(double x, double a, double b) {
    const double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < tiny) d = tiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) break;
    }
    return h;
}

double regularized_beta(double x, double a, double b) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    if (x < (a + 1.0) / (a + b + 2.0))
        return std::exp(ln_front) * beta_continued_fraction(x, a, b) / a;
    return 1.0 - std::exp(ln_front) * beta_continued_fraction(1.0 - x, b, a) / b;
}

} // namespace

const char* hausman_decision_name(HausmanDecision d) {
    switch (d) {
        case HausmanDecision::AcceptRandom: return "accept_random";
        case HausmanDecision::RejectRandom: return "reject_random";
        case HausmanDecision::NotStatisticallyAcceptable: return "not_acceptable";
    }
    return "unknown";
}

double durbin_watson(const Vector& residuals, const std::vector<RowKey>& row_index) {
    if (residuals.empty() || residuals.size() != row_index.size())
        fail(ErrorCode::DomainError, "residuals and row index must align and be nonempty");

    double denom = 0.0;
    for (double e : residuals) denom += e * e;
    if (denom == 0.0) fail(ErrorCode::DegenerateResiduals, "all residuals are zero");

    double numer = 0.0;
    bool any_pair = false;
    for (size_t i = 1; i < residuals.size(); ++i) {
        const bool consecutive = row_index[i].entity == row_index[i - 1].entity &&
                                 row_index[i].year == row_index[i - 1].year + 1;
        if (!consecutive) continue; // entity boundaries and year gaps contribute nothing
        any_pair = true;
        const double d = residuals[i] - residuals[i - 1];
        numer += d * d;
    }
    if (!any_pair)
        fail(ErrorCode::NotComputable, "no consecutive within-entity observation pairs");
    return numer / denom;
}

double chi_square_sf(double x, int df) {
    if (x < 0.0) fail(ErrorCode::DomainError, "chi-square statistic must be nonnegative");
    if (df < 1) fail(ErrorCode::DomainError, "degrees of freedom must be positive");
    if (x == 0.0) return 1.0;
    const double a = 0.5 * df;
    const double hx = 0.5 * x;
    if (hx < a + 1.0) return 1.0 - gamma_p_series(a, hx);
    return gamma_q_continued_fraction(a, hx);
}

double student_t_two_sided_p(double t, int df) {
    if (df < 1) fail(ErrorCode::DomainError, "degrees of freedom must be positive");
    const double v = df;
    // Two-sided tail probability equals I_{v/(v+t^2)}(v/2, 1/2).
    return regularized_beta(v / (v + t * t), 0.5 * v, 0.5);
}

const char* significance_name(Significance s) {
    switch (s) {
        case Significance::None: return "none";
        case Significance::FivePercent: return "5%";
        case Significance::TenPercent: return "10%";
    }
    return "unknown";
}

Significance significance_mark(double t, int df) {
    const double p = student_t_two_sided_p(t, df);
    if (p < 0.05) return Significance::FivePercent;
    if (p < 0.10) return Significance::TenPercent;
    return Significance::None;
}

HausmanResult hausman_statistic(const Vector& beta_fe, const Matrix& cov_fe,
                                const Vector& beta_re, const Matrix& cov_re,
                                double alpha) {
    const int k = static_cast<int>(beta_fe.size());
    if (k == 0 || beta_re.size() != beta_fe.size() || cov_fe.rows() != k || cov_re.rows() != k)
        fail(ErrorCode::SpecMismatch, "coefficient vectors and covariances must share one dimension");

    HausmanResult out;
    out.df = k;

    Vector d(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) d[static_cast<size_t>(i)] = beta_fe[static_cast<size_t>(i)] - beta_re[static_cast<size_t>(i)];

    Matrix diff(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            const double vij = cov_fe(i, j) - cov_re(i, j);
            const double vji = cov_fe(j, i) - cov_re(j, i);
            diff(i, j) = 0.5 * (vij + vji);
        }

    const auto lower = cholesky_lower(diff, kRankTolerance);
    if (!lower) {
        out.decision = HausmanDecision::NotStatisticallyAcceptable;
        out.detail = "covariance difference V_fe - V_re is singular or not positive definite";
        out.statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }
    const Vector solved = cholesky_solve(*lower, d);
    double h = 0.0;
    for (int i = 0; i < k; ++i) h += d[static_cast<size_t>(i)] * solved[static_cast<size_t>(i)];
    if (h < 0.0) { // unreachable with a PD factorization, kept as a contract guard
        out.decision = HausmanDecision::NotStatisticallyAcceptable;
        out.detail = "negative quadratic form";
        return out;
    }
    out.statistic = h;
    out.p_value = chi_square_sf(h, k);
    out.decision = (out.p_value < alpha) ? HausmanDecision::RejectRandom : HausmanDecision::AcceptRandom;
    return out;
}

double residual_part(double r2_adj) {
    if (r2_adj > 1.0 + 1e-12) fail(ErrorCode::DomainError, "adjusted R2 cannot exceed 1");
    return 1.0 - r2_adj;
}

double sum_elasticities(const Vector& regressor_betas) {
    if (regressor_betas.empty()) fail(ErrorCode::DomainError, "no regressor coefficients to sum");
    double s = 0.0;
    for (double b : regressor_betas) s += b;
    return s;
}

} // namespace rypanel
