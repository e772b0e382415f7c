#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "rypanel/diagnostics.hpp"
#include "rypanel/synthetic.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace rypanel;
using rypanel::test::chi_square_cdf_oracle;
using rypanel::test::chi_square_sf_oracle;
using rypanel::test::expect_error;

namespace {

std::vector<RowKey> single_entity_index(int n, int first_year = 1980) {
    std::vector<RowKey> index;
    for (int i = 0; i < n; ++i) index.push_back({"A", first_year + i});
    return index;
}

} // namespace

TEST_CASE("durbin_watson analytic fixtures") {
    CHECK(durbin_watson({1.0, -1.0, 1.0, -1.0}, single_entity_index(4)) == doctest::Approx(3.0));
    CHECK(durbin_watson({2.5, 2.5, 2.5}, single_entity_index(3)) == 0.0);
}

TEST_CASE("durbin_watson skips entity boundaries and year gaps") {
    // Two entities whose junction would add a huge jump if pooled naively.
    const Vector residuals{1.0, 1.0, -9.0, -9.0};
    const std::vector<RowKey> index{{"A", 1980}, {"A", 1981}, {"B", 1980}, {"B", 1981}};
    CHECK(durbin_watson(residuals, index) == 0.0);

    // A year gap inside one entity contributes nothing either.
    const Vector gap_resid{1.0, -1.0, 5.0};
    const std::vector<RowKey> gap_index{{"A", 1980}, {"A", 1981}, {"A", 1983}};
    const double expected = 4.0 / (1.0 + 1.0 + 25.0);
    CHECK(durbin_watson(gap_resid, gap_index) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("durbin_watson error paths") {
    expect_error(ErrorCode::DegenerateResiduals,
                 [] { durbin_watson({0.0, 0.0, 0.0}, single_entity_index(3)); });
    const std::vector<RowKey> sparse{{"A", 1980}, {"A", 1985}, {"B", 1990}};
    expect_error(ErrorCode::NotComputable, [&] { durbin_watson({1.0, 2.0, 3.0}, sparse); });
}

TEST_CASE("durbin_watson on white noise centers on 2") {
    Rng rng(2718);
    const int n = 10000;
    Vector residuals(static_cast<size_t>(n));
    for (double& e : residuals) e = rng.normal();
    const double dw = durbin_watson(residuals, single_entity_index(n));
    CHECK(std::abs(dw - 2.0) <= 0.06);
}

TEST_CASE("durbin_watson stays in [0, 4]") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 3 + static_cast<int>(rng.uniform01() * 40);
        Vector residuals(static_cast<size_t>(n));
        bool all_zero = true;
        for (double& e : residuals) {
            e = rng.uniform01() < 0.5 ? rng.normal() : 3.0 * rng.normal();
            all_zero = all_zero && e == 0.0;
        }
        if (all_zero) continue;
        const double dw = durbin_watson(residuals, single_entity_index(n));
        CHECK(dw >= 0.0);
        CHECK(dw <= 4.0);
    }
}

TEST_CASE("chi_square_sf fixtures against the quadrature oracle") {
    CHECK(chi_square_sf(0.0, 1) == 1.0);
    CHECK(chi_square_sf(0.0, 7) == 1.0);

    CHECK(std::abs(chi_square_sf(3.841, 1) - 0.05) <= 5e-4);
    CHECK(std::abs(chi_square_sf(9.488, 4) - 0.05) <= 5e-4);

    for (const auto& [x, df] : {std::pair<double, int>{0.5, 1}, {3.841, 1}, {2.0, 2}, {9.488, 4},
                                {1.0, 5}, {20.0, 10}, {45.0, 30}}) {
        CHECK(std::abs(chi_square_sf(x, df) - chi_square_sf_oracle(x, df)) <= 1e-10);
        CHECK(std::abs(chi_square_sf(x, df) + chi_square_cdf_oracle(x, df) - 1.0) <= 1e-10);
    }

    expect_error(ErrorCode::DomainError, [] { chi_square_sf(-0.1, 1); });
    expect_error(ErrorCode::DomainError, [] { chi_square_sf(1.0, 0); });
}

TEST_CASE("chi_square_sf is strictly decreasing in x") {
    for (int df : {1, 3, 8}) {
        double prev = chi_square_sf(0.0, df);
        for (double x = 0.25; x < 30.0; x += 0.25) {
            const double cur = chi_square_sf(x, df);
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("student_t_two_sided_p matches table values") {
    // Classic two-sided 5% critical points.
    CHECK(std::abs(student_t_two_sided_p(12.706, 1) - 0.05) <= 5e-4);
    CHECK(std::abs(student_t_two_sided_p(2.0639, 24) - 0.05) <= 5e-4);
    CHECK(std::abs(student_t_two_sided_p(1.7109, 24) - 0.10) <= 5e-4);
    CHECK(student_t_two_sided_p(0.0, 10) == doctest::Approx(1.0));

    CHECK(significance_mark(2.1, 24) == Significance::FivePercent);
    CHECK(significance_mark(-2.1, 24) == Significance::FivePercent);
    CHECK(significance_mark(1.8, 24) == Significance::TenPercent);
    CHECK(significance_mark(1.2, 24) == Significance::None);
}

TEST_CASE("hausman_statistic: equal coefficient vectors accept at p = 1") {
    const Vector beta{0.4, -1.2};
    Matrix v_fe(2, 2), v_re(2, 2);
    v_fe(0, 0) = 0.3; v_fe(1, 1) = 0.5; v_fe(0, 1) = v_fe(1, 0) = 0.1;
    v_re(0, 0) = 0.1; v_re(1, 1) = 0.2; v_re(0, 1) = v_re(1, 0) = 0.05;
    const HausmanResult h = hausman_statistic(beta, v_fe, beta, v_re, 0.05);
    CHECK(h.statistic == 0.0);
    CHECK(h.p_value == 1.0);
    CHECK(h.df == 2);
    CHECK(h.decision == HausmanDecision::AcceptRandom);
}

TEST_CASE("hausman_statistic: indefinite difference yields the (c) outcome") {
    const Vector b1{1.0, 2.0};
    const Vector b2{0.5, 2.5};
    Matrix v_fe(2, 2), v_re(2, 2);
    v_fe(0, 0) = 1.0; v_fe(1, 1) = 0.1; // second diagonal smaller than RE's
    v_re(0, 0) = 0.2; v_re(1, 1) = 0.4;
    const HausmanResult h = hausman_statistic(b1, v_fe, b2, v_re, 0.05);
    CHECK(h.decision == HausmanDecision::NotStatisticallyAcceptable);
    CHECK_FALSE(h.detail.empty());
}

TEST_CASE("hausman_statistic decision boundary follows the chi-square tail") {
    const Vector b_fe{1.0};
    const Vector b_re{0.0};
    Matrix v_fe(1, 1), v_re(1, 1);
    v_re(0, 0) = 0.01;
    // difference variance 1/3.841 puts H exactly at the 5% critical point
    v_fe(0, 0) = 0.01 + 1.0 / 3.841;
    const HausmanResult h = hausman_statistic(b_fe, v_fe, b_re, v_re, 0.05);
    CHECK(h.statistic == doctest::Approx(3.841).epsilon(1e-12));
    CHECK(std::abs(h.p_value - 0.05) < 5e-4);

    Matrix tighter = v_fe;
    tighter(0, 0) = 0.01 + 1.0 / 5.0; // H = 5 > 3.841 rejects
    CHECK(hausman_statistic(b_fe, tighter, b_re, v_re, 0.05).decision ==
          HausmanDecision::RejectRandom);
}

TEST_CASE("hausman_statistic is invariant under coefficient reordering") {
    Rng rng(31);
    for (int trial = 0; trial < 30; ++trial) {
        const int k = 3;
        Vector b_fe(k), b_re(k);
        for (int i = 0; i < k; ++i) {
            b_fe[static_cast<size_t>(i)] = rng.normal();
            b_re[static_cast<size_t>(i)] = b_fe[static_cast<size_t>(i)] + 0.1 * rng.normal();
        }
        // Build PD covariances A A' + c I with V_fe strictly larger.
        Matrix a(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) a(i, j) = 0.3 * rng.normal();
        Matrix v_re(k, k), v_fe(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                double s = 0.0;
                for (int p = 0; p < k; ++p) s += a(i, p) * a(j, p);
                v_re(i, j) = s;
                v_fe(i, j) = 1.8 * s;
            }
        for (int i = 0; i < k; ++i) {
            v_re(i, i) += 0.05;
            v_fe(i, i) += 0.15;
        }
        const HausmanResult base = hausman_statistic(b_fe, v_fe, b_re, v_re, 0.05);

        const int perm[3] = {2, 0, 1};
        Vector pb_fe(k), pb_re(k);
        Matrix pv_fe(k, k), pv_re(k, k);
        for (int i = 0; i < k; ++i) {
            pb_fe[static_cast<size_t>(i)] = b_fe[static_cast<size_t>(perm[i])];
            pb_re[static_cast<size_t>(i)] = b_re[static_cast<size_t>(perm[i])];
            for (int j = 0; j < k; ++j) {
                pv_fe(i, j) = v_fe(perm[i], perm[j]);
                pv_re(i, j) = v_re(perm[i], perm[j]);
            }
        }
        const HausmanResult permuted = hausman_statistic(pb_fe, pv_fe, pb_re, pv_re, 0.05);
        CHECK(std::abs(base.statistic - permuted.statistic) <= 1e-10 * std::max(1.0, base.statistic));
        CHECK(base.decision == permuted.decision);
    }
}

TEST_CASE("residual_part fixtures and identity") {
    CHECK(residual_part(0.982) == doctest::Approx(0.018).epsilon(1e-12));
    CHECK(residual_part(1.0) == 0.0);
    CHECK(residual_part(0.822) == doctest::Approx(0.178).epsilon(1e-12));
    for (double v = 0.0; v <= 1.0; v += 0.05)
        CHECK(residual_part(1.0 - v) == doctest::Approx(v).epsilon(1e-12));
    expect_error(ErrorCode::DomainError, [] { residual_part(1.5); });
}

TEST_CASE("sum_elasticities printed-table fixtures") {
    CHECK(std::abs(sum_elasticities({1.121, 0.217, 0.012, -0.064}) - 1.286) <= 0.002);
    CHECK(std::abs(sum_elasticities({0.932, 1.704, -0.196, 0.173}) - 2.613) <= 0.002);
    CHECK(std::abs(sum_elasticities({1.800, 3.558, 2.306, 0.568, 2.198, -3.058, 0.330, 0.407}) -
                   8.109) <= 0.002);
    expect_error(ErrorCode::DomainError, [] { sum_elasticities({}); });
}
