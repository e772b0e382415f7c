// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. The CLI path comes in as argv[1] (ctest wires it up) or the
// RYPANEL_CLI environment variable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

#include "rypanel/diagnostics.hpp"
#include "rypanel/estimators.hpp"
#include "rypanel/linreg.hpp"
#include "rypanel/panel_data.hpp"
#include "rypanel/rybczynski.hpp"
#include "rypanel/synthetic.hpp"
#include "oracles.hpp"

using namespace rypanel;

namespace {

int g_failures = 0;

class Criterion {
public:
    Criterion(int number, std::string label)
        : number_(number), label_(std::move(label)), start_(std::chrono::steady_clock::now()) {}

    void check(bool ok, const std::string& detail) {
        if (!ok && failure_.empty()) failure_ = detail;
        ok_ = ok_ && ok;
    }

    ~Criterion() {
        const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - start_)
                                 .count();
        std::printf("[%s] %d. %s (%lld ms)%s%s\n", ok_ ? "PASS" : "FAIL", number_, label_.c_str(),
                    static_cast<long long>(elapsed), failure_.empty() ? "" : " -- ",
                    failure_.c_str());
        std::fflush(stdout);
        if (!ok_) ++g_failures;
    }

private:
    int number_;
    std::string label_;
    std::chrono::steady_clock::time_point start_;
    bool ok_ = true;
    std::string failure_;
};

struct TableColumn {
    const char* table;
    const char* industry;
    std::vector<double> betas;
    double printed_sum;
    double printed_r2_adj;
    double printed_residual;
};

// Printed coefficient rows of the four results tables, column by column.
const std::vector<TableColumn> kTableFixtures = {
    // 1980-1985
    {"T1", "IMT", {1.121, 0.217, 0.012, -0.064}, 1.286, 0.982, 0.018},
    {"T1", "IMI", {0.147, 0.130, 0.013, 0.475}, 0.765, 0.994, 0.006},
    {"T1", "IPQ", {-2.362, 0.296, -0.084, -0.372}, -2.522, 0.990, 0.010},
    {"T1", "IEE", {0.087, 0.217, -0.022, 0.207}, 0.489, 0.996, 0.004},
    {"T1", "IET", {-2.630, -0.231, -0.305, 1.846}, -1.320, 0.980, 0.020},
    {"T1", "IAL", {0.742, 0.016, 0.202, 0.334}, 1.294, 0.934, 0.066},
    {"T1", "ITE", {0.932, 1.704, -0.196, 0.173}, 2.613, 0.997, 0.003},
    {"T1", "IPA", {1.180, 0.432, -0.058, -0.258}, 1.296, 0.968, 0.032},
    {"T1", "IPD", {0.862, 0.349, -0.096, 0.006}, 1.121, 0.999, 0.001},
    // 1986-1994
    {"T2", "IMT", {1.420, 0.844, 0.431, -1.459}, 1.236, 0.822, 0.178},
    {"T2", "IMI", {0.517, -0.358, -0.242, 0.359}, 0.276, 0.993, 0.007},
    {"T2", "IPQ", {1.098, 0.709, 0.120, 0.260}, 2.187, 0.987, 0.013},
    {"T2", "IEE", {0.817, -0.085, -0.084, 0.061}, 0.709, 0.996, 0.004},
    {"T2", "IET", {0.397, -0.314, 0.147, 0.433}, 0.663, 0.986, 0.014},
    {"T2", "IAL", {0.378, -0.026, -0.067, 0.166}, 0.451, 0.968, 0.032},
    {"T2", "ITE", {0.809, -0.484, -0.229, 0.529}, 0.625, 0.997, 0.003},
    {"T2", "IPA", {-0.071, -0.171, -0.165, 0.427}, 0.020, 0.983, 0.017},
    {"T2", "IPD", {0.862, -0.148, -0.524, -0.085}, 0.105, 0.999, 0.001},
    // 1980-1994
    {"T3", "IMT", {1.441, 0.658, 0.011, -0.761}, 1.349, 0.923, 0.077},
    {"T3", "IMI", {0.555, -0.197, -0.135, 0.309}, 0.532, 0.991, 0.009},
    {"T3", "IPQ", {0.707, 0.781, 0.253, 0.066}, 1.807, 0.905, 0.095},
    {"T3", "IEE", {0.742, -0.094, -0.072, 0.112}, 0.688, 0.994, 0.006},
    {"T3", "IET", {0.091, -0.249, 0.073, 0.646}, 0.561, 0.975, 0.025},
    {"T3", "IAL", {0.360, 0.009, -0.025, 0.130}, 0.474, 0.992, 0.008},
    {"T3", "ITE", {0.861, 0.219, -0.150, 0.434}, 1.364, 0.976, 0.024},
    {"T3", "IPA", {0.178, 0.190, 0.001, 0.047}, 0.416, 0.984, 0.016},
    {"T3", "IPD", {0.951, 0.136, -0.236, -0.166}, 0.685, 0.993, 0.007},
    // 1995-1999
    {"T4", "IMT", {1.294, 0.136, -0.356, -0.161, 0.606, -0.215, -0.237, -0.036}, 1.031, 0.999, 0.001},
    {"T4", "IMI", {1.251, -0.078, -0.267, -0.064, 0.411, -0.042, -0.182, 0.038}, 1.067, 0.999, 0.001},
    {"T4", "IPQ", {1.800, 3.558, 2.306, 0.568, 2.198, -3.058, 0.330, 0.407}, 8.109, 0.999, 0.001},
    {"T4", "IEE", {-0.073, -1.334, -1.242, -0.175, -1.039, 0.257, 0.995, 0.087}, -2.524, 0.999, 0.001},
    {"T4", "IET", {0.684, -0.482, -0.639, -0.147, 0.120, 0.404, 0.134, 0.101}, 0.175, 0.999, 0.001},
    {"T4", "IAL", {0.072, 0.795, 0.822, 0.180, 0.011, -0.352, -0.185, 0.004}, 1.347, 0.999, 0.001},
    {"T4", "ITE", {0.747, 0.408, 0.498, 0.107, -0.273, -0.562, 0.139, 0.072}, 1.136, 0.999, 0.001},
    {"T4", "IPA", {1.320, -0.638, 0.376, 0.036, -0.384, -0.046, 0.553, -0.036}, 1.181, 0.999, 0.001},
    {"T4", "IPD", {0.585, -0.114, 0.258, -0.084, 0.163, -0.214, 0.470, -0.017}, 1.047, 0.999, 0.001},
};

void criterion_1_table_fixtures() {
    Criterion c(1, "table-arithmetic fixtures (36 columns)");
    c.check(kTableFixtures.size() == 36, "expected 36 fixtures");
    double worst = 0.0;
    for (const auto& col : kTableFixtures) {
        const double sum = sum_elasticities(col.betas);
        worst = std::max(worst, std::abs(sum - col.printed_sum));
        c.check(std::abs(sum - col.printed_sum) <= 0.002,
                std::string(col.table) + " " + col.industry + " sum " + std::to_string(sum) +
                    " vs printed " + std::to_string(col.printed_sum));
        const long long rounded = std::llround(residual_part(col.printed_r2_adj) * 1000.0);
        const long long printed = std::llround(col.printed_residual * 1000.0);
        c.check(rounded == printed, std::string(col.table) + " " + col.industry +
                                        " residual part mismatch at 3 decimals");
    }
    std::printf("[info]    max |sum - printed| = %.6f\n", worst);
}

void criterion_2_oracle_equivalence() {
    Criterion c(2, "least squares vs normal-equations oracle (1000 instances)");
    Rng rng(20260808);
    double worst = 0.0;
    int done = 0;
    while (done < 1000) {
        const int k = 1 + static_cast<int>(rng.uniform01() * 10);
        const int n = k + 2 + static_cast<int>(rng.uniform01() * (50 - k - 1));
        Matrix x(n, k);
        for (int col = 0; col < k; ++col)
            for (int r = 0; r < n; ++r) x(r, col) = rng.normal();
        Vector y(static_cast<size_t>(n));
        for (double& v : y) v = rng.normal();

        const QrSolution qr = qr_least_squares(x, y);
        if (qr.min_abs_diag <= 0.0 || qr.max_abs_diag / qr.min_abs_diag > 1e6) continue;
        ++done;
        const OlsFit fit = least_squares(make_design(x, y));
        const Vector oracle = oracle_ols(x, y);
        for (int j = 0; j < k; ++j)
            worst = std::max(worst,
                             std::abs(fit.beta[static_cast<size_t>(j)] - oracle[static_cast<size_t>(j)]));
    }
    c.check(worst <= 1e-8, "max coefficient discrepancy " + std::to_string(worst));
    std::printf("[info]    max |beta - beta_oracle| = %.3e\n", worst);
}

PanelDataset drop_random_rows(const PanelDataset& panel, Rng& rng, double drop_rate) {
    PanelDataset cut = panel;
    cut.row_index.clear();
    for (auto& [name, col] : cut.columns) col.clear();
    std::map<std::string, int> kept_per_entity;
    for (int r = 0; r < panel.n_rows(); ++r) {
        const RowKey& key = panel.row_index[static_cast<size_t>(r)];
        // always keep the first two rows of each entity
        bool keep = kept_per_entity[key.entity] < 2 || rng.uniform01() >= drop_rate;
        if (!keep) continue;
        ++kept_per_entity[key.entity];
        cut.row_index.push_back(key);
        for (const auto& name : panel.column_names)
            cut.columns[name].push_back(panel.column(name)[static_cast<size_t>(r)]);
    }
    return cut;
}

void criterion_3_fe_equivalence() {
    Criterion c(3, "LSDV vs within transform on 200 random panels");
    Rng rng(777);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        DgpSpec dgp;
        dgp.entities = 3 + static_cast<int>(rng.uniform01() * 8);
        dgp.periods = 5 + static_cast<int>(rng.uniform01() * 8);
        const int k = 1 + static_cast<int>(rng.uniform01() * 3);
        dgp.beta.assign(static_cast<size_t>(k), 0.0);
        for (double& b : dgp.beta) b = 2.0 * rng.uniform01() - 1.0;
        dgp.sigma2_u = 0.2 + 2.0 * rng.uniform01();
        dgp.sigma2_e = 0.2 + rng.uniform01();
        dgp.effects_correlated_with_x = rng.uniform01() < 0.5;
        dgp.seed = rng.next_u64();
        PanelDataset panel = generate_panel(dgp);
        if (trial % 2 == 1) panel = drop_random_rows(panel, rng, 0.2); // unbalanced half

        ModelSpec spec;
        spec.dependent = "Y";
        for (int j = 1; j <= k; ++j) spec.regressors.push_back("X" + std::to_string(j));
        try {
            const EstimationResult lsdv = fixed_effects_lsdv(panel, spec);
            const EstimationResult within = fixed_effects_within(panel, spec);
            for (size_t j = 0; j < lsdv.regressor_betas.size(); ++j)
                worst = std::max(worst,
                                 std::abs(lsdv.regressor_betas[j] - within.regressor_betas[j]));
        } catch (const Error& e) {
            c.check(false, std::string("trial ") + std::to_string(trial) + ": " + e.what());
        }
    }
    c.check(worst <= 1e-8, "max LSDV-within discrepancy " + std::to_string(worst));
    std::printf("[info]    max |beta_lsdv - beta_within| = %.3e\n", worst);
}

void criterion_4_re_degeneracy() {
    Criterion c(4, "random-effects degeneracy at theta 0 and theta 0.9999");
    DgpSpec dgp;
    dgp.entities = 10;
    dgp.periods = 12;
    dgp.beta = {1.0, -0.5};
    dgp.sigma2_u = 1.0;
    dgp.sigma2_e = 0.5;
    dgp.seed = 4242;
    const PanelDataset panel = generate_panel(dgp);
    ModelSpec spec;
    spec.dependent = "Y";
    spec.regressors = {"X1", "X2"};

    const EstimationResult re0 = random_effects_gls_forced(panel, spec, 0.0);
    const EstimationResult pooled = pooled_ols(panel, spec);
    double worst0 = 0.0;
    for (size_t i = 0; i < re0.coefficients.size(); ++i) {
        worst0 = std::max(worst0, std::abs(re0.coefficients[i].beta - pooled.coefficients[i].beta));
        worst0 = std::max(worst0, std::abs(re0.coefficients[i].se - pooled.coefficients[i].se));
    }
    c.check(worst0 <= 1e-10, "theta 0 vs pooled discrepancy " + std::to_string(worst0));

    const EstimationResult re1 = random_effects_gls_forced(panel, spec, 0.9999);
    const EstimationResult fe = fixed_effects_within(panel, spec);
    double worst1 = 0.0;
    for (size_t j = 0; j < re1.regressor_betas.size(); ++j)
        worst1 = std::max(worst1, std::abs(re1.regressor_betas[j] - fe.regressor_betas[j]));
    c.check(worst1 <= 1e-4, "theta 0.9999 vs within discrepancy " + std::to_string(worst1));
    std::printf("[info]    theta0 max diff = %.3e, theta0.9999 max diff = %.3e\n", worst0, worst1);
}

void criterion_5_hausman_monte_carlo() {
    Criterion c(5, "Hausman Monte-Carlo size and power");
    DgpSpec dgp;
    dgp.entities = 30;
    dgp.periods = 10;
    dgp.beta = {1.0, 0.5};
    dgp.sigma2_u = 1.0;
    dgp.sigma2_e = 0.5;
    dgp.effect_x_correlation = 0.7;
    dgp.seed = 42;

    const McSummary size = monte_carlo(McHarness::HausmanSize, dgp, 1000);
    c.check(size.rejection_rate >= 0.03 && size.rejection_rate <= 0.07,
            "size " + std::to_string(size.rejection_rate));
    c.check(size.failed_reps == 0, "size harness had failing reps");

    const McSummary power = monte_carlo(McHarness::HausmanPower, dgp, 500);
    c.check(power.rejection_rate >= 0.90, "power " + std::to_string(power.rejection_rate));
    c.check(power.failed_reps == 0, "power harness had failing reps");
    std::printf("[info]    size = %.3f (c: %d), power = %.3f (c: %d)\n", size.rejection_rate,
                size.not_acceptable, power.rejection_rate, power.not_acceptable);
}

void criterion_6_durbin_watson() {
    Criterion c(6, "Durbin-Watson fixtures, white noise, and range");
    std::vector<RowKey> idx4, idx3;
    for (int i = 0; i < 4; ++i) idx4.push_back({"A", 1980 + i});
    for (int i = 0; i < 3; ++i) idx3.push_back({"A", 1980 + i});
    c.check(durbin_watson({1.0, -1.0, 1.0, -1.0}, idx4) == 3.0, "alternating residuals != 3.0");
    c.check(durbin_watson({0.7, 0.7, 0.7}, idx3) == 0.0, "constant residuals != 0.0");

    Rng rng(2718);
    const int n = 10000;
    Vector noise(static_cast<size_t>(n));
    std::vector<RowKey> idx;
    for (int i = 0; i < n; ++i) {
        noise[static_cast<size_t>(i)] = rng.normal();
        idx.push_back({"A", i});
    }
    const double dw = durbin_watson(noise, idx);
    c.check(std::abs(dw - 2.0) <= 0.06, "white-noise DW " + std::to_string(dw));

    bool in_range = true;
    for (int trial = 0; trial < 100; ++trial) {
        const int m = 4 + static_cast<int>(rng.uniform01() * 30);
        Vector e(static_cast<size_t>(m));
        std::vector<RowKey> ix;
        for (int i = 0; i < m; ++i) {
            e[static_cast<size_t>(i)] = rng.normal();
            ix.push_back({"A", i});
        }
        const double v = durbin_watson(e, ix);
        in_range = in_range && v >= 0.0 && v <= 4.0;
    }
    c.check(in_range, "DW left [0, 4]");
    std::printf("[info]    white-noise DW = %.4f\n", dw);
}

void criterion_7_chi_square() {
    Criterion c(7, "chi-square survival function at the 5% critical points");
    const double sf1 = chi_square_sf(3.841, 1);
    const double sf4 = chi_square_sf(9.488, 4);
    c.check(std::abs(sf1 - 0.05) <= 5e-4, "sf(3.841, 1) = " + std::to_string(sf1));
    c.check(std::abs(sf4 - 0.05) <= 5e-4, "sf(9.488, 4) = " + std::to_string(sf4));
    c.check(std::abs(sf1 - test::chi_square_sf_oracle(3.841, 1)) <= 1e-10, "df 1 oracle gap");
    c.check(std::abs(sf4 - test::chi_square_sf_oracle(9.488, 4)) <= 1e-10, "df 4 oracle gap");
    std::printf("[info]    sf(3.841,1) = %.6f, sf(9.488,4) = %.6f\n", sf1, sf4);
}

void criterion_8_estimator_recovery() {
    Criterion c(8, "estimator recovery: FE vs pooled on a fixed-effects DGP");
    DgpSpec dgp;
    dgp.entities = 5;
    dgp.periods = 20;
    dgp.beta = {1.0};
    dgp.sigma2_u = 1.0;
    dgp.sigma2_e = 0.5; // var(beta * ln x) = 5 against sigma2_e = 0.5: SNR = 10
    dgp.effects_correlated_with_x = true;
    dgp.seed = 88;
    const McSummary mc = monte_carlo(McHarness::EstimatorRecovery, dgp, 500);
    c.check(mc.failed_reps == 0, "failing reps");

    const EstimatorStats* fe = nullptr;
    const EstimatorStats* pooled = nullptr;
    for (const auto& stats : mc.estimators) {
        if (stats.name == "fixed_effects") fe = &stats;
        if (stats.name == "pooled") pooled = &stats;
    }
    c.check(fe != nullptr && pooled != nullptr, "estimator stats missing");
    if (fe && pooled) {
        c.check(fe->rmse < pooled->rmse, "FE rmse " + std::to_string(fe->rmse) +
                                             " !< pooled rmse " + std::to_string(pooled->rmse));
        c.check(std::abs(fe->mean_beta[0] - 1.0) <= 3.0 * fe->mc_se[0],
                "FE mean " + std::to_string(fe->mean_beta[0]) + " off truth by > 3 mc se");
        std::printf("[info]    rmse: fe = %.4f, pooled = %.4f; fe mean = %.4f (mc se %.4f)\n",
                    fe->rmse, pooled->rmse, fe->mean_beta[0], fe->mc_se[0]);
    }
}

std::string run_cli(const std::string& command, int& exit_code) {
    std::string output;
    FILE* pipe = popen(command.c_str(), "r");
    if (!pipe) {
        exit_code = -1;
        return output;
    }
    char buffer[4096];
    size_t got;
    while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0) output.append(buffer, got);
    const int status = pclose(pipe);
    exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return output;
}

void criterion_9_cli_end_to_end(const std::string& cli) {
    Criterion c(9, "CLI end-to-end study runs with stable bytes");
    if (cli.empty()) {
        c.check(false, "CLI path not provided (argv[1] or RYPANEL_CLI)");
        return;
    }
    const std::string dir = "/tmp/rypanel_acceptance";
    if (std::system(("mkdir -p " + dir).c_str()) != 0) {
        c.check(false, "cannot create scratch directory");
        return;
    }
    const std::string csv = dir + "/panel.csv";
    write_panel_file(generate_study_panel(42), csv);

    auto study_cmd = [&](const std::string& id) {
        return "'" + cli + "' study --data '" + csv + "' --study " + id + " 2>/dev/null";
    };

    int code1 = 0, code2 = 0;
    const std::string early1 = run_cli(study_cmd("1980-1985"), code1);
    const std::string early2 = run_cli(study_cmd("1980-1985"), code2);
    c.check(code1 == 0 && code2 == 0, "study 1980-1985 exit codes " + std::to_string(code1) + "/" +
                                          std::to_string(code2));
    c.check(!early1.empty() && early1 == early2, "study output bytes differ across runs");
    c.check(early1.find("beta_4") != std::string::npos, "beta_4 row missing (1980-1985)");
    c.check(early1.find("beta_5") == std::string::npos, "unexpected beta_5 row (1980-1985)");
    c.check(early1.find("Dummy1986") == std::string::npos, "unexpected Dummy1986 row (1980-1985)");
    c.check(early1.find("IMT") != std::string::npos && early1.find("IPD") != std::string::npos,
            "industry columns missing");

    int code3 = 0;
    const std::string late = run_cli(study_cmd("1995-1999"), code3);
    c.check(code3 == 0, "study 1995-1999 exit code " + std::to_string(code3));
    c.check(late.find("beta_8") != std::string::npos, "beta_8 row missing (1995-1999)");
    c.check(late.find("Dummy1986") == std::string::npos, "unexpected Dummy1986 row (1995-1999)");

    int code4 = 0;
    const std::string full = run_cli(study_cmd("1980-1994"), code4);
    c.check(code4 == 0, "study 1980-1994 exit code " + std::to_string(code4));
    c.check(full.find("Dummy1986") != std::string::npos, "Dummy1986 row missing (1980-1994)");

    int code5 = 0;
    run_cli("'" + cli + "' study --data '" + csv + "' --study 1975-1979 2>/dev/null", code5);
    c.check(code5 == 2, "unknown study id should exit 2, got " + std::to_string(code5));

    const std::string est_cmd = "'" + cli + "' estimate --data '" + csv +
                                "' --dependent GVA_IMT"
                                " --regressors Labor_IMT,Agriculture,Energy,Construction"
                                " 2>/dev/null";
    int code6 = 0, code7 = 0;
    const std::string est1 = run_cli(est_cmd, code6);
    const std::string est2 = run_cli(est_cmd, code7);
    c.check(code6 == 0 && code7 == 0, "estimate exit codes");
    c.check(!est1.empty() && est1 == est2, "estimate output bytes differ across runs");

    int code8 = 0;
    run_cli("'" + cli + "' estimate --data /tmp/rypanel_no_such_file.csv --dependent Y"
            " --regressors X 2>/dev/null",
            code8);
    c.check(code8 == 2, "missing data file should exit 2, got " + std::to_string(code8));

    int code9 = 0;
    run_cli("'" + cli + "' study --data '" + csv + "' --study 1980-1985 --alpha 1.5 2>/dev/null",
            code9);
    c.check(code9 == 2, "alpha 1.5 should exit 2, got " + std::to_string(code9));
}

} // namespace

int main(int argc, char** argv) {
    std::string cli;
    if (argc > 1) cli = argv[1];
    if (cli.empty())
        if (const char* env = std::getenv("RYPANEL_CLI")) cli = env;

    criterion_1_table_fixtures();
    criterion_2_oracle_equivalence();
    criterion_3_fe_equivalence();
    criterion_4_re_degeneracy();
    criterion_5_hausman_monte_carlo();
    criterion_6_durbin_watson();
    criterion_7_chi_square();
    criterion_8_estimator_recovery();
    criterion_9_cli_end_to_end(cli);

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
