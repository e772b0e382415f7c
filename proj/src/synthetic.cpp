#include "rypanel/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "rypanel/errors.hpp"
#include "rypanel/estimators.hpp"
#include "rypanel/rybczynski.hpp"

namespace rypanel {

namespace {

// splitmix64 finalizer; scrambles seeds and derives substreams.
std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    state_ = splitmix64(s);
    while (state_ == 0) state_ = splitmix64(s); // xorshift state must be nonzero
}

Rng Rng::substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed;
    const std::uint64_t base = splitmix64(s);
    return Rng(base ^ (0xD1B54A32D192ED03ULL * (index + 1)));
}

std::uint64_t Rng::next_u64() {
    // xorshift64* step
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * uniform01() - 1.0;
        v = 2.0 * uniform01() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

void DgpSpec::validate() const {
    if (entities < 2 || periods < 2)
        fail(ErrorCode::ConfigError, "DGP needs at least 2 entities and 2 periods");
    if (beta.empty()) fail(ErrorCode::ConfigError, "DGP needs at least one regressor coefficient");
    if (!(sigma2_e > 0.0)) fail(ErrorCode::ConfigError, "sigma2_e must be positive");
    if (sigma2_u < 0.0) fail(ErrorCode::ConfigError, "sigma2_u cannot be negative");
    if (!fixed_intercepts.empty() && static_cast<int>(fixed_intercepts.size()) != entities)
        fail(ErrorCode::ConfigError, "fixed_intercepts must list one value per entity");
    if (x_between_sd < 0.0) fail(ErrorCode::ConfigError, "x_between_sd cannot be negative");
    if (effect_x_correlation < -1.0 || effect_x_correlation > 1.0)
        fail(ErrorCode::ConfigError, "effect correlation must lie in [-1, 1]");
}

PanelDataset generate_panel(const DgpSpec& dgp) {
    dgp.validate();
    Rng rng(dgp.seed);

    const int n_ent = dgp.entities;
    const int n_per = dgp.periods;
    const int k = static_cast<int>(dgp.beta.size());

    // Entity names sort correctly up to 999 entities.
    auto entity_name = [](int i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "E%03d", i + 1);
        return std::string(buf);
    };

    // log-regressors first; entity effects may be built from their means.
    std::vector<Matrix> logs;
    logs.reserve(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j) {
        Matrix lx(n_ent, n_per);
        for (int e = 0; e < n_ent; ++e) {
            const double entity_mean = dgp.x_between_sd * rng.normal();
            if (dgp.regressor_process == RegressorProcess::IIDLogNormal) {
                for (int t = 0; t < n_per; ++t) lx(e, t) = entity_mean + rng.normal();
            } else {
                double level = entity_mean + rng.normal();
                for (int t = 0; t < n_per; ++t) {
                    level += 0.25 * rng.normal();
                    lx(e, t) = level;
                }
            }
        }
        logs.push_back(std::move(lx));
    }

    Vector effects(static_cast<size_t>(n_ent), 0.0);
    if (!dgp.fixed_intercepts.empty()) {
        effects = dgp.fixed_intercepts;
    } else if (dgp.sigma2_u > 0.0) {
        const double sd_u = std::sqrt(dgp.sigma2_u);
        if (dgp.effects_correlated_with_x) {
            // Correlate with each entity's mean of the first log-regressor,
            // standardized empirically so the target correlation holds.
            Vector mean_x(static_cast<size_t>(n_ent), 0.0);
            for (int e = 0; e < n_ent; ++e) {
                for (int t = 0; t < n_per; ++t) mean_x[static_cast<size_t>(e)] += logs[0](e, t);
                mean_x[static_cast<size_t>(e)] /= n_per;
            }
            double m = 0.0, s2 = 0.0;
            for (double v : mean_x) m += v;
            m /= n_ent;
            for (double v : mean_x) s2 += (v - m) * (v - m);
            const double sd = std::sqrt(s2 / std::max(1, n_ent - 1));
            const double rho = dgp.effect_x_correlation;
            for (int e = 0; e < n_ent; ++e) {
                const double z = sd > 0.0 ? (mean_x[static_cast<size_t>(e)] - m) / sd : 0.0;
                effects[static_cast<size_t>(e)] =
                    sd_u * (rho * z + std::sqrt(1.0 - rho * rho) * rng.normal());
            }
        } else {
            for (int e = 0; e < n_ent; ++e) effects[static_cast<size_t>(e)] = sd_u * rng.normal();
        }
    }

    PanelDataset ds;
    ds.entity_column = "entity";
    ds.year_column = "year";
    ds.column_names.push_back("Y");
    for (int j = 0; j < k; ++j) ds.column_names.push_back("X" + std::to_string(j + 1));
    for (int e = 0; e < n_ent; ++e) ds.entities.push_back(entity_name(e));
    for (int t = 0; t < n_per; ++t) ds.periods.push_back(t + 1);

    const double sd_e = std::sqrt(dgp.sigma2_e);
    for (int e = 0; e < n_ent; ++e) {
        for (int t = 0; t < n_per; ++t) {
            ds.row_index.push_back({ds.entities[static_cast<size_t>(e)], t + 1});
            double log_y = dgp.intercept + effects[static_cast<size_t>(e)] + sd_e * rng.normal();
            for (int j = 0; j < k; ++j) log_y += dgp.beta[static_cast<size_t>(j)] * logs[static_cast<size_t>(j)](e, t);
            ds.columns["Y"].push_back(std::exp(log_y));
            for (int j = 0; j < k; ++j)
                ds.columns["X" + std::to_string(j + 1)].push_back(std::exp(logs[static_cast<size_t>(j)](e, t)));
        }
    }
    return ds;
}

PanelDataset generate_study_panel(std::uint64_t seed) {
    Rng rng(seed);
    const std::vector<std::string> regions{"Alentejo", "Algarve", "Centro", "LVT", "Norte"};
    const int y0 = 1980;
    const int y1 = 1999;

    const std::vector<std::string> resources{"Agriculture", "Florestry", "Extraction1",
                                             "Extraction2", "Energy", "Construction", "Capital"};

    PanelDataset ds;
    ds.entity_column = "region";
    ds.year_column = "year";
    ds.entities = regions;
    for (int y = y0; y <= y1; ++y) ds.periods.push_back(y);

    for (const auto& industry : industry_registry()) {
        ds.column_names.push_back("GVA_" + industry.abbrev);
        ds.column_names.push_back("Labor_" + industry.abbrev);
    }
    for (const auto& name : resources) ds.column_names.push_back(name);

    const int n_reg = static_cast<int>(regions.size());
    const int n_years = y1 - y0 + 1;

    // Region-level resource logs: region base level plus a slow random walk.
    std::map<std::string, Matrix> resource_logs;
    for (const auto& name : resources) {
        Matrix lx(n_reg, n_years);
        for (int r = 0; r < n_reg; ++r) {
            double level = 3.0 + 0.8 * rng.normal();
            for (int t = 0; t < n_years; ++t) {
                level += 0.02 + 0.08 * rng.normal();
                lx(r, t) = level;
            }
        }
        resource_logs[name] = std::move(lx);
    }

    struct IndustrySeries {
        Matrix labor_logs;
        Matrix gva_logs;
    };
    std::map<std::string, IndustrySeries> by_industry;
    for (const auto& industry : industry_registry()) {
        IndustrySeries series{Matrix(n_reg, n_years), Matrix(n_reg, n_years)};
        Vector region_effect(static_cast<size_t>(n_reg));
        for (int r = 0; r < n_reg; ++r) region_effect[static_cast<size_t>(r)] = 0.6 * rng.normal();
        const double beta_labor = 0.5 + 0.4 * rng.uniform01();
        for (int r = 0; r < n_reg; ++r) {
            double labor = 2.0 + 0.5 * rng.normal();
            for (int t = 0; t < n_years; ++t) {
                labor += 0.01 + 0.10 * rng.normal();
                series.labor_logs(r, t) = labor;
                double gva = 1.0 + region_effect[static_cast<size_t>(r)] + beta_labor * labor +
                             0.15 * resource_logs["Agriculture"](r, t) +
                             0.10 * resource_logs["Energy"](r, t) +
                             0.12 * resource_logs["Construction"](r, t) + 0.20 * rng.normal();
                series.gva_logs(r, t) = gva;
            }
        }
        by_industry[industry.abbrev] = std::move(series);
    }

    // Region list is lexicographically sorted, so emitting region-major rows
    // keeps the dataset in canonical (entity, year) order.
    for (int r = 0; r < n_reg; ++r) {
        for (int t = 0; t < n_years; ++t) {
            ds.row_index.push_back({regions[static_cast<size_t>(r)], y0 + t});
            for (const auto& industry : industry_registry()) {
                const auto& series = by_industry[industry.abbrev];
                ds.columns["GVA_" + industry.abbrev].push_back(std::exp(series.gva_logs(r, t)));
                ds.columns["Labor_" + industry.abbrev].push_back(std::exp(series.labor_logs(r, t)));
            }
            for (const auto& name : resources)
                ds.columns[name].push_back(std::exp(resource_logs[name](r, t)));
        }
    }
    return ds;
}

Vector oracle_ols(const Matrix& x, const Vector& y) {
    const int n = x.rows();
    const int k = x.cols();
    if (n < k || k < 1) fail(ErrorCode::InsufficientObservations, "oracle needs n >= k >= 1");

    // Normal equations, then Gauss-Jordan with partial pivoting on the
    // augmented system [X'X | X'y]. Kept self-contained on purpose.
    std::vector<std::vector<double>> aug(static_cast<size_t>(k),
                                         std::vector<double>(static_cast<size_t>(k) + 1, 0.0));
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            double s = 0.0;
            for (int r = 0; r < n; ++r) s += x(r, i) * x(r, j);
            aug[static_cast<size_t>(i)][static_cast<size_t>(j)] = s;
        }
        double s = 0.0;
        for (int r = 0; r < n; ++r) s += x(r, i) * y[static_cast<size_t>(r)];
        aug[static_cast<size_t>(i)][static_cast<size_t>(k)] = s;
    }

    for (int col = 0; col < k; ++col) {
        int pivot = col;
        for (int r = col + 1; r < k; ++r)
            if (std::abs(aug[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
                std::abs(aug[static_cast<size_t>(pivot)][static_cast<size_t>(col)]))
                pivot = r;
        if (std::abs(aug[static_cast<size_t>(pivot)][static_cast<size_t>(col)]) < 1e-300)
            fail(ErrorCode::SingularSystem, "X'X is singular");
        std::swap(aug[static_cast<size_t>(pivot)], aug[static_cast<size_t>(col)]);
        const double d = aug[static_cast<size_t>(col)][static_cast<size_t>(col)];
        for (int j = col; j <= k; ++j) aug[static_cast<size_t>(col)][static_cast<size_t>(j)] /= d;
        for (int r = 0; r < k; ++r) {
            if (r == col) continue;
            const double f = aug[static_cast<size_t>(r)][static_cast<size_t>(col)];
            if (f == 0.0) continue;
            for (int j = col; j <= k; ++j)
                aug[static_cast<size_t>(r)][static_cast<size_t>(j)] -=
                    f * aug[static_cast<size_t>(col)][static_cast<size_t>(j)];
        }
    }

    Vector beta(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) beta[static_cast<size_t>(i)] = aug[static_cast<size_t>(i)][static_cast<size_t>(k)];
    return beta;
}

const char* mc_harness_name(McHarness h) {
    switch (h) {
        case McHarness::HausmanSize: return "hausman-size";
        case McHarness::HausmanPower: return "hausman-power";
        case McHarness::EstimatorRecovery: return "estimator-recovery";
    }
    return "unknown";
}

McSummary monte_carlo(McHarness harness, const DgpSpec& dgp, int reps) {
    dgp.validate();
    if (reps < 100) fail(ErrorCode::ConfigError, "Monte-Carlo needs at least 100 reps");

    McSummary summary;
    summary.harness = harness;
    summary.reps = reps;
    summary.true_beta = dgp.beta;
    summary.seed = dgp.seed;

    ModelSpec spec;
    spec.dependent = "Y";
    for (size_t j = 0; j < dgp.beta.size(); ++j) spec.regressors.push_back("X" + std::to_string(j + 1));
    spec.log_all = true;

    if (harness == McHarness::HausmanSize || harness == McHarness::HausmanPower) {
        int rejects = 0;
        int decided = 0;
        for (int rep = 0; rep < reps; ++rep) {
            DgpSpec rep_dgp = dgp;
            // The harness owns the null/alternative distinction.
            rep_dgp.effects_correlated_with_x = (harness == McHarness::HausmanPower);
            rep_dgp.seed = Rng::substream(dgp.seed, static_cast<std::uint64_t>(rep)).next_u64();
            try {
                const PanelDataset panel = generate_panel(rep_dgp);
                const EstimationResult fe = fixed_effects_lsdv(panel, spec);
                const EstimationResult re = random_effects_gls(panel, spec);
                const HausmanResult h = hausman_test(fe, re, summary.alpha);
                if (h.decision == HausmanDecision::NotStatisticallyAcceptable) {
                    ++summary.not_acceptable;
                } else {
                    ++decided;
                    if (h.decision == HausmanDecision::RejectRandom) ++rejects;
                }
            } catch (const Error&) {
                ++summary.failed_reps;
            }
        }
        if (decided > 0) {
            summary.rejection_rate = static_cast<double>(rejects) / decided;
            summary.rejection_mc_se =
                std::sqrt(summary.rejection_rate * (1.0 - summary.rejection_rate) / decided);
        }
        return summary;
    }

    // EstimatorRecovery: pooled vs fixed effects on the same draws.
    const size_t k = dgp.beta.size();
    struct Acc {
        Vector sum, sum_sq_raw, sum_sq_err;
        int count = 0;
    };
    std::map<std::string, Acc> acc{
        {"pooled", {Vector(k, 0.0), Vector(k, 0.0), Vector(k, 0.0), 0}},
        {"fixed_effects", {Vector(k, 0.0), Vector(k, 0.0), Vector(k, 0.0), 0}}};
    for (int rep = 0; rep < reps; ++rep) {
        DgpSpec rep_dgp = dgp;
        rep_dgp.seed = Rng::substream(dgp.seed, static_cast<std::uint64_t>(rep)).next_u64();
        try {
            const PanelDataset panel = generate_panel(rep_dgp);
            const EstimationResult pooled = pooled_ols(panel, spec);
            const EstimationResult fe = fixed_effects_lsdv(panel, spec);
            for (auto& [name, a] : acc) {
                const auto& betas = (name == "pooled") ? pooled.regressor_betas : fe.regressor_betas;
                for (size_t j = 0; j < k; ++j) {
                    a.sum[j] += betas[j];
                    a.sum_sq_raw[j] += betas[j] * betas[j];
                    const double err = betas[j] - dgp.beta[j];
                    a.sum_sq_err[j] += err * err;
                }
                ++a.count;
            }
        } catch (const Error&) {
            ++summary.failed_reps;
        }
    }
    for (auto& [name, a] : acc) {
        EstimatorStats stats;
        stats.name = name;
        if (a.count > 0) {
            double mse = 0.0;
            stats.mean_beta.resize(k);
            stats.mc_se.resize(k);
            for (size_t j = 0; j < k; ++j) {
                stats.mean_beta[j] = a.sum[j] / a.count;
                mse += a.sum_sq_err[j] / a.count;
                const double var =
                    std::max(0.0, a.sum_sq_raw[j] / a.count - stats.mean_beta[j] * stats.mean_beta[j]);
                stats.mc_se[j] = std::sqrt(var / a.count);
            }
            stats.rmse = std::sqrt(mse / static_cast<double>(k));
        }
        summary.estimators.push_back(std::move(stats));
    }
    return summary;
}

} // namespace rypanel
