#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rypanel/linalg.hpp"
#include "rypanel/panel_data.hpp"

namespace rypanel {

/// xorshift64* (Marsaglia / Vigna) seeded through a splitmix64 scramble so
/// any 64-bit seed, including 0, yields a valid nonzero state. Fixtures rely
/// on this exact generator, so no platform RNG anywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    /// Independent substream `index` of a base seed; used per Monte-Carlo rep.
    static Rng substream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next_u64();
    double uniform01(); // [0, 1)
    double normal();    // standard normal, Marsaglia polar method

private:
    std::uint64_t state_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

enum class RegressorProcess { IIDLogNormal, RandomWalkLevels };

struct DgpSpec {
    int entities = 30;
    int periods = 10;
    Vector beta{1.0};
    double intercept = 1.0;
    /// Per-entity intercepts for a fixed-effects design; empty means random
    /// effects drawn with variance sigma2_u.
    Vector fixed_intercepts;
    double sigma2_u = 1.0;
    double sigma2_e = 1.0;
    RegressorProcess regressor_process = RegressorProcess::IIDLogNormal;
    /// Spread of per-entity log-regressor means. Between-entity variation in
    /// the regressors is what separates the FE and RE covariances, so the
    /// Hausman harnesses need it well above zero.
    double x_between_sd = 2.0;
    bool effects_correlated_with_x = false;
    double effect_x_correlation = 0.7;
    std::uint64_t seed = 1;

    void validate() const; // throws ConfigError
};

/// Levels are exponentials of the linear log model, so log_transform
/// recovers an exact linear DGP. Columns: Y, X1..Xk. Deterministic per seed.
PanelDataset generate_panel(const DgpSpec& dgp);

/// Balanced 5-region x 1980-1999 panel carrying the full study vocabulary
/// (GVA_<code>, Labor_<code>, the region-level resources, Capital).
PanelDataset generate_study_panel(std::uint64_t seed);

/// Independent check route: (X'X)^-1 X'y through Gauss-Jordan elimination
/// with partial pivoting. Deliberately not the production QR path.
Vector oracle_ols(const Matrix& x, const Vector& y);

enum class McHarness { HausmanSize, HausmanPower, EstimatorRecovery };

const char* mc_harness_name(McHarness h);

struct EstimatorStats {
    std::string name;
    Vector mean_beta;
    Vector mc_se;   // MC standard error of the mean estimate
    double rmse = 0.0;
};

struct McSummary {
    McHarness harness = McHarness::HausmanSize;
    int reps = 0;
    int failed_reps = 0;       // estimation threw
    int not_acceptable = 0;    // Hausman outcome (c)
    double alpha = 0.05;
    double rejection_rate = 0.0;
    double rejection_mc_se = 0.0;
    Vector true_beta;
    std::vector<EstimatorStats> estimators;
    std::uint64_t seed = 0;
};

/// Deterministic per (dgp.seed, reps). Failing reps are counted, never
/// silently dropped. reps must be >= 100.
McSummary monte_carlo(McHarness harness, const DgpSpec& dgp, int reps);

} // namespace rypanel
