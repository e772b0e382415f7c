#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rypanel/diagnostics.hpp"
#include "rypanel/linreg.hpp"
#include "rypanel/model_spec.hpp"
#include "rypanel/panel_data.hpp"

namespace rypanel {

enum class TermRole { Intercept, EventDummy, Regressor };

struct Term {
    std::string label;
    TermRole role = TermRole::Regressor;
    double beta = 0.0;
    double se = 0.0;
    double t = 0.0;
    Significance significance = Significance::None;

    bool operator==(const Term&) const = default;
};

struct EntityEffect {
    std::string entity;
    double value = 0.0;
    double se = 0.0;
    double t = 0.0;

    bool operator==(const EntityEffect&) const = default;
};

struct VarianceComponents {
    double sigma2_e = 0.0; // idiosyncratic
    double sigma2_u = 0.0; // entity effect, clamped at zero
    std::map<std::string, double> theta; // quasi-demeaning weight per entity
    bool clamped = false;

    bool operator==(const VarianceComponents&) const = default;
};

struct EstimationResult {
    ModelSpec spec;
    Effects effects_used = Effects::Pooled;
    std::vector<Term> coefficients;          // intercept, event dummies, regressors
    std::vector<EntityEffect> entity_dummies;
    double r2_adj = 0.0;
    double residual_part = 0.0;
    double durbin_watson = 0.0;
    double sum_elasticities = 0.0;
    std::optional<HausmanResult> hausman;
    int n = 0;
    int k = 0;
    int residual_df = 0;
    double sigma2 = 0.0; // residual variance at the model's df
    std::optional<VarianceComponents> variance;
    std::vector<std::string> notes;          // clamp events, singleton warnings, conventions
    std::vector<RowKey> row_index;           // rows that entered the fit

    // Regressor block kept in matrix form for the Hausman comparison and for
    // lossless serialization.
    std::vector<std::string> regressor_labels;
    Vector regressor_betas;
    Matrix regressor_cov;

    const Term* find_term(const std::string& label) const;

    bool operator==(const EstimationResult& other) const;
};

EstimationResult pooled_ols(const PanelDataset& ds, const ModelSpec& spec,
                            ZeroPolicy zero_policy = ZeroPolicy::Error);

EstimationResult fixed_effects_lsdv(const PanelDataset& ds, const ModelSpec& spec,
                                    ZeroPolicy zero_policy = ZeroPolicy::Error);

EstimationResult fixed_effects_within(const PanelDataset& ds, const ModelSpec& spec,
                                      ZeroPolicy zero_policy = ZeroPolicy::Error);

/// Swamy-Arora components: sigma2_e from the within regression
/// (df = n - k - |entities|), sigma2_u from the between regression minus
/// sigma2_e / harmonic-mean(T_i), clamped at zero.
VarianceComponents variance_components(const PanelDataset& ds, const ModelSpec& spec,
                                       ZeroPolicy zero_policy = ZeroPolicy::Error);

EstimationResult random_effects_gls(const PanelDataset& ds, const ModelSpec& spec,
                                    ZeroPolicy zero_policy = ZeroPolicy::Error);

/// Test harness: GLS with every entity's theta forced to a given value
/// (0 degenerates to pooled OLS, ~1 approaches the within estimator).
EstimationResult random_effects_gls_forced(const PanelDataset& ds, const ModelSpec& spec,
                                           double forced_theta,
                                           ZeroPolicy zero_policy = ZeroPolicy::Error);

/// Label-aligned Hausman comparison of two fitted models (regressor
/// coefficients only; intercept and dummies excluded). Both covariances are
/// rescaled to the efficient estimator's residual variance before
/// differencing; with two independent variance estimates the difference is
/// noisy enough to inflate the test size and go non-PD in ordinary samples.
HausmanResult hausman_test(const EstimationResult& fe, const EstimationResult& re, double alpha);

/// Dispatcher. Effects::Auto estimates FE and RE, runs the Hausman test at
/// spec.alpha and keeps RE when the random-effects hypothesis is accepted;
/// otherwise (rejected or test not computable) keeps the dummy-variable FE.
EstimationResult estimate(const PanelDataset& ds, const ModelSpec& spec,
                          ZeroPolicy zero_policy = ZeroPolicy::Error);

/// x_it - theta_i * mean_i(x): theta 0 is the identity, theta 1 full
/// entity demeaning.
Vector quasi_demean(const Vector& values, const std::vector<RowKey>& row_index,
                    const std::map<std::string, double>& theta);

} // namespace rypanel
