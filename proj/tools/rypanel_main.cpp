#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rypanel/config.hpp"
#include "rypanel/errors.hpp"
#include "rypanel/estimators.hpp"
#include "rypanel/panel_data.hpp"
#include "rypanel/report.hpp"
#include "rypanel/rybczynski.hpp"
#include "rypanel/synthetic.hpp"

namespace {

using namespace rypanel;

constexpr int kExitOk = 0;
constexpr int kExitEstimation = 1;
constexpr int kExitConfig = 2;

void emit(const RunConfig& config, const std::string& text) {
    if (config.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(config.out_path, std::ios::binary);
    if (!out) fail(ErrorCode::IoError, "cannot write output file '" + config.out_path + "'");
    out << text;
}

PanelDataset load_logged(const RunConfig& config, const ModelSpec& spec) {
    PanelDataset ds = load_panel_file(config.data_path);
    if (!spec.log_all) return ds;
    // Explicit transform so the Drop policy (when chosen) is applied up
    // front and dropped rows surface in the run output.
    std::vector<std::string> variables{spec.dependent};
    for (const auto& name : spec.regressors) variables.push_back(name);
    std::vector<RowKey> dropped;
    PanelDataset logged = log_transform(ds, variables, config.zero_policy, &dropped);
    if (!dropped.empty())
        std::cerr << "note: dropped " << dropped.size() << " row(s) with nonpositive values\n";
    return logged;
}

int cmd_estimate(const RunConfig& config) {
    config.validate_for(Command::Estimate);
    const ModelSpec spec = config.to_model_spec();
    const PanelDataset ds = load_logged(config, spec);
    const EstimationResult result = estimate(ds, spec, config.zero_policy);
    emit(config, render_estimation(result, config.format));
    return kExitOk;
}

int cmd_study(const RunConfig& config) {
    config.validate_for(Command::Study);
    const StudyPeriodId period = *parse_study_id(*config.study);

    StudyOptions options;
    options.effects = config.effects.value_or(Effects::Auto);
    options.alpha = config.alpha;
    options.zero_policy = config.zero_policy;
    options.labor_variable = config.labor_variable;

    PanelDataset ds = load_panel_file(config.data_path);
    StudyResult result = run_study(ds, period, options);
    result.data_source = config.data_path;
    emit(config, render_study(result, config.format));

    for (const auto& [code, outcome] : result.per_industry)
        if (!outcome.ok()) return kExitEstimation;
    return kExitOk;
}

int cmd_simulate(const RunConfig& config) {
    config.validate_for(Command::Simulate);
    const McHarness harness = parse_mc_preset(*config.preset);

    DgpSpec dgp = config.dgp;
    dgp.seed = config.seed;
    if (harness == McHarness::HausmanPower) dgp.effects_correlated_with_x = true;

    const McSummary summary = monte_carlo(harness, dgp, config.reps);
    emit(config, render_mc(summary, config.format));
    return kExitOk;
}

int cmd_validate(const RunConfig& config, const std::string& config_path) {
    config.validate_for(Command::Validate);
    const PanelDataset ds = load_panel_file(config.data_path);
    const BalanceReport report = balance_check(ds);

    std::ostringstream out;
    out << "data: " << config.data_path << '\n';
    out << "rows: " << ds.n_rows() << ", entities: " << ds.entities.size()
        << ", years: " << (ds.periods.empty() ? 0 : ds.periods.front()) << "-"
        << (ds.periods.empty() ? 0 : ds.periods.back()) << '\n';
    out << "variables:";
    for (const auto& name : ds.column_names) out << ' ' << name;
    out << '\n';
    out << render_balance(report, config.format == OutputFormat::Json ? OutputFormat::Json
                                                                      : OutputFormat::Text);
    if (!config_path.empty()) out << "config: " << config_path << " parsed cleanly\n";
    emit(config, out.str());
    return kExitOk;
}

int cmd_generate(const RunConfig& config) {
    config.validate_for(Command::Generate);
    const PanelDataset ds = generate_study_panel(config.seed);
    write_panel_file(ds, config.out_path);
    std::cout << "wrote synthetic study panel (" << ds.n_rows() << " rows, seed " << config.seed
              << ") to " << config.out_path << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rybczynski-equation panel estimation engine"};
    app.require_subcommand(1);

    RunConfig config;
    std::string config_path;
    std::string effects_text;
    std::string zero_policy_text;
    std::string format_text;
    std::string dependent;
    std::vector<std::string> regressors;
    std::vector<std::string> dummies;
    std::string study_id;
    std::string preset;
    std::string labor_variable;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "key = value config file; flags override it");
        cmd->add_option("--data", config.data_path, "panel CSV path");
        cmd->add_option("--effects", effects_text, "auto|fe|re|pooled|within");
        cmd->add_option("--alpha", config.alpha, "significance level in (0,1)");
        cmd->add_option("--zero-policy", zero_policy_text, "error|drop for nonpositive values");
        cmd->add_option("--format", format_text, "text|csv|json");
        cmd->add_option("--out", config.out_path, "output path (default stdout)");
        cmd->add_option("--seed", config.seed, "RNG seed");
    };

    CLI::App* estimate_cmd = app.add_subcommand("estimate", "estimate one model spec");
    add_common(estimate_cmd);
    estimate_cmd->add_option("--dependent", dependent, "dependent variable");
    estimate_cmd->add_option("--regressors", regressors, "comma-separated regressor list")
        ->delimiter(',');
    estimate_cmd->add_option("--dummy", dummies, "event dummy Name:year (repeatable)");

    CLI::App* study_cmd = app.add_subcommand("study", "run one built-in study window");
    add_common(study_cmd);
    study_cmd->add_option("--study", study_id, "1980-1985|1986-1994|1980-1994|1995-1999");
    study_cmd->add_option("--labor-variable", labor_variable,
                          "override the per-industry labor regressor");

    CLI::App* simulate_cmd = app.add_subcommand("simulate", "run a Monte-Carlo harness");
    add_common(simulate_cmd);
    simulate_cmd->add_option("--preset", preset, "hausman-size|hausman-power|estimator-recovery");
    simulate_cmd->add_option("--reps", config.reps, "repetitions (>= 100)");
    simulate_cmd->add_option("--entities", config.dgp.entities, "DGP entities");
    simulate_cmd->add_option("--periods", config.dgp.periods, "DGP periods");

    CLI::App* validate_cmd = app.add_subcommand("validate", "lint a data file and config");
    add_common(validate_cmd);

    CLI::App* generate_cmd = app.add_subcommand("generate", "write a synthetic study panel CSV");
    add_common(generate_cmd);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (!config_path.empty()) apply_config_file(config, config_path);
        // Flags win over config-file values.
        if (!effects_text.empty()) config.effects = parse_effects(effects_text);
        if (!zero_policy_text.empty()) config.zero_policy = parse_zero_policy(zero_policy_text);
        if (!format_text.empty()) config.format = parse_output_format(format_text);
        if (!dependent.empty()) config.dependent = dependent;
        if (!regressors.empty()) config.regressors = regressors;
        for (const auto& text : dummies) config.event_dummies.push_back(parse_event_dummy(text));
        if (!study_id.empty()) config.study = study_id;
        if (!preset.empty()) config.preset = preset;
        if (!labor_variable.empty()) config.labor_variable = labor_variable;

        if (estimate_cmd->parsed()) return cmd_estimate(config);
        if (study_cmd->parsed()) return cmd_study(config);
        if (simulate_cmd->parsed()) return cmd_simulate(config);
        if (validate_cmd->parsed()) return cmd_validate(config, config_path);
        if (generate_cmd->parsed()) return cmd_generate(config);
        return kExitConfig;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return (e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::IoError) ? kExitConfig
                                                                                      : kExitEstimation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitEstimation;
    }
}
