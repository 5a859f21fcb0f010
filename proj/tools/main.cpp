// Command-line front end: scenario runner, steady-state and classicality
// reports, correlation snapshots, and built-in figure presets.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "kclind/classicality.hpp"
#include "kclind/config.hpp"
#include "kclind/correlations.hpp"
#include "kclind/csv.hpp"
#include "kclind/errors.hpp"
#include "kclind/model.hpp"
#include "kclind/propagator.hpp"
#include "kclind/scenarios.hpp"

namespace {

using nlohmann::json;

struct GlobalOptions {
    std::string config_path;
    std::string out_path;
    bool force = false;
    int threads = 0;  // 0 keeps the config file's value
    long seed = -1;   // reserved; accepted for interface stability
};

// JSON has no literal for infinities, so represent them as strings.
json finite_or_string(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    return x;
}

json matrix_to_json(const kclind::Matrix& m) {
    json rows = json::array();
    for (kclind::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (kclind::Index j = 0; j < m.cols(); ++j) {
            row.push_back({m(i, j).real(), m(i, j).imag()});
        }
        rows.push_back(row);
    }
    return rows;
}

json real_matrix_to_json(const kclind::RealMatrix& m) {
    json rows = json::array();
    for (kclind::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (kclind::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

void write_text_output(const std::string& path, const std::string& body, bool force) {
    if (!force) {
        std::ifstream probe(path);
        if (probe.good()) {
            throw kclind::IoError("refusing to overwrite existing file '" + path +
                                  "' (use --force)");
        }
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw kclind::IoError("cannot open '" + path + "' for writing");
    out << body;
    if (!out) throw kclind::IoError("failed while writing '" + path + "'");
}

kclind::ScenarioConfig load_config(const GlobalOptions& opts, bool required) {
    kclind::ScenarioConfig cfg;
    if (!opts.config_path.empty()) {
        cfg = kclind::load_scenario_config(opts.config_path);
    } else if (required) {
        throw kclind::ConfigError("this command needs --config <file>");
    }
    if (!opts.out_path.empty()) cfg.out = opts.out_path;
    if (opts.threads > 0) cfg.threads = opts.threads;
    return cfg;
}

// Emit a scenario result: CSV to the requested file (summary to stdout), or
// CSV straight to stdout when no output path is configured.
void emit_result(const kclind::ScenarioResult& result, const kclind::ScenarioConfig& cfg,
                 bool force) {
    if (!cfg.out.empty()) {
        kclind::write_csv(result.table, cfg.out, force);
        json summary = json::parse(result.summary_json);
        summary["out"] = cfg.out;
        std::cout << summary.dump(2) << "\n";
    } else {
        std::cout << kclind::to_csv(result.table);
        std::cerr << result.summary_json << "\n";
    }
}

void emit_report(const json& report, const GlobalOptions& opts) {
    std::string body = report.dump(2) + "\n";
    if (!opts.out_path.empty()) {
        write_text_output(opts.out_path, body, opts.force);
    }
    std::cout << body;
}

int cmd_simulate(const GlobalOptions& opts) {
    kclind::ScenarioConfig cfg = load_config(opts, true);
    kclind::ScenarioResult result = kclind::run_scenario(cfg);
    emit_result(result, cfg, opts.force);
    return 0;
}

int cmd_scan(const GlobalOptions& opts) {
    kclind::ScenarioConfig cfg = load_config(opts, true);
    if (cfg.scenario != kclind::ScenarioKind::SeparableMax &&
        cfg.scenario != kclind::ScenarioKind::AsymmetryScan) {
        throw kclind::ConfigError(
            std::string("scan expects scenario=separable_max or scenario=asymmetry_scan; got '") +
            kclind::scenario_name(cfg.scenario) + "'");
    }
    kclind::ScenarioResult result = kclind::run_scenario(cfg);
    emit_result(result, cfg, opts.force);
    return 0;
}

kclind::ScenarioKind figure_kind(const std::string& tag) {
    if (tag == "fig1") return kclind::ScenarioKind::Fig1;
    if (tag == "fig2") return kclind::ScenarioKind::Fig2;
    if (tag == "fig4") return kclind::ScenarioKind::Fig4;
    if (tag == "fig5a") return kclind::ScenarioKind::Fig5a;
    if (tag == "fig5b") return kclind::ScenarioKind::Fig5b;
    if (tag == "fig6") return kclind::ScenarioKind::Fig6;
    throw kclind::ConfigError("figure: expected one of fig1 fig2 fig4 fig5a fig5b fig6, got '" +
                              tag + "'");
}

int cmd_figure(const std::string& tag, const GlobalOptions& opts) {
    if (!opts.config_path.empty()) {
        throw kclind::ConfigError("figure uses built-in presets; --config is not accepted here");
    }
    kclind::ScenarioConfig cfg = kclind::default_figure_config(figure_kind(tag));
    cfg.out = opts.out_path.empty() ? tag + ".csv" : opts.out_path;
    if (opts.threads > 0) cfg.threads = opts.threads;
    kclind::ScenarioResult result = kclind::run_scenario(cfg);
    emit_result(result, cfg, opts.force);
    return 0;
}

int cmd_steady(const GlobalOptions& opts) {
    kclind::ScenarioConfig cfg = load_config(opts, false);
    kclind::BipartiteModel model = kclind::build_two_qubit_model(cfg.model);
    kclind::Superoperator liouvillian = kclind::build_liouvillian(model);
    kclind::SteadyStateResult steady = kclind::steady_states(liouvillian);

    json report;
    report["command"] = "steady";
    report["null_dimension"] = steady.null_dimension;
    report["residual"] = steady.residual;
    report["gap_ratio"] = finite_or_string(steady.gap_ratio);
    report["singular_values"] = steady.singular_values;
    report["unique"] = steady.state.has_value();
    if (steady.state.has_value()) {
        report["state"] = matrix_to_json(steady.state->matrix());
        report["concurrence"] = kclind::concurrence(*steady.state);
    }
    emit_report(report, opts);
    return 0;
}

kclind::ProjectorSet projector_set_for(kclind::ConstraintKind kind) {
    switch (kind) {
        case kclind::ConstraintKind::PlusPlus:
            return kclind::qubit_plus_minus_projectors();
        case kclind::ConstraintKind::XBasis:
            return kclind::qubit_x_projectors();
        case kclind::ConstraintKind::MinusMinus:
        case kclind::ConstraintKind::None:
            return kclind::qubit_minus_plus_projectors();
    }
    throw kclind::ConfigError("unknown constraint kind");
}

const char* verdict_name(kclind::ClosureVerdict verdict) {
    switch (verdict) {
        case kclind::ClosureVerdict::Classical:
            return "classical";
        case kclind::ClosureVerdict::NonClassical:
            return "non_classical";
        case kclind::ClosureVerdict::DegenerateUnconstrained:
            return "degenerate_unconstrained";
    }
    return "unknown";
}

int cmd_classicality(const GlobalOptions& opts) {
    kclind::ScenarioConfig cfg = load_config(opts, false);
    kclind::BipartiteModel model = kclind::build_two_qubit_model(cfg.model);
    kclind::ProjectorSet proj = projector_set_for(cfg.model.constraint);
    kclind::ClosureReport closure =
        kclind::check_closure(model.channels_a, model.channels_b, proj, proj);

    json report;
    report["command"] = "classicality";
    report["verdict"] = verdict_name(closure.verdict);
    report["classical"] = closure.classical;
    report["residual"] = closure.residual;
    report["diagonal_defect"] = closure.diagonal_defect;
    json alpha = json::array();
    for (const kclind::RealMatrix& a : closure.alpha) alpha.push_back(real_matrix_to_json(a));
    json beta = json::array();
    for (const kclind::RealMatrix& b : closure.beta) beta.push_back(real_matrix_to_json(b));
    report["alpha"] = alpha;
    report["beta"] = beta;
    if (closure.verdict == kclind::ClosureVerdict::Classical) {
        std::vector<double> gammas_a, gammas_b;
        for (const kclind::DissipativeChannel& ch : model.channels_a) gammas_a.push_back(ch.rate);
        for (const kclind::DissipativeChannel& ch : model.channels_b) gammas_b.push_back(ch.rate);
        kclind::RateMatrix rates = kclind::rate_coefficients(closure, gammas_a, gammas_b);
        json rates_a = json::array();
        for (const kclind::RealMatrix& a : rates.a) rates_a.push_back(real_matrix_to_json(a));
        json rates_b = json::array();
        for (const kclind::RealMatrix& b : rates.b) rates_b.push_back(real_matrix_to_json(b));
        report["rates_a"] = rates_a;
        report["rates_b"] = rates_b;
    }
    emit_report(report, opts);
    return 0;
}

int cmd_correlations(const GlobalOptions& opts) {
    kclind::ScenarioConfig cfg = load_config(opts, false);
    kclind::DensityMatrix rho = kclind::build_initial_state(cfg.initial);
    kclind::CorrelationReport rep = kclind::correlation_report(rho, cfg.measurement_side);

    json report;
    report["command"] = "correlations";
    report["concurrence"] = rep.concurrence;
    report["mutual_information"] = rep.mutual_information;
    report["classical_correlation"] = rep.classical;
    report["discord"] = rep.discord;
    report["entropy_a"] = rep.entropy_a;
    report["entropy_b"] = rep.entropy_b;
    report["entropy_ab"] = rep.entropy_ab;
    report["direction"] = {{"theta", rep.direction.theta}, {"phi", rep.direction.phi}};
    report["measured_side"] = cfg.measurement_side == kclind::MeasuredSide::B ? "b" : "a";
    emit_report(report, opts);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulator for bipartite open systems with constrained dissipation"};
    app.require_subcommand(1);

    GlobalOptions opts;
    app.add_option("--config", opts.config_path, "key=value configuration file");
    app.add_option("--out", opts.out_path, "output path (overrides the config file)");
    app.add_flag("--force", opts.force, "overwrite existing output files");
    app.add_option("--threads", opts.threads, "worker threads for grids and scans")
        ->check(CLI::PositiveNumber);
    app.add_option("--seed", opts.seed, "reserved; all algorithms are deterministic");

    CLI::App* simulate = app.add_subcommand("simulate", "run the configured scenario");
    CLI::App* steady = app.add_subcommand("steady", "stationary-state report for the model");
    CLI::App* classicality =
        app.add_subcommand("classicality", "projective closure check and rate coefficients");
    CLI::App* scan = app.add_subcommand("scan", "grid scans: separable_max, asymmetry_scan");
    CLI::App* figure = app.add_subcommand("figure", "built-in presets producing CSV tables");
    std::string figure_tag;
    figure->add_option("tag", figure_tag, "one of fig1 fig2 fig4 fig5a fig5b fig6")->required();
    CLI::App* correlations =
        app.add_subcommand("correlations", "correlation report for the configured initial state");
    for (CLI::App* sub : {simulate, steady, classicality, scan, figure, correlations}) {
        sub->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(opts);
        if (steady->parsed()) return cmd_steady(opts);
        if (classicality->parsed()) return cmd_classicality(opts);
        if (scan->parsed()) return cmd_scan(opts);
        if (figure->parsed()) return cmd_figure(figure_tag, opts);
        if (correlations->parsed()) return cmd_correlations(opts);
        throw kclind::ConfigError("no command selected");
    } catch (const kclind::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const kclind::ToleranceError& e) {
        std::cerr << "tolerance error: " << e.what() << "\n";
        return 3;
    } catch (const kclind::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
