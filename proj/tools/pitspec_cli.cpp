// pitspec command-line front end.
//
// Exit codes: 0 ok, 2 input error, 3 fit failure, 4 bootstrap instability,
// 5 configuration error (bad plan file, unknown model or statistic).

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "pitspec/pitspec.hpp"

namespace {

using namespace pitspec;

enum ExitCode : int { kOk = 0, kInputError = 2, kFitFailure = 3, kBootstrapUnstable = 4, kConfigError = 5 };

std::vector<double> load_series(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return read_returns_csv(in);
}

ConditionalModel load_model(const std::string& id) {
    try {
        return ConditionalModel::from_id(id);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

std::vector<StatisticSpec> load_statistics(const std::vector<std::string>& names) {
    std::vector<StatisticSpec> specs;
    for (const auto& n : names) {
        try {
            specs.push_back(StatisticSpec::parse(n));
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    return specs;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    return out;
}

struct Common {
    std::string model = "garch11-n";
    std::size_t B = 199;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool with_boot) {
    cmd->add_option("--model", c.model, "model id: garch11-n, garch11-t5, ar1-garch11-n, ar1-garch11-t5")
        ->capture_default_str();
    cmd->add_option("--seed", c.seed, "master seed")->capture_default_str();
    if (with_boot) {
        cmd->add_option("--B", c.B, "bootstrap replicates")->capture_default_str()->check(CLI::PositiveNumber);
        cmd->add_option("--workers", c.workers, "worker threads (0 = all cores)")->capture_default_str();
    }
}

int run_test(const std::string& data, const Common& c, const std::vector<std::string>& stat_names) {
    const auto model = load_model(c.model);
    const auto specs = load_statistics(stat_names);
    const auto y = load_series(data);
    BootstrapOptions opts;
    opts.workers = c.workers;
    const auto run = parametric_bootstrap(model, y, specs, c.B, c.seed, opts);
    const auto report = test_report_json(model, run, y.size(), c.B, c.seed);
    const std::string prefix = c.out.empty() ? "pitspec_test" : c.out;
    open_out(prefix + ".json") << report.dump(2) << '\n';
    {
        auto txt = open_out(prefix + ".txt");
        write_estimate_table(txt, model, run.fit);
        txt << '\n';
        write_pvalue_table(txt, model, run);
    }
    write_pvalue_table(std::cout, model, run);
    return kOk;
}

int run_autocorrelogram(const std::string& data, const Common& c, std::size_t k, const std::string& norm_name,
                        std::string csv_path) {
    const auto model = load_model(c.model);
    Norm norm;
    if (norm_name == "cvm" || norm_name == "CvM") norm = Norm::CvM;
    else if (norm_name == "ks" || norm_name == "KS") norm = Norm::KS;
    else throw ConfigError("norm must be cvm or ks");
    const auto y = load_series(data);
    BootstrapOptions opts;
    opts.workers = c.workers;
    const auto specs = autocorrelogram_specs(norm, k);
    const auto run = parametric_bootstrap(model, y, specs, c.B, c.seed, opts);
    const auto data_out = make_autocorrelogram(model, run, norm);
    const std::string svg_path = c.out.empty() ? "autocorrelogram.svg" : c.out;
    if (csv_path.empty()) {
        csv_path = std::filesystem::path(svg_path).replace_extension(".csv").string();
    }
    {
        auto svg = open_out(svg_path);
        write_autocorrelogram_svg(svg, data_out);
    }
    {
        auto csv = open_out(csv_path);
        write_autocorrelogram_csv(csv, data_out);
    }
    write_autocorrelogram_csv(std::cout, data_out);
    return kOk;
}

int run_simulate(const Common& c, const std::string& params_text, std::size_t n, std::size_t burnin) {
    const auto model = load_model(c.model);
    const auto params = parse_params(model, params_text);
    const auto y = model.simulate(params, n, c.seed, burnin);
    if (c.out.empty()) {
        write_series_csv(std::cout, y);
    } else {
        auto out = open_out(c.out);
        write_series_csv(out, y);
    }
    return kOk;
}

int run_estimate(const std::string& data, const Common& c) {
    const auto model = load_model(c.model);
    const auto y = load_series(data);
    FitOptions fo;
    fo.seed = c.seed;
    const auto fit = fit_ml(model, y, std::nullopt, fo);
    if (!fit.converged) throw FitError("estimation did not converge");
    write_estimate_table(std::cout, model, fit);
    if (!c.out.empty()) {
        open_out(c.out) << estimate_report_json(model, fit, y.size()).dump(2) << '\n';
    }
    return kOk;
}

int run_mc(const std::string& plan_path, const std::string& out_path, std::size_t workers) {
    std::ifstream in(plan_path);
    if (!in) throw InputError("cannot open plan '" + plan_path + "'");
    ExperimentPlan plan = parse_plan(in);
    if (workers > 0) plan.workers = workers;
    const auto table = run_experiment(plan);
    if (out_path.empty()) {
        write_power_csv(std::cout, table);
    } else {
        auto out = open_out(out_path);
        write_power_csv(out, table);
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pitspec: specification tests for conditional distribution models"};
    app.require_subcommand(1);

    Common c;
    std::string data;
    std::vector<std::string> stats{"D1CvM", "ADJ_1", "ADJ_5", "D1KS", "MDJ_1", "MDJ_5"};

    auto* test = app.add_subcommand("test", "fit a model and bootstrap p-values of PIT statistics");
    test->add_option("--data", data, "returns CSV")->required();
    add_common(test, c, true);
    test->add_option("--stat", stats, "statistics (D1CvM, D1KS, D2CvM_j, D2KS_j, DpCvM_p, DpKS_p, ADJ_k, MDJ_k, ADJ0_k, MDJ0_k)")
        ->capture_default_str();
    test->add_option("--out", c.out, "output prefix for <out>.json and <out>.txt");

    std::size_t k = 5;
    std::string norm = "cvm";
    std::string csv_path;
    auto* acg = app.add_subcommand("autocorrelogram", "generalized autocorrelogram with bootstrap critical values");
    acg->add_option("--data", data, "returns CSV")->required();
    add_common(acg, c, true);
    acg->add_option("--k", k, "number of lags")->capture_default_str()->check(CLI::PositiveNumber);
    acg->add_option("--norm", norm, "cvm or ks")->capture_default_str();
    acg->add_option("--out", c.out, "SVG output path");
    acg->add_option("--csv", csv_path, "CSV output path (default: SVG path with .csv)");

    std::string params;
    std::size_t n = 1000;
    std::size_t burnin = 500;
    auto* sim = app.add_subcommand("simulate", "simulate a series from a model");
    add_common(sim, c, false);
    sim->add_option("--params", params, "comma list of mean, ar1, omega, alpha, beta assignments (default: 0, 0, 0.1, 0.1, 0.8)");
    sim->add_option("--n", n, "observations")->capture_default_str()->check(CLI::PositiveNumber);
    sim->add_option("--burnin", burnin, "discarded warm-up steps")->capture_default_str();
    sim->add_option("--out", c.out, "output CSV (default stdout)");

    auto* est = app.add_subcommand("estimate", "maximum-likelihood estimates with standard errors");
    est->add_option("--data", data, "returns CSV")->required();
    add_common(est, c, false);
    est->add_option("--out", c.out, "output JSON");

    std::string plan_path;
    std::size_t mc_workers = 0;
    auto* mc = app.add_subcommand("mc", "Monte Carlo size/power experiment from a key=value plan");
    mc->add_option("--plan", plan_path, "plan file")->required();
    mc->add_option("--workers", mc_workers, "override plan workers");
    mc->add_option("--out", c.out, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    try {
        if (*test) return run_test(data, c, stats);
        if (*acg) return run_autocorrelogram(data, c, k, norm, csv_path);
        if (*sim) return run_simulate(c, params, n, burnin);
        if (*est) return run_estimate(data, c);
        if (*mc) return run_mc(plan_path, c.out, mc_workers);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const FitError& e) {
        std::cerr << "fit failure: " << e.what() << '\n';
        return kFitFailure;
    } catch (const BootstrapError& e) {
        std::cerr << "bootstrap failure: " << e.what() << '\n';
        return kBootstrapUnstable;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::domain_error& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kOk;
}
