#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "slowns/campaign.hpp"
#include "slowns/errors.hpp"

using namespace slowns;

namespace {

enum Exit { pass = 0, check_failed = 1, config_error = 2, solver_failure = 3 };

void print_verdicts(const std::vector<Verdict>& v) {
    for (const Verdict& x : v)
        std::printf("%-36s %s  lhs=%s rhs=%s\n", x.name.c_str(), x.pass ? "PASS" : "FAIL",
                    format_double(x.lhs).c_str(), format_double(x.rhs).c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"slowns: limit-system and 2D solvers with slow-variable diagnostics"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    long long seed = -1;
    double eps = 0.0;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Configuration file")->required();
        sub->add_option("--out", out_dir, "Output directory (default: run.output_dir)");
        sub->add_option("--seed", seed, "Override run.seed")->check(CLI::NonNegativeNumber);
    };

    CLI::App* run1d = app.add_subcommand("run1d", "Solve the slab of limit systems");
    common(run1d);
    CLI::App* run2d = app.add_subcommand("run2d", "Solve the 2D system from embedded data");
    common(run2d);
    run2d->add_option("--eps", eps, "Slow-variable parameter")->required();
    CLI::App* pair = app.add_subcommand("pair", "Paired slab and 2D run with remainder budget");
    common(pair);
    pair->add_option("--eps", eps, "Slow-variable parameter")->required();
    CLI::App* sweep = app.add_subcommand("sweep", "Paired runs over run.eps_list with scaling slopes");
    common(sweep);
    CLI::App* check = app.add_subcommand("check", "Randomized inequality and operator suites");
    common(check);

    CLI::App* fit = app.add_subcommand("fit", "Exponential decay fit of a CSV column");
    std::string csv, column;
    double t0 = 0.0, t1 = -1.0;
    fit->add_option("csv", csv, "Series CSV")->required();
    fit->add_option("--column", column, "Column name")->required();
    fit->add_option("--t0", t0, "Window start");
    fit->add_option("--t1", t1, "Window end (default: last time)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? Exit::pass : Exit::config_error;
    }

    try {
        if (fit->parsed()) {
            const DecayFit f = fit_csv(csv, column, {t0, t1});
            nlohmann::json j = {{"name", column},
                                {"C", f.C},
                                {"alpha", f.alpha},
                                {"r2", f.r2},
                                {"window", {f.window.first, f.window.second}}};
            std::cout << j.dump(2) << '\n';
            return Exit::pass;
        }

        CampaignConfig cfg = load_config(config_path);
        if (seed >= 0) cfg.seed = std::uint64_t(seed);
        const std::string out = out_dir.empty() ? cfg.output_dir : out_dir;

        std::vector<Verdict> verdicts;
        if (run1d->parsed()) {
            verdicts = run_1d(cfg, out).verdicts;
        } else if (run2d->parsed()) {
            verdicts = run_2d(cfg, eps, out).verdicts;
        } else if (pair->parsed()) {
            const PairResult r = run_pair(cfg, eps, out);
            std::printf("E_eps=%s theta_eps=%s band=%s\n", format_double(r.budget.E_eps).c_str(),
                        format_double(r.budget.theta_eps).c_str(), format_double(r.band).c_str());
            verdicts.push_back({"theta_in_band", r.budget.theta_eps, r.band, r.band - r.budget.theta_eps,
                                !r.budget.band_exit});
        } else if (sweep->parsed()) {
            const SweepSummary s = run_sweep(cfg, out);
            for (const auto& [k, v] : s.slopes) std::printf("slope %-12s %s\n", k.c_str(), format_double(v).c_str());
            verdicts = s.verdicts;
        } else if (check->parsed()) {
            verdicts = check_inequalities(cfg, out);
        }
        print_verdicts(verdicts);
        return all_pass(verdicts) ? Exit::pass : Exit::check_failed;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return Exit::config_error;
    } catch (const SolverError& e) {
        std::fprintf(stderr, "solver failure at t=%s slice=%ld: %s\n", format_double(e.time()).c_str(), e.slice(),
                     e.what());
        return Exit::solver_failure;
    } catch (const BoxTooSmall& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return Exit::config_error;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return Exit::check_failed;
    }
}
