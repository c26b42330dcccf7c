// Command-line driver: runs experiment presets or config files and the
// verification suites.

#include "sparsense/harness/config.hpp"
#include "sparsense/harness/experiment.hpp"
#include "sparsense/harness/output.hpp"
#include "sparsense/harness/registry.hpp"
#include "sparsense/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace sparsense;

namespace {

struct RunArgs {
    std::string target;
    std::optional<std::size_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> scale;
    std::string out = "results";
    bool gnuplot = false;
    bool mean_of_db = false;
    std::size_t jobs = 0;
};

std::string config_text(const std::string& target) {
    if (fs::is_regular_file(target)) return read_file(target);
    if (auto preset = find_preset(target)) return std::string(*preset);
    std::string names;
    for (const auto& p : kPresets) names += std::string(names.empty() ? "" : ", ") + std::string(p.name);
    throw std::runtime_error("'" + target + "' is neither a config file nor a preset (" + names + ")");
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    return f;
}

double elapsed(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

int run(const RunArgs& args) {
    LoadOptions load;
    load.trials = args.trials;
    load.seed = args.seed;
    load.scale_N = args.scale;
    ExperimentSpec spec = load_experiment(config_text(args.target), load);
    if (args.mean_of_db) spec.aggregation = Aggregation::MeanDb;
    fs::create_directories(args.out);
    const auto start = std::chrono::steady_clock::now();
    const RunOptions opts{args.jobs};

    std::printf("%s: N=%zu M=%zu trials=%zu seed=%llu\n", spec.name.c_str(), spec.signal.N, spec.sensing.M,
                spec.trials, static_cast<unsigned long long>(spec.seed));

    if (!spec.sweep_M.empty()) {
        const auto points = run_sweep(spec, opts);
        const fs::path path = fs::path(args.out) / (spec.name + "_sweep.csv");
        auto f = open_out(path);
        write_sweep_csv(spec.name, points, f);
        for (const auto& p : points) std::printf("  M=%-5zu %-16s %8.2f dB\n", p.M, p.label.c_str(), p.steady_rmse_db);
        std::printf("wrote %s (%.1f s)\n", path.string().c_str(), elapsed(start));
        return 0;
    }

    const auto result = run_experiment(spec, opts);
    const fs::path curves = fs::path(args.out) / (spec.name + (args.gnuplot ? ".dat" : ".csv"));
    const fs::path summary = fs::path(args.out) / (spec.name + "_summary.csv");
    {
        auto f = open_out(curves);
        if (args.gnuplot) write_curves_gnuplot(result, f);
        else write_curves_csv(result, f);
    }
    {
        auto f = open_out(summary);
        write_summary_csv(result, f);
    }
    for (std::size_t a = 0; a < result.curves.size(); ++a) {
        const auto& c = result.curves[a];
        double wall = 0.0;
        for (const auto& t : result.records[a]) wall += t.wallclock_s;
        std::printf("  %-16s final %8.2f dB  steady %8.2f dB", c.label.c_str(), c.rmse_db.back(),
                    tail_mean_db(c.rmse_db, spec.sensing.M));
        if (!c.s_mean.empty()) std::printf("  s %6.1f", c.s_mean.back());
        std::printf("  %.2f s/trial\n", wall / static_cast<double>(result.records[a].size()));
    }
    std::printf("wrote %s, %s (%.1f s)\n", curves.string().c_str(), summary.string().c_str(), elapsed(start));
    return 0;
}

int report(const std::vector<verify::SuiteResult>& results) {
    bool ok = true;
    for (const auto& r : results) {
        std::printf("%-4s %-22s %8zu cases  %6.2f s  %s\n", r.passed() ? "ok" : "FAIL", r.name.c_str(), r.cases,
                    r.seconds, r.detail.c_str());
        ok = ok && r.passed();
    }
    return ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Online sparse spectrum estimation with LMS-family filters"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment preset or config file");
    run_cmd->add_option("target", run_args.target, "Preset name or config path")->required();
    run_cmd->add_option("--trials", run_args.trials, "Override the number of trials");
    run_cmd->add_option("--seed", run_args.seed, "Override the master seed");
    run_cmd->add_option("--scale", run_args.scale, "Replace N (M and burn-ins scale with it)");
    run_cmd->add_option("--out", run_args.out, "Output directory")->capture_default_str();
    run_cmd->add_flag("--gnuplot", run_args.gnuplot, "Write curves as gnuplot blocks instead of CSV");
    run_cmd->add_flag("--mean-of-db", run_args.mean_of_db, "Average per-trial dB instead of linear r-MSE");
    run_cmd->add_option("--jobs,-j", run_args.jobs, "Worker threads (0 = all cores)");

    app.add_subcommand("list", "List built-in presets");

    std::size_t draws = 100000;
    std::uint64_t vseed = 20240611;
    auto* verify_cmd = app.add_subcommand("verify", "Randomized checks of the recovery theorems and SZA bias");
    verify_cmd->add_option("--draws", draws, "Random draws per theorem")->capture_default_str();
    verify_cmd->add_option("--seed", vseed, "Seed for the random draws")->capture_default_str();

    auto* oracle_cmd = app.add_subcommand("oracle", "Cross-check core routines against brute-force references");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) return run(run_args);
        if (app.got_subcommand("list")) {
            for (const auto& p : kPresets) {
                std::string_view first = p.text.substr(0, p.text.find('\n'));
                if (first.starts_with("# ")) first.remove_prefix(2);
                std::printf("%-14s %.*s\n", std::string(p.name).c_str(), static_cast<int>(first.size()), first.data());
            }
            return 0;
        }
        if (*verify_cmd) {
            verify::BiasStudy study;
            study.seed = mix_seed(vseed, 4);
            return report({verify::theorem2_suite(draws, vseed), verify::theorem2_tightness(),
                           verify::theorem3_suite(draws, mix_seed(vseed, 3)), verify::theorem3_tightness(),
                           verify::sza_bias_study(study).result});
        }
        if (*oracle_cmd)
            return report({verify::hard_threshold_suite(), verify::sensing_identity_suite(),
                           verify::tracker_identity_suite(), verify::sampling_statistics_suite()});
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
