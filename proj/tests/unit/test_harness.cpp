#include "sparsense/harness/config.hpp"
#include "sparsense/harness/experiment.hpp"
#include "sparsense/harness/metrics.hpp"
#include "sparsense/harness/output.hpp"
#include "sparsense/harness/registry.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace sparsense;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using C = SpectrumVector;

namespace {

// Small noisy experiment used for determinism and output checks.
constexpr std::string_view kSmall = R"(
[experiment]
name = small
trials = 3
seed = 42

[signal]
N = 64
k = 3
snr_db = 20

[sensing]
M = 24
mode = repeated
passes = 6

[algorithm LMS]
variant = lms
mu = 0.03

[algorithm HARD-EST]
variant = hard
mu = 0.03
s = adaptive
lambda = 0.99
xi = 0.0156
q_star = 0.05
burn_in = 2M

[algorithm SZA]
variant = sza
mu = 0.03
rho = 0.0002
s = 6
)";

std::string curves_csv(const ExperimentResult& r) {
    std::ostringstream out;
    write_curves_csv(r, out);
    return out.str();
}

} // namespace

TEST_CASE("relative mean squared error") {
    const C w{{1, 0}, {0, 0}};
    CHECK(rmse(w, C{{0, 0}, {0, 0}}) == 1.0);
    CHECK(to_db(rmse(w, C{{0, 0}, {0, 0}})) == 0.0);
    CHECK(rmse(w, w) == 0.0);
    CHECK(to_db(rmse(w, w)) == kDbFloor);
    CHECK_THAT(rmse(w, C{{1, 0}, {0.1, 0}}), WithinAbs(0.01, 1e-15));
    CHECK_THAT(to_db(rmse(w, C{{1, 0}, {0.1, 0}})), WithinAbs(-20.0, 1e-12));
    CHECK_THROWS_AS(rmse(C{{0, 0}}, C{{1, 0}}), std::invalid_argument);
    CHECK_THAT(from_db(-20.0), WithinAbs(0.01, 1e-15));
}

TEST_CASE("presets match the shipped config files byte for byte") {
    REQUIRE(kPresets.size() == 5);
    for (const auto& p : kPresets) {
        INFO(p.name);
        const std::string file = read_file(std::string(SPARSENSE_SOURCE_DIR) + "/configs/" + std::string(p.name) + ".cfg");
        CHECK(file == p.text);
        const auto spec = load_experiment(p.text);
        CHECK(spec.name == p.name);
    }
    CHECK_FALSE(find_preset("exp9").has_value());
}

TEST_CASE("unitary normalization maps published parameters") {
    const auto spec = load_experiment(*find_preset("exp3"));
    const double n = 1000.0, r = std::sqrt(1000.0);
    for (const auto& a : spec.algorithms) {
        INFO(a.label);
        CHECK_THAT(a.config.mu, WithinAbs(1.0 / n, 1e-18));
        if (a.label == "RZA") {
            CHECK_THAT(a.config.rho, WithinAbs(0.005 / r, 1e-18));
            CHECK_THAT(a.config.epsilon, WithinAbs(2.25 * r, 1e-12));
        }
        if (a.label == "L0") CHECK_THAT(a.config.beta, WithinAbs(0.5 * r, 1e-12));
        if (a.tracker) {
            CHECK_THAT(a.tracker->xi, WithinAbs(1.0 / n, 1e-18));
            CHECK(a.tracker->q_star == 0.05);
        }
    }
    CHECK(spec.algorithms[4].config.burn_in == 200);
    CHECK(spec.algorithms[5].config.burn_in == 400);
}

TEST_CASE("config round trip through the unit-normalized form") {
    for (const auto& p : kPresets) {
        INFO(p.name);
        const auto a = load_experiment(p.text);
        const auto b = load_experiment(dump_config(to_document(a)));
        CHECK(a.name == b.name);
        CHECK(a.trials == b.trials);
        CHECK(a.seed == b.seed);
        CHECK(a.sweep_M == b.sweep_M);
        CHECK(a.signal.N == b.signal.N);
        CHECK(a.signal.k == b.signal.k);
        CHECK(a.signal.snr_db == b.signal.snr_db);
        CHECK(a.signal.extra_k == b.signal.extra_k);
        CHECK(a.signal.change_window == b.signal.change_window);
        CHECK(a.sensing.M == b.sensing.M);
        CHECK(a.sensing.windows() == b.sensing.windows());
        CHECK(a.sensing.passes() == b.sensing.passes());
        REQUIRE(a.algorithms.size() == b.algorithms.size());
        for (std::size_t i = 0; i < a.algorithms.size(); ++i) {
            const auto &x = a.algorithms[i], &y = b.algorithms[i];
            CHECK(x.label == y.label);
            CHECK(x.config.variant == y.config.variant);
            CHECK(x.config.mu == y.config.mu);
            CHECK(x.config.rho == y.config.rho);
            CHECK(x.config.beta == y.config.beta);
            CHECK(x.config.epsilon == y.config.epsilon);
            CHECK(x.config.s == y.config.s);
            CHECK(x.config.burn_in == y.config.burn_in);
            CHECK(x.tracker.has_value() == y.tracker.has_value());
            if (x.tracker) {
                CHECK(x.tracker->xi == y.tracker->xi);
                CHECK(x.tracker->lambda == y.tracker->lambda);
            }
        }
    }
}

TEST_CASE("config errors name the offending entry") {
    CHECK_THROWS_AS(parse_config("[signal\nN = 4"), ConfigError);
    CHECK_THROWS_AS(parse_config("N = 4"), ConfigError);
    CHECK_THROWS_AS(parse_config("[signal]\nN 4"), ConfigError);
    CHECK_THROWS_AS(load_experiment("[signal]\nN = 4"), ConfigError);

    std::string text(kSmall);
    const auto replace = [&](std::string_view from, std::string_view to) {
        std::string t = text;
        t.replace(t.find(from), from.size(), to);
        return t;
    };
    CHECK_THROWS_WITH(load_experiment(replace("variant = lms", "variant = nlms")), ContainsSubstring("[algorithm LMS]"));
    CHECK_THROWS_WITH(load_experiment(replace("mu = 0.03\n\n[algorithm HARD", "mu = fast\n\n[algorithm HARD")),
                      ContainsSubstring("mu"));
    CHECK_THROWS_WITH(load_experiment(replace("rho = 0.0002", "rh0 = 0.0002")), ContainsSubstring("unknown key 'rh0'"));
    CHECK_THROWS_AS(load_experiment(replace("mode = repeated", "mode = shuffled")), ConfigError);
    CHECK_THROWS_AS(load_experiment(replace("M = 24", "M = 65")), ConfigError);
    CHECK_THROWS_AS(load_experiment(replace("[algorithm SZA]", "[algorithm LMS]")), ConfigError);
    CHECK_THROWS_AS(load_experiment(replace("[algorithm SZA]", "[algorithm]")), ConfigError);
    CHECK_THROWS_AS(load_experiment(replace("s = 6", "s = 0")), ConfigError);
    CHECK_THROWS_AS(load_experiment(replace("[sensing]", "[sensor]")), ConfigError);
    CHECK_THROWS_AS(load_experiment(text + "\n[algorithm X]\nvariant = hard\nmu = 0.1\ns = adaptive\n"), ConfigError);
}

TEST_CASE("command-line overrides and scaling") {
    LoadOptions o;
    o.trials = 7;
    o.seed = 99;
    o.scale_N = 200;
    const auto spec = load_experiment(*find_preset("exp1"), o);
    CHECK(spec.trials == 7);
    CHECK(spec.seed == 99);
    CHECK(spec.signal.N == 200);
    CHECK(spec.sensing.M == 60);
    CHECK(spec.algorithms[1].config.burn_in == 60);
    CHECK_THAT(spec.algorithms[0].config.mu, WithinAbs(1.0 / 200.0, 1e-18));

    const auto sweep = load_experiment(*find_preset("exp-msweep"), o);
    CHECK(sweep.sweep_M.front() == 20);
    CHECK(sweep.sweep_M.back() == 200);
}

TEST_CASE("relative burn-in follows M") {
    const auto spec = load_experiment(*find_preset("exp2"));
    const auto at300 = with_samples(spec, 300);
    CHECK(at300.sensing.M == 300);
    CHECK(at300.algorithms[0].config.burn_in == 600);
    CHECK(at300.sweep_M.empty());
}

TEST_CASE("trial records cover the whole stream") {
    const auto spec = load_experiment(kSmall);
    const auto rec = run_trial(spec, spec.algorithms[1], 0);
    CHECK(rec.rmse_db.size() == spec.sensing.total_samples());
    CHECK(rec.s_trajectory.size() == spec.sensing.total_samples());
    CHECK(rec.true_support.size() == 6);
    CHECK(rec.seed == trial_seed(spec, 0));
    CHECK(run_trial(spec, spec.algorithms[0], 0).s_trajectory.empty());
}

TEST_CASE("runs are deterministic and independent of thread count") {
    const auto spec = load_experiment(kSmall);
    const auto a = run_experiment(spec, {1});
    const auto b = run_experiment(spec, {3});
    CHECK(curves_csv(a) == curves_csv(b));
    for (std::size_t alg = 0; alg < a.records.size(); ++alg)
        for (std::size_t t = 0; t < spec.trials; ++t) {
            CHECK(a.records[alg][t].rmse_db == b.records[alg][t].rmse_db);
            CHECK(a.records[alg][t].s_trajectory == b.records[alg][t].s_trajectory);
            CHECK(a.records[alg][t].final_support == b.records[alg][t].final_support);
        }
    // Trials differ from each other.
    CHECK(a.records[0][0].rmse_db != a.records[0][1].rmse_db);

    LoadOptions other;
    other.seed = 43;
    CHECK(curves_csv(run_experiment(load_experiment(kSmall, other))) != curves_csv(a));
}

TEST_CASE("regression pin for the curves CSV") {
    const auto r = run_experiment(load_experiment(kSmall), {1});
    const std::string csv = curves_csv(r);
    INFO("hash " << fnv1a(csv));
    CHECK(fnv1a(csv) == 0xed9ebf6aba59773eull);
}

TEST_CASE("curves CSV schema") {
    const auto r = run_experiment(load_experiment(kSmall));
    std::istringstream in(curves_csv(r));
    std::string line;
    std::getline(in, line);
    CHECK(line == "experiment,label,iteration,rmse_db,s_est_mean");
    std::size_t rows = 0;
    std::string first_sza;
    while (std::getline(in, line)) {
        ++rows;
        if (first_sza.empty() && line.starts_with("small,SZA,")) first_sza = line;
    }
    CHECK(rows == 3 * r.spec.sensing.total_samples());
    CHECK(first_sza.starts_with("small,SZA,1,"));
    CHECK(first_sza.ends_with(",6"));

    std::ostringstream summary_out;
    write_summary_csv(r, summary_out);
    const std::string summary = summary_out.str();
    CHECK_THAT(summary, ContainsSubstring("experiment,label,trials,final_rmse_db,steady_rmse_db"));
    CHECK(std::count(summary.begin(), summary.end(), '\n') == 4);

    std::ostringstream gp_out;
    write_curves_gnuplot(r, gp_out);
    const std::string gp = gp_out.str();
    CHECK(std::count(gp.begin(), gp.end(), '#') == 6);
    CHECK_THAT(gp, ContainsSubstring("\n\n\n# small HARD-EST"));
}

TEST_CASE("aggregation convention") {
    TrialRecord a, b;
    a.rmse_db = {-10.0, 0.0};
    b.rmse_db = {-30.0, 0.0};
    const auto linear = aggregate("x", {a, b}, Aggregation::MeanLinear);
    const auto db = aggregate("x", {a, b}, Aggregation::MeanDb);
    CHECK_THAT(linear.rmse_db[0], WithinAbs(10.0 * std::log10(0.101 / 2.0), 1e-12));
    CHECK_THAT(db.rmse_db[0], WithinAbs(-20.0, 1e-12));
    // Averaging linear values never reports less error than averaging dB.
    CHECK(linear.rmse_db[0] >= db.rmse_db[0]);
    CHECK(linear.rmse_db[1] == 0.0);
}

TEST_CASE("curve helpers") {
    const std::vector<double> c{0.0, -10.0, -20.0, -10.0};
    CHECK(iterations_to_reach(c, -15.0) == 3);
    CHECK_FALSE(iterations_to_reach(c, -25.0).has_value());
    CHECK_THAT(tail_mean_db(c, 2), WithinAbs(10.0 * std::log10(0.055), 1e-12));
    CHECK(tail_mean_db(c, 1) == -10.0);
}

TEST_CASE("noiseless full sampling drives every algorithm below -80 dB") {
    const auto spec = load_experiment(R"(
[experiment]
name = noiseless
trials = 2

[signal]
N = 32
k = 3

[sensing]
M = 32
passes = 50

[algorithm LMS]
variant = lms
mu = 0.03125

[algorithm ZA]
variant = za
mu = 0.03125
rho = 1e-12

[algorithm HARD]
variant = hard
mu = 0.03125
s = 6
burn_in = 1M

[algorithm HARD-EST]
variant = hard
mu = 0.03125
s = adaptive
xi = 0.03125
burn_in = 1M
)");
    const auto r = run_experiment(spec);
    for (const auto& c : r.curves) {
        INFO(c.label);
        CHECK(c.rmse_db.back() < -80.0);
    }
}

TEST_CASE("tracking run switches truth at the change window") {
    const auto spec = load_experiment(R"(
[experiment]
name = change

[signal]
N = 64
k = 2
snr_db = 30
change_window = 20
extra_k = 2

[sensing]
M = 32
mode = windowed
windows = 40

[algorithm HARD-EST]
variant = hard
mu = 0.03
s = adaptive
lambda = 0.98
xi = 0.3
q_star = 0.05
burn_in = 2M
)");
    const auto records = run_tracking_experiment(spec);
    REQUIRE(records.size() == 1);
    const auto& rec = records.front();
    CHECK(rec.rmse_db.size() == 40 * 32);
    CHECK(rec.true_support.size() == 8);
    // The jump in the truth shows up as a jump in the error.
    CHECK(rec.rmse_db[20 * 32] > rec.rmse_db[20 * 32 - 1] + 3.0);
    CHECK(rec.s_trajectory[19 * 32] == 4);
    CHECK(rec.s_trajectory.back() == 8);

    const auto data = make_trial_data(spec, 0);
    REQUIRE(data.phases.size() == 2);
    for (auto b : data.phases[0].bins) CHECK(std::count(data.phases[1].bins.begin(), data.phases[1].bins.end(), b) == 1);
    // Noise follows each phase's power.
    CHECK_THAT(data.source.noise_sigma[25] / data.source.noise_sigma[5], WithinAbs(std::sqrt(2.0), 1e-12));
}
