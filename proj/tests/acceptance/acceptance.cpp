// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails or exceeds its time limit.

#include "sparsense/harness/config.hpp"
#include "sparsense/harness/experiment.hpp"
#include "sparsense/harness/registry.hpp"
#include "sparsense/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace sparsense;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Outcome()> run;
};

ExperimentSpec preset(std::string_view name) { return load_experiment(*find_preset(name)); }

double steady(const ExperimentResult& r, const std::string& label) {
    return tail_mean_db(r.curve(label).rmse_db, r.spec.sensing.M);
}

std::string fmt(double v, int digits = 2) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

Outcome suite(const verify::SuiteResult& r) { return {r.passed(), r.name + ": " + std::to_string(r.cases) + " cases, " + r.detail}; }

Outcome both(const verify::SuiteResult& a, const verify::SuiteResult& b) {
    const Outcome x = suite(a), y = suite(b);
    return {x.pass && y.pass, x.detail + "; " + y.detail};
}

/// Percentile bootstrap CI for the mean of paired differences.
std::pair<double, double> bootstrap_ci(const std::vector<double>& d, std::uint64_t seed, std::size_t resamples = 10000) {
    Rng rng(seed);
    std::vector<double> means(resamples);
    for (auto& m : means) {
        double acc = 0.0;
        for (std::size_t i = 0; i < d.size(); ++i) acc += d[rng.below(d.size())];
        m = acc / static_cast<double>(d.size());
    }
    std::sort(means.begin(), means.end());
    return {means[static_cast<std::size_t>(0.025 * resamples)], means[static_cast<std::size_t>(0.975 * resamples) - 1]};
}

Outcome experiment1() {
    const auto r = run_experiment(preset("exp1"));
    const auto& hard = r.trials_of("HARD-LMS").front();
    const double lms = r.curve("LMS").rmse_db.back();
    const double h = r.curve("HARD-LMS").rmse_db.back();
    const bool exact = hard.final_support == hard.true_support && hard.true_support.size() == 20;
    return {exact && lms - h >= 15.0, std::string("support ") + (exact ? "exact" : "WRONG") + ", HARD-LMS " + fmt(h) +
                                          " dB, LMS " + fmt(lms) + " dB, gap " + fmt(lms - h) + " dB (need >= 15)"};
}

Outcome experiment2() {
    const auto r = run_experiment(preset("exp2"));
    const double est = steady(r, "HARD-EST"), h40 = steady(r, "HARD-40"), h80 = steady(r, "HARD-80");
    const double h20 = steady(r, "HARD-20"), lms = steady(r, "LMS");
    const double group_hi = std::max({est, h40, h80}), group_lo = std::min({est, h40, h80});
    const double gap = h20 - est;
    const bool ordered = group_hi < h20 && h20 < lms;
    const bool close = group_hi - group_lo < gap;
    return {ordered && close && gap >= 10.0, "EST " + fmt(est) + ", 40 " + fmt(h40) + ", 80 " + fmt(h80) + ", 20 " +
                                                 fmt(h20) + ", LMS " + fmt(lms) + " dB; group spread " +
                                                 fmt(group_hi - group_lo) + ", HARD-20 gap " + fmt(gap) + " (need >= 10)"};
}

Outcome experiment3() {
    const auto r = run_experiment(preset("exp3"));
    const double level = -15.0;
    const std::size_t length = r.curve("ZA").rmse_db.size();
    // Trials that never reach the level count as the full stream length.
    const auto hits = [&](const std::string& label) {
        std::vector<double> out;
        for (const auto& t : r.trials_of(label))
            out.push_back(static_cast<double>(iterations_to_reach(t.rmse_db, level).value_or(length)));
        return out;
    };
    const std::vector<std::string> order = {"SZA", "HARD-L0", "L0", "HARD-EST", "RZA"};
    std::vector<std::vector<double>> its;
    std::ostringstream msg;
    for (const auto& l : order) {
        its.push_back(hits(l));
        msg << l << ' ' << fmt(std::accumulate(its.back().begin(), its.back().end(), 0.0) / its.back().size(), 0) << ' ';
    }
    bool pass = true;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        std::vector<double> d(its[i].size());
        for (std::size_t t = 0; t < d.size(); ++t) d[t] = its[i][t] - its[i + 1][t];
        const auto [lo, hi] = bootstrap_ci(d, 1000 + i);
        // Reversed means the whole interval says the earlier one is slower.
        const bool reversed = lo > 0.0;
        pass = pass && !reversed;
        msg << "| " << order[i] << '-' << order[i + 1] << " CI [" << fmt(lo, 0) << ',' << fmt(hi, 0) << "] ";
    }
    const bool za_never = !iterations_to_reach(r.curve("ZA").rmse_db, level).has_value();
    pass = pass && za_never;
    msg << "| ZA " << (za_never ? "never reaches" : "REACHES") << " -15 dB (floor " << fmt(steady(r, "ZA")) << ")";
    return {pass, msg.str()};
}

Outcome tracking() {
    const auto spec = preset("exp4-tracking");
    const auto records = run_tracking_experiment(spec);
    const std::size_t per_window = spec.sensing.M;
    const std::size_t windows = spec.sensing.windows();
    double s_mean = 0.0, simple_db = 0.0;
    for (const auto& rec : records) {
        if (rec.label == "HARD-EST") {
            const std::size_t from = (windows - 50) * per_window;
            for (std::size_t i = from; i < rec.s_trajectory.size(); ++i) s_mean += static_cast<double>(rec.s_trajectory[i]);
            s_mean /= static_cast<double>(rec.s_trajectory.size() - from);
        } else if (rec.label == "HARD-EST-SIMPLE") {
            // Post-change level: linear mean over the last 50 windows.
            std::vector<double> tail(rec.rmse_db.end() - static_cast<std::ptrdiff_t>(50 * per_window), rec.rmse_db.end());
            simple_db = tail_mean_db(tail, tail.size());
        }
    }
    const bool s_ok = s_mean >= 36.0 && s_mean <= 44.0;
    const bool simple_ok = std::abs(simple_db + 3.0) <= 2.0;
    return {s_ok && simple_ok, "HARD-EST mean s (last 50 windows) " + fmt(s_mean, 1) + " in [36,44]; SIMPLE " +
                                   fmt(simple_db) + " dB within -3 +/- 2"};
}

Outcome sza_bias() {
    const auto rep = verify::sza_bias_study();
    return {rep.result.passed(), rep.result.detail};
}

} // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "theorem 2 recovery", 30.0, [] { return both(verify::theorem2_suite(), verify::theorem2_tightness()); }},
        {2, "theorem 3 containment", 30.0, [] { return both(verify::theorem3_suite(), verify::theorem3_tightness()); }},
        {3, "sensing identity", 5.0, [] { return suite(verify::sensing_identity_suite()); }},
        {4, "hard-threshold oracle", 5.0, [] { return suite(verify::hard_threshold_suite()); }},
        {5, "experiment 1", 10.0, experiment1},
        {6, "experiment 2 (R=20)", 600.0, experiment2},
        {7, "experiment 3 (R=20)", 900.0, experiment3},
        {8, "tracking", 300.0, tracking},
        {9, "SZA bias", 120.0, sza_bias},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= c.limit_s;
        const bool pass = o.pass && in_time;
        failed += pass ? 0 : 1;
        std::printf("[%s] %d. %s (%.1f s, limit %.0f s%s): %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.limit_s,
                    in_time ? "" : ", EXCEEDED", o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
