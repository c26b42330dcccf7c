#pragma once

// Monte-Carlo experiment runner: per-trial signal and stream construction,
// estimator loops, and deterministic aggregation of r-MSE curves.

#include "sparsense/estimators.hpp"
#include "sparsense/harness/metrics.hpp"
#include "sparsense/rng.hpp"
#include "sparsense/sensing.hpp"
#include "sparsense/signal_model.hpp"
#include "sparsense/sparse_ops.hpp"
#include "sparsense/tracker.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace sparsense {

struct AlgorithmEntry {
    std::string label;
    EstimatorConfig config;
    std::optional<TrackerParams> tracker;
    /// Burn-in given as a multiple of M; re-resolved when M changes.
    std::optional<double> burn_in_per_M;
};

/// How per-trial signals are drawn. Bins are random per trial unless
/// `bins` is given. With `extra_k > 0` the signal gains `extra_k` new sines
/// starting at window `change_window` (windowed streams only).
struct SignalPlan {
    std::size_t N = 1000;
    std::size_t k = 10;
    double amplitude = 1.0;
    double snr_db = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> bins;
    std::size_t change_window = 0;
    std::size_t extra_k = 0;

    bool has_change() const { return extra_k > 0; }
};

enum class Aggregation {
    MeanLinear, ///< average linear r-MSE over trials, then convert to dB
    MeanDb,     ///< average per-trial dB values
};

struct ExperimentSpec {
    std::string name;
    SignalPlan signal;
    SensingConfig sensing; ///< seed is replaced per trial
    std::vector<AlgorithmEntry> algorithms;
    std::size_t trials = 1;
    std::uint64_t seed = 1;
    Aggregation aggregation = Aggregation::MeanLinear;
    /// When nonempty, the experiment is repeated once per listed M.
    std::vector<std::size_t> sweep_M;

    void validate() const {
        detail::require(!name.empty(), "experiment: name is empty");
        detail::require(trials >= 1, "experiment: trials must be >= 1");
        detail::require(signal.N == sensing.N, "experiment: signal and sensing N differ");
        sensing.validate();
        detail::require(!algorithms.empty(), "experiment: no algorithms");
        std::set<std::string> labels;
        for (const auto& a : algorithms) {
            detail::require(labels.insert(a.label).second, "experiment: duplicate label '" + a.label + "'");
            a.config.validate(signal.N);
            if (a.tracker) a.tracker->validate();
            if (a.config.adaptive())
                detail::require(a.tracker.has_value(), "experiment: '" + a.label + "' is adaptive but has no tracker");
        }
        if (signal.has_change()) {
            detail::require(sensing.windowed(), "experiment: a signal change needs a windowed stream");
            detail::require(signal.change_window < sensing.windows(), "experiment: change window beyond stream");
        }
        if (!signal.bins.empty()) detail::require(signal.bins.size() == signal.k, "experiment: bins/k mismatch");
        for (std::size_t m : sweep_M) detail::require(m >= 1 && m <= signal.N, "experiment: sweep M out of range");
    }
};

/// Copy of `spec` observing M samples per window, with relative burn-ins
/// re-resolved.
inline ExperimentSpec with_samples(const ExperimentSpec& spec, std::size_t M) {
    ExperimentSpec out = spec;
    out.sensing.M = M;
    out.sweep_M.clear();
    for (auto& a : out.algorithms)
        if (a.burn_in_per_M)
            a.config.burn_in = static_cast<std::size_t>(std::llround(*a.burn_in_per_M * static_cast<double>(M)));
    return out;
}

struct TrialRecord {
    std::string label;
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::vector<double> rmse_db;             ///< one entry per stream sample
    std::vector<std::size_t> s_trajectory;   ///< budget in effect per sample (adaptive only)
    SupportSet final_support;
    SupportSet true_support;                 ///< of the spectrum at the end of the stream
    double wallclock_s = 0.0;

    double final_rmse_db() const { return rmse_db.empty() ? 0.0 : rmse_db.back(); }
};

/// Everything an algorithm run needs that depends only on the trial.
struct TrialData {
    std::uint64_t seed = 0;
    std::vector<SignalSpec> phases;       ///< one spec before the change, one after
    std::vector<SpectrumVector> truths;   ///< matching true spectra
    std::vector<std::size_t> window_phase; ///< phase index per window
    SignalSource source;
    SensingConfig sensing;
};

inline std::uint64_t trial_seed(const ExperimentSpec& spec, std::size_t trial) { return mix_seed(spec.seed, trial); }

inline TrialData make_trial_data(const ExperimentSpec& spec, std::size_t trial) {
    TrialData data;
    data.seed = trial_seed(spec, trial);
    const auto& plan = spec.signal;

    Rng bin_rng(mix_seed(data.seed, 0));
    SignalSpec first;
    first.N = plan.N;
    first.bins = plan.bins.empty() ? random_bins(plan.N, plan.k, bin_rng) : plan.bins;
    first.amps.assign(first.bins.size(), plan.amplitude);
    first.snr_db = plan.snr_db;
    first.seed = data.seed;
    data.phases.push_back(first);
    if (plan.has_change()) {
        SignalSpec second = first;
        const auto extra = random_bins(plan.N, plan.extra_k, bin_rng, first.bins);
        second.bins.insert(second.bins.end(), extra.begin(), extra.end());
        second.amps.assign(second.bins.size(), plan.amplitude);
        data.phases.push_back(second);
    }
    for (const auto& p : data.phases) data.truths.push_back(true_spectrum(p));

    data.sensing = spec.sensing;
    data.sensing.seed = mix_seed(data.seed, 1);
    const std::size_t windows = data.sensing.windows();
    std::vector<std::vector<double>> patterns;
    for (const auto& p : data.phases) patterns.push_back(multisine(p));

    data.source.noise_seed = mix_seed(data.seed, 2);
    data.source.samples.reserve(windows * plan.N);
    for (std::size_t w = 0; w < windows; ++w) {
        const std::size_t phase = plan.has_change() && w >= plan.change_window ? 1 : 0;
        data.window_phase.push_back(phase);
        data.source.samples.insert(data.source.samples.end(), patterns[phase].begin(), patterns[phase].end());
        // Noise is calibrated to the power of the signal in that window.
        data.source.noise_sigma.push_back(std::sqrt(noise_variance(data.phases[phase].power(), plan.snr_db)));
    }
    return data;
}

inline TrialRecord run_trial(const TrialData& data, const AlgorithmEntry& entry, std::size_t trial) {
    const auto start = std::chrono::steady_clock::now();
    const std::size_t N = data.sensing.N;
    OnlineEstimator estimator(entry.config, N, entry.tracker);
    MeasurementStream stream(data.sensing, data.source);

    TrialRecord rec;
    rec.label = entry.label;
    rec.trial = trial;
    rec.seed = data.seed;
    rec.rmse_db.reserve(stream.size());
    if (entry.config.adaptive()) rec.s_trajectory.reserve(stream.size());

    MeasurementSample sample;
    std::size_t phase = 0;
    while (stream.next(sample)) {
        estimator.step(sample);
        phase = data.window_phase[sample.window];
        rec.rmse_db.push_back(to_db(rmse(data.truths[phase], estimator.estimate())));
        if (entry.config.adaptive()) rec.s_trajectory.push_back(estimator.last_budget());
    }
    rec.final_support = support(estimator.estimate());
    rec.true_support = support(data.truths[phase]);
    rec.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

inline TrialRecord run_trial(const ExperimentSpec& spec, const AlgorithmEntry& entry, std::size_t trial) {
    spec.validate();
    return run_trial(make_trial_data(spec, trial), entry, trial);
}

/// Trial-averaged curve for one algorithm.
struct Curve {
    std::string label;
    std::vector<double> rmse_db;
    std::vector<double> s_mean; ///< empty unless the budget is adaptive
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::vector<std::vector<TrialRecord>> records; ///< [algorithm][trial]
    std::vector<Curve> curves;                     ///< [algorithm]

    const std::vector<TrialRecord>& trials_of(const std::string& label) const {
        for (std::size_t a = 0; a < spec.algorithms.size(); ++a)
            if (spec.algorithms[a].label == label) return records[a];
        throw std::invalid_argument("no algorithm labelled '" + label + "'");
    }

    const Curve& curve(const std::string& label) const {
        for (const auto& c : curves)
            if (c.label == label) return c;
        throw std::invalid_argument("no algorithm labelled '" + label + "'");
    }
};

inline Curve aggregate(const std::string& label, const std::vector<TrialRecord>& trials, Aggregation how) {
    Curve c;
    c.label = label;
    if (trials.empty()) return c;
    const std::size_t len = trials.front().rmse_db.size();
    const double count = static_cast<double>(trials.size());
    c.rmse_db.assign(len, 0.0);
    for (std::size_t i = 0; i < len; ++i) {
        double acc = 0.0;
        for (const auto& t : trials) acc += how == Aggregation::MeanLinear ? from_db(t.rmse_db[i]) : t.rmse_db[i];
        c.rmse_db[i] = how == Aggregation::MeanLinear ? to_db(acc / count) : acc / count;
    }
    if (!trials.front().s_trajectory.empty()) {
        c.s_mean.assign(len, 0.0);
        for (std::size_t i = 0; i < len; ++i) {
            double acc = 0.0;
            for (const auto& t : trials) acc += static_cast<double>(t.s_trajectory[i]);
            c.s_mean[i] = acc / count;
        }
    }
    return c;
}

struct RunOptions {
    /// Worker threads; 0 picks hardware concurrency.
    std::size_t jobs = 0;
};

/// Runs every (algorithm, trial) pair. Trials may finish in any order; the
/// reduction only reads the slot-indexed results afterwards.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, RunOptions options = {}) {
    spec.validate();
    ExperimentResult result;
    result.spec = spec;
    const std::size_t A = spec.algorithms.size();
    const std::size_t R = spec.trials;
    result.records.assign(A, std::vector<TrialRecord>(R));

    std::atomic<std::size_t> next_trial{0};
    auto worker = [&] {
        for (std::size_t r = next_trial++; r < R; r = next_trial++) {
            const TrialData data = make_trial_data(spec, r);
            for (std::size_t a = 0; a < A; ++a) result.records[a][r] = run_trial(data, spec.algorithms[a], r);
        }
    };
    std::size_t jobs = options.jobs ? options.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, R);
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    }

    for (std::size_t a = 0; a < A; ++a)
        result.curves.push_back(aggregate(spec.algorithms[a].label, result.records[a], spec.aggregation));
    return result;
}

/// The change-point experiment: a windowed stream whose signal gains new
/// sines part-way through. Returns one record per (algorithm, trial).
inline std::vector<TrialRecord> run_tracking_experiment(const ExperimentSpec& spec, RunOptions options = {}) {
    detail::require(spec.sensing.windowed(), "tracking experiment needs a windowed stream");
    detail::require(spec.signal.has_change(), "tracking experiment needs a signal change");
    auto result = run_experiment(spec, options);
    std::vector<TrialRecord> out;
    for (auto& per_alg : result.records)
        for (auto& r : per_alg) out.push_back(std::move(r));
    return out;
}

/// Linear-mean r-MSE over the last `count` entries, in dB.
inline double tail_mean_db(const std::vector<double>& rmse_db, std::size_t count) {
    detail::require(!rmse_db.empty(), "tail_mean_db: empty curve");
    count = std::clamp<std::size_t>(count, 1, rmse_db.size());
    double acc = 0.0;
    for (std::size_t i = rmse_db.size() - count; i < rmse_db.size(); ++i) acc += from_db(rmse_db[i]);
    return to_db(acc / static_cast<double>(count));
}

struct SweepPoint {
    std::size_t M = 0;
    std::string label;
    double steady_rmse_db = 0.0; ///< trial-averaged, linear mean over the last pass
};

/// Runs the experiment once per entry of `spec.sweep_M`.
inline std::vector<SweepPoint> run_sweep(const ExperimentSpec& spec, RunOptions options = {}) {
    detail::require(!spec.sweep_M.empty(), "sweep: no M values");
    std::vector<SweepPoint> out;
    for (std::size_t M : spec.sweep_M) {
        const auto result = run_experiment(with_samples(spec, M), options);
        for (const auto& c : result.curves) out.push_back({M, c.label, tail_mean_db(c.rmse_db, M)});
    }
    return out;
}

/// First iteration at which the r-MSE reaches `level_db`, or nullopt.
inline std::optional<std::size_t> iterations_to_reach(const std::vector<double>& rmse_db, double level_db) {
    for (std::size_t i = 0; i < rmse_db.size(); ++i)
        if (rmse_db[i] <= level_db) return i + 1;
    return std::nullopt;
}

} // namespace sparsense
