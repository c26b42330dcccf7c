#pragma once

// Randomized property suites for the recovery theorems and the numerical
// identities the estimators rely on. Each suite returns a SuiteResult so the
// CLI, the unit tests and the acceptance gate can share them.

#include "sparsense/estimators.hpp"
#include "sparsense/oracle.hpp"
#include "sparsense/rng.hpp"
#include "sparsense/sensing.hpp"
#include "sparsense/signal_model.hpp"
#include "sparsense/sparse_ops.hpp"
#include "sparsense/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

namespace sparsense::verify {

struct SuiteResult {
    std::string name;
    std::size_t cases = 0;
    std::size_t failures = 0;
    double seconds = 0.0;
    std::string detail;

    bool passed() const { return cases > 0 && failures == 0; }
};

namespace detail {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline cplx random_phase(Rng& rng) { return std::polar(1.0, rng.uniform(0.0, 2.0 * std::numbers::pi)); }

inline std::vector<std::size_t> random_subset(std::size_t N, std::size_t k, Rng& rng) {
    std::vector<std::size_t> pool(N);
    for (std::size_t i = 0; i < N; ++i) pool[i] = i;
    for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(N - i)]);
    pool.resize(k);
    return pool;
}

/// s-sparse vector whose smallest nonzero magnitude is exactly q.
inline SpectrumVector sparse_vector(std::size_t N, std::size_t s, double q, Rng& rng,
                                    std::vector<std::size_t>& where) {
    where = random_subset(N, s, rng);
    SpectrumVector w(N, cplx{});
    for (std::size_t i = 0; i < s; ++i) w[where[i]] = (i == 0 ? q : q * rng.uniform(1.0, 4.0)) * random_phase(rng);
    return w;
}

inline void scale_to(SpectrumVector& d, double squared_radius) {
    double norm2 = 0.0;
    for (const auto& v : d) norm2 += std::norm(v);
    if (norm2 == 0.0) return;
    const double f = std::sqrt(squared_radius / norm2);
    for (auto& v : d) v *= f;
}

inline SpectrumVector add(const SpectrumVector& a, const SpectrumVector& b) {
    SpectrumVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

/// Perturbation directions that stress the recovery bounds. `extra` is the
/// number of off-support coordinates the adversarial mode may lift.
inline SpectrumVector perturbation(const SpectrumVector& w, const std::vector<std::size_t>& where, std::size_t extra,
                                   std::size_t mode, Rng& rng) {
    const std::size_t N = w.size();
    SpectrumVector d(N, cplx{});
    std::vector<char> on(N, 0);
    for (auto i : where) on[i] = 1;
    switch (mode) {
    case 0: // dense Gaussian
        for (auto& v : d) v = {rng.normal(), rng.normal()};
        break;
    case 1: { // shrink the weakest coefficient, lift off-support ones
        d[where[0]] = -w[where[0]] * rng.uniform(0.3, 1.0);
        std::vector<std::size_t> off;
        for (std::size_t i = 0; i < N; ++i)
            if (!on[i]) off.push_back(i);
        const std::size_t lift = std::min(extra, off.size());
        for (std::size_t i = 0; i < lift; ++i) {
            const std::size_t j = i + rng.below(off.size() - i);
            std::swap(off[i], off[j]);
            d[off[i]] = std::abs(w[where[0]]) * rng.uniform(0.3, 1.0) * random_phase(rng);
        }
        break;
    }
    default: { // a few random coordinates
        const std::size_t count = 1 + rng.below(std::min<std::size_t>(N, 4));
        for (auto i : random_subset(N, count, rng)) d[i] = {rng.normal(), rng.normal()};
        break;
    }
    }
    return d;
}

} // namespace detail

/// Exact-budget recovery over random draws with N <= 32 and s <= N/2. Each
/// draw sits strictly inside the q^2/2 ball; both the support claim and
/// SER > 2s must hold.
inline SuiteResult theorem2_suite(std::size_t draws = 100000, std::uint64_t seed = 20240611) {
    detail::Stopwatch clock;
    Rng rng(seed);
    SuiteResult r;
    r.name = "theorem2-random";
    std::size_t ser_failures = 0;
    std::vector<std::size_t> where;
    while (r.cases < draws) {
        const std::size_t N = 2 + rng.below(31);
        const std::size_t s = 1 + rng.below(std::max<std::size_t>(1, N / 2));
        const double q = rng.uniform(0.05, 2.0);
        const SpectrumVector w = detail::sparse_vector(N, s, q, rng, where);
        SpectrumVector d = detail::perturbation(w, where, 1, r.cases % 3, rng);
        // Mostly near the boundary, where violations would show up first.
        const double u = r.cases % 2 ? rng.uniform(0.95, 1.0) : rng.uniform();
        detail::scale_to(d, u * q * q / 2.0);
        const SpectrumVector w_hat = detail::add(w, d);
        const TheoremCheck c = theorem2_check(w, w_hat);
        if (!c.premise) continue; // rounding pushed it onto the boundary
        ++r.cases;
        if (!c.conclusion) ++r.failures;
        if (!(ser(w, w_hat) > 2.0 * static_cast<double>(s))) ++ser_failures;
    }
    r.failures += ser_failures;
    std::ostringstream msg;
    msg << "support violations " << r.failures - ser_failures << ", SER<=2s violations " << ser_failures;
    r.detail = msg.str();
    r.seconds = clock.seconds();
    return r;
}

/// The bound is tight: shrinking the weakest coefficient to q/2 - eta/2 and
/// lifting an empty one to q/2 + eta/2 costs q^2/2 + 1e-6 and swaps them.
/// Passes when every construction violates both premise and conclusion.
inline SuiteResult theorem2_tightness(std::size_t constructions = 100, std::uint64_t seed = 7) {
    detail::Stopwatch clock;
    Rng rng(seed);
    SuiteResult r;
    r.name = "theorem2-tightness";
    std::vector<std::size_t> where;
    double worst_gap = 0.0;
    for (; r.cases < constructions; ++r.cases) {
        const std::size_t N = 4 + rng.below(29);
        const std::size_t s = 1 + rng.below(N / 2);
        const double q = rng.uniform(0.2, 2.0);
        SpectrumVector w = detail::sparse_vector(N, s, q, rng, where);
        // Keep every other coefficient well above q so only the pair competes.
        for (std::size_t i = 1; i < s; ++i) w[where[i]] *= 1.5;
        std::size_t off = 0;
        while (std::abs(w[off]) != 0.0) ++off;
        const double half = std::sqrt(q * q / 4.0 + 5e-7); // q/2 + eta/2
        const double eta = 2.0 * half - q;
        SpectrumVector w_hat = w;
        const cplx phase = w[where[0]] / q;
        w_hat[where[0]] = phase * (q / 2.0 - eta / 2.0);
        w_hat[off] = half * detail::random_phase(rng);
        const double err = squared_distance(w, w_hat);
        worst_gap = std::max(worst_gap, std::abs(err - (q * q / 2.0 + 1e-6)));
        const TheoremCheck c = theorem2_check(w, w_hat);
        if (c.premise || c.conclusion) ++r.failures;
    }
    std::ostringstream msg;
    msg << "error = q^2/2 + 1e-6 (max deviation " << worst_gap << "), recovery fails in " << r.cases - r.failures << '/'
        << r.cases;
    r.detail = msg.str();
    r.seconds = clock.seconds();
    return r;
}

/// Relaxed-budget containment for tau in {1, 2, 3}; perturbations keep
/// ||w_hat||_0 >= s + tau.
inline SuiteResult theorem3_suite(std::size_t draws = 100000, std::uint64_t seed = 20240612) {
    detail::Stopwatch clock;
    Rng rng(seed);
    SuiteResult r;
    r.name = "theorem3-random";
    std::vector<std::size_t> where;
    std::size_t rejected = 0;
    while (r.cases < draws) {
        const std::size_t tau = 1 + r.cases % 3;
        const std::size_t N = tau + 3 + rng.below(30 - tau);
        const std::size_t s = 1 + rng.below(std::max<std::size_t>(1, std::min(N / 2, N - tau - 1)));
        const double q = rng.uniform(0.05, 2.0);
        const SpectrumVector w = detail::sparse_vector(N, s, q, rng, where);
        const double bound = q * q * (1.0 - 1.0 / static_cast<double>(tau + 2));
        const std::size_t mode = (r.cases / 3) % 2; // dense or adversarial
        SpectrumVector d = detail::perturbation(w, where, tau + 1, mode, rng);
        const double u = rng.uniform() < 0.5 ? rng.uniform(0.95, 1.0) : rng.uniform();
        detail::scale_to(d, u * bound);
        const SpectrumVector w_hat = detail::add(w, d);
        const TheoremCheck c = theorem3_check(w, w_hat, tau);
        if (!c.premise) {
            ++rejected;
            continue;
        }
        ++r.cases;
        if (!c.conclusion) ++r.failures;
    }
    std::ostringstream msg;
    msg << "containment violations " << r.failures << " (" << rejected << " draws outside the premise skipped)";
    r.detail = msg.str();
    r.seconds = clock.seconds();
    return r;
}

/// Tightness for the relaxed budget: the weakest coefficient drops to
/// q/(tau+2) - eta while tau+1 empty ones rise to q/(tau+2) + eta, with eta
/// chosen so the error is 1e-6 over the bound.
inline SuiteResult theorem3_tightness(std::size_t constructions = 99, std::uint64_t seed = 11) {
    detail::Stopwatch clock;
    Rng rng(seed);
    SuiteResult r;
    r.name = "theorem3-tightness";
    std::vector<std::size_t> where;
    for (; r.cases < constructions; ++r.cases) {
        const std::size_t tau = 1 + r.cases % 3;
        const std::size_t N = 2 * tau + 6 + rng.below(32 - 2 * tau - 6 + 1);
        const std::size_t s = 1 + rng.below(N - tau - 2);
        const double q = rng.uniform(0.2, 2.0);
        SpectrumVector w = detail::sparse_vector(N, s, q, rng, where);
        for (std::size_t i = 1; i < s; ++i) w[where[i]] *= 1.5;
        const double t = static_cast<double>(tau);
        const double c0 = q / (t + 2.0);
        // err(eta) = (q - c0 + eta)^2 + (tau+1)(c0 + eta)^2 = bound + 4 eta q (tau+1)/(tau+2) + (tau+2) eta^2
        const double a = t + 2.0, b = 4.0 * q * (t + 1.0) / (t + 2.0);
        const double eta = (-b + std::sqrt(b * b + 4.0 * a * 1e-6)) / (2.0 * a);
        SpectrumVector w_hat = w;
        w_hat[where[0]] = w[where[0]] / q * (c0 - eta);
        std::size_t lifted = 0;
        for (std::size_t i = 0; i < N && lifted < tau + 1; ++i)
            if (std::abs(w[i]) == 0.0) {
                w_hat[i] = (c0 + eta) * detail::random_phase(rng);
                ++lifted;
            }
        const TheoremCheck c = theorem3_check(w, w_hat, tau);
        if (c.premise || c.conclusion) ++r.failures;
    }
    std::ostringstream msg;
    msg << "containment fails just outside the bound in " << r.cases - r.failures << '/' << r.cases;
    r.detail = msg.str();
    r.seconds = clock.seconds();
    return r;
}

/// H_s against the rank-count and sort oracles, N <= 12, with a share of
/// vectors built from exactly tied magnitudes.
inline SuiteResult hard_threshold_suite(std::size_t vectors = 10000, std::uint64_t seed = 5) {
    detail::Stopwatch clock;
    Rng rng(seed);
    SuiteResult r;
    r.name = "hard-threshold-oracle";
    // Groups of values with bit-identical magnitudes 0, 1, 2 and 5.
    const std::vector<std::vector<cplx>> tied = {
        {{0, 0}},
        {{1, 0}, {-1, 0}, {0, 1}, {0, -1}},
        {{2, 0}, {0, 2}, {-2, 0}},
        {{5, 0}, {0, -5}, {3, 4}, {4, -3}, {-3, 4}},
    };
    for (; r.cases < vectors; ++r.cases) {
        const std::size_t N = 1 + rng.below(12);
        const std::size_t s = 1 + rng.below(N);
        SpectrumVector v(N);
        if (r.cases % 2) {
            for (auto& x : v) {
                const auto& g = tied[rng.below(tied.size())];
                x = g[rng.below(g.size())];
            }
        } else {
            for (auto& x : v) x = {rng.normal(), rng.normal()};
        }
        const SpectrumVector by_rank = oracle::hard_threshold_by_rank(v, s);
        const SpectrumVector by_sort = oracle::hard_threshold_by_sort(v, s);
        SpectrumVector in_place = v;
        std::vector<double> scratch;
        hard_threshold_inplace<cplx>(in_place, s, scratch);
        bool ok = hard_threshold(v, s) == by_rank && by_rank == by_sort && in_place == by_rank;

        // Real-valued path with +/- ties.
        std::vector<double> re(N);
        for (auto& x : re) x = static_cast<double>(static_cast<int>(rng.below(7)) - 3);
        ok = ok && hard_threshold(re, s) == oracle::hard_threshold_by_rank(re, s) &&
             hard_threshold(re, s) == oracle::hard_threshold_by_sort(re, s);
        if (!ok) ++r.failures;
    }
    r.detail = std::to_string(r.failures) + " mismatches against both oracles";
    r.seconds = clock.seconds();
    return r;
}

/// (1/N) sum_n x(n) x(n)^H = I for N = 2..max_N, and each regressor row
/// matches std::polar.
inline SuiteResult sensing_identity_suite(std::size_t max_N = 64, double tol = 1e-12) {
    detail::Stopwatch clock;
    SuiteResult r;
    r.name = "sensing-identity";
    double worst = 0.0;
    for (std::size_t N = 2; N <= max_N; ++N, ++r.cases) {
        const RegressorTable table(N);
        std::vector<SpectrumVector> rows;
        double row_err = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            rows.push_back(table.row(n));
            for (std::size_t k = 0; k < N; ++k) {
                const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * n) % N) / static_cast<double>(N);
                row_err = std::max(row_err, std::abs(rows.back()[k] - std::polar(1.0, angle)));
            }
        }
        double dev = 0.0;
        for (std::size_t a = 0; a < N; ++a)
            for (std::size_t b = 0; b < N; ++b) {
                cplx acc{};
                for (std::size_t n = 0; n < N; ++n) acc += rows[n][a] * std::conj(rows[n][b]);
                acc /= static_cast<double>(N);
                dev = std::max(dev, std::abs(acc - (a == b ? cplx{1.0, 0.0} : cplx{})));
            }
        dev = std::max({dev, row_err, oracle::second_moment_deviation(N)});
        worst = std::max(worst, dev);
        if (!(dev <= tol)) ++r.failures;
    }
    std::ostringstream msg;
    msg << "max deviation from identity " << worst;
    r.detail = msg.str();
    r.seconds = clock.seconds();
    return r;
}

/// With w(n) held at w_hat and noiseless data, one full sweep of a lambda = 1
/// tracker leaves err = -mean(b) = w_hat - w.
inline SuiteResult tracker_identity_suite(std::size_t cases = 200, std::uint64_t seed = 3, double tol = 1e-10) {
    detail::Stopwatch clock;
    Rng rng(seed);
    SuiteResult r;
    r.name = "tracker-identity";
    double worst = 0.0;
    for (; r.cases < cases; ++r.cases) {
        const std::size_t N = 2 + rng.below(63);
        SpectrumVector w(N), w_hat(N);
        for (std::size_t i = 0; i < N; ++i) {
            w[i] = {rng.normal(), rng.normal()};
            w_hat[i] = {rng.normal(), rng.normal()};
        }
        TrackerState t(N, TrackerParams{1.0, 1.0, 0.05});
        const RegressorTable table(N);
        SpectrumVector b(N);
        for (std::size_t n = 0; n < N; ++n) {
            const SpectrumVector x = table.row(n);
            cplx e{};
            for (std::size_t i = 0; i < N; ++i) e += std::conj(w[i] - w_hat[i]) * x[i];
            for (std::size_t i = 0; i < N; ++i) b[i] = std::conj(e) * x[i];
            tracker_update(t, b);
        }
        double dev = 0.0;
        for (std::size_t i = 0; i < N; ++i) dev = std::max(dev, std::abs(t.err[i] - (w_hat[i] - w[i])));
        worst = std::max(worst, dev);
        if (!(dev <= tol)) ++r.failures;
    }
    std::ostringstream msg;
    msg << "max |err - (w_hat - w)| " << worst;
    r.detail = msg.str();
    r.seconds = clock.seconds();
    return r;
}

/// Monte Carlo checks of the noise generator and of uniform index sampling.
inline SuiteResult sampling_statistics_suite(std::uint64_t seed = 9) {
    detail::Stopwatch clock;
    SuiteResult r;
    r.name = "sampling-statistics";
    std::ostringstream msg;
    {
        // Sample variance of 2e5 draws against the requested level, 3%.
        const double power = 1.5, snr = 10.0;
        Rng rng(seed);
        const std::vector<double> zeros(200000, 0.0);
        const auto noisy = add_noise(zeros, snr, power, rng);
        double sum = 0.0, sum2 = 0.0;
        for (double v : noisy) {
            sum += v;
            sum2 += v * v;
        }
        const double n = static_cast<double>(noisy.size());
        const double var = sum2 / n - (sum / n) * (sum / n);
        const double expected = noise_variance(power, snr);
        ++r.cases;
        if (std::abs(var / expected - 1.0) > 0.03) ++r.failures;
        msg << "noise variance " << var << " vs " << expected;
    }
    {
        // Each index should appear with frequency M/N over many windows.
        SensingConfig cfg{50, 10, Windowed{10000}, mix_seed(seed, 1)};
        std::vector<double> hits(cfg.N, 0.0);
        for (std::size_t wdw = 0; wdw < 10000; ++wdw)
            for (auto i : sample_indices(cfg, wdw)) hits[i] += 1.0;
        double lo = 1.0, hi = 0.0;
        for (double h : hits) {
            lo = std::min(lo, h / 10000.0);
            hi = std::max(hi, h / 10000.0);
        }
        ++r.cases;
        if (lo < 0.18 || hi > 0.22) ++r.failures;
        msg << "; index frequency in [" << lo << ", " << hi << "] (target 0.2)";
    }
    r.detail = msg.str();
    r.seconds = clock.seconds();
    return r;
}

/// Steady-state mean of SZA under i.i.d. uniform regressor rows.
struct BiasStudy {
    std::size_t N = 32;
    std::size_t realizations = 500;
    std::size_t iterations = 4000;
    std::size_t average_last = 2000;
    double mu = 0.5 / 32.0;
    double rho = 1e-4;
    double snr_db = 20.0;
    std::vector<std::size_t> bins = {3, 7, 11};
    std::uint64_t seed = 31;
};

struct BiasReport {
    SpectrumVector truth;
    SpectrumVector mean_error; ///< mean over realizations of (time-averaged w) - w
    std::vector<double> standard_error;
    SuiteResult result;
};

/// Off-support coefficients may be pulled by at most rho/mu; the SZA penalty
/// never touches the support, so there the mean error should vanish. Both
/// are judged against 3 standard errors of the Monte Carlo mean.
inline BiasReport sza_bias_study(const BiasStudy& study = {}) {
    detail::Stopwatch clock;
    BiasReport rep;
    rep.result.name = "sza-bias";
    const SignalSpec sig{study.N, study.bins, {}, study.snr_db, 0};
    rep.truth = true_spectrum(sig);
    const std::vector<double> z = multisine(sig);
    const std::size_t N = study.N, s = support(rep.truth).size();

    std::vector<SpectrumVector> averages;
    for (std::size_t r = 0; r < study.realizations; ++r) {
        // One uniformly drawn row per window gives i.i.d. regressors.
        SensingConfig cfg{N, 1, Windowed{study.iterations}, mix_seed(study.seed, 2 * r)};
        SignalSource src;
        src.samples.reserve(study.iterations * N);
        for (std::size_t w = 0; w < study.iterations; ++w) src.samples.insert(src.samples.end(), z.begin(), z.end());
        src.noise_sigma = {std::sqrt(noise_variance(sig.power(), study.snr_db))};
        src.noise_seed = mix_seed(study.seed, 2 * r + 1);
        MeasurementStream stream(cfg, std::move(src));

        EstimatorState state(N);
        SpectrumVector avg(N, cplx{});
        MeasurementSample sample;
        while (stream.next(sample)) {
            sza_step(state, sample, study.mu, study.rho, s);
            if (sample.n + study.average_last >= study.iterations)
                for (std::size_t i = 0; i < N; ++i) avg[i] += state.w[i];
        }
        for (auto& v : avg) v /= static_cast<double>(study.average_last);
        averages.push_back(std::move(avg));
    }

    const double R = static_cast<double>(study.realizations);
    rep.mean_error.assign(N, cplx{});
    rep.standard_error.assign(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        cplx m{};
        for (const auto& a : averages) m += a[i] - rep.truth[i];
        m /= R;
        double var = 0.0;
        for (const auto& a : averages) var += std::norm(a[i] - rep.truth[i] - m);
        var /= R - 1.0;
        rep.mean_error[i] = m;
        rep.standard_error[i] = std::sqrt(var / R);
    }

    const double pull = study.rho / study.mu;
    double worst_off = 0.0, worst_on = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        ++rep.result.cases;
        const double bias = std::abs(rep.mean_error[i]);
        const double se3 = 3.0 * rep.standard_error[i];
        if (std::abs(rep.truth[i]) == 0.0) {
            worst_off = std::max(worst_off, bias);
            if (bias > pull + se3) ++rep.result.failures;
        } else {
            worst_on = std::max(worst_on, bias / std::max(rep.standard_error[i], 1e-300));
            if (bias > se3) ++rep.result.failures;
        }
    }
    std::ostringstream msg;
    msg << "off-support max |bias| " << worst_off << " (rho/mu = " << pull << "), on-support max |bias|/SE "
        << worst_on;
    rep.result.detail = msg.str();
    rep.result.seconds = clock.seconds();
    return rep;
}

} // namespace sparsense::verify
