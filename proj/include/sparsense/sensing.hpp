#pragma once

// Partial inverse-DFT sensing: regressor rows, random undersampling of each
// length-N window, and the two ways of turning samples into a stream.

#include "sparsense/rng.hpp"
#include "sparsense/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace sparsense {

/// Feed the same M samples to the estimator `passes` times.
struct RepeatedPass {
    std::size_t passes = 1;
};

/// Split the signal into `windows` consecutive length-N windows and draw M
/// fresh samples from each.
struct Windowed {
    std::size_t windows = 1;
};

using StreamMode = std::variant<RepeatedPass, Windowed>;

struct SensingConfig {
    std::size_t N = 0;
    std::size_t M = 0;
    StreamMode mode = RepeatedPass{};
    std::uint64_t seed = 0;

    void validate() const {
        detail::require(N >= 1, "sensing: N must be positive");
        detail::require(M >= 1 && M <= N, "sensing: need 1 <= M <= N");
        if (const auto* rp = std::get_if<RepeatedPass>(&mode))
            detail::require(rp->passes >= 1, "sensing: passes must be >= 1");
        else
            detail::require(std::get<Windowed>(mode).windows >= 1, "sensing: windows must be >= 1");
    }

    bool windowed() const { return std::holds_alternative<Windowed>(mode); }

    /// Number of distinct length-N windows of signal the stream reads.
    std::size_t windows() const { return windowed() ? std::get<Windowed>(mode).windows : 1; }

    /// Number of times each window's sample set is emitted.
    std::size_t passes() const { return windowed() ? 1 : std::get<RepeatedPass>(mode).passes; }

    std::size_t total_samples() const { return windows() * passes() * M; }
};

struct MeasurementSample {
    SpectrumVector x;      ///< regressor, x_k = exp(-j 2 pi k index / N)
    cplx y{};              ///< noisy observation of z at `index`
    std::size_t n = 0;     ///< global iteration counter
    std::size_t index = 0; ///< time index within the window
    std::size_t window = 0;
};

/// Precomputed N-th roots of unity exp(-j 2 pi m / N). Row n of the
/// regressor matrix is read off as x_k = root[(k n) mod N].
class RegressorTable {
public:
    explicit RegressorTable(std::size_t N) : roots_(N) {
        detail::require(N >= 1, "regressor: N must be positive");
        for (std::size_t m = 0; m < N; ++m) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(m) / static_cast<double>(N);
            roots_[m] = {std::cos(angle), std::sin(angle)};
        }
        // Exact values where they are representable.
        roots_[0] = {1.0, 0.0};
        if (N % 2 == 0) roots_[N / 2] = {-1.0, 0.0};
        if (N % 4 == 0) {
            roots_[N / 4] = {0.0, -1.0};
            roots_[3 * N / 4] = {0.0, 1.0};
        }
    }

    std::size_t size() const { return roots_.size(); }

    void fill(std::size_t n, std::span<cplx> out) const {
        const std::size_t N = roots_.size();
        detail::require(n < N, "regressor: time index out of range");
        detail::require(out.size() == N, "regressor: output length mismatch");
        std::size_t phase = 0;
        for (std::size_t k = 0; k < N; ++k) {
            out[k] = roots_[phase];
            phase += n;
            if (phase >= N) phase -= N;
        }
    }

    SpectrumVector row(std::size_t n) const {
        SpectrumVector x(roots_.size());
        fill(n, x);
        return x;
    }

private:
    std::vector<cplx> roots_;
};

/// Row n of the conjugated IDFT matrix with unit-magnitude entries, so that
/// the average of x(n) x(n)^H over n = 0..N-1 is exactly the identity.
inline SpectrumVector regressor_row(std::size_t N, std::size_t n) {
    detail::require(N >= 1, "regressor: N must be positive");
    detail::require(n < N, "regressor: time index out of range");
    return RegressorTable(N).row(n);
}

/// M distinct time indices from {0..N-1}, drawn uniformly without
/// replacement and returned in ascending order. Depends only on
/// (config.seed, window).
inline std::vector<std::size_t> sample_indices(const SensingConfig& config, std::size_t window) {
    config.validate();
    std::vector<std::size_t> pool(config.N);
    for (std::size_t i = 0; i < config.N; ++i) pool[i] = i;
    Rng rng(mix_seed(config.seed, window));
    // Partial Fisher-Yates: the first M slots end up a uniform M-subset.
    for (std::size_t i = 0; i < config.M; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(config.N - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(config.M);
    std::sort(pool.begin(), pool.end());
    return pool;
}

/// Noiseless time samples plus the noise applied when they are measured.
struct SignalSource {
    std::vector<double> samples;
    /// Noise standard deviation per window; a single entry applies to all
    /// windows, an empty vector means noiseless.
    std::vector<double> noise_sigma;
    std::uint64_t noise_seed = 0;

    double sigma(std::size_t window) const {
        if (noise_sigma.empty()) return 0.0;
        return noise_sigma.size() == 1 ? noise_sigma.front() : noise_sigma.at(window);
    }
};

/// Sequential single-consumer iterator over measurement samples.
class MeasurementStream {
public:
    MeasurementStream(SensingConfig config, SignalSource source)
        : config_(std::move(config)), source_(std::move(source)), table_(config_.N) {
        config_.validate();
        const std::size_t needed = config_.windows() * config_.N;
        if (source_.samples.size() < needed)
            throw StreamExhausted("stream needs " + std::to_string(needed) + " signal samples, source has " +
                                  std::to_string(source_.samples.size()));
        if (source_.noise_sigma.size() > 1 && source_.noise_sigma.size() < config_.windows())
            throw std::invalid_argument("stream: per-window noise list shorter than window count");
        load_window(0);
    }

    const SensingConfig& config() const { return config_; }
    std::size_t size() const { return config_.total_samples(); }
    std::size_t position() const { return position_; }
    bool done() const { return position_ >= size(); }

    /// Indices sampled in the window currently being emitted.
    const std::vector<std::size_t>& current_indices() const { return indices_; }

    /// Writes the next sample into `out`, reusing its storage. Returns false
    /// once the stream is exhausted.
    bool next(MeasurementSample& out) {
        if (done()) return false;
        const std::size_t M = config_.M;
        const std::size_t per_window = M * config_.passes();
        const std::size_t window = position_ / per_window;
        if (window != window_) load_window(window);
        const std::size_t slot = (position_ % per_window) % M;
        const std::size_t index = indices_[slot];

        out.x.resize(config_.N);
        table_.fill(index, out.x);
        out.y = {source_.samples[window * config_.N + index] + noise_[slot], 0.0};
        out.n = position_;
        out.index = index;
        out.window = window;
        ++position_;
        return true;
    }

private:
    void load_window(std::size_t window) {
        window_ = window;
        indices_ = sample_indices(config_, window);
        noise_.assign(config_.M, 0.0);
        const double sigma = source_.sigma(window);
        if (sigma > 0.0) {
            Rng rng(mix_seed(source_.noise_seed, window));
            for (double& v : noise_) v = sigma * rng.normal();
        }
    }

    SensingConfig config_;
    SignalSource source_;
    RegressorTable table_;
    std::size_t position_ = 0;
    std::size_t window_ = 0;
    std::vector<std::size_t> indices_;
    std::vector<double> noise_;
};

inline MeasurementStream make_stream(const SensingConfig& config, SignalSource source) {
    return MeasurementStream(config, std::move(source));
}

} // namespace sparsense
