#pragma once

// Multisine test signals on the DFT grid and their exact sparse spectra.

#include "sparsense/rng.hpp"
#include "sparsense/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <unordered_set>
#include <vector>

namespace sparsense {

struct SignalSpec {
    std::size_t N = 0;
    std::vector<std::size_t> bins; ///< distinct, each in [1, N/2 - 1]
    std::vector<double> amps;      ///< empty means all ones
    double snr_db = std::numeric_limits<double>::infinity();
    std::uint64_t seed = 0;

    std::size_t k() const { return bins.size(); }

    double amplitude(std::size_t i) const { return amps.empty() ? 1.0 : amps.at(i); }

    void validate() const {
        detail::require(N >= 4, "signal: N must be at least 4");
        detail::require(!bins.empty(), "signal: need at least one sine");
        detail::require(amps.empty() || amps.size() == bins.size(), "signal: amps/bins length mismatch");
        std::unordered_set<std::size_t> seen;
        for (std::size_t i = 0; i < bins.size(); ++i) {
            detail::require(bins[i] >= 1 && 2 * bins[i] < N, "signal: bin out of range [1, N/2-1]");
            detail::require(seen.insert(bins[i]).second, "signal: duplicate bin");
            detail::require(amplitude(i) > 0.0, "signal: amplitudes must be positive");
        }
    }

    /// Analytic power sum(A_i^2 / 2).
    double power() const {
        double p = 0.0;
        for (std::size_t i = 0; i < k(); ++i) p += 0.5 * amplitude(i) * amplitude(i);
        return p;
    }

    /// Smallest nonzero magnitude of the true spectrum, min(A_i) / 2.
    double min_magnitude() const {
        double a = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k(); ++i) a = std::min(a, amplitude(i));
        return a / 2.0;
    }
};

/// k distinct bins drawn uniformly from [1, N/2 - 1], skipping `exclude`.
inline std::vector<std::size_t> random_bins(std::size_t N, std::size_t k, Rng& rng,
                                            std::span<const std::size_t> exclude = {}) {
    detail::require(N >= 4, "random_bins: N must be at least 4");
    std::vector<std::size_t> pool;
    for (std::size_t m = 1; 2 * m < N; ++m)
        if (std::find(exclude.begin(), exclude.end(), m) == exclude.end()) pool.push_back(m);
    detail::require(k <= pool.size(), "random_bins: not enough free bins");
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

/// z_n = sum_i A_i sin(2 pi m_i n / N), noiseless.
inline std::vector<double> multisine(const SignalSpec& spec) {
    spec.validate();
    std::vector<double> z(spec.N, 0.0);
    for (std::size_t i = 0; i < spec.k(); ++i) {
        const double a = spec.amplitude(i);
        for (std::size_t n = 0; n < spec.N; ++n) {
            // Reduce the phase on the integer grid before going to radians.
            const std::size_t phase = (spec.bins[i] * n) % spec.N;
            z[n] += a * std::sin(2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(spec.N));
        }
    }
    return z;
}

/// Spectrum w with z_n = w^H x(n): w[m] = -jA/2 and w[N-m] = +jA/2 for
/// every sine, zero elsewhere.
inline SpectrumVector true_spectrum(const SignalSpec& spec) {
    spec.validate();
    SpectrumVector w(spec.N, cplx{});
    for (std::size_t i = 0; i < spec.k(); ++i) {
        const double half = spec.amplitude(i) / 2.0;
        w[spec.bins[i]] = {0.0, -half};
        w[spec.N - spec.bins[i]] = {0.0, half};
    }
    return w;
}

/// Variance that puts white noise `snr_db` below `signal_power`.
inline double noise_variance(double signal_power, double snr_db) {
    detail::require(signal_power > 0.0, "noise: signal power must be positive");
    if (std::isinf(snr_db) && snr_db > 0) return 0.0;
    return signal_power / std::pow(10.0, snr_db / 10.0);
}

inline std::vector<double> add_noise(std::span<const double> values, double snr_db, double signal_power, Rng& rng) {
    const double sigma = std::sqrt(noise_variance(signal_power, snr_db));
    std::vector<double> out(values.begin(), values.end());
    if (sigma == 0.0) return out;
    for (double& v : out) v += sigma * rng.normal();
    return out;
}

} // namespace sparsense
