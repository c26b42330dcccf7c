#pragma once

// Online sparsity estimation. An exponentially weighted average of
// b(n) = e*(n) x(n) tracks the estimation error w(n) - w, because
// E[x x^H] = I under the unit-magnitude regressor convention. Coefficients of
// w(n) - xi * err(n) above q* are counted as occupied.

#include "sparsense/types.hpp"

#include <algorithm>
#include <cmath>
#include <span>

namespace sparsense {

struct TrackerParams {
    double lambda = 0.99; ///< forgetting factor, (0, 1]
    double xi = 1.0;      ///< error-correction scale, >= 0
    double q_star = 0.05; ///< occupancy threshold on |w'_i|, > 0
    /// Restrict the next estimate to the coefficients that pass the
    /// occupancy test instead of applying H_s.
    bool support_from_test = false;

    void validate() const {
        detail::require(lambda > 0.0 && lambda <= 1.0, "tracker: lambda must be in (0, 1]");
        detail::require(xi >= 0.0, "tracker: xi must be nonnegative");
        detail::require(q_star > 0.0, "tracker: q* must be positive");
    }
};

struct TrackerState {
    SpectrumVector err;
    double kappa = 0.0;
    TrackerParams params;

    TrackerState(std::size_t N, TrackerParams p) : err(N, cplx{}), params(p) { params.validate(); }
};

/// kappa <- lambda kappa + 1;  err <- (1 - 1/kappa) err - b / kappa.
inline void tracker_update(TrackerState& state, std::span<const cplx> b) {
    detail::require(b.size() == state.err.size(), "tracker: dimension mismatch");
    state.kappa = state.params.lambda * state.kappa + 1.0;
    const double inv = 1.0 / state.kappa;
    const double keep = 1.0 - inv;
    for (std::size_t i = 0; i < b.size(); ++i) state.err[i] = keep * state.err[i] - inv * b[i];
}

/// w' = w - xi err.
inline SpectrumVector corrected_estimate(const TrackerState& state, std::span<const cplx> w) {
    detail::require(w.size() == state.err.size(), "tracker: dimension mismatch");
    SpectrumVector out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i] - state.params.xi * state.err[i];
    return out;
}

/// Count of |w'_i| > q*, clamped to [1, N].
inline std::size_t estimate_sparsity(const TrackerState& state, std::span<const cplx> w) {
    detail::require(w.size() == state.err.size(), "tracker: dimension mismatch");
    const double xi = state.params.xi;
    const double q2 = state.params.q_star * state.params.q_star;
    std::size_t count = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
        if (std::norm(w[i] - xi * state.err[i]) > q2) ++count;
    return std::clamp<std::size_t>(count, 1, w.size());
}

} // namespace sparsense
