#pragma once

// Single-sample online estimators: LMS and its sparsity-aware variants.
//
// Every rule has the form
//     w <- w + mu e*(n) x(n) - rho * penalty(w(n))        (then optionally H_s)
// with the penalty evaluated on the pre-update estimate.

#include "sparsense/sensing.hpp"
#include "sparsense/sparse_ops.hpp"
#include "sparsense/tracker.hpp"
#include "sparsense/types.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sparsense {

enum class Variant { LMS, ZA, RZA, L0, SZA, HARD, HARD_L0 };

inline std::string_view to_string(Variant v) {
    switch (v) {
    case Variant::LMS: return "LMS";
    case Variant::ZA: return "ZA";
    case Variant::RZA: return "RZA";
    case Variant::L0: return "L0";
    case Variant::SZA: return "SZA";
    case Variant::HARD: return "HARD";
    case Variant::HARD_L0: return "HARD_L0";
    }
    return "?";
}

/// Case-insensitive; '-' and '_' are interchangeable and a trailing "-LMS"
/// is accepted ("za-lms", "Hard-L0", "sza").
inline Variant parse_variant(std::string_view name) {
    std::string key;
    for (char c : name) key.push_back(c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    if (key.size() > 4 && key.ends_with("_LMS")) key.resize(key.size() - 4);
    for (Variant v : {Variant::LMS, Variant::ZA, Variant::RZA, Variant::L0, Variant::SZA, Variant::HARD, Variant::HARD_L0})
        if (key == to_string(v)) return v;
    throw std::invalid_argument("unknown estimator variant '" + std::string(name) + "'");
}

/// Variants whose update uses a sparsity budget s.
constexpr bool uses_budget(Variant v) { return v == Variant::SZA || v == Variant::HARD || v == Variant::HARD_L0; }

struct AdaptiveBudget {
    friend bool operator==(AdaptiveBudget, AdaptiveBudget) = default;
};

/// Fixed s, or s supplied each iteration by the sparsity tracker.
using SparsityBudget = std::variant<std::size_t, AdaptiveBudget>;

struct EstimatorConfig {
    Variant variant = Variant::LMS;
    double mu = 0.0;
    double rho = 0.0;
    double beta = 0.0;
    double epsilon = 1.0;
    SparsityBudget s = std::size_t{0};
    std::size_t burn_in = 0;

    bool adaptive() const { return std::holds_alternative<AdaptiveBudget>(s); }

    void validate(std::size_t N) const {
        // E[x x^H] = I, so lambda_max = 1 and mean convergence needs 0 < mu < 2.
        detail::require(mu > 0.0 && mu < 2.0, "estimator: mu must be in (0, 2)");
        detail::require(rho >= 0.0, "estimator: rho must be nonnegative");
        detail::require(beta >= 0.0, "estimator: beta must be nonnegative");
        detail::require(epsilon > 0.0, "estimator: epsilon must be positive");
        if (uses_budget(variant) && !adaptive()) {
            const auto fixed = std::get<std::size_t>(s);
            detail::require(fixed >= 1 && fixed <= N, "estimator: need 1 <= s <= N");
        }
    }
};

struct EstimatorState {
    SpectrumVector w;
    std::size_t n = 0;
    cplx last_e{};

    explicit EstimatorState(std::size_t N) : w(N, cplx{}) {}
};

/// e(n) = y(n) - w(n)^H x(n); stored as last_e.
inline cplx prediction_error(EstimatorState& state, const MeasurementSample& sample) {
    detail::require(sample.x.size() == state.w.size(), "estimator: regressor length mismatch");
    cplx acc{};
    for (std::size_t i = 0; i < state.w.size(); ++i) acc += std::conj(state.w[i]) * sample.x[i];
    state.last_e = sample.y - acc;
    return state.last_e;
}

namespace detail {

/// Applies w_i <- w_i + g x_i - penalty(i, w_i) with w_i the old value.
template <class Penalty>
void gradient_update(SpectrumVector& w, std::span<const cplx> x, cplx g, Penalty&& penalty) {
    for (std::size_t i = 0; i < w.size(); ++i) {
        const cplx old = w[i];
        w[i] = old + g * x[i] - penalty(i, old);
    }
}

inline void plain_update(SpectrumVector& w, std::span<const cplx> x, cplx g) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = w[i] + g * x[i];
}

inline cplx za_penalty(double rho, cplx w) { return rho * sign_of(w); }

inline cplx rza_penalty(double rho, double eps, cplx w) { return rho * sign_of(w) / (1.0 + eps * std::abs(w)); }

inline cplx l0_penalty(double rho, double beta, cplx w) { return rho * sign_of(w) * std::exp(-beta * std::abs(w)); }

/// Squared-magnitude cut for H_s on `w`; 0 (keep all) when s == N.
inline double budget_cut(const SpectrumVector& w, std::size_t s, std::vector<double>& scratch) {
    require_budget(s, w.size());
    return s == w.size() ? 0.0 : kth_largest_norm<cplx>(w, s, scratch);
}

} // namespace detail

// Single-step rules. Each computes e(n), updates w, and advances n.

inline void lms_step(EstimatorState& state, const MeasurementSample& sample, double mu) {
    const cplx e = prediction_error(state, sample);
    detail::plain_update(state.w, sample.x, mu * std::conj(e));
    ++state.n;
}

inline void za_step(EstimatorState& state, const MeasurementSample& sample, double mu, double rho) {
    const cplx e = prediction_error(state, sample);
    detail::gradient_update(state.w, sample.x, mu * std::conj(e),
                            [rho](std::size_t, cplx w) { return detail::za_penalty(rho, w); });
    ++state.n;
}

/// Reweighted ZA: the sign penalty is divided by (1 + eps |w_i|).
inline void rza_step(EstimatorState& state, const MeasurementSample& sample, double mu, double rho, double eps) {
    detail::require(eps > 0.0, "rza: epsilon must be positive");
    const cplx e = prediction_error(state, sample);
    detail::gradient_update(state.w, sample.x, mu * std::conj(e),
                            [rho, eps](std::size_t, cplx w) { return detail::rza_penalty(rho, eps, w); });
    ++state.n;
}

inline void l0_step(EstimatorState& state, const MeasurementSample& sample, double mu, double rho, double beta) {
    detail::require(beta >= 0.0, "l0: beta must be nonnegative");
    const cplx e = prediction_error(state, sample);
    detail::gradient_update(state.w, sample.x, mu * std::conj(e),
                            [rho, beta](std::size_t, cplx w) { return detail::l0_penalty(rho, beta, w); });
    ++state.n;
}

/// Selective ZA: the sign penalty applies only outside support(H_s(w(n))).
inline void sza_step(EstimatorState& state, const MeasurementSample& sample, double mu, double rho, std::size_t s) {
    std::vector<double> scratch;
    const double cut = detail::budget_cut(state.w, s, scratch);
    const cplx e = prediction_error(state, sample);
    detail::gradient_update(state.w, sample.x, mu * std::conj(e), [rho, cut](std::size_t, cplx w) {
        return std::norm(w) >= cut ? cplx{} : detail::za_penalty(rho, w);
    });
    ++state.n;
}

/// w <- H_s(w + mu e* x).
inline void hard_step(EstimatorState& state, const MeasurementSample& sample, double mu, std::size_t s) {
    detail::require_budget(s, state.w.size());
    lms_step(state, sample, mu);
    std::vector<double> scratch;
    hard_threshold_inplace<cplx>(state.w, s, scratch);
}

/// w <- H_s(w + mu e* x - rho sgn(w) exp(-beta |w|)).
inline void hard_l0_step(EstimatorState& state, const MeasurementSample& sample, double mu, double rho, double beta,
                         std::size_t s) {
    detail::require_budget(s, state.w.size());
    l0_step(state, sample, mu, rho, beta);
    std::vector<double> scratch;
    hard_threshold_inplace<cplx>(state.w, s, scratch);
}

/// Drives one variant over a stream: handles burn-in, the optional
/// sparsity tracker, and keeps scratch storage so a step does not allocate.
///
/// During burn-in the plain LMS update is applied, except for HARD_L0 whose
/// l0 penalty stays on and only the threshold is skipped. The tracker is fed
/// on every iteration; its estimate of s is used after burn-in.
class OnlineEstimator {
public:
    OnlineEstimator(EstimatorConfig config, std::size_t N, std::optional<TrackerParams> tracker = std::nullopt)
        : config_(config), state_(N) {
        config_.validate(N);
        if (config_.adaptive()) {
            detail::require(uses_budget(config_.variant), "estimator: adaptive budget needs SZA, HARD or HARD_L0");
            detail::require(tracker.has_value(), "estimator: adaptive budget needs tracker parameters");
        }
        if (tracker) tracker_.emplace(N, *tracker);
        b_.resize(N);
    }

    const EstimatorConfig& config() const { return config_; }
    const EstimatorState& state() const { return state_; }
    const SpectrumVector& estimate() const { return state_.w; }
    const std::optional<TrackerState>& tracker() const { return tracker_; }

    bool burning_in() const { return state_.n < config_.burn_in; }

    /// Budget applied on the most recent step (N when nothing was cut).
    std::size_t last_budget() const { return last_budget_; }

    cplx step(const MeasurementSample& sample) {
        const std::size_t N = state_.w.size();
        const cplx e = prediction_error(state_, sample);
        const cplx g = config_.mu * std::conj(e);

        if (tracker_) {
            for (std::size_t i = 0; i < N; ++i) b_[i] = std::conj(e) * sample.x[i];
            tracker_update(*tracker_, b_);
        }

        const bool burning = burning_in();
        std::size_t s = N;
        if (uses_budget(config_.variant) && !burning)
            s = config_.adaptive() ? estimate_sparsity(*tracker_, state_.w) : std::get<std::size_t>(config_.s);
        last_budget_ = s;
        if (!burning && test_defines_support()) {
            // Occupancy of the pre-update estimate, the same test that produced s.
            const double xi = tracker_->params.xi;
            const double q2 = tracker_->params.q_star * tracker_->params.q_star;
            occupied_.resize(N);
            for (std::size_t i = 0; i < N; ++i) occupied_[i] = std::norm(state_.w[i] - xi * tracker_->err[i]) > q2;
        }

        const double rho = config_.rho;
        switch (config_.variant) {
        case Variant::LMS:
            detail::plain_update(state_.w, sample.x, g);
            break;
        case Variant::ZA:
            if (burning) detail::plain_update(state_.w, sample.x, g);
            else
                detail::gradient_update(state_.w, sample.x, g,
                                        [rho](std::size_t, cplx w) { return detail::za_penalty(rho, w); });
            break;
        case Variant::RZA:
            if (burning) detail::plain_update(state_.w, sample.x, g);
            else
                detail::gradient_update(state_.w, sample.x, g, [rho, eps = config_.epsilon](std::size_t, cplx w) {
                    return detail::rza_penalty(rho, eps, w);
                });
            break;
        case Variant::L0:
            if (burning) detail::plain_update(state_.w, sample.x, g);
            else
                detail::gradient_update(state_.w, sample.x, g, [rho, beta = config_.beta](std::size_t, cplx w) {
                    return detail::l0_penalty(rho, beta, w);
                });
            break;
        case Variant::SZA:
            if (burning) {
                detail::plain_update(state_.w, sample.x, g);
            } else {
                const double cut = detail::budget_cut(state_.w, s, scratch_);
                detail::gradient_update(state_.w, sample.x, g, [rho, cut](std::size_t, cplx w) {
                    return std::norm(w) >= cut ? cplx{} : detail::za_penalty(rho, w);
                });
            }
            break;
        case Variant::HARD:
            detail::plain_update(state_.w, sample.x, g);
            if (!burning) restrict_support(s);
            break;
        case Variant::HARD_L0:
            detail::gradient_update(state_.w, sample.x, g, [rho, beta = config_.beta](std::size_t, cplx w) {
                return detail::l0_penalty(rho, beta, w);
            });
            if (!burning) restrict_support(s);
            break;
        }
        ++state_.n;
        return e;
    }

private:
    bool test_defines_support() const {
        return tracker_ && config_.adaptive() && tracker_->params.support_from_test;
    }

    void restrict_support(std::size_t s) {
        if (test_defines_support()) {
            for (std::size_t i = 0; i < state_.w.size(); ++i)
                if (!occupied_[i]) state_.w[i] = cplx{};
            return;
        }
        hard_threshold_inplace<cplx>(state_.w, s, scratch_);
    }

    EstimatorConfig config_;
    EstimatorState state_;
    std::optional<TrackerState> tracker_;
    SpectrumVector b_;
    std::vector<char> occupied_;
    std::vector<double> scratch_;
    std::size_t last_budget_ = 0;
};

} // namespace sparsense
