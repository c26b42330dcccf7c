#pragma once

// Hard thresholding, the selective zero-attracting penalty, and executable
// forms of the two support-recovery guarantees for H_s.

#include "sparsense/types.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <functional>
#include <limits>
#include <span>
#include <type_traits>
#include <vector>

namespace sparsense {

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};

/// Real or complex coefficient type.
template <class T>
concept Coefficient = std::floating_point<T> || is_complex<T>::value;

/// Sorted set of coefficient positions.
struct SupportSet {
    std::vector<std::size_t> indices;

    std::size_t size() const { return indices.size(); }
    bool contains(std::size_t i) const { return std::binary_search(indices.begin(), indices.end(), i); }
    bool includes(const SupportSet& other) const {
        return std::includes(indices.begin(), indices.end(), other.indices.begin(), other.indices.end());
    }
    friend bool operator==(const SupportSet&, const SupportSet&) = default;
};

namespace detail {

/// Squared magnitude of the s-th largest entry. Selection, not sorting, so
/// expected O(N). `scratch` is reused across calls.
template <Coefficient T>
double kth_largest_norm(std::span<const T> v, std::size_t s, std::vector<double>& scratch) {
    scratch.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) scratch[i] = std::norm(v[i]);
    const auto kth = scratch.begin() + static_cast<std::ptrdiff_t>(s - 1);
    std::nth_element(scratch.begin(), kth, scratch.end(), std::greater<>{});
    return *kth;
}

inline void require_budget(std::size_t s, std::size_t N) {
    require(s >= 1 && s <= N, "sparsity budget s must satisfy 1 <= s <= N");
}

} // namespace detail

/// In-place H_s: keeps every entry whose magnitude reaches the s-th largest
/// (ties at the boundary are all kept) and writes exact zeros elsewhere.
template <Coefficient T>
void hard_threshold_inplace(std::span<T> v, std::size_t s, std::vector<double>& scratch) {
    detail::require_budget(s, v.size());
    if (s == v.size()) return;
    const double cut = detail::kth_largest_norm<T>(v, s, scratch);
    for (auto& x : v)
        if (std::norm(x) < cut) x = T{};
}

template <Coefficient T>
std::vector<T> hard_threshold(const std::vector<T>& v, std::size_t s) {
    std::vector<T> out = v;
    std::vector<double> scratch;
    hard_threshold_inplace<T>(out, s, scratch);
    return out;
}

/// x / |x|, and 0 at 0.
template <Coefficient T>
T sign_of(const T& x) {
    if (x == T{}) return T{};
    if constexpr (std::floating_point<T>)
        return x > 0 ? T{1} : T{-1};
    else
        return x / std::abs(x);
}

template <Coefficient T>
std::vector<T> complex_sign(const std::vector<T>& v) {
    std::vector<T> out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](const T& x) { return sign_of(x); });
    return out;
}

/// P_s: zero on support(H_s(v)), sign elsewhere.
template <Coefficient T>
std::vector<T> selective_penalty(const std::vector<T>& v, std::size_t s) {
    detail::require_budget(s, v.size());
    std::vector<double> scratch;
    const double cut = s == v.size() ? 0.0 : detail::kth_largest_norm<T>(std::span<const T>(v), s, scratch);
    std::vector<T> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::norm(v[i]) >= cut ? T{} : sign_of(v[i]);
    return out;
}

/// {i : |v_i| > tol}.
template <Coefficient T>
SupportSet support(const std::vector<T>& v, double tol = 0.0) {
    detail::require(tol >= 0.0, "support: tolerance must be nonnegative");
    SupportSet out;
    const double tol2 = tol * tol;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::norm(v[i]) > tol2 || (tol == 0.0 && v[i] != T{})) out.indices.push_back(i);
    return out;
}

template <Coefficient T>
double squared_norm(const std::vector<T>& v) {
    double acc = 0.0;
    for (const auto& x : v) acc += std::norm(x);
    return acc;
}

template <Coefficient T>
double squared_distance(const std::vector<T>& a, const std::vector<T>& b) {
    detail::require(a.size() == b.size(), "length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
    return acc;
}

/// Smallest nonzero magnitude, q = min_{w_i != 0} |w_i|.
template <Coefficient T>
double min_nonzero_magnitude(const std::vector<T>& w) {
    double q = std::numeric_limits<double>::infinity();
    for (const auto& x : w)
        if (x != T{}) q = std::min(q, static_cast<double>(std::abs(x)));
    detail::require(std::isfinite(q), "vector has no nonzero entry");
    return q;
}

/// Signal-to-error ratio ||w||^2 / ||w - w_hat||^2; +inf on an exact match.
template <Coefficient T>
double ser(const std::vector<T>& w, const std::vector<T>& w_hat) {
    const double signal = squared_norm(w);
    detail::require(signal > 0.0, "ser: true vector is all zero");
    const double error = squared_distance(w, w_hat);
    return error == 0.0 ? std::numeric_limits<double>::infinity() : signal / error;
}

struct TheoremCheck {
    bool premise = false;
    bool conclusion = false;
};

/// Exact-budget recovery: with s = ||w||_0 and q the smallest nonzero
/// magnitude, ||w - w_hat||^2 < q^2/2 implies support(H_s(w_hat)) = support(w).
template <Coefficient T>
TheoremCheck theorem2_check(const std::vector<T>& w, const std::vector<T>& w_hat) {
    detail::require(w.size() == w_hat.size(), "theorem2: length mismatch");
    const SupportSet truth = support(w);
    detail::require(truth.size() > 0, "theorem2: true vector is all zero");
    const double q = min_nonzero_magnitude(w);
    TheoremCheck out;
    out.premise = squared_distance(w, w_hat) < q * q / 2.0;
    out.conclusion = support(hard_threshold(w_hat, truth.size())) == truth;
    return out;
}

/// Relaxed budget d = s + tau: ||w - w_hat||^2 <= q^2 (1 - 1/(tau+2)) and
/// ||w_hat||_0 >= d imply support(H_d(w_hat)) contains support(w).
template <Coefficient T>
TheoremCheck theorem3_check(const std::vector<T>& w, const std::vector<T>& w_hat, std::size_t tau) {
    detail::require(w.size() == w_hat.size(), "theorem3: length mismatch");
    detail::require(tau >= 1, "theorem3: tau must be positive");
    const SupportSet truth = support(w);
    detail::require(truth.size() > 0, "theorem3: true vector is all zero");
    const std::size_t d = truth.size() + tau;
    detail::require(d < w.size(), "theorem3: need s + tau < N");
    const double q = min_nonzero_magnitude(w);
    const double bound = q * q * (1.0 - 1.0 / static_cast<double>(tau + 2));
    TheoremCheck out;
    out.premise = squared_distance(w, w_hat) <= bound && support(w_hat).size() >= d;
    out.conclusion = support(hard_threshold(w_hat, d)).includes(truth);
    return out;
}

} // namespace sparsense
