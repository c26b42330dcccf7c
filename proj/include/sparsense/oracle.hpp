#pragma once

// Brute-force reference implementations. They share no code path with the
// production routines they are compared against.

#include "sparsense/types.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

namespace sparsense::oracle {

/// H_s by definition: entry i survives iff fewer than s entries are strictly
/// larger in magnitude. O(N^2).
template <class T>
std::vector<T> hard_threshold_by_rank(const std::vector<T>& v, std::size_t s) {
    std::vector<T> out(v.size(), T{});
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t larger = 0;
        for (std::size_t j = 0; j < v.size(); ++j)
            if (std::abs(v[j]) * std::abs(v[j]) > std::abs(v[i]) * std::abs(v[i])) ++larger;
        if (larger < s) out[i] = v[i];
    }
    return out;
}

/// H_s via a full descending sort of magnitudes.
template <class T>
std::vector<T> hard_threshold_by_sort(const std::vector<T>& v, std::size_t s) {
    std::vector<double> mags;
    for (const auto& x : v) mags.push_back(std::abs(x) * std::abs(x));
    std::sort(mags.begin(), mags.end(), [](double a, double b) { return a > b; });
    const double cut = mags.at(s - 1);
    std::vector<T> out(v.size(), T{});
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) * std::abs(v[i]) >= cut) out[i] = v[i];
    return out;
}

/// max |(1/N) sum_n x(n) x(n)^H - I| with x_k(n) = exp(-j 2 pi k n / N)
/// evaluated directly from std::polar.
inline double second_moment_deviation(std::size_t N) {
    double worst = 0.0;
    const double n_inv = 1.0 / static_cast<double>(N);
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b) {
            cplx acc{};
            for (std::size_t n = 0; n < N; ++n) {
                const double ta = -2.0 * std::numbers::pi * static_cast<double>((a * n) % N) * n_inv;
                const double tb = -2.0 * std::numbers::pi * static_cast<double>((b * n) % N) * n_inv;
                acc += std::polar(1.0, ta) * std::conj(std::polar(1.0, tb));
            }
            const cplx expected = a == b ? cplx{1.0, 0.0} : cplx{};
            worst = std::max(worst, std::abs(acc * n_inv - expected));
        }
    return worst;
}

} // namespace sparsense::oracle
