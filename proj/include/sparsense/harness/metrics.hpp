#pragma once

#include "sparsense/sparse_ops.hpp"
#include "sparsense/types.hpp"

#include <algorithm>
#include <cmath>

namespace sparsense {

/// Reported floor for r-MSE in dB; an exact match would otherwise be -inf.
inline constexpr double kDbFloor = -120.0;

/// Relative MSE ||w - w_est||^2 / ||w||^2 on a linear scale.
inline double rmse(const SpectrumVector& w_true, const SpectrumVector& w_est) {
    const double signal = squared_norm(w_true);
    detail::require(signal > 0.0, "rmse: true spectrum is all zero");
    return squared_distance(w_true, w_est) / signal;
}

inline double to_db(double linear) {
    if (!(linear > 0.0)) return kDbFloor;
    return std::max(kDbFloor, 10.0 * std::log10(linear));
}

inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

} // namespace sparsense
