#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace sparsense {

using cplx = std::complex<double>;

/// Length-N vector of DFT-domain coefficients: a true spectrum, an estimate,
/// or an error tracker.
using SpectrumVector = std::vector<cplx>;

/// Raised when a measurement stream needs more signal than its source holds.
class StreamExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
    if (!condition) throw std::invalid_argument(message);
}

} // namespace detail

} // namespace sparsense
