// Real zeros of random power series with iid standard normal coefficients:
// hole probabilities on symmetric subintervals of (-1,1).
#pragma once

#include <cstddef>
#include <cstdint>

namespace fpf {

struct ZeroRunStats {
    double eps = 0.0;          // interval is (-1+2eps, 1-2eps)
    std::size_t trunc_N = 0;   // series truncation degree
    std::uint64_t n_real = 0;  // realizations
    std::uint64_t n_empty = 0; // realizations with no sign change
    double p_hat = 0.0;        // hole probability estimate
    double se = 0.0;
    double log_length = 0.0;   // hyperbolic length log((1-eps)/eps)
};

// Truncation degree is chosen so the dropped tail is below 1e-12 at the
// endpoints; sign changes are scanned on a grid fine enough to make a missed
// double-crossing negligible at the process intensity.  Throws
// std::invalid_argument for eps outside (0, 1/2).
ZeroRunStats gps_zeros(double eps, std::uint64_t n_real, std::uint64_t seed);

}  // namespace fpf
