#pragma once

// Internal helpers shared between the series and closed-form assemblies:
// cached diagonal sums S_n = sum_k 1/sqrt(k(n-k)) and partial-sum tails of
// zeta / polylog series.  Not part of the public interface.

#include <cstddef>
#include <vector>

namespace fpf::detail {

const std::vector<double>& sn_table(std::size_t up_to);
double zeta_tail(double s, std::size_t N);
double li_tail(double s, double beta, std::size_t N);

// sum_{n >= from} beta^n (S_n - pi)/n with fitted half-power continuation.
double compensated_diag_sum(std::size_t from, double beta);

inline constexpr std::size_t kSnExactHorizon = 4000;

}  // namespace fpf::detail
