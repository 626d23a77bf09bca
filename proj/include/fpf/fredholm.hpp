// Finite-N operator evaluation: Fredholm determinants and Pfaffians by
// Nystrom discretization, the determinant reductions of the Pfaffian, the
// brute-force series oracle, and asymptote fitting.
#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "fpf/grid.hpp"
#include "fpf/kernel.hpp"

namespace fpf {

struct Discretization {
    std::size_t N = 200;
    QuadRule rule = QuadRule::gauss_legendre;
};

struct EvalResult {
    double log_value = 0.0;
    double value = 0.0;
    std::size_t N = 0;
    // |log at N - log at N/2|: collapse diagnostic, not a rigorous bound.
    double richardson_error = 0.0;
};

// log Det(I - beta T) on [a,b] for a continuous symmetric kernel T, by
// Gauss-Legendre Nystrom with symmetrized weights.  Throws std::runtime_error
// if the determinant is non-positive (operator norm >= 1/beta).
EvalResult fdet(const Kernel2& T, double a, double b, double beta, std::size_t N);

// Gap probability Pf(J - p K_derived) on [a,b] by direct 2N x 2N Pfaffian of
// the weighted block samples.  First-order accurate in 1/N (the sign kernel
// is discontinuous on the diagonal); use the determinant reduction for
// precision work.
EvalResult fpf_direct(const DerivedKernel& K, double p, double a, double b, std::size_t N);

// Same quantity via the square-identity: (Pf)^2 = Det(I + 2p(1-p) d2K) * det2
// with a 2x2 boundary correction built from resolvent evaluations at a and b.
// Spectrally accurate for smooth K.  Requires the right side positive.
EvalResult fpf_tw(const ScalarKernel& K, double p, double a, double b, std::size_t N);

// Half-space gap probability on [-L, b_cut] via the symmetric-operator
// reduction: (Pf)^2 = Det(I - beta_p T) * det3, T the tail autocorrelation of
// rho, det3 a 3x3 boundary correction.  p in (0,1]; pass b_cut = nullopt to
// place the upper cut where the one-point intensity drops below 1e-10.
EvalResult fpf_edge(const EdgeKernel& K, double p, double L,
                    std::optional<double> b_cut, std::size_t N);

// Brute-force expansions, for cross-checking the operator evaluations on
// short intervals.  n_max <= 4.  Throws std::domain_error if the last term
// is not below 1e-8 (interval too long for the truncation).
double series_oracle(const DerivedKernel& K, double p, double a, double b, std::size_t n_max);
double series_oracle_det(const Kernel2& T, double beta, double a, double b, std::size_t n_max);

// Least squares fit of log v(L) ~ -kappa1 L + kappa2 (+ log_coeff * log L).
struct FitResult {
    double kappa1_hat = 0.0;
    double kappa2_hat = 0.0;
    double log_coeff_hat = 0.0;
    double residual = 0.0;  // RMS of fit residuals
};
FitResult fit_asymptote(const std::vector<std::pair<double, double>>& L_logv,
                        bool with_log_term);

}  // namespace fpf
