// Random-walk Monte Carlo checks of the fluctuation identities feeding the
// series route, plus brute-force quadrature oracles for small n.
#pragma once

#include <cstddef>
#include <cstdint>

#include "fpf/density.hpp"

namespace fpf {

struct WalkConfig {
    StepDensity rho = StepDensity::sech();
    std::uint64_t n_paths = 100000;
    std::uint64_t seed = 1;
    std::size_t horizon = 100000;  // censoring step count
    double beta = 0.5;             // sparre-andersen / tilted weight
    double p = 0.75;               // thinning parameter (tilted check)
    double L = 10.0;               // barrier height (gambler / tilted)
};

// Configuration of the small-n quadrature oracle, including the two-step
// identity (walk with alternating increment laws; the identity couples it to
// the one-step table).
struct TwoStepWalkConfig {
    StepDensity rho = StepDensity::sech();
    std::size_t n = 2;             // pinned walk length (2..4; two-step part needs <= 3)
    std::size_t gl_points = 64;    // Gauss-Legendre points per dimension
    double cut_sigmas = 7.5;       // convolution-table truncation in units of sigma
};

struct HitStats {
    double estimate = 0.0;
    double se = 0.0;         // standard error of estimate
    double reference = 0.0;  // analytic value the estimate is tested against
    double z = 0.0;          // (estimate - reference) / se
    std::uint64_t n_paths = 0;
    std::uint64_t n_censored = 0;
};

// E_0[beta^{tau_0+}] vs 1 - sqrt(1-beta)  (first strict ascent time).
HitStats check_sparre_andersen(const WalkConfig& cfg);

// E_0[S_{tau_0+}] vs sigma/sqrt(2)  (mean overshoot at first ascent).
HitStats check_spitzer(const WalkConfig& cfg);

// L * P_0[tau_{L+} < tau_0-] vs sigma/sqrt(2)  (gambler's ruin scaling).
HitStats check_gambler(const WalkConfig& cfg);

// e^{phi_p L} E_0[beta_p^{tau_{L+}}; tau_{L+} < tau_0-] vs the tilted-limit
// constant sqrt(1-beta_p) / (phi_p E^(p)[S_1]) * (P^(p)[tau_0- = inf])^2.
// Sampled under the exponentially tilted walk (importance weights collapse
// to the overshoot factor), so the estimator stays O(1)-variance at large L.
HitStats check_tilted_limit(const WalkConfig& cfg);

// Quadrature cross-checks of the pinned-walk identities at small n.
// lhs values are region-decomposed Gauss-Legendre integrals over walk paths;
// rhs values come from the convolution table.  two_step_* only for n <= 3
// (NaN beyond).
struct SmallNRecord {
    std::size_t n = 0;
    double first_ascent_lhs = 0.0, first_ascent_rhs = 0.0;   // pinned first-ascent mass
    double kac_lhs = 0.0, kac_rhs = 0.0;                     // pinned running-max mean
    double positive_excursion_lhs = 0.0, positive_excursion_rhs = 0.0;
    double two_step_lhs = 0.0, two_step_rhs = 0.0;           // alternating-law max identity
};
SmallNRecord small_n_oracle(const StepDensity& rho, std::size_t n);
SmallNRecord small_n_oracle(const TwoStepWalkConfig& cfg);

}  // namespace fpf
