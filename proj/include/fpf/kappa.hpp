// Szego-type growth coefficients kappa1/kappa2 of the log gap probability,
// by three independent routes: convolution series, Fourier integrals of the
// symbol, and closed forms for the catalogue densities.
#pragma once

#include <cstddef>
#include <string>

#include "fpf/density.hpp"

namespace fpf {

enum class Regime { subcritical, critical, supercritical };

inline Regime regime_of(double p, double p_star = 0.5) {
    return p < p_star ? Regime::subcritical : (p > p_star ? Regime::supercritical : Regime::critical);
}

struct KappaResult {
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    double log_coeff = 0.0;  // coefficient of log L (nonzero only at beta = 1 determinant)
    Regime regime = Regime::critical;
    double phi_p = 0.0;  // exponential tilt (supercritical only, else 0)
    std::size_t truncation_n = 0;
    double est_error = 0.0;
};

// Tilt equation beta_p * integral e^{phi x} dens(x) dx = 1 with
// beta_p = 4p(1-p), solved for phi > 0.  Requires p > 1/2; throws
// std::domain_error if p <= 1/2 or no root exists inside the finite-moment
// strip of the density.
double solve_phi(const StepDensity& dens, double p);

// --- Route 1: convolution series -------------------------------------------

// Bulk (translation-invariant) coefficients for a symmetric density, p in (0,1).
// Series in n-fold self-convolutions; at p = 1/2 the compensated sums get an
// exact universal tail plus a fitted half-integer-power remainder, whose
// magnitude is recorded in est_error.
KappaResult kappa_bulk_series(const StepDensity& rho, double p);

// Half-space coefficients for a one-step density rho (possibly asymmetric);
// the series run over the autocorrelation rho_tilde.  p in (0,1).
KappaResult kappa_edge_series(const StepDensity& rho, double p);

// Determinant (two-step) coefficients: Det(I - beta T) on [-L, inf) with
// T = convolution by rho_tilde.  beta in (0,1]; at beta = 1 the result gains
// log_coeff = 1 (a +log L term) on top of the linear growth.
KappaResult kappa_det(const StepDensity& rho, double beta);

// --- Route 2: Fourier symbol ------------------------------------------------

// Bulk coefficients from the log-symbol integrals
//   L(p,x) = (1/2pi) integral e^{-ikx} log(1 - beta_p rho_hat(k)) dk
// (supercritical constants via the tilt integral).  Symmetric densities only.
KappaResult kappa_bulk_fourier(const StepDensity& rho, double p);

// --- Route 3: closed forms ---------------------------------------------------

// sech density; p in [0,1).
KappaResult kappa_sech_closed(double p);
// gaussian(t) density; p in (0,1); kappa2 is t-independent.
KappaResult kappa_gauss_closed(double p, double t);
// persistence (half-space) coefficients; p in (0,1].
KappaResult kappa_persistence_closed(double p);

// Algebraic no-exit decay exponent of the q-species reaction system
// (P[no boundary crossing by T] ~ T^{-gamma_q}): half the half-space kappa1
// at survival weight p = 1/q.  q >= 1 (integer not required);
// gamma_1 = 1/2, gamma_2 = 3/16.
double gamma_q(double q);

}  // namespace fpf
