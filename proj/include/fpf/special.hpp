// Special functions needed by the asymptotic formulas: Riemann zeta on the
// real line, polylogarithms at half-integer order near the unit endpoint,
// real/complex digamma, complex log-gamma, and erfc.
#pragma once

#include <complex>
#include <string>

namespace fpf {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

// Riemann zeta for real s != 1 (Euler-Maclaurin with Bernoulli corrections;
// reflection for s < 0.5).  Accurate to ~1e-14 on the range used here.
double zeta(double s);

// Polylog Li_s(x) for s in {1/2, 3/2, 5/2, 7/2} and x in (0,1].  Direct series
// away from the endpoint; near x=1 the expansion around the branch point
// Li_s(e^{-u}) = Gamma(1-s) u^{s-1} + sum_k zeta(s-k) (-u)^k / k!  keeps full
// accuracy where the series stalls.  Throws std::domain_error outside the
// contract (x <= 0, x > 1, or unsupported s; s=1/2 additionally needs x < 1).
double polylog(double s, double x);

// Digamma for real x > 0 and for complex arguments off the poles
// (recurrence to |z| large, then the asymptotic Bernoulli series).
double digamma(double x);
std::complex<double> digamma(std::complex<double> z);

// Principal-branch log Gamma for Re z > 0 (Lanczos).
std::complex<double> log_gamma(std::complex<double> z);

double erfc(double x);

// Inverse of erf on (-1,1) (Newton on erf with a rational seed).
double erf_inv(double y);

// Uniform dispatcher used by scripting-style callers; fn is one of
// "erfc", "digamma", "log_gamma", "zeta".  log_gamma here is the real-axis
// restriction (x > 0).  Throws std::invalid_argument for unknown names.
double special(const std::string& fn, double x);

}  // namespace fpf
