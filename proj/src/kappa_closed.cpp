#include <cmath>
#include <complex>
#include <stdexcept>

#include "fpf/grid.hpp"
#include "fpf/kappa.hpp"
#include "fpf/special.hpp"
#include "series_detail.hpp"

namespace fpf {

namespace {

double sech_s(double x) {
    const double a = std::abs(x);
    const double e = std::exp(-a);
    return 2.0 * e / (1.0 + e * e);
}

// Symbol profile for the hyperbolic-secant family:
//   L(x) = (cosh x - cosh(nu x)) / (x sinh 2x),  nu = (4/pi) acos(|2p-1|/sqrt2),
// evaluated in scaled exponentials so large x cannot overflow.
double sech_profile(double x, double nu) {
    x = std::abs(x);
    if (x < 1e-4) {
        const double c = (1.0 - nu * nu) / 4.0;
        return c * (1.0 + x * x * ((1.0 + nu * nu) / 12.0 - 2.0 / 3.0));
    }
    const double num = std::exp(-x) + std::exp(-3.0 * x) - std::exp((nu - 2.0) * x) -
                       std::exp(-(nu + 2.0) * x);
    const double den = x * (1.0 - std::exp(-4.0 * x));
    return num / den;
}

double sech_profile_xint(double nu) {
    if (std::abs(nu - 1.0) < 1e-14) return 0.0;
    return integrate_halfline(
        [nu](double x) {
            const double L = sech_profile(x, nu);
            return x * L * L;
        },
        0.0, 1e-13);
}

// J = int_0^inf log x (tanh x + tanh(x/2)) (sech^2 x + sech^2(x/2)/2) dx,
// the critical-point log-moment of the squared symbol.
double critical_logx_integral() {
    return integrate_halfline(
        [](double x) {
            const double t = std::tanh(x) + std::tanh(0.5 * x);
            const double s = sech_s(x) * sech_s(x) + 0.5 * sech_s(0.5 * x) * sech_s(0.5 * x);
            return std::log(x) * t * s;
        },
        1e-9, 1e-13);
}

// (2/pi) int_0^inf log(1 - beta sech(c k)) / (1 + k^2) dk with c = acos(beta).
double poisson_integral(double beta) {
    if (beta <= 0.0) return 0.0;
    const double c = std::acos(beta);
    return 2.0 / M_PI *
           integrate_halfline(
               [beta, c](double k) {
                   return std::log1p(-beta * sech_s(c * k)) / (1.0 + k * k);
               },
               0.0, 1e-12);
}

// log(1 - beta sech y) via (1 - beta + 2 sinh^2(y/2)) / cosh y near the
// origin, where the direct form loses all digits as beta -> 1.
double log1m_beta_sech(double beta, double y) {
    if (y > 1.0) return std::log1p(-beta * sech_s(y));
    const double sh = std::sinh(0.5 * y);
    return std::log((1.0 - beta) + 2.0 * sh * sh) - std::log(std::cosh(y));
}

// (1/4pi) int_0^inf Re psi((1+ik)/2) log(1 - beta sech(pi k/2)) dk  (the full
// real-line integral folds onto the half line by evenness).  At beta = 1 the
// integrand has an integrable log singularity at k = 0.
double digamma_weighted_integral(double beta) {
    if (beta <= 0.0) return 0.0;
    return integrate_halfline(
               [beta](double k) {
                   const std::complex<double> z(0.5, 0.5 * k);
                   return digamma(z).real() * log1m_beta_sech(beta, 0.5 * M_PI * k);
               },
               0.0, 1e-12) /
           (4.0 * M_PI);
}

// sum_{n>=1} erfc(sqrt(u n))/n: direct summation with an Euler-Maclaurin
// continuation when the terms have not died out by the cutoff.
double erfc_log_sum(double u) {
    const std::size_t n0 = 10000;
    double s = 0.0;
    for (std::size_t n = 1; n <= n0; ++n) {
        const double term = erfc(std::sqrt(u * static_cast<double>(n))) / static_cast<double>(n);
        s += term;
        if (term < 1e-18 && n > 8) return s;
    }
    const double a = static_cast<double>(n0 + 1);
    auto f = [u](double x) { return erfc(std::sqrt(u * x)) / x; };
    const double c = u * a;
    const double upper = std::max(c + 60.0, 80.0);
    const double integral =
        integrate([](double y) { return erfc(std::sqrt(y)) / y; }, c, upper, 1e-13, 1e-13);
    const double fp = -std::sqrt(u) * std::exp(-u * a) / (std::sqrt(M_PI * a) * a) -
                      f(a) / a;
    s += integral + 0.5 * f(a) - fp / 12.0;
    return s;
}

}  // namespace

KappaResult kappa_sech_closed(double p) {
    if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("kappa_sech_closed: need p in [0,1)");
    KappaResult res;
    res.regime = regime_of(p);
    const double beta = 4.0 * p * (1.0 - p);
    const double c1 = std::acos((1.0 - 2.0 * p) / std::sqrt(2.0));
    res.kappa1 = 2.0 / (M_PI * M_PI) * c1 * c1 - 0.125;

    const double nu = 4.0 / M_PI * std::acos(std::abs(2.0 * p - 1.0) / std::sqrt(2.0));
    if (res.regime == Regime::critical) {
        res.kappa2 = 0.25 * std::log(0.5 * M_PI * M_PI) - 0.5 * euler_gamma -
                     0.25 * critical_logx_integral();
        res.est_error = 1e-10;
        return res;
    }
    const double xint = sech_profile_xint(nu);
    if (res.regime == Regime::subcritical) {
        res.kappa2 = std::log(std::sqrt(1.0 - 2.0 * p) / (1.0 - p)) + 0.5 * xint;
    } else {
        res.phi_p = 2.0 / M_PI * std::acos(beta);
        const double disc = (2.0 * p - 1.0) * (1.0 + 4.0 * p - 4.0 * p * p);
        res.kappa2 = 0.5 * xint - std::log(std::acos(beta)) -
                     std::log(std::sqrt(disc) / (2.0 * p)) + poisson_integral(beta);
    }
    res.est_error = 1e-10;
    return res;
}

KappaResult kappa_gauss_closed(double p, double t) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("kappa_gauss_closed: need p in (0,1)");
    if (!(t > 0.0)) throw std::domain_error("kappa_gauss_closed: need t > 0");
    KappaResult res;
    res.regime = regime_of(p);
    const double beta = 4.0 * p * (1.0 - p);
    res.kappa1 = polylog(1.5, beta) / (4.0 * std::sqrt(M_PI * t));

    if (res.regime == Regime::subcritical) {
        res.kappa2 = std::log(std::sqrt(1.0 - 2.0 * p) / (1.0 - p)) -
                     0.25 * (std::log1p(-beta) + beta) +
                     detail::compensated_diag_sum(2, beta) / (4.0 * M_PI);
    } else if (res.regime == Regime::critical) {
        res.kappa2 = std::log(2.0) - 0.25 + detail::compensated_diag_sum(2, 1.0) / (4.0 * M_PI);
    } else {
        const double u = -std::log(beta);
        res.phi_p = std::sqrt(u / t);
        res.kappa1 += res.phi_p;
        res.kappa2 = 0.5 * std::log((2.0 * p - 1.0) / (16.0 * (1.0 - p) * (1.0 - p))) -
                     0.25 * (std::log1p(-beta) + beta) +
                     detail::compensated_diag_sum(2, beta) / (4.0 * M_PI) - std::log(u) -
                     erfc_log_sum(u);
    }
    res.est_error = 1e-8;
    return res;
}

KappaResult kappa_persistence_closed(double p) {
    if (!(p > 0.0 && p <= 1.0))
        throw std::domain_error("kappa_persistence_closed: need p in (0,1]");
    KappaResult res;
    res.regime = regime_of(p);
    const double beta = 4.0 * p * (1.0 - p);
    const double c1 = std::acos(std::abs(2.0 * p - 1.0) / std::sqrt(2.0));
    res.kappa1 = 2.0 / (M_PI * M_PI) * c1 * c1 - 0.125;

    const double nu = 4.0 / M_PI * c1;
    if (res.regime == Regime::subcritical) {
        res.kappa2 = 0.5 * std::log((1.0 - 2.0 * p) / (1.0 - p)) +
                     0.5 * sech_profile_xint(nu) + digamma_weighted_integral(beta);
    } else if (res.regime == Regime::critical) {
        res.kappa2 = 0.25 * std::log(M_PI * M_PI / 8.0) - 0.5 * euler_gamma -
                     0.25 * critical_logx_integral() + digamma_weighted_integral(1.0);
    } else {
        res.phi_p = 2.0 / M_PI * std::acos(beta);
        res.kappa1 += res.phi_p;
        const double disc = (2.0 * p - 1.0) * (1.0 + 4.0 * p - 4.0 * p * p);
        res.kappa2 = 0.5 * sech_profile_xint(nu) - std::log(std::acos(beta)) -
                     std::log(std::sqrt(disc / (M_PI * p)) *
                              std::exp(std::lgamma(0.5 * (1.0 + res.phi_p)))) +
                     poisson_integral(beta) + digamma_weighted_integral(beta);
    }
    res.est_error = 1e-8;
    return res;
}

double gamma_q(double q) {
    if (!(q >= 1.0)) throw std::domain_error("gamma_q: need q >= 1");
    return 0.5 * kappa_persistence_closed(1.0 / q).kappa1;
}

}  // namespace fpf
