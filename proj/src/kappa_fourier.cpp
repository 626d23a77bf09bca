#include <cmath>
#include <stdexcept>

#include "fpf/grid.hpp"
#include "fpf/kappa.hpp"
#include "fpf/special.hpp"

namespace fpf {

namespace {

// Frequency beyond which the log factor is numerically zero.
double find_k_cut(const StepDensity& rho, double beta) {
    double K = 4.0;
    for (int i = 0; i < 60; ++i) {
        if (beta * std::abs(rho.ft(K)) < 1e-18) return K;
        K *= 1.5;
    }
    throw std::runtime_error("kappa_bulk_fourier: transform does not decay");
}

struct LogSymbol {
    const StepDensity* rho;
    double beta;
    double k_cut;
    // (1/pi) int_0^K cos(kx) log(1 - beta rho_hat(k)) dk.  At beta = 1 the
    // symbol behaves like 2 log k near the origin; that exact piece is
    // integrated separately (k = e^u flattens it), leaving smooth remainders
    // the adaptive rule handles at full tolerance.
    double L(double x) const {
        if (beta < 1.0 - 1e-12) {
            return integrate(
                       [&](double k) { return std::cos(k * x) * std::log1p(-beta * rho->ft(k)); },
                       0.0, k_cut, 1e-12, 1e-12) /
                   M_PI;
        }
        const double k0 = std::min(1.0, k_cut);
        double I = integrate(
            [&](double k) {
                return std::cos(k * x) * (std::log1p(-rho->ft(k)) - 2.0 * std::log(k));
            },
            0.0, k0, 1e-13, 1e-13);
        I += integrate(
            [&](double u) {
                const double k = std::exp(u);
                return std::cos(k * x) * 2.0 * u * k;
            },
            -40.0, std::log(k0), 1e-13, 1e-13);
        if (k_cut > k0)
            I += integrate(
                [&](double k) { return std::cos(k * x) * std::log1p(-rho->ft(k)); },
                k0, k_cut, 1e-12, 1e-12);
        return I / M_PI;
    }
};

}  // namespace

KappaResult kappa_bulk_fourier(const StepDensity& rho, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("kappa_bulk_fourier: need p in (0,1)");
    if (!rho.symmetric())
        throw std::invalid_argument("kappa_bulk_fourier: density must be symmetric");
    const double beta = 4.0 * p * (1.0 - p);
    KappaResult res;
    res.regime = regime_of(p);
    const LogSymbol sym{&rho, beta, find_k_cut(rho, beta)};

    res.kappa1 = -0.5 * sym.L(0.0);
    if (res.regime == Regime::supercritical) {
        res.phi_p = solve_phi(rho, p);
        res.kappa1 += res.phi_p;
    }

    if (res.regime == Regime::critical) {
        // Critical constant.  The symbol's 2 log k origin singularity forces
        // x L(x) -> -1 exponentially fast, so integrating the x log x term by
        // parts removes both the derivative and the slow tail:
        //   int_0^inf log x (x^2 L^2)' dx
        //     = log X - int_0^X x L^2 dx - int_X^inf (x^2 L^2 - 1)/x dx.
        const double sig2 = rho.sigma2();
        const double X = 12.0, X2 = 40.0;
        auto xL2 = [&](double x) {
            const double Lx = sym.L(x);
            return x * Lx * Lx;
        };
        const double head = integrate(xL2, 0.0, X, 1e-10, 1e-10);
        const double tail = integrate(
            [&](double x) {
                const double Lx = sym.L(x);
                return (x * x * Lx * Lx - 1.0) / x;
            },
            X, X2, 1e-10, 1e-10);
        const double xlog = std::log(X) - head - tail;
        res.kappa2 = 0.25 * std::log(2.0 * sig2) - 0.5 * euler_gamma - 0.5 * xlog;
        res.est_error = 1e-8;
        return res;
    }

    const double xint =
        integrate_halfline([&](double x) { const double Lx = sym.L(x); return x * Lx * Lx; },
                           0.0, 1e-11);
    if (res.regime == Regime::subcritical) {
        res.kappa2 = std::log(std::sqrt(1.0 - 2.0 * p) / (1.0 - p)) + 0.5 * xint;
    } else {
        const double phi = res.phi_p;
        const double poisson =
            2.0 / M_PI *
            integrate([&](double k) {
                return phi / (phi * phi + k * k) * std::log1p(-beta * rho.ft(k));
            }, 0.0, sym.k_cut, 1e-12, 1e-12);
        const double gamma_p = std::log(phi * rho.exp_x_moment(phi)) - poisson;
        res.kappa2 = std::log(std::sqrt(2.0 * p - 1.0) / (8.0 * p * (1.0 - p) * (1.0 - p))) -
                     gamma_p + 0.5 * xint;
    }
    res.est_error = 1e-9;
    return res;
}

}  // namespace fpf
