#include "fpf/special.hpp"

#include <cmath>
#include <stdexcept>

namespace fpf {

namespace {
// B_{2k}, k = 1..10.
constexpr double kBernoulli2k[10] = {
    1.0 / 6.0,    -1.0 / 30.0,   1.0 / 42.0,      -1.0 / 30.0,     5.0 / 66.0,
    -691.0 / 2730.0, 7.0 / 6.0,  -3617.0 / 510.0, 43867.0 / 798.0, -174611.0 / 330.0};
}  // namespace

double zeta(double s) {
    if (s == 1.0) throw std::domain_error("zeta: pole at s = 1");
    if (s < 0.5) {
        // Functional equation.
        return std::pow(2.0, s) * std::pow(M_PI, s - 1.0) * std::sin(0.5 * M_PI * s) *
               std::tgamma(1.0 - s) * zeta(1.0 - s);
    }
    // Euler-Maclaurin with N leading terms and 10 Bernoulli corrections.
    const int N = 24;
    double sum = 0.0;
    for (int n = 1; n < N; ++n) sum += std::pow(static_cast<double>(n), -s);
    const double Nd = static_cast<double>(N);
    sum += std::pow(Nd, 1.0 - s) / (s - 1.0);
    sum += 0.5 * std::pow(Nd, -s);
    double rising = s;          // s (s+1) ... accumulated
    double npow = std::pow(Nd, -s - 1.0);
    double fact = 2.0;          // (2k)!
    for (int k = 1; k <= 10; ++k) {
        sum += kBernoulli2k[k - 1] / fact * rising * npow;
        rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
        npow /= Nd * Nd;
        fact *= (2.0 * k + 1.0) * (2.0 * k + 2.0);
    }
    return sum;
}

double polylog(double s, double x) {
    const bool s_ok = (s == 0.5 || s == 1.5 || s == 2.5 || s == 3.5);
    if (!s_ok) throw std::domain_error("polylog: order must be in {1/2,3/2,5/2,7/2}");
    if (x <= 0.0 || x > 1.0) throw std::domain_error("polylog: need 0 < x <= 1");
    if (x == 1.0) {
        if (s <= 1.0) throw std::domain_error("polylog: diverges at x = 1 for s <= 1");
        return zeta(s);
    }
    if (x <= 0.5) {
        double sum = 0.0, xn = 1.0;
        for (int n = 1; n <= 200; ++n) {
            xn *= x;
            const double term = xn / std::pow(static_cast<double>(n), s);
            sum += term;
            if (term < 1e-17 * std::abs(sum)) break;
        }
        return sum;
    }
    // Branch-point expansion at x = 1: Li_s(e^{-u}) = Gamma(1-s) u^{s-1}
    //                                   + sum_k zeta(s-k) (-u)^k / k!.
    const double u = -std::log(x);
    double sum = std::tgamma(1.0 - s) * std::pow(u, s - 1.0);
    double uk = 1.0;  // (-u)^k / k!
    for (int k = 0; k <= 34; ++k) {
        sum += zeta(s - static_cast<double>(k)) * uk;
        uk *= -u / static_cast<double>(k + 1);
    }
    return sum;
}

namespace {
template <typename T>
T digamma_impl(T z) {
    T acc = T{};
    while (std::abs(z) < 12.0) {
        acc -= 1.0 / z;
        z += 1.0;
    }
    // Asymptotic series.
    T res = std::log(z) - 0.5 / z;
    T z2 = 1.0 / (z * z), zp = z2;
    const double coef[7] = {1.0 / 12.0, -1.0 / 120.0, 1.0 / 252.0, -1.0 / 240.0,
                            1.0 / 132.0, -691.0 / 32760.0, 1.0 / 12.0};
    for (int k = 0; k < 7; ++k) {
        res -= coef[k] * zp;
        zp *= z2;
    }
    return acc + res;
}
}  // namespace

double digamma(double x) {
    if (x <= 0.0) throw std::domain_error("digamma: need x > 0");
    return digamma_impl<double>(x);
}

std::complex<double> digamma(std::complex<double> z) {
    if (z.real() <= 0.0 && z.imag() == 0.0)
        throw std::domain_error("digamma: on the negative real axis");
    if (z.real() < 0.0) {
        // Reflection to the right half plane.
        const std::complex<double> pi(M_PI, 0.0);
        return digamma(1.0 - z) - pi / std::tan(pi * z);
    }
    return digamma_impl<std::complex<double>>(z);
}

std::complex<double> log_gamma(std::complex<double> z) {
    if (z.real() <= 0.0) throw std::domain_error("log_gamma: need Re z > 0");
    // Lanczos, g = 7, 9 coefficients.
    static const double c[9] = {0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
                                771.32342877765313,   -176.61502916214059, 12.507343278686905,
                                -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    const std::complex<double> zz = z - 1.0;
    std::complex<double> a(c[0], 0.0);
    for (int i = 1; i < 9; ++i) a += c[i] / (zz + static_cast<double>(i));
    const std::complex<double> t = zz + 7.5;
    return 0.5 * std::log(2.0 * M_PI) + (zz + 0.5) * std::log(t) - t + std::log(a);
}

double erfc(double x) { return std::erfc(x); }

double erf_inv(double y) {
    if (!(y > -1.0 && y < 1.0)) throw std::domain_error("erf_inv: need |y| < 1");
    if (y == 0.0) return 0.0;
    // Rational seed (Winitzki), then Newton.
    const double w = std::log(1.0 - y * y);
    const double a = 0.147;
    const double t = 2.0 / (M_PI * a) + 0.5 * w;
    double x = std::copysign(std::sqrt(std::sqrt(t * t - w / a) - t), y);
    for (int i = 0; i < 60; ++i) {
        const double err = std::erf(x) - y;
        const double dx = err * 0.5 * std::sqrt(M_PI) * std::exp(x * x);
        x -= dx;
        if (std::abs(dx) < 1e-15 * (1.0 + std::abs(x))) break;
    }
    return x;
}

double special(const std::string& fn, double x) {
    if (fn == "erfc") return erfc(x);
    if (fn == "digamma") return digamma(x);
    if (fn == "zeta") return zeta(x);
    if (fn == "log_gamma") {
        if (x <= 0.0) throw std::domain_error("log_gamma: need x > 0");
        return std::lgamma(x);
    }
    throw std::invalid_argument("special: unknown function '" + fn + "'");
}

}  // namespace fpf
