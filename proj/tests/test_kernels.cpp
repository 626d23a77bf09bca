// Step densities (transforms, moments, sampling), autocorrelation closed
// forms, and the scalar/derived kernel algebra.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "fpf/density.hpp"
#include "fpf/grid.hpp"
#include "fpf/kernel.hpp"
#include "fpf/rng.hpp"
#include "fpf/special.hpp"

using namespace fpf;

namespace {
constexpr double kPi = 3.141592653589793238462643383279503;

std::vector<StepDensity> catalogue() {
    return {StepDensity::sech(), StepDensity::gaussian(0.5), StepDensity::gaussian(1.7),
            StepDensity::poisson_smoothed(1.0, 1.0, 0.5), StepDensity::persistence()};
}

double quad_mass(const StepDensity& rho) {
    const double W = rho.half_width(1e-13);
    return integrate([&rho](double x) { return rho.eval(x); }, -W, W, 1e-12, 1e-12);
}
}  // namespace

TEST_CASE("catalogue densities integrate to one with the advertised moments") {
    for (const auto& rho : catalogue()) {
        CAPTURE(rho.name());
        CHECK(quad_mass(rho) == doctest::Approx(1.0).epsilon(1e-10));
        const double W = rho.half_width(1e-13);
        const double mean = integrate([&rho](double x) { return x * rho.eval(x); }, -W, W);
        CHECK(mean == doctest::Approx(rho.mean()).epsilon(1e-8));
        const double var = integrate(
            [&rho, mean](double x) { return (x - mean) * (x - mean) * rho.eval(x); }, -W, W);
        CHECK(var == doctest::Approx(rho.sigma2()).epsilon(1e-8));
    }
    CHECK(StepDensity::sech().sigma2() == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-12));
    CHECK(StepDensity::gaussian(0.5).sigma2() == doctest::Approx(1.0).epsilon(1e-12));
    const auto pois = StepDensity::poisson_smoothed(2.0, 0.5, 0.3);
    CHECK(pois.param_mu() == doctest::Approx(3.0));
    CHECK(pois.param_t() == doctest::Approx(0.3));
    CHECK(pois.sigma2() == doctest::Approx(2.0 * 0.3 + 2.0 / 9.0).epsilon(1e-12));
    CHECK_THROWS_AS(StepDensity::sech().param_mu(), std::domain_error);
}

TEST_CASE("cdf is the integral of the density and deriv its slope") {
    for (const auto& rho : catalogue()) {
        CAPTURE(rho.name());
        const double W = rho.half_width(1e-13);
        for (double x : {-1.3, 0.0, 0.8}) {
            const double F = integrate([&rho](double u) { return rho.eval(u); }, -W, x);
            CHECK(F == doctest::Approx(rho.cdf(x)).epsilon(1e-6));
            const double h = 1e-5;
            const double fd = (rho.eval(x + h) - rho.eval(x - h)) / (2.0 * h);
            CHECK(rho.deriv(x) == doctest::Approx(fd).epsilon(1e-5));
        }
        CHECK(rho.cdf(-W) < 1e-10);
        CHECK(rho.cdf(W) > 1.0 - 1e-10);
    }
}

TEST_CASE("half_width bounds the tail mass it promises") {
    for (const auto& rho : catalogue()) {
        for (double eps : {1e-6, 1e-10}) {
            const double W = rho.half_width(eps);
            CHECK(rho.cdf(-W) + (1.0 - rho.cdf(W)) <= eps * 1.0000001);
        }
    }
}

TEST_CASE("fourier transforms match direct quadrature") {
    for (const auto& rho : {StepDensity::sech(), StepDensity::gaussian(0.8),
                            StepDensity::poisson_smoothed(1.5, 0.0, 0.4)}) {
        CAPTURE(rho.name());
        const double W = rho.half_width(1e-14);
        for (double k : {0.0, 0.9, 3.5}) {
            const double direct =
                integrate([&rho, k](double x) { return std::cos(k * x) * rho.eval(x); }, -W, W);
            CHECK(rho.ft(k) == doctest::Approx(direct).epsilon(1e-9));
        }
        CHECK(rho.ft(0.0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(std::abs(rho.ft(2.0)) < 1.0);
    }
    // Smoothed-poisson transform has the advertised product form.
    const auto pois = StepDensity::poisson_smoothed(1.0, 1.0, 0.5);
    const double mu = pois.param_mu(), k = 1.3;
    CHECK(pois.ft(k) ==
          doctest::Approx(mu * mu / (mu * mu + k * k) * std::exp(-0.5 * k * k)).epsilon(1e-12));
}

TEST_CASE("persistence density: asymmetric closed forms") {
    const auto rho = StepDensity::persistence();
    CHECK_FALSE(rho.symmetric());
    // density (2/sqrt(pi)) exp(x - e^{2x}) and cdf erf(e^x)
    for (double x : {-2.0, -0.3, 0.5}) {
        CHECK(rho.eval(x) ==
              doctest::Approx(2.0 / std::sqrt(kPi) * std::exp(x - std::exp(2.0 * x)))
                  .epsilon(1e-13));
        CHECK(rho.cdf(x) == doctest::Approx(1.0 - fpf::erfc(std::exp(x))).epsilon(1e-12));
    }
    CHECK(rho.mean() ==
          doctest::Approx(-0.5 * (euler_gamma + 2.0 * std::log(2.0))).epsilon(1e-12));
    CHECK_THROWS_AS(rho.ft(1.0), std::domain_error);
    // Complex transform against quadrature of e^{ikx} rho(x).
    for (double k : {0.7, 2.0}) {
        const double re = integrate(
            [&rho, k](double x) { return std::cos(k * x) * rho.eval(x); }, -40.0, 4.0);
        const double im = integrate(
            [&rho, k](double x) { return std::sin(k * x) * rho.eval(x); }, -40.0, 4.0);
        const auto ft = rho.ft_complex(k);
        CHECK(ft.real() == doctest::Approx(re).epsilon(1e-10));
        CHECK(ft.imag() == doctest::Approx(im).epsilon(1e-10));
    }
}

TEST_CASE("smoothed-poisson tails stay finite and decay at the exponential rate") {
    const auto rho = StepDensity::poisson_smoothed(1.0, 1.0, 0.5);  // mu = 2
    const double mu = rho.param_mu();
    for (double x : {40.0, 60.0, 120.0}) {
        CHECK(std::isfinite(rho.eval(x)));
        CHECK(rho.eval(x) > 0.0);
        CHECK(std::isfinite(rho.deriv(x)));
    }
    const double slope = (std::log(rho.eval(40.0)) - std::log(rho.eval(50.0))) / 10.0;
    CHECK(slope == doctest::Approx(mu).epsilon(1e-6));
    // Laplace moments: closed form against quadrature inside the strip.
    CHECK(rho.tilt_limit() == doctest::Approx(mu));
    const double W = rho.half_width(1e-14);
    for (double phi : {0.4, 1.2}) {
        const double direct =
            integrate([&rho, phi](double x) { return std::exp(phi * x) * rho.eval(x); },
                      -W - 10.0, W + 10.0);
        CHECK(rho.exp_moment(phi) == doctest::Approx(direct).epsilon(1e-9));
    }
    CHECK_THROWS_AS(rho.exp_moment(2.5), std::domain_error);  // outside the strip
}

TEST_CASE("sampling reproduces the distribution it advertises") {
    for (const auto& rho : catalogue()) {
        CAPTURE(rho.name());
        Rng rng(2024, 7);
        const int n = 40000;
        double s = 0, ss = 0;
        int below = 0;
        const double probe = 0.4;
        for (int i = 0; i < n; ++i) {
            const double x = rho.sample(rng);
            s += x;
            ss += x * x;
            if (x <= probe) ++below;
        }
        const double mean_hat = s / n;
        const double var_hat = ss / n - mean_hat * mean_hat;
        const double se_mean = std::sqrt(rho.sigma2() / n);
        CHECK(std::abs(mean_hat - rho.mean()) < 4.5 * se_mean);
        CHECK(var_hat == doctest::Approx(rho.sigma2()).epsilon(0.05));
        const double F = rho.cdf(probe);
        const double seF = std::sqrt(F * (1.0 - F) / n);
        CHECK(std::abs(static_cast<double>(below) / n - F) < 4.5 * seF);
    }
}

TEST_CASE("autocorrelation densities: closed forms and the numeric fallback") {
    // sech -> (2/pi^2) z / sinh z
    const auto ts = rho_tilde(StepDensity::sech());
    CHECK(ts.symmetric());
    CHECK(ts.eval(0.0) == doctest::Approx(2.0 / (kPi * kPi)).epsilon(1e-12));
    for (double z : {0.6, 2.5})
        CHECK(ts.eval(z) ==
              doctest::Approx(2.0 / (kPi * kPi) * z / std::sinh(z)).epsilon(1e-12));
    // gaussian(t) -> gaussian(2t)
    const auto tg = rho_tilde(StepDensity::gaussian(0.7));
    CHECK(tg.sigma2() == doctest::Approx(2.0 * 1.4).epsilon(1e-12));
    CHECK(tg.eval(0.9) == doctest::Approx(StepDensity::gaussian(1.4).eval(0.9)).epsilon(1e-12));
    // persistence -> sech
    const auto tp = rho_tilde(StepDensity::persistence());
    CHECK(tp.eval(1.1) == doctest::Approx(StepDensity::sech().eval(1.1)).epsilon(1e-12));

    // Fallback path: autocorrelation of a tabulated copy matches the closed one.
    const auto sech = StepDensity::sech();
    UniformGridFn tab;
    tab.x0 = -30.0;
    tab.h = 0.004;
    tab.values.resize(15001);
    for (std::size_t j = 0; j < tab.values.size(); ++j) tab.values[j] = sech.eval(tab.x_at(j));
    const auto tt = rho_tilde(StepDensity::tabulated(tab));
    for (double z : {0.0, 0.8, 2.0})
        CHECK(tt.eval(z) == doctest::Approx(ts.eval(z)).epsilon(1e-5));
}

TEST_CASE("autocorrelation against direct quadrature for every catalogue kind") {
    for (const auto& rho : catalogue()) {
        CAPTURE(rho.name());
        const auto tld = rho_tilde(rho);
        const double W = rho.half_width(1e-13);
        for (double z : {0.0, 1.2}) {
            const double direct = integrate(
                [&rho, z](double w) { return rho.eval(w) * rho.eval(w - z); }, -W, W + z);
            CHECK(tld.eval(z) == doctest::Approx(direct).epsilon(1e-7));
        }
    }
}

TEST_CASE("bulk kernel carries the distribution function and its slopes") {
    const auto rho = StepDensity::sech();
    const auto K = scalar_bulk(rho);
    for (double x : {-0.7, 0.2})
        for (double y : {-0.4, 1.1}) {
            CHECK(K.K(x, y) == doctest::Approx(1.0 - 2.0 * rho.cdf(y - x)).epsilon(1e-13));
            CHECK(K.K(x, y) == doctest::Approx(-K.K(y, x)).epsilon(1e-12));
            const double h = 1e-5;
            CHECK(K.d1(x, y) ==
                  doctest::Approx((K.K(x + h, y) - K.K(x - h, y)) / (2 * h)).epsilon(1e-7));
            CHECK(K.d2(x, y) ==
                  doctest::Approx((K.K(x, y + h) - K.K(x, y - h)) / (2 * h)).epsilon(1e-7));
            CHECK(K.d12(x, y) ==
                  doctest::Approx((K.d1(x, y + h) - K.d1(x, y - h)) / (2 * h)).epsilon(1e-6));
        }
    CHECK(K.K(0.3, 0.3) == doctest::Approx(0.0));
    CHECK_THROWS_AS(scalar_bulk(StepDensity::persistence()), std::invalid_argument);
}

TEST_CASE("edge kernel: defining integral, tail autocorrelation, derivative identity") {
    for (const auto& rho : {StepDensity::gaussian(0.5), StepDensity::persistence()}) {
        CAPTURE(rho.name());
        const EdgeKernel K = scalar_edge(rho);
        for (double x : {-1.5, 0.3})
            for (double y : {-0.6, 0.9}) {
                // T(x,y) = int_0^inf rho(x+w) rho(y+w) dw (closed form inside).
                const double Tq = integrate_halfline(
                    [&rho, x, y](double w) { return rho.eval(x + w) * rho.eval(y + w); }, 0.0,
                    1e-14);
                CHECK(K.T(x, y) == doctest::Approx(Tq).epsilon(1e-9));
                // K from its defining half-line integral.
                const double Kq = integrate_halfline(
                    [&rho, x, y](double w) {
                        return rho.cdf(x + w) * rho.eval(y + w) -
                               rho.cdf(y + w) * rho.eval(x + w);
                    },
                    0.0, 1e-13);
                CHECK(K.K(x, y) == doctest::Approx(Kq).epsilon(1e-8));
                CHECK(K.K(x, y) == doctest::Approx(-K.K(y, x)).epsilon(1e-10));
                // Closed derivative entries vs the integral's finite differences.
                const double h = 1e-5;
                const double fd2 = (K.K(x, y + h) - K.K(x, y - h)) / (2.0 * h);
                CHECK(K.d2(x, y) == doctest::Approx(fd2).epsilon(1e-6));
                CHECK(K.d1(x, y) == doctest::Approx(-K.d2(y, x)).epsilon(1e-12));
                const double fd12 = (K.d1(x, y + h) - K.d1(x, y - h)) / (2.0 * h);
                CHECK(K.d12(x, y) == doctest::Approx(fd12).epsilon(1e-6));
            }
        CHECK(K.Phi(0.4) == doctest::Approx(rho.cdf(0.4)));
    }
}

TEST_CASE("secular zero kernel closed entries") {
    const auto K = scalar_gps();
    CHECK(K.lo == -1.0);
    CHECK(K.hi == 1.0);
    CHECK(K.K(0.0, 0.5) ==
          doctest::Approx(2.0 / kPi * std::asin(std::sqrt(0.75)) - 1.0).epsilon(1e-13));
    CHECK(K.K(0.5, 0.0) == doctest::Approx(-K.K(0.0, 0.5)).epsilon(1e-13));
    CHECK(K.K(0.2, 0.2) == 0.0);
    const double h = 1e-6;
    for (double x : {-0.4, 0.1})
        for (double y : {0.35, 0.6}) {
            CHECK(K.d2(x, y) ==
                  doctest::Approx((K.K(x, y + h) - K.K(x, y - h)) / (2 * h)).epsilon(1e-5));
            CHECK(K.d1(x, y) ==
                  doctest::Approx((K.K(x + h, y) - K.K(x - h, y)) / (2 * h)).epsilon(1e-5));
            CHECK(K.d12(x, y) ==
                  doctest::Approx((K.d1(x, y + h) - K.d1(x, y - h)) / (2 * h)).epsilon(1e-4));
        }
    CHECK_NOTHROW(K.require_inside(0.99));
    CHECK_THROWS_AS(K.require_inside(1.0), std::domain_error);
    CHECK_THROWS_AS(K.require_inside(-1.2), std::domain_error);
}

TEST_CASE("exit kernels: closed maximal entries, quadrature poisson smoke") {
    const auto K = scalar_exit(ExitInit::maximal);
    CHECK(K.K(1.0, 4.0) == doctest::Approx(4.0 / kPi * std::atan(0.5) - 1.0).epsilon(1e-13));
    CHECK(K.K(4.0, 1.0) == doctest::Approx(-K.K(1.0, 4.0)).epsilon(1e-13));
    const double h = 1e-6;
    for (double s : {0.5, 2.0})
        for (double t : {1.3, 5.0}) {
            CHECK(K.d1(s, t) ==
                  doctest::Approx((K.K(s + h, t) - K.K(s - h, t)) / (2 * h)).epsilon(1e-5));
            CHECK(K.d2(s, t) ==
                  doctest::Approx((K.K(s, t + h) - K.K(s, t - h)) / (2 * h)).epsilon(1e-5));
        }

    const auto P = scalar_exit(ExitInit::poisson, 1.0);
    const double v = P.K(0.7, 1.9);
    CHECK(std::isfinite(v));
    CHECK(P.K(1.9, 0.7) == doctest::Approx(-v).epsilon(1e-6));
    CHECK_THROWS_AS(scalar_exit(ExitInit::poisson, 0.0), std::invalid_argument);
}

TEST_CASE("pushforward rewires arguments and scales derivative slots") {
    const auto K = scalar_bulk(StepDensity::gaussian(0.5));
    PushMap map;
    map.phi = [](double x) { return 2.0 * x + 1.0; };
    map.phi_inv = [](double u) { return 0.5 * (u - 1.0); };
    map.dphi_inv = [](double) { return 0.5; };
    map.lo = -9.0;
    map.hi = 9.0;
    const auto P = pushforward(K, map);
    const double u = 0.4, v = 1.9;
    const double x = 0.5 * (u - 1.0), y = 0.5 * (v - 1.0);
    CHECK(P.K(u, v) == doctest::Approx(K.K(x, y)).epsilon(1e-13));
    CHECK(P.d1(u, v) == doctest::Approx(0.5 * K.d1(x, y)).epsilon(1e-13));
    CHECK(P.d2(u, v) == doctest::Approx(0.5 * K.d2(x, y)).epsilon(1e-13));
    CHECK(P.d12(u, v) == doctest::Approx(0.25 * K.d12(x, y)).epsilon(1e-13));
    CHECK(P.lo == -9.0);
    CHECK_THROWS_AS(P.require_inside(9.5), std::domain_error);
}

TEST_CASE("derived blocks assemble the four entries with the sign jump") {
    const auto base = scalar_bulk(StepDensity::sech());
    const auto D = derived(base);
    const double p = 0.7, x = -0.2, y = 0.9;
    const Eigen::Matrix2d b = D.block(x, y, p);
    CHECK(b(0, 0) == doctest::Approx(p * (1.0 + base.K(x, y))).epsilon(1e-13));
    CHECK(b(0, 1) == doctest::Approx(-p * base.d2(x, y)).epsilon(1e-13));
    CHECK(b(1, 0) == doctest::Approx(-p * base.d1(x, y)).epsilon(1e-13));
    CHECK(b(1, 1) == doctest::Approx(p * base.d12(x, y)).epsilon(1e-13));
    // S flips across the diagonal and vanishes on it.
    CHECK(D.block(y, x, p)(0, 0) == doctest::Approx(p * (-1.0 + base.K(y, x))).epsilon(1e-13));
    CHECK(D.block(x, x, p)(0, 0) == doctest::Approx(0.0));
    // The big matrix is antisymmetric: block(y,x) = -block(x,y)^T.
    const Eigen::Matrix2d bt = D.block(y, x, p);
    CHECK((bt + b.transpose()).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("intensities: one-point value, symmetry, and guards") {
    const auto D = derived(scalar_bulk(StepDensity::gaussian(0.5)));
    const double p = 0.6;
    CHECK(intensity(D, p, {}) == doctest::Approx(1.0));
    // Single point: Pfaffian of the 2x2 block is its upper-right entry.
    CHECK(intensity(D, p, {0.3}) ==
          doctest::Approx(-p * D.base.d2(0.3, 0.3)).epsilon(1e-12));
    const double r12 = intensity(D, p, {0.1, 0.8});
    CHECK(r12 == doctest::Approx(intensity(D, p, {0.8, 0.1})).epsilon(1e-10));
    CHECK(r12 > 0.0);
    // Two far-apart points decorrelate to the product of one-point values.
    const double far = intensity(D, p, {-8.0, 8.0});
    CHECK(far == doctest::Approx(intensity(D, p, {-8.0}) * intensity(D, p, {8.0}))
                     .epsilon(1e-6));
    CHECK_THROWS_AS(intensity(D, 0.0, {0.3}), std::domain_error);
    CHECK_THROWS_AS(intensity(D, 1.2, {0.3}), std::domain_error);
    CHECK_THROWS_AS(intensity(D, p, {0.3, 0.3}), std::invalid_argument);
    const auto G = derived(scalar_gps());
    CHECK_THROWS_AS(intensity(G, p, {0.2, 1.5}), std::domain_error);
}

TEST_CASE("tabulated densities renormalize and expose numeric transforms") {
    const auto sech = StepDensity::sech();
    UniformGridFn tab;
    tab.x0 = -25.0;
    tab.h = 0.01;
    tab.values.resize(5001);
    for (std::size_t j = 0; j < tab.values.size(); ++j)
        tab.values[j] = 3.7 * sech.eval(tab.x_at(j));  // deliberately unnormalized
    const auto d = StepDensity::tabulated(tab);
    CHECK(d.kind() == StepDensity::Kind::tabulated);
    CHECK(d.eval(0.5) == doctest::Approx(sech.eval(0.5)).epsilon(1e-5));
    CHECK(d.cdf(0.0) == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(d.sigma2() == doctest::Approx(sech.sigma2()).epsilon(1e-4));
    Rng rng(3, 1);
    double s = 0;
    for (int i = 0; i < 5000; ++i) s += d.sample(rng);
    CHECK(std::abs(s / 5000.0) < 4.0 * std::sqrt(sech.sigma2() / 5000.0));
}
