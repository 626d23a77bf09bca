// Growth coefficients kappa1/kappa2: closed-form pins, agreement of the
// series / Fourier / closed routes, the tilt equation, and the determinant
// growth law cross-checked against finite-section evaluations.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fpf/density.hpp"
#include "fpf/fredholm.hpp"
#include "fpf/kappa.hpp"

using namespace fpf;

namespace {
constexpr double kPi = 3.141592653589793238462643383279503;

void check_pair(const KappaResult& a, const KappaResult& b, double tol1, double tol2) {
    CHECK(std::abs(a.kappa1 - b.kappa1) < tol1);
    CHECK(std::abs(a.kappa2 - b.kappa2) < tol2);
}
}  // namespace

TEST_CASE("closed forms hit the exactly known constants") {
    const auto s = kappa_sech_closed(0.5);
    CHECK(s.kappa1 == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(s.kappa2 == doctest::Approx(0.024709978086632917).epsilon(1e-11));
    CHECK(s.regime == Regime::critical);

    const auto g = kappa_gauss_closed(0.5, 0.5);
    CHECK(g.kappa1 ==
          doctest::Approx(boost::math::zeta(1.5) / std::sqrt(8.0 * kPi)).epsilon(1e-10));
    // kappa1 carries the 1/length scale of the density, kappa2 does not.
    CHECK(kappa_gauss_closed(0.5, 2.0).kappa1 * std::sqrt(2.0) ==
          doctest::Approx(g.kappa1 * std::sqrt(0.5)).epsilon(1e-12));
    CHECK(kappa_gauss_closed(0.3, 0.25).kappa2 ==
          doctest::Approx(kappa_gauss_closed(0.3, 2.0).kappa2).epsilon(1e-12));

    const auto pr = kappa_persistence_closed(1.0);
    CHECK(pr.kappa1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pr.kappa2 == doctest::Approx(std::log(2.0 / std::sqrt(kPi))).epsilon(1e-11));

    // Unthinned limit of the bulk closed form: empty product, no decay.
    const auto z = kappa_sech_closed(0.0);
    CHECK(z.kappa1 == doctest::Approx(0.0));
    CHECK(z.kappa2 == doctest::Approx(0.0));
}

TEST_CASE("series, fourier, and closed routes agree off criticality") {
    struct Case {
        StepDensity rho;
        double p;
    };
    for (const auto& c : {Case{StepDensity::sech(), 0.3}, Case{StepDensity::sech(), 0.75},
                          Case{StepDensity::gaussian(0.8), 0.7}}) {
        CAPTURE(c.rho.name());
        CAPTURE(c.p);
        const auto ser = kappa_bulk_series(c.rho, c.p);
        const auto fou = kappa_bulk_fourier(c.rho, c.p);
        const KappaResult clo = c.rho.kind() == StepDensity::Kind::sech
                                    ? kappa_sech_closed(c.p)
                                    : kappa_gauss_closed(c.p, c.rho.param_t());
        check_pair(ser, fou, 1e-6, 1e-6);
        check_pair(ser, clo, 1e-6, 1e-6);
        CHECK(ser.regime == clo.regime);
        CHECK(ser.truncation_n > 0);
        if (c.p > 0.5) {
            CHECK(clo.phi_p > 0.0);
            CHECK(clo.phi_p == doctest::Approx(solve_phi(c.rho, c.p)).epsilon(1e-10));
            CHECK(ser.phi_p == doctest::Approx(clo.phi_p).epsilon(1e-10));
        }
    }
    // No closed form for the smoothed-poisson family: series vs fourier only.
    const auto rho = StepDensity::poisson_smoothed(1.5, 0.5, 0.4);
    check_pair(kappa_bulk_series(rho, 0.4), kappa_bulk_fourier(rho, 0.4), 1e-6, 1e-6);
}

TEST_CASE("critical point: compensated series carries an honest error estimate") {
    const auto ser = kappa_bulk_series(StepDensity::sech(), 0.5);
    const auto clo = kappa_sech_closed(0.5);
    CHECK(ser.est_error > 0.0);
    CHECK(ser.truncation_n > 0);
    CHECK(std::abs(ser.kappa1 - clo.kappa1) < 1e-4);
    CHECK(std::abs(ser.kappa2 - clo.kappa2) <
          std::max(1e-4, 3.0 * ser.est_error));
    // The Fourier route has no truncation issue at p = 1/2.
    const auto fou = kappa_bulk_fourier(StepDensity::sech(), 0.5);
    CHECK(std::abs(fou.kappa2 - clo.kappa2) < 1e-8);
    CHECK(std::abs(fou.kappa1 - clo.kappa1) < 1e-10);

    const auto gs = kappa_bulk_series(StepDensity::gaussian(0.5), 0.5);
    const auto gc = kappa_gauss_closed(0.5, 0.5);
    CHECK(std::abs(gs.kappa1 - gc.kappa1) < 1e-4);
    CHECK(std::abs(gs.kappa2 - gc.kappa2) < std::max(1e-4, 3.0 * gs.est_error));
}

TEST_CASE("half-space series reproduces the persistence closed form") {
    const auto rho = StepDensity::persistence();
    for (double p : {0.25, 0.75}) {
        CAPTURE(p);
        check_pair(kappa_edge_series(rho, p), kappa_persistence_closed(p), 1e-8, 1e-8);
    }
    const auto crit = kappa_edge_series(rho, 0.5);
    const auto cref = kappa_persistence_closed(0.5);
    CHECK(std::abs(crit.kappa1 - cref.kappa1) < 1e-3);
    CHECK(std::abs(crit.kappa2 - cref.kappa2) < std::max(1e-3, 3.0 * crit.est_error));
}

TEST_CASE("edge and bulk constants pair across the squared gap identity") {
    // Half-space coefficients of gaussian(t/2) track the full-line ones of
    // gaussian(t): same kappa1, kappa2 shifted by log sqrt(1-p).
    const double t = 1.0;
    for (double p : {0.25, 0.5}) {
        CAPTURE(p);
        const auto edge = kappa_edge_series(StepDensity::gaussian(0.5 * t), p);
        const auto bulk = kappa_gauss_closed(p, t);
        CHECK(std::abs(edge.kappa1 - bulk.kappa1) < 2e-5);
        CHECK(edge.kappa2 - bulk.kappa2 ==
              doctest::Approx(0.5 * std::log(1.0 - p)).epsilon(5e-6));
    }
}

TEST_CASE("determinant growth law against finite-section determinants") {
    // The operator lives on [-L, inf) with the tail-autocorrelation kernel;
    // for gaussian steps that kernel is closed, so finite sections are cheap.
    const auto rho = StepDensity::gaussian(0.5);
    const auto kd = kappa_det(rho, 0.6);
    CHECK(kd.log_coeff == doctest::Approx(0.0));
    const auto K = scalar_edge(rho);
    std::vector<std::pair<double, double>> pts;
    for (double L : {16.0, 24.0, 32.0, 40.0})
        pts.emplace_back(L, fdet(K.T, -L, 8.0, 0.6, 500).log_value);
    const auto fit = fit_asymptote(pts, false);
    CHECK(fit.kappa1_hat == doctest::Approx(kd.kappa1).epsilon(1e-4));
    CHECK(std::abs(fit.kappa2_hat - kd.kappa2) < 1e-3);
    CHECK(fit.residual < 1e-5);

    // At beta = 1 the determinant gains a +log L term.
    CHECK(kappa_det(rho, 1.0).log_coeff == doctest::Approx(1.0));
    // Square identity at the level of growth rates: the half-space kappa1 at
    // survival weight p is half the determinant rate at beta_p = 4p(1-p).
    const double p = 0.3, beta_p = 4.0 * p * (1.0 - p);
    CHECK(kappa_det(rho, beta_p).kappa1 ==
          doctest::Approx(2.0 * kappa_edge_series(rho, p).kappa1).epsilon(1e-8));
}

TEST_CASE("tilt equation solutions satisfy their defining relation") {
    struct Case {
        StepDensity rho;
        double p;
    };
    for (const auto& c : {Case{StepDensity::sech(), 0.75},
                          Case{StepDensity::gaussian(0.5), 0.9},
                          Case{StepDensity::poisson_smoothed(1.0, 1.0, 0.5), 0.8}}) {
        CAPTURE(c.rho.name());
        const double phi = solve_phi(c.rho, c.p);
        CHECK(phi > 0.0);
        const double beta = 4.0 * c.p * (1.0 - c.p);
        CHECK(std::abs(beta * c.rho.exp_moment(phi) - 1.0) < 1e-10);
    }
    CHECK_THROWS_AS(solve_phi(StepDensity::sech(), 0.5), std::domain_error);
    CHECK_THROWS_AS(solve_phi(StepDensity::sech(), 0.3), std::domain_error);
    CHECK_THROWS_AS(solve_phi(StepDensity::sech(), 1.0), std::domain_error);
}

TEST_CASE("regime classification with a movable threshold") {
    CHECK(regime_of(0.3) == Regime::subcritical);
    CHECK(regime_of(0.5) == Regime::critical);
    CHECK(regime_of(0.7) == Regime::supercritical);
    CHECK(regime_of(0.7, 0.8) == Regime::subcritical);
    CHECK(regime_of(0.8, 0.8) == Regime::critical);
}

TEST_CASE("reaction survival exponents") {
    CHECK(gamma_q(1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gamma_q(2.0) == doctest::Approx(3.0 / 16.0).epsilon(1e-12));
    CHECK(gamma_q(1.5) > gamma_q(2.0));
    CHECK(gamma_q(1.5) < gamma_q(1.0));
    CHECK(gamma_q(3.0) < gamma_q(2.0));
    CHECK_THROWS_AS(gamma_q(0.9), std::domain_error);
}

TEST_CASE("domain guards on the kappa routes") {
    const auto sech = StepDensity::sech();
    const auto pers = StepDensity::persistence();
    CHECK_THROWS_AS(kappa_bulk_series(pers, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(kappa_bulk_fourier(pers, 0.3), std::invalid_argument);
    CHECK_THROWS_AS(kappa_bulk_series(sech, 0.0), std::domain_error);
    CHECK_THROWS_AS(kappa_bulk_series(sech, 1.0), std::domain_error);
    CHECK_THROWS_AS(kappa_edge_series(pers, -0.1), std::domain_error);
    CHECK_THROWS_AS(kappa_edge_series(pers, 1.0), std::domain_error);
    CHECK_THROWS_AS(kappa_sech_closed(1.0), std::domain_error);
    CHECK_THROWS_AS(kappa_sech_closed(-0.1), std::domain_error);
    CHECK_THROWS_AS(kappa_gauss_closed(0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(kappa_gauss_closed(0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(kappa_persistence_closed(0.0), std::domain_error);
    CHECK_THROWS_AS(kappa_persistence_closed(1.1), std::domain_error);
    CHECK_THROWS_AS(kappa_det(sech, 0.0), std::domain_error);
    CHECK_THROWS_AS(kappa_det(sech, 1.0001), std::domain_error);
}
