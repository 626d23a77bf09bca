// Finite-N operator evaluations: the determinant and Pfaffian routes against
// the brute-force series oracles and against each other, asymptote fitting,
// and the guard conditions.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fpf/density.hpp"
#include "fpf/fredholm.hpp"
#include "fpf/kernel.hpp"

using namespace fpf;

TEST_CASE("determinant evaluation matches the brute-force expansion") {
    const auto tld = rho_tilde(StepDensity::sech());
    const Kernel2 T = [&tld](double x, double y) { return tld.eval(x - y); };
    const double oracle = series_oracle_det(T, 0.5, 0.0, 0.12, 4);
    const auto ev = fdet(T, 0.0, 0.12, 0.5, 160);
    CHECK(ev.log_value == doctest::Approx(oracle).epsilon(1e-6));
    CHECK(ev.value == doctest::Approx(std::exp(ev.log_value)).epsilon(1e-13));
    CHECK(ev.N == 160);
    CHECK(ev.richardson_error < 1e-10);
}

TEST_CASE("determinant evaluation rejects operators past the spectral wall") {
    // Rank-one kernel T = 1 on [0,2] has eigenvalue 2: det(I - T) = -1 < 0.
    const Kernel2 ones = [](double, double) { return 1.0; };
    CHECK_THROWS_AS(fdet(ones, 0.0, 2.0, 1.0, 64), std::runtime_error);
}

TEST_CASE("direct Pfaffian converges to the determinant-reduction value") {
    const auto base = scalar_bulk(StepDensity::sech());
    const auto D = derived(base);
    const double p = 0.5;
    const auto tw = fpf_tw(base, p, 0.0, 1.0, 400);
    const auto d100 = fpf_direct(D, p, 0.0, 1.0, 100);
    const auto d200 = fpf_direct(D, p, 0.0, 1.0, 200);
    const double e100 = std::abs(d100.log_value - tw.log_value);
    const double e200 = std::abs(d200.log_value - tw.log_value);
    CHECK(e100 < 1e-4);
    CHECK(e200 < e100);
    CHECK(tw.richardson_error < 1e-10);
}

TEST_CASE("series oracle pins both Pfaffian routes on a short interval") {
    const auto base = scalar_bulk(StepDensity::sech());
    const auto D = derived(base);
    const double p = 0.5;
    const double oracle = series_oracle(D, p, 0.0, 0.3, 4);
    CHECK(fpf_tw(base, p, 0.0, 0.3, 200).log_value ==
          doctest::Approx(oracle).epsilon(1e-6));
    CHECK(fpf_direct(D, p, 0.0, 0.3, 200).log_value ==
          doctest::Approx(oracle).epsilon(1e-5));
    // On a long interval the truncated expansion cannot certify itself.
    CHECK_THROWS_AS(series_oracle(D, p, 0.0, 3.0, 4), std::domain_error);
    CHECK_THROWS_AS(series_oracle(D, p, 0.0, 0.3, 5), std::invalid_argument);
    CHECK_THROWS_AS(series_oracle_det(
                        [](double, double) { return 1.0; }, 0.5, 0.0, 0.1, 0),
                    std::invalid_argument);
}

TEST_CASE("half-space reduction agrees with the direct Pfaffian of the edge blocks") {
    const auto K = scalar_edge(StepDensity::persistence());
    const double p = 0.6, L = 2.0, b = 6.0;
    const auto red = fpf_edge(K, p, L, b, 240);
    const auto dir = fpf_direct(derived(K), p, -L, b, 360);
    CHECK(std::abs(red.log_value - dir.log_value) < 5e-3);
    // The automatic upper cut lands where the intensity is negligible, so it
    // reproduces a generous explicit cut.
    const auto aut = fpf_edge(K, p, L, std::nullopt, 240);
    CHECK(std::abs(aut.log_value - fpf_edge(K, p, L, 10.0, 240).log_value) < 1e-8);
}

TEST_CASE("asymptote fitting recovers planted coefficients") {
    std::vector<std::pair<double, double>> pts;
    for (double L : {5.0, 10.0, 20.0, 40.0, 80.0})
        pts.emplace_back(L, -0.4 * L + 1.3 + 0.7 * std::log(L));
    const auto f = fit_asymptote(pts, true);
    CHECK(f.kappa1_hat == doctest::Approx(0.4).epsilon(1e-10));
    CHECK(f.kappa2_hat == doctest::Approx(1.3).epsilon(1e-9));
    CHECK(f.log_coeff_hat == doctest::Approx(0.7).epsilon(1e-9));
    CHECK(f.residual < 1e-10);

    pts.clear();
    for (double L : {6.0, 9.0, 12.0}) pts.emplace_back(L, -0.25 * L + 0.9);
    const auto g = fit_asymptote(pts, false);
    CHECK(g.kappa1_hat == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(g.kappa2_hat == doctest::Approx(0.9).epsilon(1e-11));
    CHECK(g.log_coeff_hat == doctest::Approx(0.0));

    CHECK_THROWS_AS(fit_asymptote({{1.0, 0.0}, {2.0, 0.1}}, false), std::invalid_argument);
    CHECK_THROWS_AS(fit_asymptote({{1.0, 0.0}, {2.0, 0.1}, {3.0, 0.2}}, true),
                    std::invalid_argument);
}

TEST_CASE("argument guards on the operator evaluations") {
    const auto base = scalar_bulk(StepDensity::sech());
    const auto D = derived(base);
    const Kernel2 T = [](double, double) { return 0.1; };
    CHECK_THROWS_AS(fdet(T, 1.0, 1.0, 0.5, 64), std::invalid_argument);
    CHECK_THROWS_AS(fdet(T, 0.0, 1.0, 0.5, 7), std::invalid_argument);
    CHECK_THROWS_AS(fpf_direct(D, 0.5, 2.0, 1.0, 64), std::invalid_argument);
    CHECK_THROWS_AS(fpf_tw(base, 0.0, 0.0, 1.0, 64), std::domain_error);
    CHECK_THROWS_AS(fpf_tw(base, 1.5, 0.0, 1.0, 64), std::domain_error);
    CHECK_THROWS_AS(fpf_tw(base, 0.5, 0.0, 1.0, 4), std::invalid_argument);
    const auto K = scalar_edge(StepDensity::persistence());
    CHECK_THROWS_AS(fpf_edge(K, -0.2, 1.0, 4.0, 64), std::domain_error);
    CHECK_THROWS_AS(fpf_edge(K, 0.5, 1.0, -2.0, 64), std::invalid_argument);
    // p = 1 sits inside the allowed range.
    CHECK_NOTHROW(fpf_tw(base, 1.0, 0.0, 0.5, 64));
}
