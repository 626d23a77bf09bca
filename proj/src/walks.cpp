#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "fpf/convtable.hpp"
#include "fpf/grid.hpp"
#include "fpf/kappa.hpp"
#include "fpf/rng.hpp"
#include "fpf/walks.hpp"

namespace fpf {

namespace {

HitStats finish(double sum, double sum_sq, std::uint64_t n, double reference,
                std::uint64_t censored) {
    HitStats s;
    s.n_paths = n;
    s.n_censored = censored;
    s.reference = reference;
    const double nd = static_cast<double>(n);
    s.estimate = sum / nd;
    const double var = std::max(0.0, sum_sq / nd - s.estimate * s.estimate);
    s.se = std::sqrt(var / nd);
    s.z = s.se > 0.0 ? (s.estimate - reference) / s.se : 0.0;
    return s;
}

// P[tau_{L+} < tau_0-] for one barrier height, Bernoulli counting.
struct BarrierHit {
    double p_hat;
    double var;  // per-path variance
    std::uint64_t censored;
};
BarrierHit barrier_probability(const StepDensity& rho, double L, std::uint64_t n_paths,
                               std::size_t horizon, Rng& rng) {
    std::uint64_t wins = 0, censored = 0;
    for (std::uint64_t i = 0; i < n_paths; ++i) {
        double s = 0.0;
        bool decided = false;
        for (std::size_t step = 0; step < horizon; ++step) {
            s += rho.sample(rng);
            if (s < 0.0) {
                decided = true;
                break;
            }
            if (s > L) {
                ++wins;
                decided = true;
                break;
            }
        }
        if (!decided) ++censored;
    }
    BarrierHit out;
    out.p_hat = static_cast<double>(wins) / static_cast<double>(n_paths);
    out.var = out.p_hat * (1.0 - out.p_hat);
    out.censored = censored;
    return out;
}

}  // namespace

HitStats check_sparre_andersen(const WalkConfig& cfg) {
    if (!(cfg.beta > 0.0 && cfg.beta < 1.0))
        throw std::domain_error("check_sparre_andersen: need beta in (0,1)");
    Rng rng(cfg.seed, 11);
    double sum = 0.0, sum_sq = 0.0;
    std::uint64_t censored = 0;
    const double log_beta = std::log(cfg.beta);
    for (std::uint64_t i = 0; i < cfg.n_paths; ++i) {
        double s = 0.0, w = 0.0;
        bool hit = false;
        for (std::size_t n = 1; n <= cfg.horizon; ++n) {
            s += cfg.rho.sample(rng);
            if (s > 0.0) {
                w = std::exp(log_beta * static_cast<double>(n));
                hit = true;
                break;
            }
        }
        if (!hit) ++censored;  // beta^tau below any representable weight
        sum += w;
        sum_sq += w * w;
    }
    return finish(sum, sum_sq, cfg.n_paths, 1.0 - std::sqrt(1.0 - cfg.beta), censored);
}

HitStats check_spitzer(const WalkConfig& cfg) {
    Rng rng(cfg.seed, 12);
    double sum = 0.0, sum_sq = 0.0;
    std::uint64_t censored = 0;
    for (std::uint64_t i = 0; i < cfg.n_paths; ++i) {
        double s = 0.0, v = 0.0;
        bool hit = false;
        for (std::size_t n = 1; n <= cfg.horizon; ++n) {
            s += cfg.rho.sample(rng);
            if (s > 0.0) {
                v = s;
                hit = true;
                break;
            }
        }
        if (!hit) ++censored;  // overshoot counted as 0; bias O(P[tau > horizon])
        sum += v;
        sum_sq += v * v;
    }
    return finish(sum, sum_sq, cfg.n_paths, std::sqrt(cfg.rho.sigma2() / 2.0), censored);
}

HitStats check_gambler(const WalkConfig& cfg) {
    // L P[tau_{L+} < tau_0-] approaches sigma/sqrt2 with an O(1/L) boundary
    // correction; two heights and Richardson extrapolation cancel it, leaving
    // O(1/L^2) bias below the Monte Carlo resolution.
    Rng rng(cfg.seed, 13);
    const double L1 = cfg.L, L2 = 2.0 * cfg.L;
    const std::uint64_t half = cfg.n_paths / 2;
    const BarrierHit h1 = barrier_probability(cfg.rho, L1, half, cfg.horizon, rng);
    const BarrierHit h2 = barrier_probability(cfg.rho, L2, half, cfg.horizon, rng);
    HitStats s;
    s.n_paths = cfg.n_paths;
    s.n_censored = h1.censored + h2.censored;
    s.reference = std::sqrt(cfg.rho.sigma2() / 2.0);
    s.estimate = 2.0 * L2 * h2.p_hat - L1 * h1.p_hat;
    const double nd = static_cast<double>(half);
    s.se = std::sqrt((4.0 * L2 * L2 * h2.var + L1 * L1 * h1.var) / nd);
    s.z = s.se > 0.0 ? (s.estimate - s.reference) / s.se : 0.0;
    return s;
}

HitStats check_tilted_limit(const WalkConfig& cfg) {
    if (!(cfg.p > 0.5 && cfg.p < 1.0))
        throw std::domain_error("check_tilted_limit: need p in (1/2,1)");
    const double p = cfg.p;
    const double beta = 4.0 * p * (1.0 - p);
    const double phi = solve_phi(cfg.rho, p);

    // Tabulated tilted step law beta e^{phi x} rho(x).
    const double wl = cfg.rho.half_width(1e-13);
    double wr = wl;
    while (beta * std::exp(phi * wr) * cfg.rho.eval(wr) > 1e-15 && wr < 1e4) wr += 1.0;
    const double h = 0.005;
    const std::size_t m = static_cast<std::size_t>(std::ceil((wl + wr) / h)) + 1;
    UniformGridFn tab;
    tab.x0 = -wl;
    tab.h = h;
    tab.values.resize(m);
    for (std::size_t i = 0; i < m; ++i)
        tab.values[i] = beta * std::exp(phi * tab.x_at(i)) * cfg.rho.eval(tab.x_at(i));
    const StepDensity tilted = StepDensity::tabulated(tab);

    // Reference constant: sqrt(1-beta) / (phi E_tilt[S_1]) * P_tilt[no descent]^2,
    // the no-descent probability from the convolution-table ladder sum.
    const double drift = beta * cfg.rho.exp_x_moment(phi);
    const std::size_t n_rows = 96;
    const double W = cfg.rho.half_width(1e-12) +
                     7.5 * std::sqrt(cfg.rho.sigma2() * static_cast<double>(n_rows)) + 5.0;
    const ConvolutionTable table = build_table(cfg.rho, n_rows, 0.02, W);
    double ladder = 0.0, bn = 1.0;
    for (std::size_t n = 1; n <= n_rows; ++n) {
        bn *= beta;
        const auto& row = table.row(n).values;
        const std::size_t m0 = row.size() / 2;
        double s = 0.5 * row[m0];
        for (std::size_t j = 0; j < m0; ++j) {
            const double x = (static_cast<double>(j) - static_cast<double>(m0)) * table.h;
            s += std::exp(phi * x) * row[j];
        }
        ladder += bn / static_cast<double>(n) * s * table.h;
        if (bn / static_cast<double>(n) < 1e-16) break;
    }
    const double no_descent = std::exp(-ladder);
    const double reference =
        std::sqrt(1.0 - beta) / (phi * drift) * no_descent * no_descent;

    Rng rng(cfg.seed, 14);
    double sum = 0.0, sum_sq = 0.0;
    std::uint64_t censored = 0;
    for (std::uint64_t i = 0; i < cfg.n_paths; ++i) {
        double s = 0.0, w = 0.0;
        bool decided = false;
        for (std::size_t step = 0; step < cfg.horizon; ++step) {
            s += tilted.sample(rng);
            if (s < 0.0) {
                decided = true;  // descent first: weight 0
                break;
            }
            if (s > cfg.L) {
                w = std::exp(-phi * (s - cfg.L));
                decided = true;
                break;
            }
        }
        if (!decided) ++censored;
        sum += w;
        sum_sq += w * w;
    }
    return finish(sum, sum_sq, cfg.n_paths, reference, censored);
}

namespace {

// Density that a k-step walk from 0 sits at exactly m with every intermediate
// position in (lo, m]: sequential barrier-constrained convolutions on a
// Gauss-Legendre grid (one dimension integrated out per step).
double chain_density(const StepDensity& rho_fwd, std::size_t k, double m, double lo,
                     std::size_t pts, double depth) {
    if (k == 1) return rho_fwd.eval(m);
    const double lower = std::max(lo, m - depth);
    if (!(m > lower)) return 0.0;
    const QuadratureGrid g = make_grid(lower, m, pts, QuadRule::gauss_legendre);
    std::vector<double> F(pts), Fn(pts);
    for (std::size_t i = 0; i < pts; ++i) F[i] = rho_fwd.eval(g.nodes[i]);
    for (std::size_t step = 2; step < k; ++step) {
        for (std::size_t i = 0; i < pts; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < pts; ++j)
                s += g.weights[j] * F[j] * rho_fwd.eval(g.nodes[i] - g.nodes[j]);
            Fn[i] = s;
        }
        F.swap(Fn);
    }
    double out = 0.0;
    for (std::size_t j = 0; j < pts; ++j)
        out += g.weights[j] * F[j] * rho_fwd.eval(m - g.nodes[j]);
    return out;
}

// E[max of the bridge * delta_0(end)] for an n-step bridge: decompose by the
// argmax position j; given max value m the two segments are independent
// chains constrained below m (the right segment time-reversed).
double bridge_max_mean(const StepDensity& rho, std::size_t n, double lo, std::size_t pts,
                       double depth, double m_cut) {
    const QuadratureGrid gm = make_grid(0.0, m_cut, 48, QuadRule::gauss_legendre);
    double total = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
        for (std::size_t q = 0; q < gm.size(); ++q) {
            const double m = gm.nodes[q];
            const double left = chain_density(rho, j, m, lo, pts, depth);
            const double right = chain_density(rho, n - j, m, lo, pts, depth);
            total += gm.weights[q] * m * left * right;
        }
    }
    return total;
}

// Like chain_density, but the first increment is drawn from `first` and the
// remaining k-1 increments from `rest`.
double chain_density_mixed(const StepDensity& first, const StepDensity& rest, std::size_t k,
                           double m, std::size_t pts, double depth) {
    if (k == 1) return first.eval(m);
    const double lower = m - depth;
    const QuadratureGrid g = make_grid(lower, m, pts, QuadRule::gauss_legendre);
    std::vector<double> F(pts), Fn(pts);
    for (std::size_t i = 0; i < pts; ++i) F[i] = first.eval(g.nodes[i]);
    for (std::size_t step = 2; step < k; ++step) {
        for (std::size_t i = 0; i < pts; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < pts; ++j)
                s += g.weights[j] * F[j] * rest.eval(g.nodes[i] - g.nodes[j]);
            Fn[i] = s;
        }
        F.swap(Fn);
    }
    double out = 0.0;
    for (std::size_t j = 0; j < pts; ++j)
        out += g.weights[j] * F[j] * rest.eval(m - g.nodes[j]);
    return out;
}

// E[max{V_1..V_n} * delta_0(V_{n+1})] for the staggered bridge
//   V_0 = 0, V_1 = V_0 + outer, V_{k+1} = V_k + inner (k = 1..n-1),
//   V_{n+1} = V_n + outer = 0.
// Both endpoints sit outside the max, so the argmax runs over j = 1..n and the
// max value can be negative; the m-grid covers both signs. Requires symmetric
// step densities (the reversed right segment reuses the forward ones).
double staggered_bridge_max_mean(const StepDensity& outer, const StepDensity& inner,
                                 std::size_t n, std::size_t pts, double depth, double m_neg,
                                 double m_cut) {
    double total = 0.0;
    for (const QuadratureGrid& gm : {make_grid(-m_neg, 0.0, 48, QuadRule::gauss_legendre),
                                     make_grid(0.0, m_cut, 48, QuadRule::gauss_legendre)}) {
        for (std::size_t q = 0; q < gm.size(); ++q) {
            const double m = gm.nodes[q];
            double sum_j = 0.0;
            for (std::size_t j = 1; j <= n; ++j) {
                const double left = chain_density_mixed(outer, inner, j, m, pts, depth);
                const double right =
                    chain_density_mixed(outer, inner, n + 1 - j, m, pts, depth);
                sum_j += left * right;
            }
            total += gm.weights[q] * m * sum_j;
        }
    }
    return total;
}

}  // namespace

SmallNRecord small_n_oracle(const StepDensity& rho, std::size_t n) {
    TwoStepWalkConfig cfg;
    cfg.rho = rho;
    cfg.n = n;
    return small_n_oracle(cfg);
}

SmallNRecord small_n_oracle(const TwoStepWalkConfig& cfg) {
    const StepDensity& rho = cfg.rho;
    const std::size_t n = cfg.n;
    if (n < 2 || n > 4) throw std::invalid_argument("small_n_oracle: n in 2..4");
    if (!rho.symmetric())
        throw std::invalid_argument("small_n_oracle: density must be symmetric");
    const double sig = std::sqrt(rho.sigma2());
    const double depth =
        rho.half_width(1e-11) + 2.0 * sig * std::sqrt(static_cast<double>(2 * n));
    const double m_cut =
        rho.half_width(1e-11) + 3.0 * sig * std::sqrt(static_cast<double>(n));
    const std::size_t pts = cfg.gl_points;
    const double nd = static_cast<double>(n);

    const double W = rho.half_width(1e-12) +
                     cfg.cut_sigmas * sig * std::sqrt(static_cast<double>(2 * n)) + 5.0;
    const ConvolutionTable tab = build_table(rho, 2 * n, 0.02, W);
    const StepDensity tld = rho_tilde(rho);
    const ConvolutionTable tab2 = build_table(tld, n, 0.02, W);

    SmallNRecord rec;
    rec.n = n;

    // First ascent exactly at n: all intermediate positions negative.
    rec.first_ascent_lhs = chain_density(rho, n, 0.0, -std::numeric_limits<double>::infinity(),
                                         pts, depth);
    rec.first_ascent_rhs = tab.at_zero(n) / nd;

    auto kac_rhs_of = [](const ConvolutionTable& t, std::size_t nn) {
        double s = 0.0;
        for (std::size_t k = 1; k < nn; ++k)
            s += t.pair_integral(k, nn - k) /
                 (static_cast<double>(k) * static_cast<double>(nn - k));
        return 0.5 * static_cast<double>(nn) * s;
    };
    rec.kac_lhs =
        bridge_max_mean(rho, n, -std::numeric_limits<double>::infinity(), pts, depth, m_cut);
    rec.kac_rhs = kac_rhs_of(tab, n);

    rec.positive_excursion_lhs = bridge_max_mean(rho, n, 0.0, pts, depth, m_cut);
    rec.positive_excursion_rhs = 2.0 / nd * rec.kac_rhs;

    if (n <= 3) {
        // Staggered max: the 2n-step bridge alternates X and Y increments and
        // the max runs over the positions reached after each X step, i.e. a
        // bridge whose first and last increments follow rho and whose n-1
        // interior increments follow the autocorrelation density.
        const double m_neg = rho.half_width(1e-11) + sig * std::sqrt(2.0 * nd);
        const double m_cut2 = rho.half_width(1e-11) + 3.0 * sig * std::sqrt(2.0 * nd);
        rec.two_step_lhs = staggered_bridge_max_mean(rho, tld, n, pts, depth, m_neg, m_cut2);
        rec.two_step_rhs = tab.signed_square_integral(n) / nd + kac_rhs_of(tab2, n);
    } else {
        rec.two_step_lhs = std::numeric_limits<double>::quiet_NaN();
        rec.two_step_rhs = std::numeric_limits<double>::quiet_NaN();
    }
    return rec;
}

}  // namespace fpf
