#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "fpf/convtable.hpp"
#include "fpf/kappa.hpp"
#include "fpf/special.hpp"
#include "series_detail.hpp"

namespace fpf {

double solve_phi(const StepDensity& dens, double p) {
    if (!(p > 0.5 && p < 1.0)) throw std::domain_error("solve_phi: need p in (1/2, 1)");
    const double beta = 4.0 * p * (1.0 - p);
    // m(phi) = beta * E[e^{phi X}] - 1 is convex with m(0) = beta - 1 < 0 and
    // m -> +inf at the strip edge; bracket then bisect/Newton-free.
    const double limit = dens.tilt_limit();
    double hi = std::isfinite(limit) ? limit * (1.0 - 1e-12) : 1.0;
    auto m = [&](double phi) { return beta * dens.exp_moment(phi) - 1.0; };
    if (std::isfinite(limit)) {
        // The moment may stay bounded up to the edge; check solvability.
        double probe = limit * (1.0 - 1e-9);
        if (m(probe) < 0.0) throw std::domain_error("solve_phi: no root in the moment strip");
    } else {
        while (m(hi) < 0.0) hi *= 2.0;
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (m(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-15 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

namespace {

// Least-squares fit y_i ~ sum_j c_j n_i^{e_j} on the sample set.
Eigen::VectorXd fit_powers(const std::vector<double>& ns, const std::vector<double>& ys,
                           const std::vector<double>& exps) {
    Eigen::MatrixXd X(ns.size(), exps.size());
    Eigen::VectorXd y(ns.size());
    for (std::size_t i = 0; i < ns.size(); ++i) {
        y(static_cast<Eigen::Index>(i)) = ys[i];
        for (std::size_t j = 0; j < exps.size(); ++j)
            X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::pow(ns[i], exps[j]);
    }
    return X.colPivHouseholderQr().solve(y);
}

}  // namespace

namespace detail {

const std::vector<double>& sn_table(std::size_t up_to) {
    static std::vector<double> cache{0.0, 0.0};  // indices 0,1 unused
    while (cache.size() <= up_to) {
        const std::size_t n = cache.size();
        const double nd = static_cast<double>(n);
        double s = 0.0;
        for (std::size_t k = 1; 2 * k < n; ++k)
            s += 1.0 / std::sqrt(static_cast<double>(k) * (nd - static_cast<double>(k)));
        s *= 2.0;
        if (n % 2 == 0) s += 2.0 / nd;
        cache.push_back(s);
    }
    return cache;
}

double zeta_tail(double s, std::size_t N) {
    double partial = 0.0;
    for (std::size_t n = 1; n <= N; ++n) partial += std::pow(static_cast<double>(n), -s);
    return zeta(s) - partial;
}

double li_tail(double s, double beta, std::size_t N) {
    if (beta >= 1.0) return zeta_tail(s, N);
    double partial = 0.0, bn = 1.0;
    for (std::size_t n = 1; n <= N; ++n) {
        bn *= beta;
        partial += bn * std::pow(static_cast<double>(n), -s);
    }
    return polylog(s, beta) - partial;
}

// sum_{n >= from} beta^n (S_n - pi)/n: exact up to the horizon, then the
// asymptotic law S_n - pi = 2 zeta(1/2) n^{-1/2} + c2 n^{-3/2} + c3 n^{-5/2}
// with c2, c3 refit from the exact values (the leading coefficient is pinned).
double compensated_diag_sum(std::size_t from, double beta) {
    const std::size_t N0 = kSnExactHorizon;
    const auto& sn = sn_table(N0);
    double exact = 0.0;
    double bn = std::pow(beta, static_cast<double>(from) - 1.0);
    for (std::size_t n = from; n <= N0; ++n) {
        bn *= beta;
        exact += bn * (sn[n] - M_PI) / static_cast<double>(n);
    }
    const double c1 = 2.0 * zeta(0.5);
    std::vector<double> ns, ys;
    for (std::size_t n = N0 / 2; n <= N0; n += 16) {
        ns.push_back(static_cast<double>(n));
        ys.push_back(sn[n] - M_PI - c1 / std::sqrt(static_cast<double>(n)));
    }
    const Eigen::VectorXd c = fit_powers(ns, ys, {-1.5, -2.5});
    const double tail = c1 * li_tail(1.5, beta, N0) + c(0) * li_tail(2.5, beta, N0) +
                        c(1) * li_tail(3.5, beta, N0);
    return exact + tail;
}

}  // namespace detail

namespace {

constexpr double kH = 0.02;              // series grid step
constexpr std::size_t kTableRows = 96;   // stored-row horizon for pairwise sums
constexpr std::size_t kPointN = 2000;    // spectrum point-evaluation horizon

using detail::compensated_diag_sum;
using detail::li_tail;
using detail::sn_table;
using detail::zeta_tail;

// Streaming accumulator state shared by the series assemblies.
struct StreamSums {
    double kappa1_series = 0.0;      // sum beta^n row_n(0) / (2n)
    std::vector<double> g;           // sum beta^n row_n(x)/n on x >= 0
    double tilt_sum = 0.0;           // sum (beta^n/n) int_{x<0} e^{phi x} row_n
    double signed_sq = 0.0;          // sum (beta^n/n^2) int x row_n(x)^2 dx
    std::vector<double> at0;         // row_n(0) for tail extrapolation
    std::size_t n_used = 0;
    double mass_defect = 0.0;
    bool converged = true;
};

// Width covering n-fold convolutions of rho (drift + diffusive spread).
double stream_width(const StepDensity& rho, std::size_t n_cap) {
    const double sig = std::sqrt(rho.sigma2());
    return rho.half_width(1e-12) + std::abs(rho.mean()) * static_cast<double>(n_cap) +
           7.5 * sig * std::sqrt(static_cast<double>(n_cap)) + 5.0;
}

std::size_t geometric_horizon(double beta) {
    if (beta >= 1.0) return kPointN;
    const std::size_t n = static_cast<std::size_t>(std::ceil(-34.5 / std::log(beta)));
    return std::min<std::size_t>(std::max<std::size_t>(n, 16), kPointN);
}

// Run the convolution stream, accumulating whichever sums are requested.
// phi = 0 disables the tilt accumulation; want_g controls the g build.
StreamSums run_stream(const StepDensity& rho, double beta, double phi, bool want_g,
                      bool want_signed_sq) {
    const std::size_t n_cap = geometric_horizon(beta);
    const double W = stream_width(rho, n_cap);
    ConvolutionStream st(rho, kH, W);
    StreamSums out;
    const std::size_t m0 = st.zero_index();
    if (want_g) out.g.assign(st.size() - m0, 0.0);
    out.at0.reserve(n_cap);
    double bn = 1.0;
    out.converged = false;
    for (std::size_t n = 1; n <= n_cap; ++n) {
        const auto& row = st.next();
        bn *= beta;
        const double nd = static_cast<double>(n);
        double peak = 0.0, mass = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            peak = std::max(peak, std::abs(row[j]));
            mass += row[j] * ((j == 0 || j + 1 == row.size()) ? 0.5 : 1.0);
        }
        out.mass_defect = std::max(out.mass_defect, std::abs(1.0 - mass * st.h()));
        out.at0.push_back(row[m0]);
        out.kappa1_series += bn * row[m0] / (2.0 * nd);
        if (want_g)
            for (std::size_t j = m0; j < row.size(); ++j) out.g[j - m0] += bn * row[j] / nd;
        if (phi != 0.0) {
            double s = 0.5 * row[m0];  // x = 0 endpoint gets half weight
            for (std::size_t j = 0; j < m0; ++j) s += std::exp(phi * st.x_at(j)) * row[j];
            // Euler-Maclaurin at the x = 0 end: (e^{phi x} row)'(0) ~ phi row(0)
            // for even rows; keeps the tilted sums at the same O(h^4) accuracy
            // as the rest of the grid sums.
            out.tilt_sum += bn / nd * (s * st.h() - st.h() * st.h() / 12.0 * phi * row[m0]);
        }
        if (want_signed_sq) {
            double s = 0.0;
            for (std::size_t j = 0; j < row.size(); ++j) {
                const double w = (j == 0 || j + 1 == row.size()) ? 0.5 : 1.0;
                s += w * st.x_at(j) * row[j] * row[j];
            }
            out.signed_sq += bn / (nd * nd) * s * st.h();
        }
        out.n_used = n;
        if (beta < 1.0 && bn * peak / nd < 1e-15) {
            out.converged = true;
            break;
        }
    }
    return out;
}

// Fitted geometric/half-power tail for sum beta^n row_n(0)/(2n) when the
// stream reached its horizon before the terms vanished (beta close to 1).
double kappa1_series_tail(const StreamSums& s, double beta) {
    if (s.converged || s.at0.size() < 64) return 0.0;
    const std::size_t N = s.at0.size();
    std::vector<double> ns, ys;
    for (std::size_t n = N / 2; n <= N; n += 4) {
        ns.push_back(static_cast<double>(n));
        ys.push_back(s.at0[n - 1]);
    }
    const Eigen::VectorXd c = fit_powers(ns, ys, {-0.5, -1.5});
    return 0.5 * (c(0) * li_tail(1.5, beta, N) + c(1) * li_tail(2.5, beta, N));
}

// int_0^inf x g(x)^2 dx on the accumulated half grid.
double half_square_integral(const std::vector<double>& g, double h) {
    double s = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
        const double w = (j == 0 || j + 1 == g.size()) ? 0.5 : 1.0;
        s += w * (static_cast<double>(j) * h) * g[j] * g[j];
    }
    // Euler-Maclaurin endpoint term: (x g^2)'(0) = g(0)^2.
    return s * h + h * h / 12.0 * g[0] * g[0];
}

// Critical-point kappa1: sum row_n(0)/(2n) with a fitted half-power tail.
// Values row_n(0) come from the power spectrum directly (no inverse FFT).
struct CriticalK1 {
    double value = 0.0;
    double tail = 0.0;
};
CriticalK1 critical_kappa1(const StepDensity& rho) {
    const double W = stream_width(rho, kPointN);
    ConvolutionStream st(rho, kH, W);
    std::vector<double> at0;
    at0.reserve(kPointN);
    for (std::size_t n = 1; n <= kPointN; ++n) {
        const auto& row = st.next();
        at0.push_back(row[st.zero_index()]);
    }
    double partial = 0.0;
    for (std::size_t n = 1; n <= kPointN; ++n)
        partial += at0[n - 1] / (2.0 * static_cast<double>(n));
    std::vector<double> ns, ys;
    for (std::size_t n = kPointN / 2; n <= kPointN; n += 8) {
        ns.push_back(static_cast<double>(n));
        ys.push_back(at0[n - 1]);
    }
    const Eigen::VectorXd c = fit_powers(ns, ys, {-0.5, -1.5});
    CriticalK1 out;
    out.tail = 0.5 * (c(0) * zeta_tail(1.5, kPointN) + c(1) * zeta_tail(2.5, kPointN));
    out.value = partial + out.tail;
    return out;
}

// Compensated critical sum sum_{n>=2} (A_n - 1/(2n)) with
// A_n = sum_k pair_integral(k, n-k)/(k(n-k)), density rows up to kTableRows,
// the universal diagonal part summed exactly beyond, and the residual
// extrapolated by a fitted fast power law.  Returns the sum and an error
// estimate from the fit residual.
struct CompensatedSum {
    double value = 0.0;
    double est_error = 0.0;
    double mass_defect = 0.0;
};
CompensatedSum critical_compensated(const StepDensity& dens) {
    // The remainder r_n after subtracting the universal diffusive diagonal
    // decays like n^{-3/2} (its coefficient is the density's excess kurtosis
    // footprint; identically zero for the gaussian), so the exact horizon is
    // pushed further here than in the generic streams.
    const std::size_t rows = 256;
    const double W = stream_width(dens, rows);
    ConvolutionTable tab = build_table(dens, rows, kH, W);
    std::vector<double> t_exact(rows + 1, 0.0), r(rows + 1, 0.0);
    const auto& sn = sn_table(rows);
    for (std::size_t n = 2; n <= rows; ++n) {
        double A = 0.0;
        for (std::size_t k = 1; k < n; ++k)
            A += tab.pair_integral(k, n - k) /
                 (static_cast<double>(k) * static_cast<double>(n - k));
        t_exact[n] = A - 0.5 / static_cast<double>(n);
        r[n] = t_exact[n] - (sn[n] - M_PI) / (2.0 * M_PI * static_cast<double>(n));
    }
    double sum = 0.0;
    for (std::size_t n = 2; n <= rows; ++n) sum += t_exact[n];
    // Universal tail beyond the stored rows.
    sum += compensated_diag_sum(rows + 1, 1.0) / (2.0 * M_PI);
    // Density-specific remainder tail.
    std::vector<double> ns, ys;
    for (std::size_t n = rows / 2; n <= rows; n += 4) {
        ns.push_back(static_cast<double>(n));
        ys.push_back(r[n]);
    }
    const Eigen::VectorXd c = fit_powers(ns, ys, {-1.5, -2.0});
    const double tail_r = c(0) * zeta_tail(1.5, rows) + c(1) * zeta_tail(2.0, rows);
    sum += tail_r;
    CompensatedSum out;
    out.value = sum;
    double rms = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
        const double fitv = c(0) * std::pow(ns[i], -1.5) + c(1) * std::pow(ns[i], -2.0);
        rms += (ys[i] - fitv) * (ys[i] - fitv);
    }
    rms = std::sqrt(rms / static_cast<double>(ns.size()));
    out.est_error = std::abs(tail_r) * 0.02 + rms * static_cast<double>(rows);
    out.mass_defect = tab.mass_defect;
    return out;
}

// sum_{n>=1} (1/n^2) int x (rho^{*n})^2 dx for an asymmetric density at
// beta = 1: terms decay like n^{-3/2}; exact to a horizon, then a fitted tail.
double critical_signed_sq(const StepDensity& rho) {
    if (rho.symmetric()) return 0.0;
    const std::size_t N = 384;
    const double W = stream_width(rho, N);
    ConvolutionStream st(rho, kH, W);
    std::vector<double> terms(N + 1, 0.0);
    double sum = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
        const auto& row = st.next();
        double s = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double w = (j == 0 || j + 1 == row.size()) ? 0.5 : 1.0;
            s += w * st.x_at(j) * row[j] * row[j];
        }
        terms[n] = s * st.h() / (static_cast<double>(n) * static_cast<double>(n));
        sum += terms[n];
    }
    std::vector<double> ns, ys;
    for (std::size_t n = N / 2; n <= N; n += 4) {
        ns.push_back(static_cast<double>(n));
        ys.push_back(terms[n]);
    }
    const Eigen::VectorXd c = fit_powers(ns, ys, {-1.5, -2.5});
    return sum + c(0) * zeta_tail(1.5, N) + c(1) * zeta_tail(2.5, N);
}

}  // namespace

KappaResult kappa_bulk_series(const StepDensity& rho, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("kappa_bulk_series: need p in (0,1)");
    if (!rho.symmetric())
        throw std::invalid_argument("kappa_bulk_series: density must be symmetric");
    const double beta = 4.0 * p * (1.0 - p);
    KappaResult res;
    res.regime = regime_of(p);

    if (res.regime == Regime::critical) {
        const CriticalK1 k1 = critical_kappa1(rho);
        res.kappa1 = k1.value;
        const CompensatedSum cs = critical_compensated(rho);
        res.kappa2 = std::log(2.0) - 0.25 + 0.5 * cs.value;
        res.truncation_n = kPointN;
        res.est_error = 0.5 * cs.est_error + cs.mass_defect + 1e-3 * std::abs(k1.tail);
        return res;
    }

    const bool super = res.regime == Regime::supercritical;
    const double phi = super ? solve_phi(rho, p) : 0.0;
    const StreamSums s = run_stream(rho, beta, super ? phi : 0.0, true, false);
    const double tail = kappa1_series_tail(s, beta);
    res.kappa1 = s.kappa1_series + tail + (super ? phi : 0.0);
    res.phi_p = phi;
    const double xint = half_square_integral(s.g, kH);
    if (!super) {
        res.kappa2 = std::log(std::sqrt(1.0 - 2.0 * p) / (1.0 - p)) + 0.5 * xint;
    } else {
        const double c = std::log(std::sqrt(2.0 * p - 1.0) /
                                  (8.0 * p * (1.0 - p) * (1.0 - p)));
        res.kappa2 = c + 0.5 * xint - std::log(phi * rho.exp_x_moment(phi)) - 2.0 * s.tilt_sum;
    }
    res.truncation_n = s.n_used;
    res.est_error = s.mass_defect + 0.05 * std::abs(tail) + 1e-12;
    return res;
}

KappaResult kappa_edge_series(const StepDensity& rho, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("kappa_edge_series: need p in (0,1)");
    const StepDensity tld = rho_tilde(rho);
    const double beta = 4.0 * p * (1.0 - p);
    KappaResult res;
    res.regime = regime_of(p);

    if (res.regime == Regime::critical) {
        const CriticalK1 k1 = critical_kappa1(tld);
        res.kappa1 = k1.value;
        const CompensatedSum cs = critical_compensated(tld);
        res.kappa2 = 0.5 * std::log(2.0) - 0.25 - 0.5 * critical_signed_sq(rho) + 0.5 * cs.value;
        res.truncation_n = kPointN;
        res.est_error = 0.5 * cs.est_error + cs.mass_defect + 1e-3 * std::abs(k1.tail);
        return res;
    }

    const bool super = res.regime == Regime::supercritical;
    const double phi = super ? solve_phi(tld, p) : 0.0;
    const StreamSums s = run_stream(tld, beta, super ? phi : 0.0, true, false);
    // The signed-square series runs over the base density, not rho_tilde;
    // it vanishes identically in the symmetric case.
    double jsum = 0.0;
    if (!rho.symmetric()) {
        const StreamSums sj = run_stream(rho, beta, 0.0, false, true);
        jsum = sj.signed_sq;
    }
    const double tail = kappa1_series_tail(s, beta);
    res.kappa1 = s.kappa1_series + tail + (super ? phi : 0.0);
    res.phi_p = phi;
    const double xint = half_square_integral(s.g, kH);
    if (!super) {
        res.kappa2 = 0.5 * std::log((1.0 - 2.0 * p) / (1.0 - p)) - 0.5 * jsum + 0.5 * xint;
    } else {
        const double c = std::log(std::sqrt(2.0 * p - 1.0) /
                                  (16.0 * std::pow(p, 1.5) * (1.0 - p) * (1.0 - p)));
        res.kappa2 = c - 0.5 * jsum + 0.5 * xint - std::log(phi * tld.exp_x_moment(phi)) -
                     std::log(rho.exp_moment(phi)) - 2.0 * s.tilt_sum;
    }
    res.truncation_n = s.n_used;
    res.est_error = s.mass_defect + 0.05 * std::abs(tail) + 1e-12;
    return res;
}

KappaResult kappa_det(const StepDensity& rho, double beta) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::domain_error("kappa_det: need beta in (0,1]");
    const StepDensity tld = rho_tilde(rho);
    KappaResult res;
    res.regime = beta < 1.0 ? Regime::subcritical : Regime::critical;

    if (beta == 1.0) {
        const CriticalK1 k1 = critical_kappa1(tld);
        res.kappa1 = 2.0 * k1.value;  // sum row_n(0)/n
        res.log_coeff = 1.0;
        const CompensatedSum cs = critical_compensated(tld);
        const double sigma_t = std::sqrt(tld.sigma2());
        res.kappa2 = 1.5 * std::log(2.0) - 0.5 - std::log(sigma_t) -
                     critical_signed_sq(rho) + cs.value;
        res.truncation_n = kPointN;
        res.est_error = cs.est_error + cs.mass_defect;
        return res;
    }

    const StreamSums s = run_stream(tld, beta, 0.0, true, false);
    double jsum = 0.0;
    if (!rho.symmetric()) {
        const StreamSums sj = run_stream(rho, beta, 0.0, false, true);
        jsum = sj.signed_sq;
    }
    res.kappa1 = 2.0 * (s.kappa1_series + kappa1_series_tail(s, beta));
    res.kappa2 = -jsum + half_square_integral(s.g, kH);
    res.truncation_n = s.n_used;
    res.est_error = s.mass_defect + 1e-12;
    return res;
}

}  // namespace fpf
