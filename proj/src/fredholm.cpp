#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

#include "fpf/fredholm.hpp"
#include "fpf/pfaffian.hpp"

namespace fpf {

namespace {

// log det of a general square matrix via LU; throws if det <= 0.
double logdet_positive(const Eigen::MatrixXd& M, const char* who) {
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    double log_abs = 0.0;
    double sign = lu.permutationP().determinant() > 0 ? 1.0 : -1.0;
    const auto& U = lu.matrixLU();
    for (Eigen::Index i = 0; i < U.rows(); ++i) {
        const double d = U(i, i);
        if (d == 0.0) throw std::runtime_error(std::string(who) + ": singular discretization");
        if (d < 0.0) sign = -sign;
        log_abs += std::log(std::abs(d));
    }
    if (sign <= 0.0)
        throw std::runtime_error(std::string(who) + ": determinant is not positive");
    return log_abs;
}

double fdet_once(const Kernel2& T, double a, double b, double beta, std::size_t N) {
    const QuadratureGrid g = make_grid(a, b, N, QuadRule::gauss_legendre);
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(N),
                                                  static_cast<Eigen::Index>(N));
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -=
                beta * std::sqrt(g.weights[i] * g.weights[j]) * T(g.nodes[i], g.nodes[j]);
    return logdet_positive(M, "fdet");
}

double fpf_direct_once(const DerivedKernel& K, double p, double a, double b, std::size_t N) {
    const QuadratureGrid g = make_grid(a, b, N, QuadRule::gauss_legendre);
    const Eigen::Index n2 = 2 * static_cast<Eigen::Index>(N);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n2, n2);
    for (std::size_t i = 0; i < N; ++i) {
        M(2 * static_cast<Eigen::Index>(i), 2 * static_cast<Eigen::Index>(i) + 1) = 1.0;
        M(2 * static_cast<Eigen::Index>(i) + 1, 2 * static_cast<Eigen::Index>(i)) = -1.0;
        for (std::size_t j = 0; j < N; ++j) {
            const double sw = std::sqrt(g.weights[i] * g.weights[j]);
            const Eigen::Matrix2d B = K.block(g.nodes[i], g.nodes[j], p);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c)
                    M(2 * static_cast<Eigen::Index>(i) + r,
                      2 * static_cast<Eigen::Index>(j) + c) -= sw * B(r, c);
        }
    }
    const AntisymMatrix A(M, 1e-8);
    const LogPfaffian lp = pfaffian_log(A);
    if (!(lp.sign > 0.0))
        throw std::runtime_error("fpf_direct: Pfaffian is not positive");
    return lp.log_abs;
}

struct ResolventSolve {
    // Grid solution of (I - beta T) h = e and the Nystrom extension of h.
    Eigen::VectorXd h;
    double beta;
    const Kernel2* T;
    const QuadratureGrid* g;
    std::function<double(double)> e;
    double at(double t) const {
        double s = e(t);
        for (std::size_t j = 0; j < g->size(); ++j)
            s += beta * g->weights[j] * (*T)(t, g->nodes[j]) * h(static_cast<Eigen::Index>(j));
        return s;
    }
};

ResolventSolve solve_resolvent(const Eigen::PartialPivLU<Eigen::MatrixXd>& lu,
                               const QuadratureGrid& g, const Kernel2& T, double beta,
                               std::function<double(double)> e) {
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(g.size()));
    for (std::size_t i = 0; i < g.size(); ++i)
        rhs(static_cast<Eigen::Index>(i)) = e(g.nodes[i]);
    ResolventSolve out;
    out.h = lu.solve(rhs);
    out.beta = beta;
    out.T = &T;
    out.g = &g;
    out.e = std::move(e);
    return out;
}

double fpf_tw_once(const ScalarKernel& K, double p, double a, double b, std::size_t N) {
    const double c = 2.0 * p * (1.0 - p);
    const QuadratureGrid g = make_grid(a, b, N, QuadRule::gauss_legendre);
    const Eigen::Index n = static_cast<Eigen::Index>(N);

    // Symmetrized copy for the determinant factor.
    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
                c * std::sqrt(g.weights[i] * g.weights[j]) * K.d2(g.nodes[i], g.nodes[j]);
    const double log_det = logdet_positive(S, "fpf_tw");

    // Collocation copy (plain weights) for the resolvent point values.
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) +=
                c * g.weights[j] * K.d2(g.nodes[i], g.nodes[j]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);

    // h = R K(., t) for t = a, b; the extension rule mirrors h = e - c d2K h.
    auto extend = [&](const Eigen::VectorXd& h, const std::function<double(double)>& e,
                      double t) {
        double s = e(t);
        for (std::size_t j = 0; j < N; ++j)
            s -= c * g.weights[j] * K.d2(t, g.nodes[j]) * h(static_cast<Eigen::Index>(j));
        return s;
    };
    auto solve_for = [&](double endpoint) {
        Eigen::VectorXd rhs(n);
        for (std::size_t i = 0; i < N; ++i)
            rhs(static_cast<Eigen::Index>(i)) = K.K(g.nodes[i], endpoint);
        return Eigen::VectorXd(lu.solve(rhs));
    };
    const Eigen::VectorXd ha = solve_for(a);
    const Eigen::VectorXd hb = solve_for(b);
    auto ea = [&](double x) { return K.K(x, a); };
    auto eb = [&](double x) { return K.K(x, b); };
    const double ha_a = extend(ha, ea, a), ha_b = extend(ha, ea, b);
    const double hb_a = extend(hb, eb, a), hb_b = extend(hb, eb, b);

    const double k1_a = (p - p * p) * ha_a + p * p * hb_a;
    const double k1_b = (p - p * p) * ha_b + p * p * hb_b;
    const double k2_a = (p * p - p) * hb_a - p * p * ha_a;
    const double k2_b = (p * p - p) * hb_b - p * p * ha_b;
    const double det2 = (1.0 + k1_a) * (1.0 + k2_b) - k1_b * k2_a;
    if (!(det2 > 0.0)) throw std::runtime_error("fpf_tw: boundary determinant not positive");
    return 0.5 * (log_det + std::log(det2));
}

double fpf_edge_once(const EdgeKernel& K, double p, double L, double b_cut, std::size_t N) {
    const double beta = 4.0 * p * (1.0 - p);
    const double a = -L, b = b_cut;
    const QuadratureGrid g = make_grid(a, b, N, QuadRule::gauss_legendre);
    const Eigen::Index n = static_cast<Eigen::Index>(N);

    Eigen::MatrixXd S = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -=
                beta * std::sqrt(g.weights[i] * g.weights[j]) * K.T(g.nodes[i], g.nodes[j]);
    const double log_det = logdet_positive(S, "fpf_edge");

    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j)
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -=
                beta * g.weights[j] * K.T(g.nodes[i], g.nodes[j]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);

    const auto& rho = K.rho;
    auto cdf_at = [&](double z) { return rho.cdf(z); };
    // T applied to indicator windows, as single rho-weighted tail integrals.
    auto t_right = [&](double x) {  // T 1_{[b, inf)}
        return integrate_halfline(
            [&](double w) { return rho.eval(x + w) * (1.0 - cdf_at(b + w)); }, 0.0, 1e-12);
    };
    auto t_left = [&](double x) {  // T 1_{(-inf, a]}
        return integrate_halfline([&](double w) { return rho.eval(x + w) * cdf_at(a + w); },
                                  0.0, 1e-12);
    };
    auto t_mid = [&](double x) {  // T 1_{(a, b)}
        return integrate_halfline(
            [&](double w) { return rho.eval(x + w) * (cdf_at(b + w) - cdf_at(a + w)); }, 0.0,
            1e-12);
    };
    const double phi_a = K.Phi(a), phi_b = K.Phi(b);

    auto e1 = [&](double x) { return -0.5 * K.Phi(x); };
    auto e2 = [&](double x) {
        return p * t_right(x) - p * t_left(x) +
               0.5 * p * (2.0 - phi_b - phi_a) * K.Phi(x);
    };
    auto e3 = [&](double x) {
        return -p * (2.0 * p - 1.0) * t_mid(x) -
               0.5 * p * (2.0 * p - 1.0) * (phi_b - phi_a) * K.Phi(x);
    };

    const ResolventSolve h1 = solve_resolvent(lu, g, K.T, beta, e1);
    const ResolventSolve h2 = solve_resolvent(lu, g, K.T, beta, e2);
    const ResolventSolve h3 = solve_resolvent(lu, g, K.T, beta, e3);

    auto pair_f1 = [&](const ResolventSolve& h) {  // (h, beta rho)
        double s = 0.0;
        for (std::size_t j = 0; j < N; ++j)
            s += g.weights[j] * rho.eval(g.nodes[j]) * h.h(static_cast<Eigen::Index>(j));
        return beta * s;
    };
    Eigen::Matrix3d D = Eigen::Matrix3d::Identity();
    const ResolventSolve* hs[3] = {&h1, &h2, &h3};
    for (int i = 0; i < 3; ++i) {
        const double at_a = hs[i]->at(a), at_b = hs[i]->at(b);
        D(i, 0) += pair_f1(*hs[i]);
        D(i, 1) += at_a - at_b;
        D(i, 2) += at_a + at_b;
    }
    const double det3 = D.determinant();
    if (!(det3 > 0.0)) throw std::runtime_error("fpf_edge: boundary determinant not positive");
    return 0.5 * (log_det + std::log(det3));
}

}  // namespace

EvalResult fdet(const Kernel2& T, double a, double b, double beta, std::size_t N) {
    if (!(b > a)) throw std::invalid_argument("fdet: need b > a");
    if (N < 8) throw std::invalid_argument("fdet: need N >= 8");
    EvalResult res;
    res.N = N;
    res.log_value = fdet_once(T, a, b, beta, N);
    res.value = std::exp(res.log_value);
    res.richardson_error = std::abs(res.log_value - fdet_once(T, a, b, beta, N / 2));
    return res;
}

EvalResult fpf_direct(const DerivedKernel& K, double p, double a, double b, std::size_t N) {
    if (!(b > a)) throw std::invalid_argument("fpf_direct: need b > a");
    if (N < 8) throw std::invalid_argument("fpf_direct: need N >= 8");
    EvalResult res;
    res.N = N;
    res.log_value = fpf_direct_once(K, p, a, b, N);
    res.value = std::exp(res.log_value);
    res.richardson_error = std::abs(res.log_value - fpf_direct_once(K, p, a, b, N / 2));
    return res;
}

EvalResult fpf_tw(const ScalarKernel& K, double p, double a, double b, std::size_t N) {
    if (!(b > a)) throw std::invalid_argument("fpf_tw: need b > a");
    if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("fpf_tw: need p in (0,1]");
    if (N < 8) throw std::invalid_argument("fpf_tw: need N >= 8");
    K.require_inside(a);
    K.require_inside(b);
    EvalResult res;
    res.N = N;
    res.log_value = fpf_tw_once(K, p, a, b, N);
    res.value = std::exp(res.log_value);
    res.richardson_error = std::abs(res.log_value - fpf_tw_once(K, p, a, b, N / 2));
    return res;
}

EvalResult fpf_edge(const EdgeKernel& K, double p, double L, std::optional<double> b_cut,
                    std::size_t N) {
    if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("fpf_edge: need p in (0,1]");
    if (N < 8) throw std::invalid_argument("fpf_edge: need N >= 8");
    double b = 0.0;
    if (b_cut) {
        b = *b_cut;
    } else {
        // Place the cut where the one-point intensity is negligible.
        for (b = 1.0; b < 20.0; b += 0.5) {
            const double inten =
                p * (2.0 * K.T(b, b) + K.rho.eval(b) * K.Phi(b));
            if (std::abs(inten) < 1e-10) break;
        }
    }
    if (!(b > -L)) throw std::invalid_argument("fpf_edge: cut below the window");
    EvalResult res;
    res.N = N;
    res.log_value = fpf_edge_once(K, p, L, b, N);
    res.value = std::exp(res.log_value);
    res.richardson_error = std::abs(res.log_value - fpf_edge_once(K, p, L, b, N / 2));
    return res;
}

double series_oracle(const DerivedKernel& K, double p, double a, double b,
                     std::size_t n_max) {
    if (n_max < 1 || n_max > 4) throw std::invalid_argument("series_oracle: n_max in 1..4");
    const std::size_t m = 24;  // quadrature points per dimension
    const QuadratureGrid g = make_grid(a, b, m, QuadRule::gauss_legendre);
    double sum = 1.0, last = 1.0;
    double factorial = 1.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        factorial *= static_cast<double>(n);
        // Iterate over the n-fold tensor grid.
        std::vector<std::size_t> idx(n, 0);
        double term = 0.0;
        while (true) {
            double w = 1.0;
            for (std::size_t d = 0; d < n; ++d) w *= g.weights[idx[d]];
            Eigen::MatrixXd M(2 * static_cast<Eigen::Index>(n),
                              2 * static_cast<Eigen::Index>(n));
            M.setZero();
            for (std::size_t r = 0; r < n; ++r)
                for (std::size_t c = 0; c < n; ++c) {
                    const Eigen::Matrix2d B =
                        K.block(g.nodes[idx[r]], g.nodes[idx[c]], p);
                    M.block(2 * static_cast<Eigen::Index>(r),
                            2 * static_cast<Eigen::Index>(c), 2, 2) = B;
                }
            M = 0.5 * (M - M.transpose().eval());
            term += w * pfaffian(AntisymMatrix(M, 1e-6));
            std::size_t d = 0;
            while (d < n && ++idx[d] == m) {
                idx[d] = 0;
                ++d;
            }
            if (d == n) break;
        }
        last = ((n % 2 == 0) ? 1.0 : -1.0) * term / factorial;
        sum += last;
    }
    if (std::abs(last) >= 1e-8)
        throw std::domain_error("series_oracle: expansion not converged on this interval");
    if (!(sum > 0.0)) throw std::runtime_error("series_oracle: non-positive value");
    return std::log(sum);
}

double series_oracle_det(const Kernel2& T, double beta, double a, double b,
                         std::size_t n_max) {
    if (n_max < 1 || n_max > 4) throw std::invalid_argument("series_oracle_det: n_max in 1..4");
    const std::size_t m = 48;
    const QuadratureGrid g = make_grid(a, b, m, QuadRule::gauss_legendre);
    Eigen::MatrixXd A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::sqrt(g.weights[i] * g.weights[j]) * T(g.nodes[i], g.nodes[j]);
    Eigen::MatrixXd P = A;
    double sum = 0.0, last = 0.0, bn = 1.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        bn *= beta;
        last = -bn * P.trace() / static_cast<double>(n);
        sum += last;
        P = (P * A).eval();
    }
    if (std::abs(last) >= 1e-8)
        throw std::domain_error("series_oracle_det: expansion not converged on this interval");
    return sum;
}

FitResult fit_asymptote(const std::vector<std::pair<double, double>>& L_logv,
                        bool with_log_term) {
    if (L_logv.size() < (with_log_term ? 4u : 3u))
        throw std::invalid_argument("fit_asymptote: not enough points");
    const Eigen::Index n = static_cast<Eigen::Index>(L_logv.size());
    const Eigen::Index k = with_log_term ? 3 : 2;
    Eigen::MatrixXd X(n, k);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& [L, lv] = L_logv[static_cast<std::size_t>(i)];
        X(i, 0) = -L;
        X(i, 1) = 1.0;
        if (with_log_term) X(i, 2) = std::log(L);
        y(i) = lv;
    }
    const Eigen::VectorXd c = X.colPivHouseholderQr().solve(y);
    FitResult out;
    out.kappa1_hat = c(0);
    out.kappa2_hat = c(1);
    out.log_coeff_hat = with_log_term ? c(2) : 0.0;
    const Eigen::VectorXd r = y - X * c;
    out.residual = std::sqrt(r.squaredNorm() / static_cast<double>(n));
    return out;
}

}  // namespace fpf
