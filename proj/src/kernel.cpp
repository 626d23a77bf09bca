#include "fpf/kernel.hpp"

#include <cmath>
#include <stdexcept>

#include "fpf/grid.hpp"

namespace fpf {

void ScalarKernel::require_inside(double x) const {
    if (!(x > lo && x < hi))
        throw std::domain_error(name + ": point outside kernel domain");
}

ScalarKernel scalar_bulk(const StepDensity& rho) {
    if (!rho.symmetric())
        throw std::invalid_argument("scalar_bulk: density must be symmetric");
    ScalarKernel k;
    k.name = "bulk(" + rho.name() + ")";
    k.K = [rho](double x, double y) { return 1.0 - 2.0 * rho.cdf(y - x); };
    k.d1 = [rho](double x, double y) { return 2.0 * rho.eval(y - x); };
    k.d2 = [rho](double x, double y) { return -2.0 * rho.eval(y - x); };
    k.d12 = [rho](double x, double y) { return 2.0 * rho.deriv(y - x); };
    return k;
}

namespace {

// Tail autocorrelation T(x,y) = int_0^inf rho(x+w) rho(y+w) dw, with closed
// forms where the catalogue admits them.
Kernel2 make_tail_autocorr(const StepDensity& rho) {
    switch (rho.kind()) {
        case StepDensity::Kind::gaussian: {
            const double t = rho.param_t();
            const StepDensity tld = rho_tilde(rho);
            // Product of two shifted Gaussians factorizes into difference and
            // sum coordinates; the w-integral is a Gaussian tail.
            return [t, tld](double x, double y) {
                return tld.eval(x - y) * 0.5 * std::erfc((x + y) / (2.0 * std::sqrt(2.0 * t)));
            };
        }
        case StepDensity::Kind::persistence:
            return [](double x, double y) {
                const double m = 2.0 * std::max(x, y);
                if (m > 700.0) return 0.0;
                const double E = std::exp(2.0 * x) + std::exp(2.0 * y);
                return (2.0 / M_PI) * std::exp(x + y - E) / E;
            };
        default:
            return [rho](double x, double y) {
                return integrate_halfline(
                    [&rho, x, y](double w) { return rho.eval(x + w) * rho.eval(y + w); }, 0.0,
                    1e-14);
            };
    }
}

// d/dx of the tail autocorrelation.
Kernel2 make_tail_autocorr_dx(const StepDensity& rho) {
    switch (rho.kind()) {
        case StepDensity::Kind::gaussian: {
            const double t = rho.param_t();
            const StepDensity tld = rho_tilde(rho);
            return [t, tld](double x, double y) {
                const double v = 2.0 * t;  // variance of rho
                const double u = (x + y) / (2.0 * std::sqrt(v));
                const double C = 0.5 * std::erfc(u);
                const double dC = -std::exp(-u * u) / (2.0 * std::sqrt(M_PI * v));
                return tld.deriv(x - y) * C + tld.eval(x - y) * dC;
            };
        }
        case StepDensity::Kind::persistence:
            return [T = make_tail_autocorr(rho)](double x, double y) {
                const double m = 2.0 * std::max(x, y);
                if (m > 700.0) return 0.0;
                const double e2x = std::exp(2.0 * x);
                const double E = e2x + std::exp(2.0 * y);
                return T(x, y) * (1.0 - 2.0 * e2x - 2.0 * e2x / E);
            };
        default:
            return [rho](double x, double y) {
                return integrate_halfline(
                    [&rho, x, y](double w) { return rho.deriv(x + w) * rho.eval(y + w); }, 0.0,
                    1e-14);
            };
    }
}

}  // namespace

EdgeKernel scalar_edge(const StepDensity& rho) {
    EdgeKernel k(rho);
    k.name = "edge(" + rho.name() + ")";
    k.T = make_tail_autocorr(rho);
    k.Phi = [rho](double x) { return rho.cdf(x); };
    const Kernel2 T1 = make_tail_autocorr_dx(rho);
    k.K = [rho](double x, double y) {
        return integrate_halfline(
            [&rho, x, y](double w) {
                return rho.cdf(x + w) * rho.eval(y + w) - rho.cdf(y + w) * rho.eval(x + w);
            },
            0.0, 1e-13);
    };
    const Kernel2 T = k.T;
    k.d2 = [rho, T](double x, double y) { return -2.0 * T(x, y) - rho.eval(y) * rho.cdf(x); };
    k.d1 = [rho, T](double x, double y) { return 2.0 * T(x, y) + rho.eval(x) * rho.cdf(y); };
    k.d12 = [rho, T1](double x, double y) {
        return -2.0 * T1(x, y) - rho.eval(x) * rho.eval(y);
    };
    return k;
}

ScalarKernel scalar_gps() {
    ScalarKernel k;
    k.name = "gps";
    k.lo = -1.0;
    k.hi = 1.0;
    k.K = [](double x, double y) {
        if (x == y) return 0.0;
        const double num = std::sqrt((1.0 - x * x) * (1.0 - y * y));
        const double arg = std::min(1.0, num / (1.0 - x * y));
        const double f = (2.0 / M_PI) * std::asin(arg) - 1.0;
        return y > x ? f : -f;
    };
    // The derivative entries are one smooth expression across the diagonal.
    k.d2 = [](double x, double y) {
        return -(2.0 / M_PI) * std::sqrt((1.0 - x * x) / (1.0 - y * y)) / (1.0 - x * y);
    };
    k.d1 = [](double x, double y) {
        return (2.0 / M_PI) * std::sqrt((1.0 - y * y) / (1.0 - x * x)) / (1.0 - x * y);
    };
    k.d12 = [](double x, double y) {
        const double q = (1.0 - x * x) * (1.0 - y * y);
        const double d = 1.0 - x * y;
        return -(2.0 / M_PI) * (y - x) / (std::sqrt(q) * d * d);
    };
    return k;
}

ScalarKernel scalar_exit(ExitInit kind, double lambda) {
    ScalarKernel k;
    k.lo = 0.0;
    k.hi = 1e300;
    if (kind == ExitInit::maximal) {
        k.name = "exit(maximal)";
        k.K = [](double s, double t) {
            if (s == t) return 0.0;
            const double f = (4.0 / M_PI) * std::atan(std::sqrt(std::min(s, t) / std::max(s, t))) - 1.0;
            return t > s ? f : -f;
        };
        k.d2 = [](double s, double t) {
            return -(2.0 / M_PI) * std::sqrt(s) / (std::sqrt(t) * (t + s));
        };
        k.d1 = [](double s, double t) {
            return (2.0 / M_PI) * std::sqrt(t) / (std::sqrt(s) * (t + s));
        };
        k.d12 = [](double s, double t) {
            return -(t - s) / (M_PI * std::sqrt(s * t) * (t + s) * (t + s));
        };
        return k;
    }
    if (!(lambda > 0.0)) throw std::invalid_argument("scalar_exit: need lambda > 0");
    k.name = "exit(poisson)";
    // Reflected half-line heat kernel p_t(0,y) = sqrt(2/(pi t)) e^{-y^2/2t};
    // the kernel integrates the pair correlation of the entrance cloud.
    auto pR = [](double t, double y) {
        return std::sqrt(2.0 / (M_PI * t)) * std::exp(-y * y / (2.0 * t));
    };
    k.K = [pR, lambda](double s, double t) {
        if (s == t) return 0.0;
        auto inner = [&](double y2) {
            return integrate(
                [&](double y1) {
                    const double det = pR(s, y1) * pR(t, y2) - pR(t, y1) * pR(s, y2);
                    return (std::exp(-lambda * (y2 - y1)) - 1.0) * det;
                },
                0.0, y2, 1e-11, 1e-11);
        };
        const double cut = 8.0 * std::sqrt(std::max(s, t));
        return integrate(inner, 0.0, cut, 1e-10, 1e-10);
    };
    // Partials by central differences; the closed forms are not worth the
    // algebra at the accuracy these kernels are exercised at.
    const Kernel2 K = k.K;
    k.d1 = [K](double s, double t) {
        const double h = 1e-4 * std::max(1.0, s);
        return (K(s + h, t) - K(s - h, t)) / (2.0 * h);
    };
    k.d2 = [K](double s, double t) {
        const double h = 1e-4 * std::max(1.0, t);
        return (K(s, t + h) - K(s, t - h)) / (2.0 * h);
    };
    const Kernel2 D1 = k.d1;
    k.d12 = [D1](double s, double t) {
        const double h = 1e-4 * std::max(1.0, t);
        return (D1(s, t + h) - D1(s, t - h)) / (2.0 * h);
    };
    return k;
}

ScalarKernel pushforward(const ScalarKernel& K, const PushMap& map) {
    ScalarKernel k;
    k.name = K.name + "-pushed";
    k.lo = map.lo;
    k.hi = map.hi;
    const auto inv = map.phi_inv;
    const auto al = map.dphi_inv;
    k.K = [K, inv](double x, double y) { return K.K(inv(x), inv(y)); };
    k.d1 = [K, inv, al](double x, double y) { return K.d1(inv(x), inv(y)) * al(x); };
    k.d2 = [K, inv, al](double x, double y) { return K.d2(inv(x), inv(y)) * al(y); };
    k.d12 = [K, inv, al](double x, double y) { return K.d12(inv(x), inv(y)) * al(x) * al(y); };
    return k;
}

Eigen::Matrix2d DerivedKernel::block(double x, double y, double p) const {
    const double S = x == y ? 0.0 : (y > x ? 1.0 : -1.0);
    Eigen::Matrix2d b;
    b(0, 0) = p * (S + base.K(x, y));
    b(0, 1) = -p * base.d2(x, y);
    b(1, 0) = -p * base.d1(x, y);
    b(1, 1) = p * base.d12(x, y);
    return b;
}

DerivedKernel derived(const ScalarKernel& K) {
    DerivedKernel d;
    d.base = K;
    return d;
}

double intensity(const DerivedKernel& K, double p, const std::vector<double>& points) {
    if (!(p > 0.0 && p <= 1.0)) throw std::domain_error("intensity: need p in (0,1]");
    if (points.empty()) return 1.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        K.base.require_inside(points[i]);
        for (std::size_t j = i + 1; j < points.size(); ++j)
            if (points[i] == points[j])
                throw std::invalid_argument("intensity: points must be pairwise distinct");
    }
    const std::size_t n = points.size();
    Eigen::MatrixXd m(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            m.block<2, 2>(2 * static_cast<Eigen::Index>(i), 2 * static_cast<Eigen::Index>(j)) =
                K.block(points[i], points[j], p);
    return pfaffian(AntisymMatrix(std::move(m), 1e-7));
}

}  // namespace fpf
