#include "fpf/density.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fpf/special.hpp"

namespace fpf {

namespace {

// Scaled complement erfcx(z) = e^{z^2} erfc(z), stable for large z where the
// plain product overflows.
double erfcx(double z) {
    if (z < 0.0) return 2.0 * std::exp(z * z) - erfcx(-z);
    if (z < 5.0) return std::exp(z * z) * std::erfc(z);
    // Asymptotic series 1/(z sqrt(pi)) * sum (-1)^k (2k-1)!! / (2 z^2)^k.
    double sum = 1.0, term = 1.0;
    const double iz2 = 1.0 / (2.0 * z * z);
    for (int k = 1; k <= 10; ++k) {
        term *= -(2.0 * k - 1.0) * iz2;
        sum += term;
    }
    return sum / (z * std::sqrt(M_PI));
}

// e^{-x^2/(4t)} erfcx((2 mu t - x)/(2 sqrt t)): one flank of the
// exponential-smoothed Gaussian.  For x past the crossover the direct product
// is inf * 0; the erfcx reflection gives the exact exponential tail
// 2 e^{mu(mu t - x)} plus a representable remainder.
double smoothed_tail(double mu, double t, double x) {
    const double s = 2.0 * std::sqrt(t);
    const double z = (2.0 * mu * t - x) / s;
    const double gauss = std::exp(-x * x / (4.0 * t));
    if (z > -25.0) return gauss * erfcx(z);
    return 2.0 * std::exp(mu * (mu * t - x)) - gauss * erfcx(-z);
}

double sech_stable(double x) {
    const double a = std::abs(x);
    const double e = std::exp(-a);
    return 2.0 * e / (1.0 + e * e);
}

// z / sinh(z), even, value 1 at z = 0.
double z_over_sinh(double z) {
    const double a = std::abs(z);
    if (a < 1e-8) return 1.0 - a * a / 6.0;
    const double e = std::exp(-a);
    return 2.0 * a * e / (1.0 - e * e);
}

}  // namespace

StepDensity StepDensity::sech() {
    StepDensity d;
    d.kind_ = Kind::sech;
    d.name_ = "sech";
    return d;
}

StepDensity StepDensity::gaussian(double t) {
    if (!(t > 0.0)) throw std::invalid_argument("gaussian: need t > 0");
    StepDensity d;
    d.kind_ = Kind::gaussian;
    d.name_ = "gaussian";
    d.t_ = t;
    return d;
}

StepDensity StepDensity::poisson_smoothed(double lambda, double theta, double t) {
    if (!(lambda > 0.0) || !(t > 0.0) || theta < 0.0 || theta > 1.0)
        throw std::invalid_argument("poisson_smoothed: need lambda, t > 0 and theta in [0,1]");
    StepDensity d;
    d.kind_ = Kind::poisson_smoothed;
    d.name_ = "poisson_smoothed";
    d.t_ = t;
    d.mu_ = lambda * (1.0 + theta);
    return d;
}

StepDensity StepDensity::persistence() {
    StepDensity d;
    d.kind_ = Kind::persistence;
    d.name_ = "persistence";
    return d;
}

StepDensity StepDensity::sech_autocorr_() {
    StepDensity d;
    d.kind_ = Kind::sech_autocorr;
    d.name_ = "sech_autocorr";
    return d;
}

StepDensity StepDensity::tabulated(UniformGridFn samples) {
    if (samples.values.size() < 8 || samples.h <= 0.0)
        throw std::invalid_argument("tabulated: need >= 8 uniform samples");
    const double mass = samples.integral();
    if (!(mass > 0.0)) throw std::invalid_argument("tabulated: non-positive mass");
    for (double& v : samples.values) v /= mass;
    StepDensity d;
    d.kind_ = Kind::tabulated;
    d.name_ = "tabulated";
    d.table_ = std::make_shared<UniformGridFn>(std::move(samples));
    // Cumulative trapezoid for cdf/sampling.
    const auto& tb = *d.table_;
    auto cdf = std::make_shared<std::vector<double>>(tb.values.size(), 0.0);
    for (std::size_t j = 1; j < tb.values.size(); ++j)
        (*cdf)[j] = (*cdf)[j - 1] + 0.5 * tb.h * (tb.values[j - 1] + tb.values[j]);
    d.table_cdf_ = std::move(cdf);
    return d;
}

bool StepDensity::symmetric() const {
    switch (kind_) {
        case Kind::sech:
        case Kind::gaussian:
        case Kind::poisson_smoothed:
        case Kind::sech_autocorr:
            return true;
        case Kind::persistence:
            return false;
        case Kind::tabulated: {
            // Symmetric iff mirrored samples agree (within interpolation noise).
            const auto& tb = *table_;
            for (std::size_t j = 0; j < tb.values.size(); ++j) {
                const double x = tb.x_at(j);
                if (std::abs(tb.eval(-x) - tb.values[j]) > 1e-8) return false;
            }
            return true;
        }
    }
    return false;
}

double StepDensity::eval(double x) const {
    switch (kind_) {
        case Kind::sech:
            return sech_stable(x) / M_PI;
        case Kind::gaussian:
            return std::exp(-x * x / (4.0 * t_)) / std::sqrt(4.0 * M_PI * t_);
        case Kind::poisson_smoothed:
            return 0.25 * mu_ * (smoothed_tail(mu_, t_, x) + smoothed_tail(mu_, t_, -x));
        case Kind::persistence: {
            const double u = x - std::exp(2.0 * x);
            return (2.0 / std::sqrt(M_PI)) * std::exp(u);
        }
        case Kind::sech_autocorr:
            return (2.0 / (M_PI * M_PI)) * z_over_sinh(x);
        case Kind::tabulated:
            return table_->eval(x);
    }
    return 0.0;
}

double StepDensity::deriv(double x) const {
    switch (kind_) {
        case Kind::sech:
            return -std::tanh(x) * eval(x);
        case Kind::gaussian:
            return -x / (2.0 * t_) * eval(x);
        case Kind::poisson_smoothed:
            // The Gaussian-window terms of d/dx cancel between the two tails,
            // leaving d rho/dx = (mu^2/4)(tail(-x) - tail(x)).
            return 0.25 * mu_ * mu_ *
                   (smoothed_tail(mu_, t_, -x) - smoothed_tail(mu_, t_, x));
        case Kind::persistence:
            return (1.0 - 2.0 * std::exp(2.0 * x)) * eval(x);
        case Kind::sech_autocorr: {
            if (std::abs(x) < 1e-6) return -(2.0 / (M_PI * M_PI)) * x / 3.0;
            // d/dz [z/sinh z] = (sinh z - z cosh z)/sinh^2 z, evaluated via
            // decaying exponentials for large |z|.
            const double a = std::abs(x), e = std::exp(-a);
            const double sh = (1.0 - e * e) / (2.0 * e);       // sinh(a), a <= ~700
            const double val = (1.0 - a / std::tanh(a)) / sh;  // odd part magnitude
            return (2.0 / (M_PI * M_PI)) * (x > 0 ? val : -val);
        }
        case Kind::tabulated: {
            const double h = table_->h;
            return (table_->eval(x + h) - table_->eval(x - h)) / (2.0 * h);
        }
    }
    return 0.0;
}

double StepDensity::cdf(double x) const {
    switch (kind_) {
        case Kind::sech:
            // 2/pi atan(e^x), reflected for x > 0 to keep precision.
            return x <= 0.0 ? (2.0 / M_PI) * std::atan(std::exp(x))
                            : 1.0 - (2.0 / M_PI) * std::atan(std::exp(-x));
        case Kind::gaussian:
            return 0.5 * fpf::erfc(-x / (2.0 * std::sqrt(t_)));
        case Kind::persistence:
            return std::erf(std::exp(x));
        case Kind::poisson_smoothed:
        case Kind::sech_autocorr:
        case Kind::tabulated: {
            if (kind_ != Kind::tabulated && !table_) {
                // Lazy numeric CDF table for kinds without a closed form.
                const double W = half_width(1e-14);
                const double h = 0.004;
                const std::size_t m = 2 * static_cast<std::size_t>(std::ceil(W / h)) + 1;
                auto tb = std::make_shared<UniformGridFn>();
                tb->x0 = -h * static_cast<double>(m / 2);
                tb->h = h;
                tb->values.resize(m);
                for (std::size_t j = 0; j < m; ++j) tb->values[j] = eval(tb->x_at(j));
                auto cum = std::make_shared<std::vector<double>>(m, 0.0);
                for (std::size_t j = 1; j < m; ++j)
                    (*cum)[j] = (*cum)[j - 1] + 0.5 * h * (tb->values[j - 1] + tb->values[j]);
                const_cast<StepDensity*>(this)->table_ = std::move(tb);
                const_cast<StepDensity*>(this)->table_cdf_ = std::move(cum);
            }
            const auto& tb = *table_;
            const auto& cum = *table_cdf_;
            const double s = (x - tb.x0) / tb.h;
            if (s <= 0.0) return 0.0;
            if (s >= static_cast<double>(cum.size() - 1)) return 1.0;
            const std::size_t j = static_cast<std::size_t>(s);
            const double f = s - static_cast<double>(j);
            return cum[j] * (1.0 - f) + cum[j + 1] * f;
        }
    }
    return 0.0;
}

double StepDensity::ft(double k) const {
    switch (kind_) {
        case Kind::sech:
            return sech_stable(0.5 * M_PI * k);
        case Kind::gaussian:
            return std::exp(-t_ * k * k);
        case Kind::poisson_smoothed:
            return mu_ * mu_ / (mu_ * mu_ + k * k) * std::exp(-t_ * k * k);
        case Kind::sech_autocorr: {
            const double s = sech_stable(0.5 * M_PI * k);
            return s * s;
        }
        case Kind::persistence:
            throw std::domain_error("ft: persistence transform is complex; use ft_complex");
        case Kind::tabulated: {
            const std::complex<double> v = ft_complex(k);
            if (std::abs(v.imag()) > 1e-8)
                throw std::domain_error("ft: tabulated density is not symmetric");
            return v.real();
        }
    }
    return 0.0;
}

std::complex<double> StepDensity::ft_complex(double k) const {
    switch (kind_) {
        case Kind::persistence:
            // pi^{-1/2} Gamma((1+ik)/2).
            return std::exp(log_gamma(std::complex<double>(0.5, 0.5 * k))) / std::sqrt(M_PI);
        case Kind::tabulated: {
            const auto& tb = *table_;
            std::complex<double> sum = 0.0;
            for (std::size_t j = 0; j < tb.values.size(); ++j) {
                const double x = tb.x_at(j);
                const double w = (j == 0 || j + 1 == tb.values.size()) ? 0.5 : 1.0;
                sum += w * tb.values[j] * std::complex<double>(std::cos(k * x), std::sin(k * x));
            }
            return sum * tb.h;
        }
        default:
            return {ft(k), 0.0};
    }
}

double StepDensity::sample(Rng& rng) const {
    switch (kind_) {
        case Kind::sech:
            return std::log(std::tan(0.5 * M_PI * rng.uniform()));
        case Kind::gaussian:
            return std::sqrt(2.0 * t_) * rng.normal();
        case Kind::poisson_smoothed: {
            const double g = std::sqrt(2.0 * t_) * rng.normal();
            const double e = rng.exponential(mu_);
            return rng.uniform() < 0.5 ? g + e : g - e;
        }
        case Kind::persistence:
            return std::log(erf_inv(rng.uniform()));
        case Kind::sech_autocorr:
        case Kind::tabulated: {
            cdf(0.0);  // force the table
            const auto& cum = *table_cdf_;
            const double total = cum.back();
            const double u = rng.uniform() * total;
            auto it = std::lower_bound(cum.begin(), cum.end(), u);
            const std::size_t j = it == cum.begin()
                                      ? 1
                                      : static_cast<std::size_t>(it - cum.begin());
            const std::size_t i = std::min(j, cum.size() - 1);
            const double c0 = cum[i - 1], c1 = cum[i];
            const double f = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
            return table_->x_at(i - 1) + f * table_->h;
        }
    }
    return 0.0;
}

double StepDensity::mean() const {
    switch (kind_) {
        case Kind::sech:
        case Kind::gaussian:
        case Kind::poisson_smoothed:
        case Kind::sech_autocorr:
            return 0.0;
        case Kind::persistence:
            return -0.5 * (euler_gamma + 2.0 * std::log(2.0));
        case Kind::tabulated: {
            const auto& tb = *table_;
            double s = 0.0;
            for (std::size_t j = 0; j < tb.values.size(); ++j) {
                const double w = (j == 0 || j + 1 == tb.values.size()) ? 0.5 : 1.0;
                s += w * tb.x_at(j) * tb.values[j];
            }
            return s * tb.h;
        }
    }
    return 0.0;
}

double StepDensity::sigma2() const {
    switch (kind_) {
        case Kind::sech:
            return M_PI * M_PI / 4.0;
        case Kind::gaussian:
            return 2.0 * t_;
        case Kind::poisson_smoothed:
            return 2.0 * t_ + 2.0 / (mu_ * mu_);
        case Kind::sech_autocorr:
            return M_PI * M_PI / 2.0;
        case Kind::persistence: {
            const double m = mean();
            const double raw2 = integrate(
                [this](double x) { return x * x * eval(x); }, -half_width(1e-15), 6.0, 1e-13);
            return raw2 - m * m;
        }
        case Kind::tabulated: {
            const auto& tb = *table_;
            const double m = mean();
            double s = 0.0;
            for (std::size_t j = 0; j < tb.values.size(); ++j) {
                const double w = (j == 0 || j + 1 == tb.values.size()) ? 0.5 : 1.0;
                const double d = tb.x_at(j) - m;
                s += w * d * d * tb.values[j];
            }
            return s * tb.h;
        }
    }
    return 0.0;
}

double StepDensity::tilt_limit() const {
    switch (kind_) {
        case Kind::sech:
        case Kind::sech_autocorr:
            return 1.0;
        case Kind::gaussian:
        case Kind::persistence:  // super-exponential right tail
        case Kind::tabulated:    // compact support
            return INFINITY;
        case Kind::poisson_smoothed:
            return mu_;
    }
    return 0.0;
}

double StepDensity::exp_moment(double phi) const {
    if (std::abs(phi) >= tilt_limit())
        throw std::domain_error("exp_moment: phi outside the finite-moment strip");
    switch (kind_) {
        case Kind::sech:
            return 1.0 / std::cos(0.5 * M_PI * phi);
        case Kind::gaussian:
            return std::exp(t_ * phi * phi);
        case Kind::poisson_smoothed:
            return std::exp(t_ * phi * phi) * mu_ * mu_ / (mu_ * mu_ - phi * phi);
        case Kind::sech_autocorr: {
            const double c = std::cos(0.5 * M_PI * phi);
            return 1.0 / (c * c);
        }
        case Kind::persistence:
            if (phi <= -1.0) throw std::domain_error("exp_moment: need phi > -1");
            return std::exp(std::lgamma(0.5 * (1.0 + phi))) / std::sqrt(M_PI);
        case Kind::tabulated: {
            const auto& tb = *table_;
            double s = 0.0;
            for (std::size_t j = 0; j < tb.values.size(); ++j) {
                const double w = (j == 0 || j + 1 == tb.values.size()) ? 0.5 : 1.0;
                s += w * std::exp(phi * tb.x_at(j)) * tb.values[j];
            }
            return s * tb.h;
        }
    }
    return 0.0;
}

double StepDensity::exp_x_moment(double phi) const {
    if (std::abs(phi) >= tilt_limit())
        throw std::domain_error("exp_x_moment: phi outside the finite-moment strip");
    switch (kind_) {
        case Kind::sech: {
            const double sec = 1.0 / std::cos(0.5 * M_PI * phi);
            return 0.5 * M_PI * sec * std::tan(0.5 * M_PI * phi);
        }
        case Kind::gaussian:
            return 2.0 * t_ * phi * std::exp(t_ * phi * phi);
        case Kind::poisson_smoothed: {
            const double d = mu_ * mu_ - phi * phi;
            return std::exp(t_ * phi * phi) * mu_ * mu_ *
                   (2.0 * t_ * phi / d + 2.0 * phi / (d * d));
        }
        case Kind::sech_autocorr: {
            const double c = std::cos(0.5 * M_PI * phi);
            return M_PI * std::tan(0.5 * M_PI * phi) / (c * c);
        }
        case Kind::persistence: {
            if (phi <= -1.0) throw std::domain_error("exp_x_moment: need phi > -1");
            const double g = std::exp(std::lgamma(0.5 * (1.0 + phi))) / std::sqrt(M_PI);
            return 0.5 * g * digamma(0.5 * (1.0 + phi));
        }
        case Kind::tabulated: {
            const auto& tb = *table_;
            double s = 0.0;
            for (std::size_t j = 0; j < tb.values.size(); ++j) {
                const double w = (j == 0 || j + 1 == tb.values.size()) ? 0.5 : 1.0;
                s += w * tb.x_at(j) * std::exp(phi * tb.x_at(j)) * tb.values[j];
            }
            return s * tb.h;
        }
    }
    return 0.0;
}

double StepDensity::half_width(double eps) const {
    switch (kind_) {
        case Kind::sech:
            // One tail beyond W holds (2/pi) atan(e^{-W}); bound each by eps/2
            // so the two-sided total stays below eps.
            return -std::log(std::tan(0.5 * M_PI * std::min(0.5 * eps, 0.4)));
        case Kind::gaussian:
            return 2.0 * std::sqrt(t_) * erf_inv(1.0 - std::min(eps, 0.5)) + 1.0;
        case Kind::poisson_smoothed:
            return 2.0 * std::sqrt(t_) * erf_inv(1.0 - std::min(eps, 0.5)) +
                   std::log(1.0 / eps) / mu_ + 4.0;
        case Kind::persistence: {
            // Left tail ~ (2/sqrt(pi)) e^x, right tail double-exponential.
            const double left = std::log(2.0 / (std::sqrt(M_PI) * eps)) + 1.0;
            const double right = 0.5 * std::log(std::log(4.0 / eps)) + 1.0;
            return std::max(left, right);
        }
        case Kind::sech_autocorr: {
            double w = std::log(1.0 / eps) + 4.0;
            w = std::log(4.0 * (w + 1.0) / (M_PI * M_PI * eps)) + 1.0;
            return w;
        }
        case Kind::tabulated:
            return std::max(std::abs(table_->x0), std::abs(table_->x_max()));
    }
    return 0.0;
}

double StepDensity::param_t() const {
    if (kind_ != Kind::gaussian && kind_ != Kind::poisson_smoothed)
        throw std::domain_error("param_t: kind has no t parameter");
    return t_;
}

double StepDensity::param_mu() const {
    if (kind_ != Kind::poisson_smoothed)
        throw std::domain_error("param_mu: kind has no mu parameter");
    return mu_;
}

StepDensity rho_tilde(const StepDensity& rho) {
    switch (rho.kind()) {
        case StepDensity::Kind::sech:
            return StepDensity::sech_autocorr_();
        case StepDensity::Kind::gaussian:
            return StepDensity::gaussian(2.0 * rho.param_t());
        case StepDensity::Kind::persistence:
            return StepDensity::sech();
        default: {
            // Numeric autocorrelation: rho (x) correlated with rho(-x) by FFT.
            const double W = rho.half_width(1e-13);
            const double h = 0.004;
            const std::size_t m = 2 * static_cast<std::size_t>(std::ceil(W / h)) + 1;
            UniformGridFn f;
            f.x0 = -h * static_cast<double>(m / 2);
            f.h = h;
            f.values.resize(m);
            for (std::size_t j = 0; j < m; ++j) f.values[j] = rho.eval(f.x_at(j));
            UniformGridFn g = f;
            std::reverse(g.values.begin(), g.values.end());
            g.x0 = -f.x_max();
            return StepDensity::tabulated(grid_convolve(f, g));
        }
    }
}

}  // namespace fpf
