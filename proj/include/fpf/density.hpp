// Step densities: the catalogue of one-step distributions the asymptotic
// routes operate on, with closed-form transforms/moments where they exist and
// numeric fallbacks (quadrature / interpolation) for tabulated data.
#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "fpf/grid.hpp"
#include "fpf/rng.hpp"

namespace fpf {

class StepDensity {
public:
    enum class Kind { sech, gaussian, poisson_smoothed, persistence, tabulated, sech_autocorr };

    // Factories.  gaussian(t) has variance 2t; poisson_smoothed(lambda, theta, t)
    // is the Gaussian(variance 2t) smoothed by a two-sided exponential of rate
    // mu = lambda*(1+theta); persistence is the fixed asymmetric density
    // (2/sqrt(pi)) exp(x - e^{2x}); tabulated interpolates samples on a uniform
    // grid (renormalized to unit mass).
    static StepDensity sech();
    static StepDensity gaussian(double t);
    static StepDensity poisson_smoothed(double lambda, double theta, double t);
    static StepDensity persistence();
    static StepDensity tabulated(UniformGridFn samples);

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    bool symmetric() const;

    double eval(double x) const;
    // d/dx of the density (closed form except for tabulated data).
    double deriv(double x) const;
    double cdf(double x) const;

    // Real Fourier transform rho_hat(k) = integral e^{ikx} rho(x) dx.
    // Throws std::domain_error for the persistence kind (complex transform);
    // use ft_complex there.
    double ft(double k) const;
    std::complex<double> ft_complex(double k) const;

    double sample(Rng& rng) const;

    double mean() const;
    // Central second moment.
    double sigma2() const;

    // Laplace moments used by the tilted (p > 1/2) regime:
    //   exp_moment(phi)   = integral e^{phi x} rho(x) dx
    //   exp_x_moment(phi) = integral x e^{phi x} rho(x) dx
    // Closed forms where available, else adaptive quadrature.  Throws
    // std::domain_error when phi is outside the convergence strip.
    double exp_moment(double phi) const;
    double exp_x_moment(double phi) const;

    // Largest |phi| with a finite exponential moment (inf for gaussian kinds).
    double tilt_limit() const;

    // Half-width W with total tail mass outside [-W, W] (or the asymmetric
    // analogue) below eps.
    double half_width(double eps) const;

    // poisson_smoothed parameters (throws for other kinds).
    double param_t() const;
    double param_mu() const;

private:
    StepDensity() = default;

    Kind kind_ = Kind::sech;
    std::string name_;
    double t_ = 0.0;       // gaussian / poisson_smoothed diffusion parameter
    double mu_ = 0.0;      // poisson_smoothed two-sided exponential rate
    std::shared_ptr<UniformGridFn> table_;          // tabulated samples
    std::shared_ptr<std::vector<double>> table_cdf_;  // cumulative trapezoid

    friend StepDensity rho_tilde(const StepDensity& rho);
    static StepDensity sech_autocorr_();
};

// Autocorrelation density rho_tilde(z) = integral rho(w) rho(w - z) dw.
// Closed for the catalogue kinds (sech -> (2/pi^2) z/sinh z, gaussian(t) ->
// gaussian(2t), persistence -> sech); FFT autocorrelation otherwise.
StepDensity rho_tilde(const StepDensity& rho);

// Free-function forms mirroring the operation table.
inline double density_eval(const StepDensity& r, double x) { return r.eval(x); }
inline double density_cdf(const StepDensity& r, double x) { return r.cdf(x); }
inline double density_ft(const StepDensity& r, double k) { return r.ft(k); }
inline double density_sample(const StepDensity& r, Rng& g) { return r.sample(g); }

}  // namespace fpf
