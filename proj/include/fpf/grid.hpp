// Quadrature grids, adaptive integration, and FFT convolution on uniform grids.
#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace fpf {

enum class QuadRule { gauss_legendre, uniform };

// Nodes/weights for integration over [a,b].  gauss_legendre gives spectral
// accuracy for analytic integrands; uniform (trapezoid weights) is what the
// convolution grids use.
struct QuadratureGrid {
    double a = 0.0, b = 0.0;
    QuadRule rule = QuadRule::gauss_legendre;
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const { return nodes.size(); }
};

// n >= 2 required; throws std::invalid_argument on bad input (n < 2 or a >= b).
QuadratureGrid make_grid(double a, double b, std::size_t n, QuadRule rule);

// Gauss-Legendre nodes/weights on [-1,1], computed at runtime by Newton
// iteration on the Legendre recurrence (no table limits).
void gauss_legendre_reference(std::size_t n, std::vector<double>& x, std::vector<double>& w);

// A function sampled on a uniform grid x_j = x0 + j*h.  Values are owned.
struct UniformGridFn {
    double x0 = 0.0;
    double h = 0.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double x_at(std::size_t j) const { return x0 + static_cast<double>(j) * h; }
    double x_max() const { return x0 + static_cast<double>(values.size() - 1) * h; }

    // Linear interpolation; zero outside the sampled window.
    double eval(double x) const;

    // Trapezoid integral of the sampled values over the whole window.
    double integral() const;
};

// Linear convolution (f*g)(x) = integral f(y) g(x-y) dy of two uniform-grid
// functions with the same step h, via zero-padded real FFT.  The result grid
// starts at f.x0 + g.x0 and has size f.size()+g.size()-1.
// Throws std::invalid_argument if the steps differ (relative mismatch > 1e-12)
// or either input is empty.
UniformGridFn grid_convolve(const UniformGridFn& f, const UniformGridFn& g);

// Adaptive Gauss-Kronrod (7-15) on a finite interval.  Subdivides until the
// local error estimate is below max(abs_tol, rel_tol*|integral|) per panel
// share.  Throws std::runtime_error if the panel budget is exhausted.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol = 1e-12, double rel_tol = 1e-12);

// Integral over [a, +inf) of a decaying integrand: doubles the upper cut
// starting from a+step0 until the last slab contributes < abs_tol.
double integrate_halfline(const std::function<double(double)>& f, double a,
                          double abs_tol = 1e-12, double step0 = 8.0);

}  // namespace fpf
