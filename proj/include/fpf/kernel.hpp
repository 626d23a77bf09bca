// Scalar correlation kernels K(x,y) with their partial derivatives, the 2x2
// derived block form, point-process intensities, and coordinate pushforwards.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>

#include "fpf/density.hpp"
#include "fpf/pfaffian.hpp"

namespace fpf {

using Kernel2 = std::function<double(double, double)>;

// Antisymmetric scalar kernel with partials.  d1 = d/dx, d2 = d/dy,
// d12 = d^2/dxdy.  Domain is the open box (lo, hi)^2.
struct ScalarKernel {
    std::string name;
    double lo = -1e300, hi = 1e300;
    Kernel2 K, d1, d2, d12;

    void require_inside(double x) const;
};

// Translation-invariant bulk kernel of a symmetric density:
// K(x,y) = 1 - 2*CDF(y-x), so d2 = -2 rho(y-x), d1 = 2 rho(y-x),
// d12 = 2 rho'(y-x).  Throws std::invalid_argument for asymmetric densities.
ScalarKernel scalar_bulk(const StepDensity& rho);

// Half-space (edge) kernel of a one-step density rho:
// K(x,y) = integral_{z<0} [Phi(x-z) rho(y-z) - Phi(y-z) rho(x-z)] dz with
// Phi the CDF.  Carries the density and the tail autocorrelation
// T(x,y) = integral_0^inf rho(x+w) rho(y+w) dw used by the reduction to a
// scalar Fredholm determinant (closed form for gaussian/persistence kinds).
struct EdgeKernel : ScalarKernel {
    explicit EdgeKernel(StepDensity r) : rho(std::move(r)) {}

    StepDensity rho;
    Kernel2 T;
    std::function<double(double)> Phi;
};
EdgeKernel scalar_edge(const StepDensity& rho);

// Secular-equation zero kernel on (-1,1):
// K(x,y) = (2/pi) asin( sqrt((1-x^2)(1-y^2)) / (1-xy) ) - 1 for x < y.
ScalarKernel scalar_gps();

// Exit kernels on (0,inf) x (0,inf).
enum class ExitInit { maximal, poisson };
// maximal: K(s,t) = (4/pi) atan(sqrt(s/t)) - 1 for s < t (closed partials).
// poisson(lambda): double-integral kernel over ordered pairs; partials by
// central differences of the quadrature (smoke-test accuracy only).
ScalarKernel scalar_exit(ExitInit kind, double lambda = 1.0);

// Increasing change of coordinates y = phi(x).  The pushed kernel is
// K'(u,v) = K(phi_inv u, phi_inv v); derivative entries pick up factors
// alpha = phi_inv'(.) on the differentiated slots.
struct PushMap {
    std::function<double(double)> phi, phi_inv, dphi_inv;
    double lo, hi;  // image domain
};
ScalarKernel pushforward(const ScalarKernel& K, const PushMap& map);

// 2x2 block form [[S+K, -d2K], [-d1K, d12K]] with S(x,y) = sgn(y-x).
struct DerivedKernel {
    ScalarKernel base;
    // Block at (x,y) scaled by thinning parameter p.
    Eigen::Matrix2d block(double x, double y, double p) const;
};
DerivedKernel derived(const ScalarKernel& K);

// n-point correlation function of the thinned process at pairwise-distinct
// points: Pfaffian of the 2n x 2n block matrix.  p in (0,1].
double intensity(const DerivedKernel& K, double p, const std::vector<double>& points);

}  // namespace fpf
