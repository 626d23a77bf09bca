// n-fold self-convolution tables of a step density on a uniform grid, plus a
// low-memory spectral stream for the long tails of the series route.
#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "fpf/density.hpp"
#include "fpf/grid.hpp"

namespace fpf {

// Rows rho^{*n}, n = 1..n_max, sampled on x_j = -W + j*h (W/h integral so that
// x = 0 is a grid point).  Rows are clipped to [-W, W]; the clipped mass of
// the worst row is recorded as mass_defect.
struct ConvolutionTable {
    double h = 0.0, W = 0.0;
    std::vector<UniformGridFn> rows;  // rows[n-1] = rho^{*n}
    double mass_defect = 0.0;

    std::size_t n_max() const { return rows.size(); }
    const UniformGridFn& row(std::size_t n) const;  // 1-based, throws on range
    double at_zero(std::size_t n) const;

    // Trapezoid integrals over the grid against the stored rows:
    //   int_0^inf x * row_a(x) * row_b(x) dx
    double pair_integral(std::size_t a, std::size_t b) const;
    //   int_R x * row_n(x)^2 dx   (vanishes for symmetric densities)
    double signed_square_integral(std::size_t n) const;
};

// Throws std::invalid_argument on h <= 0, W <= h, n_max = 0.
ConvolutionTable build_table(const StepDensity& rho, std::size_t n_max, double h, double W);

// Streams rho^{*n} for n = 1, 2, ... without keeping past rows: one forward
// real FFT of the sampled density, then a running pointwise power inverted
// per step.  Grid matches ConvolutionTable semantics (x = 0 on grid).
class ConvolutionStream {
public:
    ConvolutionStream(const StepDensity& rho, double h, double W);
    ~ConvolutionStream();
    ConvolutionStream(const ConvolutionStream&) = delete;
    ConvolutionStream& operator=(const ConvolutionStream&) = delete;

    // Advance to the next n and expose the current row values on
    // x_j = -W + j*h, j = 0..size()-1.  First call yields n = 1.
    const std::vector<double>& next();

    std::size_t n() const { return n_; }
    std::size_t size() const { return m_; }
    double h() const { return h_; }
    double x_at(std::size_t j) const { return -W_ + static_cast<double>(j) * h_; }
    std::size_t zero_index() const { return m0_; }

private:
    double h_, W_;
    std::size_t m_, m0_, padded_;
    std::size_t n_ = 0;
    std::vector<double> row_;
    struct Fft;
    std::unique_ptr<Fft> fft_;
};

}  // namespace fpf
