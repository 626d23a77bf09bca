#include "fpf/convtable.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <stdexcept>

namespace fpf {

const UniformGridFn& ConvolutionTable::row(std::size_t n) const {
    if (n == 0 || n > rows.size()) throw std::out_of_range("ConvolutionTable::row");
    return rows[n - 1];
}

double ConvolutionTable::at_zero(std::size_t n) const {
    const UniformGridFn& r = row(n);
    return r.values[r.values.size() / 2];
}

double ConvolutionTable::pair_integral(std::size_t a, std::size_t b) const {
    const UniformGridFn& ra = row(a);
    const UniformGridFn& rb = row(b);
    const std::size_t m0 = ra.values.size() / 2;  // index of x = 0
    double s = 0.0;
    for (std::size_t j = m0; j < ra.values.size(); ++j) {
        const double x = ra.x_at(j);
        const double w = (j == m0 || j + 1 == ra.values.size()) ? 0.5 : 1.0;
        s += w * x * ra.values[j] * rb.values[j];
    }
    // Euler-Maclaurin endpoint term: (x ra rb)' at 0 is ra(0) rb(0), which the
    // plain trapezoid misses at O(h^2).
    return s * h + h * h / 12.0 * ra.values[m0] * rb.values[m0];
}

double ConvolutionTable::signed_square_integral(std::size_t n) const {
    const UniformGridFn& r = row(n);
    double s = 0.0;
    for (std::size_t j = 0; j < r.values.size(); ++j) {
        const double w = (j == 0 || j + 1 == r.values.size()) ? 0.5 : 1.0;
        const double x = r.x_at(j);
        s += w * x * r.values[j] * r.values[j];
    }
    return s * h;
}

ConvolutionTable build_table(const StepDensity& rho, std::size_t n_max, double h, double W) {
    if (!(h > 0.0) || !(W > h) || n_max == 0)
        throw std::invalid_argument("build_table: need h > 0, W > h, n_max >= 1");
    ConvolutionTable tab;
    const std::size_t m0 = static_cast<std::size_t>(std::ceil(W / h));
    const std::size_t m = 2 * m0 + 1;
    tab.h = h;
    tab.W = static_cast<double>(m0) * h;
    UniformGridFn base;
    base.x0 = -tab.W;
    base.h = h;
    base.values.resize(m);
    for (std::size_t j = 0; j < m; ++j) base.values[j] = rho.eval(base.x_at(j));
    tab.rows.reserve(n_max);
    tab.rows.push_back(base);
    for (std::size_t n = 2; n <= n_max; ++n) {
        UniformGridFn full = grid_convolve(tab.rows.back(), base);
        // Clip the doubled support back to [-W, W]; x = 0 sits at index m-1
        // of the 2m-1 point result, so the window starts at m0.
        UniformGridFn clipped;
        clipped.x0 = -tab.W;
        clipped.h = h;
        clipped.values.assign(full.values.begin() + static_cast<std::ptrdiff_t>(m0),
                              full.values.begin() + static_cast<std::ptrdiff_t>(m0 + m));
        tab.rows.push_back(std::move(clipped));
    }
    for (const auto& r : tab.rows)
        tab.mass_defect = std::max(tab.mass_defect, std::abs(1.0 - r.integral()));
    return tab;
}

struct ConvolutionStream::Fft {
    std::size_t P = 0;
    double* real = nullptr;
    fftw_complex* base = nullptr;
    fftw_complex* cur = nullptr;
    fftw_complex* scratch = nullptr;
    fftw_plan fwd{}, bwd{};

    explicit Fft(std::size_t P_) : P(P_) {
        real = fftw_alloc_real(P);
        base = fftw_alloc_complex(P / 2 + 1);
        cur = fftw_alloc_complex(P / 2 + 1);
        scratch = fftw_alloc_complex(P / 2 + 1);
        fwd = fftw_plan_dft_r2c_1d(static_cast<int>(P), real, base, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_c2r_1d(static_cast<int>(P), scratch, real, FFTW_ESTIMATE);
    }
    ~Fft() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
        fftw_free(real);
        fftw_free(base);
        fftw_free(cur);
        fftw_free(scratch);
    }
};

ConvolutionStream::ConvolutionStream(const StepDensity& rho, double h, double W) {
    if (!(h > 0.0) || !(W > h))
        throw std::invalid_argument("ConvolutionStream: need h > 0, W > h");
    h_ = h;
    m0_ = static_cast<std::size_t>(std::ceil(W / h));
    W_ = static_cast<double>(m0_) * h;
    m_ = 2 * m0_ + 1;
    std::size_t P = 1;
    while (P < 2 * m_) P <<= 1;
    padded_ = P;
    fft_ = std::make_unique<Fft>(P);
    // Circular layout: x = 0 at buffer index 0, negative x wrapped to the top.
    std::memset(fft_->real, 0, sizeof(double) * P);
    for (std::size_t i = 0; i < m_; ++i) {
        const double x = x_at(i);
        const std::size_t j = (i + P - m0_) % P;
        fft_->real[j] = rho.eval(x);
    }
    fftw_execute(fft_->fwd);
    std::memcpy(fft_->cur, fft_->base, sizeof(fftw_complex) * (P / 2 + 1));
    row_.resize(m_);
}

ConvolutionStream::~ConvolutionStream() = default;

const std::vector<double>& ConvolutionStream::next() {
    const std::size_t P = padded_;
    if (n_ > 0) {
        // cur <- cur * base * h  (one more convolution fold)
        for (std::size_t j = 0; j <= P / 2; ++j) {
            const double re =
                fft_->cur[j][0] * fft_->base[j][0] - fft_->cur[j][1] * fft_->base[j][1];
            const double im =
                fft_->cur[j][0] * fft_->base[j][1] + fft_->cur[j][1] * fft_->base[j][0];
            fft_->cur[j][0] = re * h_;
            fft_->cur[j][1] = im * h_;
        }
    }
    ++n_;
    std::memcpy(fft_->scratch, fft_->cur, sizeof(fftw_complex) * (P / 2 + 1));
    fftw_execute(fft_->bwd);
    const double scale = 1.0 / static_cast<double>(P);
    for (std::size_t i = 0; i < m_; ++i) {
        const std::size_t j = (i + P - m0_) % P;
        row_[i] = fft_->real[j] * scale;
    }
    return row_;
}

}  // namespace fpf
