#include "fpf/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace fpf {

void gauss_legendre_reference(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i < half; ++i) {
        // Chebyshev-like seed, then Newton on P_n.
        double z = std::cos(M_PI * (static_cast<double>(i) + 0.75) /
                            (static_cast<double>(n) + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            // p0 = P_n(z); derivative from the standard identity.
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
}

QuadratureGrid make_grid(double a, double b, std::size_t n, QuadRule rule) {
    if (n < 2) throw std::invalid_argument("make_grid: need n >= 2");
    if (!(a < b)) throw std::invalid_argument("make_grid: need a < b");
    QuadratureGrid g;
    g.a = a;
    g.b = b;
    g.rule = rule;
    if (rule == QuadRule::gauss_legendre) {
        std::vector<double> x, w;
        gauss_legendre_reference(n, x, w);
        g.nodes.resize(n);
        g.weights.resize(n);
        const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
        for (std::size_t i = 0; i < n; ++i) {
            g.nodes[i] = mid + rad * x[i];
            g.weights[i] = rad * w[i];
        }
    } else {
        const double h = (b - a) / static_cast<double>(n - 1);
        g.nodes.resize(n);
        g.weights.assign(n, h);
        for (std::size_t i = 0; i < n; ++i) g.nodes[i] = a + h * static_cast<double>(i);
        g.weights.front() = 0.5 * h;
        g.weights.back() = 0.5 * h;
    }
    return g;
}

double UniformGridFn::eval(double x) const {
    if (values.empty() || h <= 0.0) return 0.0;
    const double s = (x - x0) / h;
    if (s <= 0.0) return s == 0.0 ? values.front() : 0.0;
    const double smax = static_cast<double>(values.size() - 1);
    if (s >= smax) return s == smax ? values.back() : 0.0;
    const std::size_t j = static_cast<std::size_t>(s);
    const double f = s - static_cast<double>(j);
    return values[j] * (1.0 - f) + values[j + 1] * f;
}

double UniformGridFn::integral() const {
    if (values.size() < 2) return 0.0;
    double s = 0.5 * (values.front() + values.back());
    for (std::size_t j = 1; j + 1 < values.size(); ++j) s += values[j];
    return s * h;
}

namespace {
std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}
}  // namespace

UniformGridFn grid_convolve(const UniformGridFn& f, const UniformGridFn& g) {
    if (f.values.empty() || g.values.empty())
        throw std::invalid_argument("grid_convolve: empty input");
    if (std::abs(f.h - g.h) > 1e-12 * std::max(f.h, g.h))
        throw std::invalid_argument("grid_convolve: step mismatch");
    const std::size_t nf = f.values.size(), ng = g.values.size();
    const std::size_t nout = nf + ng - 1;
    const std::size_t P = next_pow2(nout);

    double* buf_a = fftw_alloc_real(P);
    double* buf_b = fftw_alloc_real(P);
    fftw_complex* spec_a = fftw_alloc_complex(P / 2 + 1);
    fftw_complex* spec_b = fftw_alloc_complex(P / 2 + 1);
    std::memset(buf_a, 0, sizeof(double) * P);
    std::memset(buf_b, 0, sizeof(double) * P);
    std::copy(f.values.begin(), f.values.end(), buf_a);
    std::copy(g.values.begin(), g.values.end(), buf_b);

    fftw_plan fwd_a = fftw_plan_dft_r2c_1d(static_cast<int>(P), buf_a, spec_a, FFTW_ESTIMATE);
    fftw_plan fwd_b = fftw_plan_dft_r2c_1d(static_cast<int>(P), buf_b, spec_b, FFTW_ESTIMATE);
    fftw_execute(fwd_a);
    fftw_execute(fwd_b);
    // Pointwise product; scale by h (Riemann sum) and 1/P (FFTW convention).
    const double scale = f.h / static_cast<double>(P);
    for (std::size_t j = 0; j <= P / 2; ++j) {
        const double re = spec_a[j][0] * spec_b[j][0] - spec_a[j][1] * spec_b[j][1];
        const double im = spec_a[j][0] * spec_b[j][1] + spec_a[j][1] * spec_b[j][0];
        spec_a[j][0] = re * scale;
        spec_a[j][1] = im * scale;
    }
    fftw_plan bwd = fftw_plan_dft_c2r_1d(static_cast<int>(P), spec_a, buf_a, FFTW_ESTIMATE);
    fftw_execute(bwd);

    UniformGridFn out;
    out.x0 = f.x0 + g.x0;
    out.h = f.h;
    out.values.assign(buf_a, buf_a + nout);

    fftw_destroy_plan(fwd_a);
    fftw_destroy_plan(fwd_b);
    fftw_destroy_plan(bwd);
    fftw_free(buf_a);
    fftw_free(buf_b);
    fftw_free(spec_a);
    fftw_free(spec_b);
    return out;
}

namespace {

// QUADPACK 7-15 Gauss-Kronrod pair on [-1,1].
constexpr double kGK15Nodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kGK15WeightsK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGK15WeightsG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PanelResult {
    double integral;
    double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), rad = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double dx = rad * kGK15Nodes[i];
        double fv;
        if (i == 7) {
            fv = f(mid);
            resk += kGK15WeightsK[i] * fv;
            resg += kGK15WeightsG[3] * fv;
        } else {
            fv = f(mid - dx) + f(mid + dx);
            resk += kGK15WeightsK[i] * fv;
            if (i % 2 == 1) resg += kGK15WeightsG[i / 2] * fv;
        }
    }
    PanelResult r;
    r.integral = resk * rad;
    const double diff = std::abs(resk - resg) * rad;
    // QUADPACK-style sharpened estimate.
    r.error = diff < 1.0 ? std::pow(200.0 * diff, 1.5) : diff;
    if (!(r.error < diff)) r.error = diff;
    r.error = std::max(r.error, 1e-300);
    return r;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 double abs_tol, double rel_tol) {
    if (a == b) return 0.0;
    struct Panel {
        double a, b, integral, error;
    };
    std::vector<Panel> heap;
    auto push = [&heap](Panel p) {
        heap.push_back(p);
        std::push_heap(heap.begin(), heap.end(),
                       [](const Panel& u, const Panel& v) { return u.error < v.error; });
    };
    PanelResult first = gk15(f, a, b);
    push({a, b, first.integral, first.error});
    double total = first.integral, total_err = first.error;
    const std::size_t max_panels = 20000;
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (heap.size() >= max_panels)
            throw std::runtime_error("integrate: panel budget exhausted");
        std::pop_heap(heap.begin(), heap.end(),
                      [](const Panel& u, const Panel& v) { return u.error < v.error; });
        Panel worst = heap.back();
        heap.pop_back();
        const double m = 0.5 * (worst.a + worst.b);
        if (m <= worst.a || m >= worst.b) {
            // Interval at rounding resolution: accept its estimate as-is.
            push({worst.a, worst.b, worst.integral, 0.0});
            total_err -= worst.error;
            continue;
        }
        PanelResult left = gk15(f, worst.a, m), right = gk15(f, m, worst.b);
        total += left.integral + right.integral - worst.integral;
        total_err += left.error + right.error - worst.error;
        push({worst.a, m, left.integral, left.error});
        push({m, worst.b, right.integral, right.error});
    }
    // Recompute the sum in panel order for a touch less cancellation noise.
    double s = 0.0;
    for (const auto& p : heap) s += p.integral;
    return s;
}

double integrate_halfline(const std::function<double(double)>& f, double a,
                          double abs_tol, double step0) {
    double total = 0.0, lo = a, len = step0;
    int quiet = 0;
    for (int slab = 0; slab < 64; ++slab) {
        const double hi = lo + len;
        const double part = integrate(f, lo, hi, 0.25 * abs_tol, 1e-12);
        total += part;
        if (std::abs(part) < abs_tol) {
            if (++quiet >= 2) return total;
        } else {
            quiet = 0;
        }
        lo = hi;
        len *= 2.0;
    }
    throw std::runtime_error("integrate_halfline: no decay detected");
}

}  // namespace fpf
