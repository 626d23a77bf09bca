#include <cmath>
#include <stdexcept>
#include <vector>

#include "fpf/rng.hpp"
#include "fpf/zeros.hpp"

namespace fpf {

ZeroRunStats gps_zeros(double eps, std::uint64_t n_real, std::uint64_t seed) {
    if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("gps_zeros: need eps in (0, 1/2)");
    if (n_real == 0) throw std::invalid_argument("gps_zeros: need at least one realization");

    // Truncation: |x| <= 1-2eps on the scanned window, so the dropped tail is
    // bounded by max|a_n| * r^(N+1) / (1-r) with r = 1-2eps; pick N to push it
    // below 1e-12 with room for coefficients a few sigma large.
    std::size_t trunc_N = 1;
    {
        const double r = 1.0 - 2.0 * eps;
        const double target = 1e-12 * (1.0 - r) / 8.0;
        trunc_N = static_cast<std::size_t>(std::ceil(std::log(target) / std::log(r))) + 1;
    }

    const double hi = 1.0 - 2.0 * eps;
    const double step = 1e-3;
    const std::size_t n_pts = static_cast<std::size_t>(std::floor(2.0 * hi / step)) + 1;

    Rng rng(seed, 31);
    std::vector<double> coef(trunc_N + 1);
    std::uint64_t empty = 0;
    for (std::uint64_t r = 0; r < n_real; ++r) {
        for (auto& c : coef) c = rng.normal();
        bool sign_change = false;
        double prev = 0.0;
        for (std::size_t k = 0; k < n_pts; ++k) {
            const double x = -hi + static_cast<double>(k) * step;
            double f = 0.0;
            for (std::size_t j = coef.size(); j-- > 0;) f = f * x + coef[j];
            if (k > 0 && ((prev < 0.0 && f > 0.0) || (prev > 0.0 && f < 0.0))) {
                sign_change = true;
                break;
            }
            prev = f;
        }
        if (!sign_change) ++empty;
    }

    ZeroRunStats st;
    st.eps = eps;
    st.trunc_N = trunc_N;
    st.n_real = n_real;
    st.n_empty = empty;
    st.p_hat = static_cast<double>(empty) / static_cast<double>(n_real);
    st.se = std::sqrt(std::max(st.p_hat * (1.0 - st.p_hat), 1e-300) /
                      static_cast<double>(n_real));
    st.log_length = std::log((1.0 - eps) / eps);
    return st;
}

}  // namespace fpf
