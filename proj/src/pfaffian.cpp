#include "fpf/pfaffian.hpp"

#include <cmath>
#include <stdexcept>

namespace fpf {

AntisymMatrix::AntisymMatrix(Eigen::MatrixXd a, double atol) : m(std::move(a)) {
    if (m.rows() != m.cols()) throw std::invalid_argument("AntisymMatrix: not square");
    if (m.size() == 0) return;  // 0x0 is vacuously antisymmetric (Pfaffian 1)
    const double asym = (m + m.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if (asym > atol * scale) throw std::invalid_argument("AntisymMatrix: not antisymmetric");
    // Snap to exact antisymmetry so downstream elimination has no drift.
    m = 0.5 * (m - m.transpose().eval());
}

namespace {

// Parlett-Reid skew tridiagonalization with partial pivoting; accumulates the
// super-diagonal product in log space.  Returns {log|pf|, sign}.
LogPfaffian parlett_reid(Eigen::MatrixXd A) {
    const Eigen::Index n = A.rows();
    if (n % 2 != 0) return {-INFINITY, 0};
    if (n == 0) return {0.0, 1};
    double log_abs = 0.0;
    int sign = 1;
    for (Eigen::Index k = 0; k + 1 < n; k += 2) {
        // Pivot: largest |A(l,k)| for l > k.
        Eigen::Index kp = k + 1;
        double best = std::abs(A(kp, k));
        for (Eigen::Index l = k + 2; l < n; ++l) {
            if (std::abs(A(l, k)) > best) {
                best = std::abs(A(l, k));
                kp = l;
            }
        }
        if (best == 0.0) return {-INFINITY, 0};
        if (kp != k + 1) {
            A.row(k + 1).swap(A.row(kp));
            A.col(k + 1).swap(A.col(kp));
            sign = -sign;
        }
        const double pivot = A(k, k + 1);
        log_abs += std::log(std::abs(pivot));
        if (pivot < 0.0) sign = -sign;
        if (k + 2 < n) {
            // Congruence eliminating column k below row k+1 (unit-det, so the
            // Pfaffian is untouched; antisymmetry clears row k for free).
            const Eigen::Index m = n - (k + 2);
            const Eigen::VectorXd t = A.block(k + 2, k, m, 1) / A(k + 1, k);
            const Eigen::VectorXd r = A.block(k + 1, k + 2, 1, m).transpose();
            A.block(k + 2, k + 2, m, m).noalias() -= t * r.transpose();
            A.block(k + 2, k + 2, m, m).noalias() += r * t.transpose();
            A.block(k + 2, k, m, 1).setZero();
            A.block(k, k + 2, 1, m).setZero();
        }
    }
    return {log_abs, sign};
}

}  // namespace

double pfaffian(const AntisymMatrix& a) {
    const LogPfaffian lp = parlett_reid(a.m);
    if (lp.sign == 0) return 0.0;
    return static_cast<double>(lp.sign) * std::exp(lp.log_abs);
}

LogPfaffian pfaffian_log(const AntisymMatrix& a) { return parlett_reid(a.m); }

}  // namespace fpf
