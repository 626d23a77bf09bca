// Pfaffian of a real antisymmetric matrix via Parlett-Reid tridiagonalization
// with partial pivoting.
#pragma once

#include <Eigen/Dense>

namespace fpf {

// Thin wrapper that enforces antisymmetry on construction.  The even-dimension
// requirement is deferred to pfaffian() (odd dimension has Pfaffian zero).
struct AntisymMatrix {
    Eigen::MatrixXd m;

    // Throws std::invalid_argument if m is not square or |A + A^T| exceeds
    // atol elementwise.
    explicit AntisymMatrix(Eigen::MatrixXd a, double atol = 1e-10);
    Eigen::Index dim() const { return m.rows(); }
};

// Pfaffian of A.  Zero for odd dimension; pf([]) = 1.  The elimination works
// in place on a copy; cost O(n^3).
double pfaffian(const AntisymMatrix& a);

// log |pf A| and sign, for matrices whose Pfaffian under/overflows doubles.
// sign = 0 (with log = -inf) when the matrix is singular.
struct LogPfaffian {
    double log_abs;
    int sign;
};
LogPfaffian pfaffian_log(const AntisymMatrix& a);

}  // namespace fpf
