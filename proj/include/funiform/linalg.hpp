#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "funiform/error.hpp"

namespace funiform {

/// Dense symmetric matrix in row-major order.  Sized for the small systems
/// used here (parameter dimensions up to a handful), not for performance.
struct SmallMatrix {
    std::size_t n = 0;
    std::vector<double> a; // n*n row major

    SmallMatrix() = default;
    explicit SmallMatrix(std::size_t dim) : n(dim), a(dim * dim, 0.0) {}

    double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
    double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

namespace linalg {

/// Cholesky factor L (lower) of a symmetric positive definite matrix.
/// Returns false if a pivot is not strictly positive.
inline bool cholesky(const SmallMatrix& m, SmallMatrix& l) {
    const std::size_t n = m.n;
    l = SmallMatrix(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = m(i, j);
            for (std::size_t k = 0; k < j; ++k) sum -= l(i, k) * l(j, k);
            if (i == j) {
                if (!(sum > 0.0) || !std::isfinite(sum)) return false;
                l(i, i) = std::sqrt(sum);
            } else {
                l(i, j) = sum / l(j, j);
            }
        }
    }
    return true;
}

/// log det of a symmetric positive definite matrix via Cholesky.
/// Returns false when the matrix is numerically singular or indefinite.
inline bool logdet_spd(const SmallMatrix& m, double& out) {
    SmallMatrix l;
    if (!cholesky(m, l)) return false;
    double s = 0.0;
    for (std::size_t i = 0; i < m.n; ++i) s += std::log(l(i, i));
    out = 2.0 * s;
    return true;
}

/// Determinant by LU with partial pivoting; usable for general square input.
inline double det(SmallMatrix m) {
    const std::size_t n = m.n;
    double d = 1.0;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::fabs(m(r, c)) > std::fabs(m(piv, c))) piv = r;
        if (m(piv, c) == 0.0) return 0.0;
        if (piv != c) {
            for (std::size_t k = 0; k < n; ++k) std::swap(m.a[piv * n + k], m.a[c * n + k]);
            d = -d;
        }
        d *= m(c, c);
        for (std::size_t r = c + 1; r < n; ++r) {
            const double f = m(r, c) / m(c, c);
            for (std::size_t k = c; k < n; ++k) m(r, k) -= f * m(c, k);
        }
    }
    return d;
}

/// Solves m x = b for symmetric positive definite m via Cholesky.
inline bool solve_spd(const SmallMatrix& m, const std::vector<double>& b,
                      std::vector<double>& x) {
    SmallMatrix l;
    if (!cholesky(m, l)) return false;
    const std::size_t n = m.n;
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    x.assign(n, 0.0);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return true;
}

/// Inverse of a symmetric positive definite matrix.
inline bool inverse_spd(const SmallMatrix& m, SmallMatrix& inv) {
    const std::size_t n = m.n;
    inv = SmallMatrix(n);
    std::vector<double> e(n, 0.0), col;
    for (std::size_t j = 0; j < n; ++j) {
        e.assign(n, 0.0);
        e[j] = 1.0;
        if (!solve_spd(m, e, col)) return false;
        for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
    }
    return true;
}

} // namespace linalg
} // namespace funiform
