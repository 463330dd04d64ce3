#pragma once

#include <cmath>
#include <vector>

#include "thinlam/detail/common.hpp"

namespace thinlam::detail {

// Solve A x = b (row-major n x n) by Gaussian elimination with partial
// pivoting. Returns false when a pivot falls below tol.
inline bool solve_linear(std::vector<double> A, std::vector<double> b, std::vector<double>& x,
                         int n, double tol = 1e-13) {
    x.assign(n, 0.0);
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[r * n + col]) > std::abs(A[piv * n + col])) piv = r;
        if (std::abs(A[piv * n + col]) < tol) return false;
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(A[piv * n + c], A[col * n + c]);
            std::swap(b[piv], b[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            double f = A[r * n + col] / A[col * n + col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) A[r * n + c] -= f * A[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < n; ++c) s -= A[r * n + c] * x[c];
        x[r] = s / A[r * n + r];
    }
    return true;
}

// Least squares min |A x - b|, A row-major m x n with m >= n, via normal
// equations. Returns false on a singular system; otherwise fills x and the
// residual norm.
inline bool least_squares(const std::vector<double>& A, const std::vector<double>& b,
                          std::vector<double>& x, int m, int n, double& residual) {
    std::vector<double> AtA(n * n, 0.0), Atb(n, 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int r = 0; r < m; ++r) s += A[r * n + i] * A[r * n + j];
            AtA[i * n + j] = s;
        }
        double s = 0.0;
        for (int r = 0; r < m; ++r) s += A[r * n + i] * b[r];
        Atb[i] = s;
    }
    if (!solve_linear(AtA, Atb, x, n, 1e-12)) return false;
    double res2 = 0.0;
    for (int r = 0; r < m; ++r) {
        double s = -b[r];
        for (int c = 0; c < n; ++c) s += A[r * n + c] * x[c];
        res2 += s * s;
    }
    residual = std::sqrt(res2);
    return true;
}

// Determinant of a small matrix (row-major k x k, k <= 5) by expansion.
inline double small_det(const std::vector<double>& M, int k) {
    if (k == 1) return M[0];
    if (k == 2) return M[0] * M[3] - M[1] * M[2];
    double det = 0.0;
    std::vector<double> minor((k - 1) * (k - 1));
    for (int c = 0; c < k; ++c) {
        for (int r = 1; r < k; ++r) {
            int mc = 0;
            for (int cc = 0; cc < k; ++cc) {
                if (cc == c) continue;
                minor[(r - 1) * (k - 1) + mc++] = M[r * k + cc];
            }
        }
        double s = small_det(minor, k - 1);
        det += ((c % 2) ? -1.0 : 1.0) * M[c] * s;
    }
    return det;
}

// Smallest singular value of an m x n matrix (row-major, both small) via the
// cyclic Jacobi eigensolver on A^T A.
inline double smallest_singular_value(const std::vector<double>& A, int m, int n) {
    std::vector<double> S(n * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int r = 0; r < m; ++r) s += A[r * n + i] * A[r * n + j];
            S[i * n + j] = s;
        }
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += sqr(S[i * n + j]);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::abs(S[p * n + q]) < 1e-300) continue;
                double theta = 0.5 * std::atan2(2.0 * S[p * n + q], S[q * n + q] - S[p * n + p]);
                double c = std::cos(theta), s = std::sin(theta);
                for (int k = 0; k < n; ++k) {
                    double a = S[p * n + k], b = S[q * n + k];
                    S[p * n + k] = c * a - s * b;
                    S[q * n + k] = s * a + c * b;
                }
                for (int k = 0; k < n; ++k) {
                    double a = S[k * n + p], b = S[k * n + q];
                    S[k * n + p] = c * a - s * b;
                    S[k * n + q] = s * a + c * b;
                }
            }
    }
    double lo = S[0];
    for (int i = 1; i < n; ++i) lo = std::min(lo, S[i * n + i]);
    return std::sqrt(std::max(0.0, lo));
}

}  // namespace thinlam::detail
