#pragma once

#include <complex>
#include <numbers>
#include <vector>

#include "thinlam/detail/common.hpp"

namespace thinlam::detail {

using cplx = std::complex<double>;

inline bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place 1-D transform of a contiguous line. Radix-2 iterative for powers
// of two, O(n^2) reference transform otherwise (fine at desk scale). Forward
// uses e^{-2 pi i jk/n}; the inverse is unscaled (callers divide by n).
inline void dft_contiguous(cplx* a, int n, bool inverse) {
    const double sign = inverse ? 1.0 : -1.0;
    if (is_pow2(n)) {
        for (int i = 1, j = 0; i < n; ++i) {
            int bit = n >> 1;
            for (; j & bit; bit >>= 1) j ^= bit;
            j ^= bit;
            if (i < j) std::swap(a[i], a[j]);
        }
        for (int len = 2; len <= n; len <<= 1) {
            double ang = sign * 2.0 * std::numbers::pi / len;
            cplx wl(std::cos(ang), std::sin(ang));
            for (int i = 0; i < n; i += len) {
                cplx w(1.0);
                for (int j = 0; j < len / 2; ++j) {
                    cplx u = a[i + j], v = a[i + j + len / 2] * w;
                    a[i + j] = u + v;
                    a[i + j + len / 2] = u - v;
                    w *= wl;
                }
            }
        }
        return;
    }
    std::vector<cplx> out(n, cplx(0.0));
    for (int k = 0; k < n; ++k)
        for (int j = 0; j < n; ++j) {
            double ang = sign * 2.0 * std::numbers::pi * j * k / n;
            out[k] += a[j] * cplx(std::cos(ang), std::sin(ang));
        }
    std::copy(out.begin(), out.end(), a);
}

// N-dimensional transform over a C-ordered array (last axis fastest).
// Inverse includes the 1/prod(dims) normalization.
inline void dft_nd(std::vector<cplx>& data, const std::vector<int>& dims, bool inverse) {
    const int N = int(dims.size());
    std::size_t total = 1;
    for (int d : dims) total *= std::size_t(d);
    internal_check(data.size() == total, "dft_nd: size mismatch");

    std::vector<std::size_t> strides(N);
    strides[N - 1] = 1;
    for (int a = N - 2; a >= 0; --a) strides[a] = strides[a + 1] * std::size_t(dims[a + 1]);

    std::vector<cplx> line;
    for (int axis = 0; axis < N; ++axis) {
        const int n = dims[axis];
        const std::size_t s = strides[axis];
        const std::size_t nlines = total / std::size_t(n);
        line.assign(n, cplx(0.0));
        for (std::size_t l = 0; l < nlines; ++l) {
            // decompose l into (outer, inner) around the axis
            std::size_t outer = l / s, inner = l % s;
            std::size_t base = outer * s * std::size_t(n) + inner;
            for (int j = 0; j < n; ++j) line[j] = data[base + std::size_t(j) * s];
            dft_contiguous(line.data(), n, inverse);
            for (int j = 0; j < n; ++j) data[base + std::size_t(j) * s] = line[j];
        }
    }
    if (inverse) {
        double scale = 1.0 / double(total);
        for (cplx& v : data) v *= scale;
    }
}

}  // namespace thinlam::detail
