#pragma once

#include <cmath>
#include <vector>

#include "thinlam/field.hpp"

namespace thinlam {

namespace detail {

// Forward difference along one axis, one-sided (backward) at the top layer,
// optionally periodic. Writes (D u_comp)/h into out.
inline void add_forward_diff(const VectorField& u, int comp, int axis, bool periodic,
                             double weight, ScalarField& out) {
    const auto strides = u.geom.strides();
    const int n = u.geom.resolution[axis];
    const double h = u.geom.spacing(axis);
    const std::size_t s = strides[axis];
    require(n >= 2, "div: resolution >= 2 required on every axis");
    for_each_cell(u.geom, [&](std::size_t cell, std::span<const int> idx) {
        double d;
        if (idx[axis] + 1 < n) {
            d = u.at(comp, cell + s) - u.at(comp, cell);
        } else if (periodic) {
            d = u.at(comp, cell - static_cast<std::size_t>(n - 1) * s) - u.at(comp, cell);
        } else {
            d = u.at(comp, cell) - u.at(comp, cell - s);
        }
        out.data[cell] += weight * d / h;
    });
}

}  // namespace detail

/// Horizontal part of the divergence: sum_{a < N-1} D+_a u^a.
inline ScalarField div_prime(const VectorField& u, bool periodic = false) {
    ScalarField out(u.geom);
    for (int a = 0; a + 1 < u.geom.dims; ++a)
        detail::add_forward_diff(u, a, a, periodic, 1.0, out);
    return out;
}

/// Anisotropic divergence div' u' + (1/eps) D+_N u^N with forward differences,
/// one value per cell; one-sided at the top face, periodic option for
/// torus-embedded fields.
inline ScalarField div_eps(const VectorField& u, bool periodic = false) {
    ScalarField out = div_prime(u, periodic);
    const int last = u.geom.dims - 1;
    detail::add_forward_diff(u, last, last, periodic, 1.0 / u.epsilon, out);
    return out;
}

/// Max of |D+_N u^N| over all forward-difference stencils (interior layers).
inline double vertical_derivative_sup(const VectorField& u) {
    const int last = u.geom.dims - 1;
    const auto strides = u.geom.strides();
    const int n = u.geom.resolution[last];
    const double h = u.geom.spacing(last);
    const std::size_t s = strides[last];
    double m = 0.0;
    for_each_cell(u.geom, [&](std::size_t cell, std::span<const int> idx) {
        if (idx[last] + 1 < n)
            m = std::max(m, std::abs(u.at(last, cell + s) - u.at(last, cell)) / h);
    });
    return m;
}

/// Membership in U_0 = { D+_N u^N = 0 } at the given tolerance.
inline bool is_in_U0(const VectorField& u, double tol) {
    detail::require(tol >= 0.0, "is_in_U0: tol >= 0");
    return vertical_derivative_sup(u) <= tol;
}

/// Transport a field on the unit-thickness reference domain to the thin domain
/// omega x (0, eps): v(y', y_N) = u(y', y_N / eps). Cell centers map onto cell
/// centers, so values are carried over unchanged and only the geometry's
/// last-axis extent is scaled. The weighted quadrature identity
/// (1/eps) * thin integral == reference integral is then exact.
inline VectorField rescale_to_thin(const VectorField& u, double eps) {
    detail::require(eps > 0.0, "rescale_to_thin: eps > 0");
    VectorField v = u;
    v.geom.thickness = u.geom.thickness * eps;
    v.epsilon = eps;
    return v;
}

inline VectorField rescale_to_unit(const VectorField& v, double eps) {
    detail::require(eps > 0.0, "rescale_to_unit: eps > 0");
    VectorField u = v;
    u.geom.thickness = v.geom.thickness / eps;
    return u;
}

namespace detail {

// Normalized bump kernel taps for one axis: half-width w cells, weights from
// the standard C_c^infty bump exp(-1/(1-t^2)) sampled at tap centers.
inline std::vector<double> bump_taps(int w) {
    std::vector<double> taps(2 * w + 1);
    double sum = 0.0;
    for (int k = -w; k <= w; ++k) {
        double t = static_cast<double>(k) / (w + 1);
        taps[k + w] = std::exp(-1.0 / (1.0 - t * t));
        sum += taps[k + w];
    }
    for (double& t : taps) t /= sum;
    return taps;
}

// 1-D convolution along `axis` with zero extension outside the index range.
inline void convolve_axis_zero_ext(const GridGeometry& g, std::vector<double>& vals, int axis,
                                   const std::vector<double>& taps) {
    const int n = g.resolution[axis];
    const int w = (static_cast<int>(taps.size()) - 1) / 2;
    const std::ptrdiff_t s = static_cast<std::ptrdiff_t>(g.strides()[axis]);
    std::vector<double> out(vals.size(), 0.0);
    for_each_cell(g, [&](std::size_t cell, std::span<const int> idx) {
        double acc = 0.0;
        for (int k = -w; k <= w; ++k) {
            int j = idx[axis] + k;
            if (j < 0 || j >= n) continue;  // zero extension
            acc += taps[k + w] * vals[static_cast<std::ptrdiff_t>(cell) + k * s];
        }
        out[cell] = acc;
    });
    vals.swap(out);
}

}  // namespace detail

/// Smoothing that preserves U_0 membership exactly. The horizontal components
/// are extended by zero outside Omega and convolved along every axis; u^N is
/// extended by zero outside omega, constantly in x_N, and convolved along the
/// horizontal axes only (the vertical convolution of a column-constant
/// function is the identity). Radii smaller than one cell on every axis leave
/// the field unchanged.
inline VectorField mollify_U0(const VectorField& u, double radius) {
    detail::require(radius > 0.0, "mollify_U0: radius > 0");
    detail::require(is_in_U0(u, 0.0), "mollify_U0: input must satisfy is_in_U0 at tol 0");
    const int N = u.geom.dims;

    std::vector<int> halfwidth(N);
    bool any = false;
    for (int a = 0; a < N; ++a) {
        halfwidth[a] = static_cast<int>(std::floor(radius / u.geom.spacing(a)));
        if (halfwidth[a] > 0) any = true;
    }
    if (!any) return u;  // sub-cell radius: nothing to do

    VectorField out = u;
    const std::size_t ncells = u.geom.cell_count();

    // Horizontal components: zero extension on all axes.
    for (int c = 0; c + 1 < N; ++c) {
        std::vector<double> vals(u.data.begin() + c * ncells, u.data.begin() + (c + 1) * ncells);
        for (int a = 0; a < N; ++a) {
            if (halfwidth[a] == 0) continue;
            auto taps = detail::bump_taps(halfwidth[a]);
            detail::convolve_axis_zero_ext(u.geom, vals, a, taps);
        }
        std::copy(vals.begin(), vals.end(), out.data.begin() + c * ncells);
    }

    // u^N: constant along columns; smooth the bottom layer over omega and
    // broadcast. Convolution along x_N is a no-op on the constant extension.
    {
        std::vector<double> vals(u.data.begin() + (N - 1) * ncells, u.data.end());
        for (int a = 0; a + 1 < N; ++a) {
            if (halfwidth[a] == 0) continue;
            auto taps = detail::bump_taps(halfwidth[a]);
            detail::convolve_axis_zero_ext(u.geom, vals, a, taps);
        }
        // Re-broadcast the bottom layer to kill accumulated rounding skew.
        const auto strides = u.geom.strides();
        const std::size_t sN = strides[N - 1];
        for_each_cell(u.geom, [&](std::size_t cell, std::span<const int> idx) {
            std::size_t base = cell - idx[N - 1] * sN;
            out.at(N - 1, cell) = vals[base];
        });
    }
    return out;
}

/// Piecewise-constant approximation on a box partition: per box and component,
/// value = inf of min(u,0) + sup of max(u,0) over the box. Keeps |out| <= |u|
/// componentwise and preserves U_0 membership for product partitions
/// {omega_h} x {J_k}.
inline VectorField piecewise_constant_approx(const VectorField& u, const std::vector<Box>& boxes) {
    const int N = u.geom.dims;
    for (const Box& b : boxes)
        detail::require(b.dims() == N, "piecewise_constant_approx: box dimension mismatch");

    const std::size_t ncells = u.geom.cell_count();
    std::vector<int> owner(ncells, -1);
    std::vector<double> x(N);
    for_each_cell(u.geom, [&](std::size_t cell, std::span<const int> idx) {
        u.geom.cell_center(idx, x);
        for (std::size_t b = 0; b < boxes.size(); ++b) {
            if (!boxes[b].contains(x)) continue;
            detail::require(owner[cell] < 0,
                            "piecewise_constant_approx: overlapping boxes (invalid partition)");
            owner[cell] = static_cast<int>(b);
        }
        detail::require(owner[cell] >= 0,
                        "piecewise_constant_approx: cell not covered (invalid partition)");
    });

    VectorField out = u;
    for (int c = 0; c < N; ++c) {
        std::vector<double> neg(boxes.size(), 0.0), pos(boxes.size(), 0.0);
        for (std::size_t cell = 0; cell < ncells; ++cell) {
            double v = u.at(c, cell);
            int b = owner[cell];
            neg[b] = std::min(neg[b], v);
            pos[b] = std::max(pos[b], v);
        }
        for (std::size_t cell = 0; cell < ncells; ++cell)
            out.at(c, cell) = neg[owner[cell]] + pos[owner[cell]];
    }
    return out;
}

}  // namespace thinlam
