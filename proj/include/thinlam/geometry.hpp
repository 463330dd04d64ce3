#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "thinlam/detail/common.hpp"

namespace thinlam {

/// Axis-aligned box, half-open [lo, hi) for membership tests.
struct Box {
    std::vector<double> lo, hi;

    Box() = default;
    Box(std::vector<double> l, std::vector<double> h) : lo(std::move(l)), hi(std::move(h)) {
        detail::require(lo.size() == hi.size(), "Box: lo/hi size mismatch");
        for (std::size_t a = 0; a < lo.size(); ++a)
            detail::require(lo[a] < hi[a], "Box: lo < hi required on every axis");
    }

    int dims() const { return static_cast<int>(lo.size()); }

    bool contains(std::span<const double> x) const {
        for (std::size_t a = 0; a < lo.size(); ++a)
            if (x[a] < lo[a] || x[a] >= hi[a]) return false;
        return true;
    }

    double volume() const {
        double v = 1.0;
        for (std::size_t a = 0; a < lo.size(); ++a) v *= hi[a] - lo[a];
        return v;
    }
};

/// Uniform cell-centered grid on omega x (0, thickness), omega an axis-aligned
/// box in R^{N-1}. The reference domain has thickness 1; fields transported to
/// the thin domain carry thickness = eps (see rescale_to_thin).
struct GridGeometry {
    int dims = 0;
    std::vector<double> omega_lo, omega_hi;  // N-1 entries
    std::vector<int> resolution;             // N entries, cells per axis
    double thickness = 1.0;

    GridGeometry() = default;

    GridGeometry(std::vector<double> lo, std::vector<double> hi, std::vector<int> res,
                 double thick = 1.0)
        : dims(static_cast<int>(res.size())),
          omega_lo(std::move(lo)),
          omega_hi(std::move(hi)),
          resolution(std::move(res)),
          thickness(thick) {
        detail::require(dims >= 2, "GridGeometry: dims >= 2 required");
        detail::require(static_cast<int>(omega_lo.size()) == dims - 1 &&
                            static_cast<int>(omega_hi.size()) == dims - 1,
                        "GridGeometry: omega box must have dims-1 axes");
        for (int a = 0; a < dims - 1; ++a)
            detail::require(omega_lo[a] < omega_hi[a], "GridGeometry: empty omega side");
        for (int a = 0; a < dims; ++a)
            detail::require(resolution[a] >= 1, "GridGeometry: resolution >= 1 per axis");
        detail::require(thickness > 0.0, "GridGeometry: thickness > 0");
    }

    /// Convenience: unit square/cube omega = (0,1)^{N-1}.
    static GridGeometry unit(int dims, std::vector<int> res) {
        return GridGeometry(std::vector<double>(dims - 1, 0.0), std::vector<double>(dims - 1, 1.0),
                            std::move(res));
    }

    double lo(int a) const { return a + 1 < dims ? omega_lo[a] : 0.0; }
    double hi(int a) const { return a + 1 < dims ? omega_hi[a] : thickness; }
    double side(int a) const { return hi(a) - lo(a); }
    double spacing(int a) const { return side(a) / resolution[a]; }

    std::size_t cell_count() const {
        std::size_t n = 1;
        for (int a = 0; a < dims; ++a) n *= static_cast<std::size_t>(resolution[a]);
        return n;
    }

    double cell_volume() const {
        double v = 1.0;
        for (int a = 0; a < dims; ++a) v *= spacing(a);
        return v;
    }

    // Row-major (C order): last axis fastest.
    std::vector<std::size_t> strides() const {
        std::vector<std::size_t> s(dims);
        s[dims - 1] = 1;
        for (int a = dims - 2; a >= 0; --a)
            s[a] = s[a + 1] * static_cast<std::size_t>(resolution[a + 1]);
        return s;
    }

    void cell_center(std::span<const int> idx, std::span<double> x) const {
        for (int a = 0; a < dims; ++a) x[a] = lo(a) + (idx[a] + 0.5) * spacing(a);
    }

    bool same_layout(const GridGeometry& o) const {
        if (dims != o.dims || resolution != o.resolution) return false;
        for (int a = 0; a < dims; ++a)
            if (std::abs(lo(a) - o.lo(a)) > 1e-14 || std::abs(hi(a) - o.hi(a)) > 1e-14)
                return false;
        return true;
    }
};

/// Iterate all cells in layout order; f(cell, idx) with idx the multi-index.
template <class F>
void for_each_cell(const GridGeometry& g, F&& f) {
    std::vector<int> idx(g.dims, 0);
    const std::size_t n = g.cell_count();
    for (std::size_t cell = 0; cell < n; ++cell) {
        f(cell, std::span<const int>(idx));
        for (int a = g.dims - 1; a >= 0; --a) {
            if (++idx[a] < g.resolution[a]) break;
            idx[a] = 0;
        }
    }
}

}  // namespace thinlam
