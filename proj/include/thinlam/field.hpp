#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "thinlam/geometry.hpp"

namespace thinlam {

/// N-component cell-centered vector field tagged with the thickness parameter
/// eps of its constraint regime. Storage is component-major.
struct VectorField {
    GridGeometry geom;
    double epsilon = 1.0;
    std::vector<double> data;

    VectorField() = default;
    VectorField(GridGeometry g, double eps)
        : geom(std::move(g)), epsilon(eps), data(geom.cell_count() * geom.dims, 0.0) {
        detail::require(eps > 0.0, "VectorField: eps > 0 required");
    }

    std::size_t cells() const { return geom.cell_count(); }

    double& at(int comp, std::size_t cell) { return data[comp * cells() + cell]; }
    double at(int comp, std::size_t cell) const { return data[comp * cells() + cell]; }

    void value(std::size_t cell, std::span<double> out) const {
        for (int c = 0; c < geom.dims; ++c) out[c] = at(c, cell);
    }

    void set_value(std::size_t cell, std::span<const double> v) {
        for (int c = 0; c < geom.dims; ++c) at(c, cell) = v[c];
    }

    bool all_finite() const {
        return std::all_of(data.begin(), data.end(), [](double v) { return std::isfinite(v); });
    }
};

struct ScalarField {
    GridGeometry geom;
    std::vector<double> data;

    ScalarField() = default;
    explicit ScalarField(GridGeometry g) : geom(std::move(g)), data(geom.cell_count(), 0.0) {}
};

inline double max_abs(const ScalarField& f) {
    double m = 0.0;
    for (double v : f.data) m = std::max(m, std::abs(v));
    return m;
}

/// max over cells of the euclidean length of the value.
inline double sup_norm(const VectorField& u) {
    const std::size_t n = u.cells();
    double m = 0.0;
    for (std::size_t cell = 0; cell < n; ++cell) {
        double s = 0.0;
        for (int c = 0; c < u.geom.dims; ++c) s += detail::sqr(u.at(c, cell));
        m = std::max(m, s);
    }
    return std::sqrt(m);
}

/// Grid L^p norm (midpoint quadrature of |u|^p).
inline double lp_norm(const VectorField& u, double p) {
    const std::size_t n = u.cells();
    const double vol = u.geom.cell_volume();
    double s = 0.0;
    for (std::size_t cell = 0; cell < n; ++cell) {
        double q = 0.0;
        for (int c = 0; c < u.geom.dims; ++c) q += detail::sqr(u.at(c, cell));
        s += std::pow(q, 0.5 * p) * vol;
    }
    return std::pow(s, 1.0 / p);
}

inline VectorField linear_combination(double a, const VectorField& u, double b,
                                      const VectorField& v) {
    detail::require(u.geom.same_layout(v.geom), "linear_combination: grid mismatch");
    VectorField w = u;
    for (std::size_t i = 0; i < w.data.size(); ++i) w.data[i] = a * u.data[i] + b * v.data[i];
    return w;
}

inline double max_abs_diff(const VectorField& u, const VectorField& v) {
    detail::require(u.data.size() == v.data.size(), "max_abs_diff: size mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < u.data.size(); ++i)
        m = std::max(m, std::abs(u.data[i] - v.data[i]));
    return m;
}

}  // namespace thinlam
