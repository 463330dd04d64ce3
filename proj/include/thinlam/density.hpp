#pragma once

#include <functional>
#include <limits>
#include <sstream>

#include "thinlam/field.hpp"

namespace thinlam {

/// Energy density f(x, mu) with declared p-growth structure:
///   |f(x,mu)| <= C|mu|^p + C   and   f(x,mu) >= (1/C)|mu|^p - C.
/// Optional piecewise_boxes declare a partition on which x -> f(x,.) is
/// constant (the only supported form of x-dependence).
struct Density {
    std::function<double(std::span<const double> x, std::span<const double> mu)> eval;
    double p = 2.0;
    double C = 1.0;
    std::vector<Box> piecewise_boxes;
};

/// f(mu) = |mu|^p, C = 1.
inline Density pnorm_density(double p) {
    detail::require(p > 1.0, "pnorm_density: p > 1 required");
    Density f;
    f.p = p;
    f.C = 1.0;
    f.eval = [p](std::span<const double>, std::span<const double> mu) {
        return std::pow(detail::norm2(mu), p);
    };
    return f;
}

/// Product-of-wells density f(mu) = prod_j |mu - zeta_j|^2 with effective
/// growth exponent p = 2M. When C <= 0 a certified constant is derived from
/// the well radius R = max|zeta_j|:
///   upper:  |mu - z|^2 <= 2(1+R^2)(|mu|^2+1)  =>  f <= (4(1+R^2))^M (|mu|^p+1)/2
///   lower:  f >= (|mu|/2)^p for |mu| >= 2R, and C >= max(4, (2R)^2)^M closes
///           the bounded region.
struct MultiWellDensity {
    std::vector<Point> wells;

    double operator()(std::span<const double> mu) const {
        double f = 1.0;
        for (const Point& z : wells) {
            double d = 0.0;
            for (std::size_t c = 0; c < z.size(); ++c) d += detail::sqr(mu[c] - z[c]);
            f *= d;
        }
        return f;
    }
};

inline Density multiwell_density(std::vector<Point> wells, double C = 0.0) {
    detail::require(!wells.empty(), "multiwell_density: needs at least one well");
    const std::size_t N = wells[0].size();
    for (const Point& z : wells)
        detail::require(z.size() == N, "multiwell_density: well dimension mismatch");
    const int M = static_cast<int>(wells.size());
    if (C <= 0.0) {
        double R = 0.0;
        for (const Point& z : wells) R = std::max(R, detail::norm2(z));
        C = std::pow(std::max(4.0 * (1.0 + R * R), std::max(4.0, detail::sqr(2.0 * R))), M);
    }
    Density f;
    f.p = 2.0 * M;
    f.C = C;
    f.eval = [w = MultiWellDensity{std::move(wells)}](std::span<const double>,
                                                      std::span<const double> mu) {
        return w(mu);
    };
    return f;
}

/// The planar three-well example: zeta_1 = (0,-1), zeta_2 = (1,0),
/// zeta_3 = (0,1), p = 6. C = 64 verifies against the structure check on the
/// |mu| <= 4 lattice (brute force: max f/(|mu|^6+1) there is ~0.64, and
/// f >= |mu|^6/64 - 64 holds with room).
inline Density three_well_density() {
    return multiwell_density({{0.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}}, 64.0);
}

inline std::vector<Point> three_well_points() {
    return {{0.0, -1.0}, {1.0, 0.0}, {0.0, 1.0}};
}

/// F_eps(u) = integral of f(x, u(x)) by midpoint quadrature; exact for
/// piecewise-constant f and u aligned with the grid.
inline double energy(const Density& f, const VectorField& u) {
    const int N = u.geom.dims;
    const double vol = u.geom.cell_volume();
    double sum = 0.0;
    std::vector<double> x(N), mu(N);
    for_each_cell(u.geom, [&](std::size_t cell, std::span<const int> idx) {
        u.geom.cell_center(idx, x);
        u.value(cell, mu);
        double v = f.eval(x, mu);
        if (!std::isfinite(v)) {
            std::ostringstream os;
            os << "energy: non-finite density value at cell " << cell;
            throw std::runtime_error(os.str());
        }
        sum += v * vol;
    });
    return sum;
}

/// Worst-case margins of the growth and coercivity inequalities over a sample
/// lattice; negative margin = violation.
struct StructureReport {
    double growth_margin = std::numeric_limits<double>::infinity();
    double coercivity_margin = std::numeric_limits<double>::infinity();
    bool ok() const { return growth_margin >= 0.0 && coercivity_margin >= 0.0; }
};

inline StructureReport check_structure(const Density& f, const std::vector<Point>& xs,
                                       double mu_radius, int pts_per_axis) {
    detail::require(!xs.empty() && pts_per_axis >= 2 && mu_radius > 0.0,
                    "check_structure: nonempty lattice required");
    const int N = static_cast<int>(xs[0].size());
    StructureReport rep;
    std::vector<int> idx(N, 0);
    std::vector<double> mu(N);
    const std::size_t total = [&] {
        std::size_t t = 1;
        for (int a = 0; a < N; ++a) t *= pts_per_axis;
        return t;
    }();
    for (const Point& x : xs) {
        std::fill(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < total; ++i) {
            for (int a = 0; a < N; ++a)
                mu[a] = -mu_radius + 2.0 * mu_radius * idx[a] / (pts_per_axis - 1);
            double v = f.eval(x, mu);
            double powp = std::pow(detail::norm2(mu), f.p);
            rep.growth_margin = std::min(rep.growth_margin, f.C * powp + f.C - std::abs(v));
            rep.coercivity_margin = std::min(rep.coercivity_margin, v - (powp / f.C - f.C));
            for (int a = N - 1; a >= 0; --a) {
                if (++idx[a] < pts_per_axis) break;
                idx[a] = 0;
            }
        }
    }
    return rep;
}

}  // namespace thinlam
