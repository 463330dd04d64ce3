#pragma once

#include <cmath>

#include "thinlam/convexify.hpp"
#include "thinlam/grid.hpp"

namespace thinlam {

/// Periodic two-state profile with period 1/k: value za on (0, gamma_a/k]
/// within each period, zb on the rest. Period mean is
/// gamma_a za + (1-gamma_a) zb.
struct TwoPointProfile {
    Point za, zb;
    double gamma_a = 0.5;
    int k = 1;

    const Point& value(double t) const {
        double frac = t * k - std::floor(t * k);
        return (frac > 0.0 && frac <= gamma_a) ? za : zb;
    }
};

inline TwoPointProfile two_point_profile(Point za, Point zb, double gamma_a, int k) {
    detail::require(gamma_a > 0.0 && gamma_a < 1.0, "two_point_profile: gamma_a in (0,1)");
    detail::require(k >= 1, "two_point_profile: k >= 1");
    detail::require(za.size() == zb.size(), "two_point_profile: dimension mismatch");
    return TwoPointProfile{std::move(za), std::move(zb), gamma_a, k};
}

/// Slab-relative vertical cutoff: support in I^{[w]}, plateau I^{[2w]},
/// quintic ramps of width w. Degenerate (identically zero) when the interval
/// cannot hold both ramps.
struct VerticalCutoff {
    double lo = 0.0, hi = 1.0, w = 0.0;

    bool degenerate() const { return hi - lo <= 4.0 * w || w <= 0.0; }

    double eval_rel(double t) const {
        if (degenerate()) return 0.0;
        if (t <= lo + w || t >= hi - w) return 0.0;
        if (t < lo + 2.0 * w) return detail::smoothstep((t - lo - w) / w);
        if (t > hi - 2.0 * w) return detail::smoothstep((hi - w - t) / w);
        return 1.0;
    }

    /// 1-periodization, evaluated at slab coordinate s = x_N / eps.
    double eval_periodic(double s) const { return eval_rel(s - std::floor(s)); }

    double max_gradient() const {
        return degenerate() ? 0.0 : detail::kSmoothstepMaxSlope / w;
    }
};

/// Horizontal cutoff over a box in omega: quintic ramp of the given absolute
/// width inward from the box boundary, independent of x_N.
struct BoxCutoff {
    Box box;  // N-1 dims
    double ramp = 0.0;

    double eval(std::span<const double> xprime) const {
        double d = std::numeric_limits<double>::infinity();
        for (int a = 0; a < box.dims(); ++a)
            d = std::min(d, std::min(xprime[a] - box.lo[a], box.hi[a] - xprime[a]));
        if (d <= 0.0) return 0.0;
        return detail::smoothstep(d / ramp);
    }

    double max_gradient() const { return detail::kSmoothstepMaxSlope / ramp; }

    bool feasible() const {
        for (int a = 0; a < box.dims(); ++a)
            if (box.hi[a] - box.lo[a] <= 2.0 * ramp) return false;
        return true;
    }
};

namespace detail {

// Deterministic unit vector perpendicular to z1 - z2: Gram-Schmidt of the
// canonical basis vector with the smallest index not parallel to the
// difference.
inline Point perpendicular_direction(const Point& z1, const Point& z2) {
    const int N = int(z1.size());
    Point d(N);
    for (int a = 0; a < N; ++a) d[a] = z1[a] - z2[a];
    double dn = norm2(d);
    require(dn > 0.0, "laminate: degenerate pair (z1 == z2)");
    for (double& v : d) v /= dn;
    for (int a = 0; a < N; ++a) {
        Point r(N, 0.0);
        r[a] = 1.0;
        double c = d[a];
        for (int b = 0; b < N; ++b) r[b] -= c * d[b];
        double rn = norm2(r);
        if (rn > 1e-9) {
            for (double& v : r) v /= rn;
            return r;
        }
    }
    throw std::runtime_error("laminate: no perpendicular direction found");
}

}  // namespace detail

/// Oscillating two-point field with anisotropic phase: within each eps-slab a
/// vertical cutoff psi selects I^{[w]}, and the profile oscillates along a
/// fixed unit direction perpendicular to z1 - z2 in (x'/eps^2, x_N/eps)
/// coordinates. The anisotropy makes the jump set's scaled normal orthogonal
/// to the jump, so the distributional div_eps of the raw laminate vanishes.
inline VectorField ub1_field(const Point& z1, const Point& z2, double gamma1, double I_lo,
                             double I_hi, double eps, int k, const GridGeometry& geom,
                             double ramp_rel = 0.0) {
    const int N = geom.dims;
    detail::require(int(z1.size()) == N && int(z2.size()) == N, "ub1_field: dimension mismatch");
    detail::require(std::abs(z1[N - 1] - z2[N - 1]) > 0.0,
                    "ub1_field: last components must differ");
    Point mean(N);
    for (int a = 0; a < N; ++a) mean[a] = gamma1 * z1[a] + (1.0 - gamma1) * z2[a];
    detail::require(detail::norm2(mean) <= 1e-9, "ub1_field: gamma1 z1 + gamma2 z2 must vanish");
    detail::require(0.0 <= I_lo && I_lo < I_hi && I_hi <= 1.0, "ub1_field: I inside (0,1)");

    const Point perp = detail::perpendicular_direction(z1, z2);
    const auto w = two_point_profile(z1, z2, gamma1, k);
    const VerticalCutoff psi{I_lo, I_hi, ramp_rel > 0.0 ? ramp_rel : eps};

    VectorField v(geom, eps);
    std::vector<double> x(N);
    for_each_cell(geom, [&](std::size_t cell, std::span<const int> idx) {
        geom.cell_center(idx, x);
        double cut = psi.eval_periodic(x[N - 1] / eps);
        if (cut == 0.0) return;
        double t = x[N - 1] / eps * perp[N - 1];
        for (int a = 0; a + 1 < N; ++a) t += x[a] / (eps * eps) * perp[a];
        const Point& val = w.value(t);
        for (int a = 0; a < N; ++a) v.at(a, cell) = cut * val[a];
    });
    return v;
}

/// Full laminate recipe in deviation (mean-zero) coordinates: points with
/// sum theta_j points_j = 0, the pairwise split data, the interval partition
/// carrying |I_ij| = alpha_ij in lexicographic (i,j) order, the target slab J,
/// the oscillation count and the vertical cutoff width.
struct LaminatePlan {
    std::vector<Point> points;
    std::vector<double> weights;
    std::vector<std::vector<double>> alpha, beta;
    std::vector<std::vector<Point>> xbar;

    struct Piece {
        int i, j;
        double lo, hi;
    };
    std::vector<Piece> intervals;

    double J_lo = 0.0, J_hi = 1.0;
    double eps = 0.1;
    int k = 8;
    double cutoff_rel_width = 0.0;  // defaults to eps when 0

    int m() const { return int(points.size()) - 1; }
};

/// Assemble the plan from a decomposition and its pairwise split by moving to
/// deviation coordinates (subtracting the base point, which puts the split
/// hyperplane at height zero).
inline LaminatePlan make_plan(const CaratheodoryDecomposition& dec, const PairwiseSplit& sp,
                              double J_lo, double J_hi, double eps, int k,
                              double cutoff_rel_width = 0.0) {
    detail::require(0.0 <= J_lo && J_lo < J_hi && J_hi <= 1.0, "make_plan: J inside (0,1)");
    detail::require(eps > 0.0 && k >= 1, "make_plan: eps > 0, k >= 1");
    const int N = int(dec.xi.size());
    const int m = dec.m();

    LaminatePlan plan;
    plan.weights = dec.weights;
    plan.alpha = sp.alpha;
    plan.beta = sp.beta;
    plan.J_lo = J_lo;
    plan.J_hi = J_hi;
    plan.eps = eps;
    plan.k = k;
    plan.cutoff_rel_width = cutoff_rel_width > 0.0 ? cutoff_rel_width : eps;

    plan.points.assign(m + 1, Point(N));
    for (int j = 0; j <= m; ++j)
        for (int a = 0; a < N; ++a) plan.points[j][a] = dec.points[j][a] - dec.xi[a];

    plan.xbar.assign(m + 1, std::vector<Point>(m + 1));
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j) {
            if (i == j) {
                plan.xbar[j][j] = plan.points[j];
                continue;
            }
            if (sp.xbar[i][j].empty()) continue;
            Point q(N);
            for (int a = 0; a < N; ++a) q[a] = sp.xbar[i][j][a] - dec.xi[a];
            q[N - 1] = 0.0;  // on the centered hyperplane exactly
            plan.xbar[i][j] = std::move(q);
        }

    Point mean(N, 0.0);
    for (int j = 0; j <= m; ++j)
        for (int a = 0; a < N; ++a) mean[a] += plan.weights[j] * plan.points[j][a];
    detail::internal_check(detail::norm2(mean) <= 1e-9, "make_plan: points not centered");

    double cum = 0.0;
    for (int i = 0; i <= m; ++i)
        for (int j = i; j <= m; ++j) {
            double a = plan.alpha[i][j];
            if (a <= 0.0) continue;
            plan.intervals.push_back({i, j, cum, cum + a});
            cum += a;
        }
    detail::internal_check(std::abs(cum - 1.0) <= 1e-9, "make_plan: interval lengths != 1");
    plan.intervals.back().hi = 1.0;
    return plan;
}

struct Ub2Fields {
    VectorField y, z;
    bool empty_slab = false;  // J too thin to contain one eps-cell
    double K_lo = 0.0, K_hi = 0.0;
};

/// Assemble the slab field y (piecewise constant per eps-slab, exactly
/// vertically constant and horizontally divergence-free) and the oscillating
/// field z (superposition of two-point laminates per interval piece), both
/// restricted to the union K_n of whole eps-cells inside J.
inline Ub2Fields ub2_assemble(const LaminatePlan& plan, const GridGeometry& geom) {
    const int N = geom.dims;
    Ub2Fields out{VectorField(geom, plan.eps), VectorField(geom, plan.eps)};

    const double eps = plan.eps;
    long zmin = std::lround(std::ceil(plan.J_lo / eps - 1e-12));
    long zmax = std::lround(std::floor(plan.J_hi / eps + 1e-12)) - 1;
    if (zmax < zmin) {
        out.empty_slab = true;
        return out;
    }
    out.K_lo = zmin * eps;
    out.K_hi = (zmax + 1) * eps;

    // Per-piece oscillators for the off-diagonal pairs.
    struct PieceField {
        TwoPointProfile w;
        VerticalCutoff psi;
        Point perp;
        bool active = false;
    };
    std::vector<PieceField> pf(plan.intervals.size());
    for (std::size_t p = 0; p < plan.intervals.size(); ++p) {
        const auto& piece = plan.intervals[p];
        if (piece.i == piece.j) continue;
        Point z1(N), z2(N);
        for (int a = 0; a < N; ++a) {
            z1[a] = plan.points[piece.i][a] - plan.xbar[piece.i][piece.j][a];
            z2[a] = plan.points[piece.j][a] - plan.xbar[piece.i][piece.j][a];
        }
        double gamma1 = plan.beta[piece.j][piece.i];
        pf[p].w = two_point_profile(z1, z2, gamma1, plan.k);
        pf[p].psi = VerticalCutoff{piece.lo, piece.hi, plan.cutoff_rel_width};
        pf[p].perp = detail::perpendicular_direction(z1, z2);
        pf[p].active = true;
    }

    std::vector<double> x(N);
    for_each_cell(geom, [&](std::size_t cell, std::span<const int> idx) {
        geom.cell_center(idx, x);
        double xN = x[N - 1];
        if (xN < out.K_lo || xN >= out.K_hi) return;
        double s = xN / eps;
        double rel = s - std::floor(s);
        for (std::size_t p = 0; p < plan.intervals.size(); ++p) {
            const auto& piece = plan.intervals[p];
            if (rel < piece.lo || rel >= piece.hi) continue;
            const Point& ybar = plan.xbar[piece.i][piece.j];
            for (int a = 0; a < N; ++a) out.y.at(a, cell) = ybar[a];
            if (pf[p].active) {
                double cut = pf[p].psi.eval_periodic(s);
                if (cut > 0.0) {
                    double t = s * pf[p].perp[N - 1];
                    for (int a = 0; a + 1 < N; ++a) t += x[a] / (eps * eps) * pf[p].perp[a];
                    const Point& val = pf[p].w.value(t);
                    for (int a = 0; a < N; ++a) out.z.at(a, cell) = cut * val[a];
                }
            }
            break;
        }
    });
    return out;
}

/// Replace u^N by the discrete vertical antiderivative of -eps div' u',
/// starting from the bottom layer. Because the accumulation uses the same
/// forward-difference div' that div_eps measures, the result has exactly zero
/// discrete div_eps at every forward-difference stencil.
inline VectorField corrector(const VectorField& u, double eps, double tol = 0.0) {
    detail::require(eps > 0.0, "corrector: eps > 0");
    detail::require(is_in_U0(u, tol), "corrector: input must have discrete d_N u^N = 0");
    const int N = u.geom.dims;
    const auto strides = u.geom.strides();
    const std::size_t sN = strides[N - 1];
    const int nN = u.geom.resolution[N - 1];
    const double hN = u.geom.spacing(N - 1);

    ScalarField divp = div_prime(u);
    VectorField out = u;
    out.epsilon = eps;
    for_each_cell(u.geom, [&](std::size_t cell, std::span<const int> idx) {
        if (idx[N - 1] != 0) return;  // column start
        double acc = u.at(N - 1, cell);
        std::size_t c = cell;
        for (int j = 0; j < nN; ++j, c += sN) {
            out.at(N - 1, c) = acc;
            acc -= eps * hN * divp.data[c];
        }
    });
    return out;
}

/// Max |div_eps| over forward-difference stencils only (interior layers).
inline double div_eps_forward_sup(const VectorField& u) {
    ScalarField d = div_eps(u);
    const int N = u.geom.dims;
    const int nN = u.geom.resolution[N - 1];
    double m = 0.0;
    for_each_cell(u.geom, [&](std::size_t cell, std::span<const int> idx) {
        if (idx[N - 1] + 1 >= nN) return;
        m = std::max(m, std::abs(d.data[cell]));
    });
    return m;
}

/// Multiply by the horizontal box cutoff with explicit ramp width.
inline VectorField horizontal_cutoff_width(const VectorField& u, const Box& omega_box,
                                           double ramp) {
    const int N = u.geom.dims;
    detail::require(omega_box.dims() == N - 1, "horizontal_cutoff: box must live in omega");
    BoxCutoff eta{omega_box, ramp};
    detail::require(eta.feasible(),
                    "horizontal_cutoff: cutoff-infeasible (ramp wider than box; refine eps)");
    VectorField out = u;
    std::vector<double> x(N);
    for_each_cell(u.geom, [&](std::size_t cell, std::span<const int> idx) {
        u.geom.cell_center(idx, x);
        double e = eta.eval(std::span<const double>(x.data(), N - 1));
        for (int a = 0; a < N; ++a) out.at(a, cell) = e * u.at(a, cell);
    });
    return out;
}

/// Spec-form horizontal cutoff: ramp width chosen so the cutoff slope obeys
/// |grad eta| <= eps^{-1/2} / (K (|u|_inf + 1)).
inline VectorField horizontal_cutoff(const VectorField& u, const Box& omega_box, double K,
                                     double eps) {
    detail::require(K > 0.0 && eps > 0.0, "horizontal_cutoff: K, eps > 0");
    const double ramp =
        detail::kSmoothstepMaxSlope * K * (sup_norm(u) + 1.0) * std::sqrt(eps);
    return horizontal_cutoff_width(u, omega_box, ramp);
}

struct VolumeFractions {
    std::vector<double> fraction;
    double remainder = 0.0;
};

/// Fraction of cells within tol (euclidean) of each reference value; the rest
/// lands in the remainder bucket.
inline VolumeFractions volume_fractions(const VectorField& u, const std::vector<Point>& values,
                                        double tol) {
    const int N = u.geom.dims;
    for (std::size_t a = 0; a < values.size(); ++a)
        for (std::size_t b = a + 1; b < values.size(); ++b) {
            double d = 0.0;
            for (int c = 0; c < N; ++c) d += detail::sqr(values[a][c] - values[b][c]);
            detail::require(std::sqrt(d) > 2.0 * tol,
                            "volume_fractions: values not separated beyond 2 tol");
        }
    VolumeFractions vf;
    vf.fraction.assign(values.size(), 0.0);
    const double w = 1.0 / double(u.cells());
    std::vector<double> val(N);
    for (std::size_t cell = 0; cell < u.cells(); ++cell) {
        u.value(cell, val);
        bool hit = false;
        for (std::size_t a = 0; a < values.size() && !hit; ++a) {
            double d = 0.0;
            for (int c = 0; c < N; ++c) d += detail::sqr(val[c] - values[a][c]);
            if (std::sqrt(d) <= tol) {
                vf.fraction[a] += w;
                hit = true;
            }
        }
        if (!hit) vf.remainder += w;
    }
    return vf;
}

/// The planar counterexample sequence: wells (0,1)/(0,-1) oscillating in x_1
/// at scale eps on the lower half, shut off vertically by phi(2 x_2) with
/// plateau [margin, 1-margin] (margin <= eps keeps phi = 1 on [eps, 1-eps])
/// and quintic ramps of width `ramp` below/above the plateau.
struct Ex2Params {
    double eps;
    int k;
    double margin = 0.0;  // defaults to eps
    double ramp = 0.0;    // defaults to margin / 2

    double margin_t() const { return margin > 0.0 ? margin : eps; }
    double ramp_t() const { return ramp > 0.0 ? ramp : 0.5 * margin_t(); }

    double phi(double t) const {
        const double m = margin_t(), r = ramp_t();
        if (t <= m - r || t >= 1.0 - m + r) return 0.0;
        if (t < m) return detail::smoothstep((t - (m - r)) / r);
        if (t > 1.0 - m) return detail::smoothstep(((1.0 - m + r) - t) / r);
        return 1.0;
    }

    double phi_dot(double t) const {
        const double m = margin_t(), r = ramp_t();
        if (t <= m - r || t >= 1.0 - m + r) return 0.0;
        if (t < m) return detail::smoothstep_deriv((t - (m - r)) / r) / r;
        if (t > 1.0 - m) return -detail::smoothstep_deriv(((1.0 - m + r) - t) / r) / r;
        return 0.0;
    }
};

inline VectorField ex2_sequence(const Ex2Params& par, const GridGeometry& geom) {
    detail::require(geom.dims == 2, "ex2_sequence: N = 2 required");
    detail::require(std::abs(geom.lo(0)) < 1e-12 && std::abs(geom.hi(0) - 1.0) < 1e-12 &&
                        std::abs(geom.thickness - 1.0) < 1e-12,
                    "ex2_sequence: geometry must cover (0,1)^2");
    detail::require(par.margin_t() <= par.eps + 1e-12,
                    "ex2_sequence: plateau must cover [eps, 1-eps]");
    detail::require(par.ramp_t() < par.margin_t(), "ex2_sequence: ramp must fit below plateau");

    const auto w = two_point_profile({0.0, 1.0}, {0.0, -1.0}, 0.5, par.k);
    VectorField v(geom, par.eps);
    std::vector<double> x(2);
    for_each_cell(geom, [&](std::size_t cell, std::span<const int> idx) {
        geom.cell_center(idx, x);
        if (x[1] >= 0.5) return;
        double cut = par.phi(2.0 * x[1]);
        if (cut == 0.0) return;
        const Point& val = w.value(x[0] / par.eps);
        v.at(0, cell) = cut * val[0];
        v.at(1, cell) = cut * val[1];
    });
    return v;
}

/// Closed-form div_eps of the counterexample field (the x_1 jumps cancel; only
/// the vertical cutoff contributes).
inline double ex2_div_reference(const Ex2Params& par, double x1, double x2) {
    if (x2 >= 0.5) return 0.0;
    const auto w = two_point_profile({0.0, 1.0}, {0.0, -1.0}, 0.5, par.k);
    return 2.0 / par.eps * par.phi_dot(2.0 * x2) * w.value(x1 / par.eps)[1];
}

}  // namespace thinlam
