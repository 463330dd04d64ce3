#pragma once

#include <algorithm>
#include <cstdint>

#include "thinlam/density.hpp"
#include "thinlam/detail/hull.hpp"

namespace thinlam {

/// Radius constant confining the touching points of affine minorants: any
/// affine A <= g with A(xi) = g**(xi), where (1/C)|mu|^p - C <= g <= C|mu|^p + C,
/// touches g only inside |mu| <= K (|xi| + 1). With s = |xi| + 1:
///   (i)   g** >= (1/C)|mu|^p - C pointwise, hence A(xi) >= -C;
///   (ii)  testing A <= C|mu|^p + C along xi + t e with t = s gives the slope
///         bound |a| <= C(2^p + 2) s^{p-1} =: c1 s^{p-1};
///   (iii) |A(xi)| <= C|xi|^p + C, so the offset obeys b <= (2C + c1) s^p;
///   (iv)  at a touching point r = |mu*|:
///         (1/C) r^p <= c1 s^{p-1} r + (3C + c1) s^p, and Young's inequality
///         with delta = 1/(2C) absorbs the middle term, leaving r <= K s with
///         K = (2C (Cd c1^{p'} + 3C + c1))^{1/p}, Cd = (2C/p)^{p'/p} / p'.
/// The sufficiency (not optimality) of K is validated by the radius
/// monotonicity check in the test suite.
inline double car2_radius_constant(double p, double C) {
    detail::require(p > 1.0 && C > 0.0, "car2_radius_constant: need p > 1, C > 0");
    const double pd = p / (p - 1.0);
    const double c1 = C * (std::pow(2.0, p) + 2.0);
    const double Cd = std::pow(2.0 * C / p, pd / p) / pd;
    return std::pow(2.0 * C * (Cd * std::pow(c1, pd) + 3.0 * C + c1), 1.0 / p);
}

/// Sampled convex envelope: f and f** on a uniform lattice over [-R, R]^N
/// plus the lower facets of the hull of the lifted samples, each carrying its
/// supporting affine function A(mu) = grad . mu + off.
struct ConvexEnvelope {
    int dims = 0;
    double radius = 0.0;
    int res = 0;  // points per axis
    std::vector<double> f_values, env_values;

    struct Facet {
        std::vector<int> verts;  // flattened lattice indices
        std::vector<double> grad;
        double off = 0.0;
    };
    std::vector<Facet> facets;

    double spacing() const { return 2.0 * radius / (res - 1); }

    void lattice_point(int flat, std::span<double> mu) const {
        const double h = spacing();
        for (int a = dims - 1; a >= 0; --a) {
            mu[a] = -radius + (flat % res) * h;
            flat /= res;
        }
    }

    bool inside_box(std::span<const double> xi) const {
        for (int a = 0; a < dims; ++a)
            if (std::abs(xi[a]) > radius + 1e-12) return false;
        return true;
    }

    double affine_at(const Facet& f, std::span<const double> xi) const {
        return detail::dot(f.grad, xi) + f.off;
    }

    /// Envelope value at an arbitrary point of the box: the lower hull surface
    /// is the pointwise max of its supporting affine functions.
    double value_at(std::span<const double> xi) const {
        detail::require(inside_box(xi), "ConvexEnvelope: query outside sampled box");
        double best = -std::numeric_limits<double>::infinity();
        for (const Facet& f : facets) best = std::max(best, affine_at(f, xi));
        return best;
    }

    /// Supporting facet at xi; ties on facet boundaries resolved toward the
    /// lexicographically smallest sorted vertex tuple.
    const Facet& supporting_facet(std::span<const double> xi) const {
        detail::require(inside_box(xi), "ConvexEnvelope: query outside sampled box");
        detail::internal_check(!facets.empty(), "ConvexEnvelope: no facets");
        double best = -std::numeric_limits<double>::infinity();
        for (const Facet& f : facets) best = std::max(best, affine_at(f, xi));
        const double tie = 1e-9 * (1.0 + std::abs(best));
        const Facet* pick = nullptr;
        std::vector<int> pick_key;
        for (const Facet& f : facets) {
            if (affine_at(f, xi) < best - tie) continue;
            std::vector<int> key = f.verts;
            std::sort(key.begin(), key.end());
            if (!pick || key < pick_key) {
                pick = &f;
                pick_key = std::move(key);
            }
        }
        return *pick;
    }
};

/// Carathéodory decomposition of xi against a sampled envelope: points where
/// the supporting affine function touches the samples, with barycentric
/// weights.
struct CaratheodoryDecomposition {
    Point xi;
    std::vector<Point> points;    // m+1 entries, m <= N
    std::vector<double> weights;  // in (0,1], sum 1
    int m() const { return int(points.size()) - 1; }
};

/// Pairwise hyperplane split of a decomposition across H = { y^N = xi^N }.
struct PairwiseSplit {
    Point xi;
    std::vector<std::vector<double>> alpha, beta;  // (m+1)^2, alpha symmetric
    std::vector<std::vector<Point>> xbar;          // intersection points (i<j), xbar[j][j] = xi_j
};

namespace detail {

inline std::uint32_t mix32(std::uint32_t x) {
    x ^= x >> 16;
    x *= 0x7feb352dU;
    x ^= x >> 15;
    x *= 0x846ca68bU;
    x ^= x >> 16;
    return x;
}

}  // namespace detail

/// Sample f(x, .) on [-R, R]^N (R = K(|xi|+1) + margin by default, where K is
/// the structural radius constant) and take the lower convex hull of the
/// lifted samples.
inline ConvexEnvelope build_envelope(
    const std::function<double(std::span<const double>)>& g, double p, double C, int dims,
    std::span<const double> xi, int res, double radius = 0.0) {
    detail::require(res >= 3, "build_envelope: resolution >= 3 per axis required");
    detail::require(dims >= 2 && dims <= 4, "build_envelope: dims in [2,4]");
    ConvexEnvelope env;
    env.dims = dims;
    env.res = res;
    env.radius = radius > 0.0 ? radius
                              : car2_radius_constant(p, C) * (detail::norm2(xi) + 1.0) + 1.0;

    std::size_t npts = 1;
    for (int a = 0; a < dims; ++a) npts *= std::size_t(res);
    env.f_values.resize(npts);

    std::vector<double> mu(dims);
    for (std::size_t i = 0; i < npts; ++i) {
        env.lattice_point(int(i), mu);
        double v = g(mu);
        detail::require(std::isfinite(v), "build_envelope: density evaluated non-finite");
        double coercive_floor = std::pow(detail::norm2(mu), p) / C - C;
        detail::require(v >= coercive_floor - 1e-9 * (1.0 + std::abs(coercive_floor)),
                        "build_envelope: coercivity violation detected during sampling");
        env.f_values[i] = v;
    }

    // Any affine minorant supporting the envelope at xi obeys the slope bound
    // |a| <= c1 s^{p-1} (s = |xi|+1), so across the box it never rises above
    //   V = C s^p + C + c1 s^{p-1} (R + s).
    // Lifting min(f, V+1) instead of f therefore leaves every facet relevant
    // to xi untouched while keeping the value extent (and with it the hull's
    // relative tolerance) commensurate with the structure near xi. Without
    // the cap, p-growth over the structural radius drowns the near-zero
    // geometry in hull tolerance.
    const double s_xi = detail::norm2(xi) + 1.0;
    const double c1 = C * (std::pow(2.0, p) + 2.0);
    const double vcap = C * std::pow(s_xi, p) + C +
                        c1 * std::pow(s_xi, p - 1.0) * (env.radius + s_xi) + 1.0;
    std::vector<double> lift(npts);
    double vmin = std::numeric_limits<double>::infinity(), vmax = -vmin;
    for (std::size_t i = 0; i < npts; ++i) {
        lift[i] = std::min(env.f_values[i], vcap);
        vmin = std::min(vmin, lift[i]);
        vmax = std::max(vmax, lift[i]);
    }
    const double vscale = vmax > vmin ? vmax - vmin : 1.0;

    // Lift to the epigraph cloud. A deterministic sub-tolerance joggle on the
    // value axis breaks the ties of cospherical lattice patterns; planes are
    // recomputed from the unjoggled samples afterwards.
    std::vector<double> cloud(npts * std::size_t(dims + 1));
    for (std::size_t i = 0; i < npts; ++i) {
        env.lattice_point(int(i), mu);
        for (int a = 0; a < dims; ++a) cloud[i * (dims + 1) + a] = mu[a];
        double j = (double(detail::mix32(std::uint32_t(i))) / 4294967295.0 - 0.5) * 1e-9 * vscale;
        cloud[i * (dims + 1) + dims] = lift[i] + j;
    }
    auto hull = detail::convex_hull(cloud, dims + 1);

    // Keep the lower facets and interpolate each plane through its true
    // samples, solving in facet-local coordinates (centroid-shifted, scaled by
    // the facet diameter) so the system stays well conditioned regardless of
    // where the facet sits. Near-vertical boundary walls show up as rank
    // deficiency in the projected simplex and are dropped; they only support
    // measure-zero slivers at the box boundary.
    std::vector<double> A((dims + 1) * (dims + 1)), b(dims + 1), sol;
    std::vector<Point> vp(dims + 1, Point(dims));
    for (const auto& hf : hull) {
        if (hf.normal[dims] >= -1e-9) continue;
        Point centroid(dims, 0.0);
        double diam = 0.0;
        for (int r = 0; r <= dims; ++r) {
            env.lattice_point(hf.verts[r], vp[r]);
            for (int a = 0; a < dims; ++a) centroid[a] += vp[r][a] / (dims + 1);
        }
        for (int r = 0; r <= dims; ++r)
            for (int s = r + 1; s <= dims; ++s) {
                double d2 = 0.0;
                for (int a = 0; a < dims; ++a) d2 += detail::sqr(vp[r][a] - vp[s][a]);
                diam = std::max(diam, d2);
            }
        diam = std::sqrt(diam);
        if (diam <= 0.0) continue;
        for (int r = 0; r <= dims; ++r) {
            for (int c = 0; c < dims; ++c)
                A[r * (dims + 1) + c] = (vp[r][c] - centroid[c]) / diam;
            A[r * (dims + 1) + dims] = 1.0;
            b[r] = lift[hf.verts[r]];
        }
        if (!detail::solve_linear(A, b, sol, dims + 1, 1e-7)) continue;  // wall sliver
        ConvexEnvelope::Facet f;
        f.verts.assign(hf.verts.begin(), hf.verts.begin() + dims + 1);
        f.grad.resize(dims);
        f.off = sol[dims];
        for (int a = 0; a < dims; ++a) {
            f.grad[a] = sol[a] / diam;
            f.off -= f.grad[a] * centroid[a];
        }
        env.facets.push_back(std::move(f));
    }
    detail::internal_check(!env.facets.empty(), "build_envelope: no lower facets");

    // Envelope values: sweep each facet over the lattice points inside its
    // projected bounding box (the surface is the max of the facet planes).
    env.env_values.assign(npts, -std::numeric_limits<double>::infinity());
    const double h = env.spacing();
    std::vector<int> blo(dims), bhi(dims), it(dims);
    for (const auto& f : env.facets) {
        for (int a = 0; a < dims; ++a) {
            blo[a] = res;
            bhi[a] = -1;
        }
        for (int v : f.verts) {
            int flat = v;
            for (int a = dims - 1; a >= 0; --a) {
                int ia = flat % res;
                flat /= res;
                blo[a] = std::min(blo[a], ia);
                bhi[a] = std::max(bhi[a], ia);
            }
        }
        for (int a = 0; a < dims; ++a) {
            blo[a] = std::max(0, blo[a] - 1);
            bhi[a] = std::min(res - 1, bhi[a] + 1);
        }
        it = blo;
        while (true) {
            int flat = 0;
            double val = f.off;
            for (int a = 0; a < dims; ++a) {
                flat = flat * res + it[a];
                val += f.grad[a] * (-env.radius + it[a] * h);
            }
            env.env_values[flat] = std::max(env.env_values[flat], val);
            int a = dims - 1;
            for (; a >= 0; --a) {
                if (++it[a] <= bhi[a]) break;
                it[a] = blo[a];
            }
            if (a < 0) break;
        }
    }
    // Points missed by every bbox (possible next to dropped wall slivers):
    // fall back to the full max.
    for (std::size_t i = 0; i < npts; ++i) {
        if (std::isfinite(env.env_values[i])) continue;
        env.lattice_point(int(i), mu);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& f : env.facets) best = std::max(best, env.affine_at(f, mu));
        env.env_values[i] = best;
    }
    // Clamp to the samples (the hull never exceeds them) and pin tangency
    // points exactly.
    for (std::size_t i = 0; i < npts; ++i)
        env.env_values[i] = std::min(env.env_values[i], lift[i]);
    for (const auto& f : env.facets)
        for (int v : f.verts) env.env_values[v] = lift[v];

    return env;
}

inline ConvexEnvelope build_envelope(const Density& f, const Point& x, std::span<const double> xi,
                                     int res, double radius = 0.0) {
    Point xc = x;
    auto g = [&f, xc](std::span<const double> mu) { return f.eval(xc, mu); };
    return build_envelope(g, f.p, f.C, int(xi.size()), xi, res, radius);
}

/// Locate the lower-hull facet over xi and return its vertices with
/// barycentric weights, dropping zero-weight vertices. A tangency point comes
/// back as the single-point decomposition (m = 0). Ties between supporting
/// planes (xi on a facet boundary, or a plane that happens to pass through
/// the surface value away from its own projection) are resolved toward the
/// lexicographically smallest vertex tuple whose simplex actually contains xi.
inline CaratheodoryDecomposition caratheodory_decompose(const ConvexEnvelope& env,
                                                        std::span<const double> xi) {
    detail::require(env.inside_box(xi), "caratheodory_decompose: xi outside sampled box");
    const int N = env.dims;

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& f : env.facets) best = std::max(best, env.affine_at(f, xi));
    const double tie = 1e-9 * (1.0 + std::abs(best));

    std::vector<std::pair<std::vector<int>, const ConvexEnvelope::Facet*>> cands;
    for (const auto& f : env.facets) {
        if (env.affine_at(f, xi) < best - tie) continue;
        std::vector<int> key = f.verts;
        std::sort(key.begin(), key.end());
        cands.emplace_back(std::move(key), &f);
    }
    std::sort(cands.begin(), cands.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<Point> pts;
    std::vector<double> A, bb, w;
    for (const auto& [key, fp] : cands) {
        const auto& facet = *fp;
        const int k = int(facet.verts.size());
        pts.assign(k, Point(N));
        for (int j = 0; j < k; ++j) env.lattice_point(facet.verts[j], pts[j]);
        A.assign((N + 1) * k, 0.0);
        bb.assign(N + 1, 0.0);
        for (int c = 0; c < k; ++c) {
            for (int r = 0; r < N; ++r) A[r * k + c] = pts[c][r];
            A[N * k + c] = 1.0;
        }
        for (int r = 0; r < N; ++r) bb[r] = xi[r];
        bb[N] = 1.0;
        double residual = 0.0;
        if (!detail::least_squares(A, bb, w, N + 1, k, residual)) continue;
        if (residual > 1e-8) continue;
        bool admissible = true;
        for (int j = 0; j < k; ++j) admissible = admissible && w[j] > -1e-9;
        if (!admissible) continue;  // plane ties without containing xi

        CaratheodoryDecomposition dec;
        dec.xi.assign(xi.begin(), xi.end());
        double total = 0.0;
        for (int j = 0; j < k; ++j) {
            if (w[j] <= 1e-10) continue;  // drop zero-weight vertices
            dec.points.push_back(pts[j]);
            dec.weights.push_back(w[j]);
            total += w[j];
        }
        detail::internal_check(!dec.weights.empty(),
                               "caratheodory_decompose: empty decomposition");
        for (double& t : dec.weights) t /= total;
        return dec;
    }
    throw std::runtime_error("caratheodory_decompose: no supporting facet contains xi");
}

/// Min singular value of the difference matrix [xi_j - xi_0], the linear
/// independence certificate of a decomposition.
inline double decomposition_min_singular_value(const CaratheodoryDecomposition& dec) {
    const int m = dec.m();
    if (m == 0) return std::numeric_limits<double>::infinity();
    const int N = int(dec.xi.size());
    std::vector<double> D(std::size_t(N) * m);
    for (int j = 1; j <= m; ++j)
        for (int r = 0; r < N; ++r) D[r * m + (j - 1)] = dec.points[j][r] - dec.points[0][r];
    return detail::smallest_singular_value(D, N, m);
}

/// Split a decomposition into pairs across the hyperplane H = { y^N = xi^N }:
/// beta from the three-case ratio formula, alpha by expressing xi as a convex
/// combination of the extreme points of co{xi_j} cap H (diagonal points on H
/// and pairwise segment intersections), then checked against the barycentric
/// identity theta_j = sum_i alpha_ij beta_ij.
inline PairwiseSplit pairwise_split(const CaratheodoryDecomposition& dec) {
    const int N = int(dec.xi.size());
    const int m = dec.m();
    const double xiN = dec.xi[N - 1];

    double scale = std::abs(xiN);
    for (const Point& q : dec.points) scale = std::max(scale, std::abs(q[N - 1]));
    const double tolH = 1e-11 * (1.0 + scale);

    PairwiseSplit sp;
    sp.xi = dec.xi;
    sp.alpha.assign(m + 1, std::vector<double>(m + 1, 0.0));
    sp.beta.assign(m + 1, std::vector<double>(m + 1, 0.0));
    sp.xbar.assign(m + 1, std::vector<Point>(m + 1));

    std::vector<double> delta(m + 1);
    std::vector<bool> onH(m + 1);
    for (int j = 0; j <= m; ++j) {
        delta[j] = dec.points[j][N - 1] - xiN;
        onH[j] = std::abs(delta[j]) <= tolH;
    }

    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= m; ++j) {
            if (i == j) {
                if (onH[j]) sp.beta[j][j] = 1.0;
            } else if (!onH[i] && !onH[j] && delta[i] * delta[j] < 0.0) {
                sp.beta[i][j] = delta[i] / (delta[i] - delta[j]);
            }
        }

    // Candidate extreme points of co{xi_j} cap H, in deterministic order.
    struct Cand {
        int i, j;
        Point pt;
    };
    std::vector<Cand> cands;
    for (int j = 0; j <= m; ++j) {
        if (!onH[j]) continue;
        sp.xbar[j][j] = dec.points[j];
        cands.push_back({j, j, dec.points[j]});
    }
    for (int i = 0; i <= m; ++i)
        for (int j = i + 1; j <= m; ++j) {
            if (sp.beta[i][j] == 0.0 && sp.beta[j][i] == 0.0) continue;
            Point q(N);
            for (int r = 0; r < N; ++r)
                q[r] = sp.beta[i][j] * dec.points[j][r] + sp.beta[j][i] * dec.points[i][r];
            q[N - 1] = xiN;  // on H exactly
            sp.xbar[i][j] = q;
            sp.xbar[j][i] = q;
            cands.push_back({i, j, std::move(q)});
        }
    detail::internal_check(!cands.empty(), "pairwise_split: no candidate extreme points");

    // Smallest subset of candidates reproducing xi as a convex combination.
    const int nc = int(cands.size());
    std::vector<int> pick;
    std::vector<double> best_w;
    bool found = false;
    std::vector<int> subset;
    std::function<void(int, int)> search = [&](int start, int want) {
        if (found) return;
        if (want == 0) {
            const int k = int(subset.size());
            std::vector<double> A((N + 1) * k), bb(N + 1), w;
            for (int c = 0; c < k; ++c) {
                for (int r = 0; r < N; ++r) A[r * k + c] = cands[subset[c]].pt[r];
                A[N * k + c] = 1.0;
            }
            for (int r = 0; r < N; ++r) bb[r] = dec.xi[r];
            bb[N] = 1.0;
            double res = 0.0;
            if (!detail::least_squares(A, bb, w, N + 1, k, res)) return;
            if (res > 1e-9 * (1.0 + scale)) return;
            for (double v : w)
                if (v < -1e-9) return;
            pick = subset;
            best_w = w;
            found = true;
            return;
        }
        for (int c = start; c <= nc - want; ++c) {
            subset.push_back(c);
            search(c + 1, want - 1);
            subset.pop_back();
            if (found) return;
        }
    };
    for (int size = 1; size <= std::min(N, nc) && !found; ++size) search(0, size);
    detail::internal_check(found, "pairwise_split: internal-consistency error "
                                  "(xi not reproducible from extreme points)");

    for (std::size_t c = 0; c < pick.size(); ++c) {
        double v = std::max(0.0, best_w[c]);
        const Cand& cd = cands[pick[c]];
        sp.alpha[cd.i][cd.j] += v;
        if (cd.i != cd.j) sp.alpha[cd.j][cd.i] += v;
    }

    // Verify theta_j = sum_i alpha_ij beta_ij (uniqueness of the barycentric
    // coordinates makes this automatic for exact data).
    for (int j = 0; j <= m; ++j) {
        double s = 0.0;
        for (int i = 0; i <= m; ++i) s += sp.alpha[i][j] * sp.beta[i][j];
        detail::internal_check(std::abs(s - dec.weights[j]) <= 1e-9,
                               "pairwise_split: barycentric consistency check failed");
    }
    return sp;
}

}  // namespace thinlam
