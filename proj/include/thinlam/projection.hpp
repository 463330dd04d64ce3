#pragma once

#include "thinlam/detail/dft.hpp"
#include "thinlam/field.hpp"
#include "thinlam/grid.hpp"

namespace thinlam {

/// Frequency-wise orthogonal projector onto div_eps-free fields on the
/// periodic box spanned by the grid: at integer frequency m != 0 the
/// multiplier is I - a a^T with a the unit vector along (kappa', kappa_N/eps),
/// kappa_d = m_d / L_d. The zero frequency passes through (constants are
/// div_eps-free). Exact for p = 2; applied as-is for other exponents, where
/// the pipeline only feeds it fields that are already nearly div_eps-free.
struct SpectralProjector {
    GridGeometry geom;
    double eps = 1.0;
};

inline SpectralProjector make_projector(GridGeometry geom, double eps) {
    detail::require(eps > 0.0, "make_projector: eps > 0");
    return SpectralProjector{std::move(geom), eps};
}

namespace detail {

template <class FreqFn>
void for_each_frequency(const GridGeometry& g, double eps, FreqFn&& fn) {
    const int N = g.dims;
    std::vector<int> m(N, 0);
    std::vector<double> symbol(N);
    const std::size_t total = g.cell_count();
    for (std::size_t flat = 0; flat < total; ++flat) {
        bool zero = true;
        for (int a = 0; a < N; ++a) {
            int sm = m[a] <= g.resolution[a] / 2 ? m[a] : m[a] - g.resolution[a];
            symbol[a] = sm / g.side(a);
            zero = zero && sm == 0;
        }
        symbol[N - 1] /= eps;
        fn(flat, std::span<const double>(symbol), zero);
        for (int a = N - 1; a >= 0; --a) {
            if (++m[a] < g.resolution[a]) break;
            m[a] = 0;
        }
    }
}

}  // namespace detail

inline VectorField project(const SpectralProjector& P, const VectorField& u) {
    detail::require(P.geom.same_layout(u.geom), "project: grid mismatch");
    const int N = u.geom.dims;
    const std::size_t n = u.cells();

    std::vector<std::vector<detail::cplx>> comp(N);
    for (int c = 0; c < N; ++c) {
        comp[c].assign(n, detail::cplx(0.0));
        for (std::size_t i = 0; i < n; ++i) comp[c][i] = u.at(c, i);
        detail::dft_nd(comp[c], u.geom.resolution, false);
    }

    detail::for_each_frequency(u.geom, P.eps,
                               [&](std::size_t flat, std::span<const double> s, bool zero) {
                                   if (zero) return;
                                   double s2 = 0.0;
                                   for (int a = 0; a < N; ++a) s2 += s[a] * s[a];
                                   detail::cplx proj(0.0);
                                   for (int a = 0; a < N; ++a) proj += s[a] * comp[a][flat];
                                   proj /= s2;
                                   for (int a = 0; a < N; ++a) comp[a][flat] -= s[a] * proj;
                               });

    VectorField out(u.geom, P.eps);
    for (int c = 0; c < N; ++c) {
        detail::dft_nd(comp[c], u.geom.resolution, true);
        for (std::size_t i = 0; i < n; ++i) out.at(c, i) = comp[c][i].real();
    }
    return out;
}

/// Relative size of the div_eps symbol component of u's spectrum:
/// sqrt(sum |s.u_hat|^2) / sqrt(sum (|s||u_hat|)^2). Zero for spectrally
/// div_eps-free fields, of order one for generic ones.
inline double spectral_div_residual(const SpectralProjector& P, const VectorField& u) {
    detail::require(P.geom.same_layout(u.geom), "spectral_div_residual: grid mismatch");
    const int N = u.geom.dims;
    const std::size_t n = u.cells();
    std::vector<std::vector<detail::cplx>> comp(N);
    for (int c = 0; c < N; ++c) {
        comp[c].assign(n, detail::cplx(0.0));
        for (std::size_t i = 0; i < n; ++i) comp[c][i] = u.at(c, i);
        detail::dft_nd(comp[c], u.geom.resolution, false);
    }
    double num = 0.0, den = 0.0;
    detail::for_each_frequency(u.geom, P.eps,
                               [&](std::size_t flat, std::span<const double> s, bool zero) {
                                   if (zero) return;
                                   double s2 = 0.0, u2 = 0.0;
                                   detail::cplx d(0.0);
                                   for (int a = 0; a < N; ++a) {
                                       s2 += s[a] * s[a];
                                       u2 += std::norm(comp[a][flat]);
                                       d += s[a] * comp[a][flat];
                                   }
                                   num += std::norm(d);
                                   den += s2 * u2;
                               });
    return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

/// Interior cutoff with quintic ramp of the given width, vanishing on the
/// whole boundary of Omega.
inline VectorField interior_cutoff(const VectorField& u, double margin) {
    const int N = u.geom.dims;
    double max_h = 0.0, min_side = std::numeric_limits<double>::infinity();
    for (int a = 0; a < N; ++a) {
        max_h = std::max(max_h, u.geom.spacing(a));
        min_side = std::min(min_side, u.geom.side(a));
    }
    detail::require(margin > max_h, "interior_cutoff: margin must exceed one cell");
    detail::require(2.0 * margin < min_side, "interior_cutoff: margin too large (empty plateau)");

    VectorField out = u;
    std::vector<double> x(N);
    for_each_cell(u.geom, [&](std::size_t cell, std::span<const int> idx) {
        u.geom.cell_center(idx, x);
        double d = std::numeric_limits<double>::infinity();
        for (int a = 0; a < N; ++a)
            d = std::min(d, std::min(x[a] - u.geom.lo(a), u.geom.hi(a) - x[a]));
        double phi = detail::smoothstep(d / margin);
        for (int a = 0; a < N; ++a) out.at(a, cell) = phi * u.at(a, cell);
    });
    return out;
}

struct ProjectionResult {
    VectorField field;
    double lp_error = 0.0;  // ||u - v||_p
};

/// Cutoff-then-project pipeline: multiply by an interior cutoff (plateau at
/// distance >= margin from the boundary), project on the periodic box, report
/// the L^p distance to the input alongside.
inline ProjectionResult project_asymptotic(const VectorField& u, double eps, double margin,
                                           double p) {
    auto cut = interior_cutoff(u, margin);
    auto v = project(make_projector(u.geom, eps), cut);
    auto diff = linear_combination(1.0, u, -1.0, v);
    return ProjectionResult{std::move(v), lp_norm(diff, p)};
}

/// Dictionary lower bound for the W^{-1,p} norm: tensor sine modes vanishing
/// on the boundary, each with its W^{1,p'} norm precomputed by grid
/// quadrature. The estimate is max over modes of |<g, phi>| / ||phi||_{1,p'};
/// it never exceeds the true dual norm and is monotone under dictionary
/// enlargement.
struct NegSobolevEstimator {
    GridGeometry geom;
    double p = 2.0;
    int M = 16;
    std::vector<std::vector<double>> sin_table;  // per axis: M * res values
    std::vector<double> mode_norm;               // flattened (a_0..a_{N-1}), 1-based axes
};

inline NegSobolevEstimator make_neg_sobolev_estimator(const GridGeometry& geom, double p,
                                                      int M = 16) {
    detail::require(p > 1.0, "neg_sobolev: p > 1");
    detail::require(M >= 1, "neg_sobolev: M >= 1");
    detail::require(geom.dims <= 3, "neg_sobolev: dims <= 3 supported");
    NegSobolevEstimator est;
    est.geom = geom;
    est.p = p;
    est.M = M;
    const int N = geom.dims;
    const double pd = p / (p - 1.0);

    est.sin_table.assign(N, {});
    // per-axis |sin|^{p'} and |cos|^{p'} quadratures
    std::vector<std::vector<double>> qs(N, std::vector<double>(M)), qc = qs;
    for (int a = 0; a < N; ++a) {
        const int n = geom.resolution[a];
        const double h = geom.spacing(a), L = geom.side(a);
        est.sin_table[a].resize(std::size_t(M) * n);
        for (int m = 1; m <= M; ++m) {
            double ss = 0.0, sc = 0.0;
            for (int i = 0; i < n; ++i) {
                double t = (i + 0.5) * h;
                double sv = std::sin(std::numbers::pi * m * t / L);
                double cv = std::cos(std::numbers::pi * m * t / L);
                est.sin_table[a][std::size_t(m - 1) * n + i] = sv;
                ss += std::pow(std::abs(sv), pd) * h;
                sc += std::pow(std::abs(cv), pd) * h;
            }
            qs[a][m - 1] = ss;
            qc[a][m - 1] = sc;
        }
    }

    std::size_t nmodes = 1;
    for (int a = 0; a < N; ++a) nmodes *= std::size_t(M);
    est.mode_norm.resize(nmodes);
    std::vector<int> am(N, 0);
    for (std::size_t f = 0; f < nmodes; ++f) {
        double lp = 1.0;
        for (int a = 0; a < N; ++a) lp *= qs[a][am[a]];
        double grad = 0.0;
        for (int d = 0; d < N; ++d) {
            double g = std::pow(std::numbers::pi * (am[d] + 1) / est.geom.side(d), pd) *
                       qc[d][am[d]];
            for (int a = 0; a < N; ++a)
                if (a != d) g *= qs[a][am[a]];
            grad += g;
        }
        est.mode_norm[f] = std::pow(lp + grad, 1.0 / pd);
        for (int a = N - 1; a >= 0; --a) {
            if (++am[a] < M) break;
            am[a] = 0;
        }
    }
    return est;
}

namespace detail {

// Pairings of g with every dictionary mode by successive axis contraction.
inline std::vector<double> mode_pairings(const ScalarField& g, const NegSobolevEstimator& est) {
    const int N = g.geom.dims;
    const int M = est.M;
    const auto& res = g.geom.resolution;
    if (N == 2) {
        const int n0 = res[0], n1 = res[1];
        std::vector<double> p1(std::size_t(n0) * M, 0.0);
        for (int i = 0; i < n0; ++i)
            for (int b = 0; b < M; ++b) {
                double s = 0.0;
                const double* tab = &est.sin_table[1][std::size_t(b) * n1];
                const double* row = &g.data[std::size_t(i) * n1];
                for (int j = 0; j < n1; ++j) s += row[j] * tab[j];
                p1[std::size_t(i) * M + b] = s;
            }
        std::vector<double> out(std::size_t(M) * M, 0.0);
        for (int a = 0; a < M; ++a) {
            const double* tab = &est.sin_table[0][std::size_t(a) * n0];
            for (int i = 0; i < n0; ++i)
                for (int b = 0; b < M; ++b) out[std::size_t(a) * M + b] += tab[i] * p1[std::size_t(i) * M + b];
        }
        return out;
    }
    if (N == 3) {
        const int n0 = res[0], n1 = res[1], n2 = res[2];
        std::vector<double> p2(std::size_t(n0) * n1 * M, 0.0);
        for (std::size_t ij = 0; ij < std::size_t(n0) * n1; ++ij)
            for (int c = 0; c < M; ++c) {
                double s = 0.0;
                const double* tab = &est.sin_table[2][std::size_t(c) * n2];
                const double* row = &g.data[ij * n2];
                for (int k2 = 0; k2 < n2; ++k2) s += row[k2] * tab[k2];
                p2[ij * M + c] = s;
            }
        std::vector<double> p1(std::size_t(n0) * M * M, 0.0);
        for (int i = 0; i < n0; ++i)
            for (int j = 0; j < n1; ++j) {
                const double* src = &p2[(std::size_t(i) * n1 + j) * M];
                for (int b = 0; b < M; ++b) {
                    double sv = est.sin_table[1][std::size_t(b) * n1 + j];
                    double* dst = &p1[(std::size_t(i) * M + b) * M];
                    for (int c = 0; c < M; ++c) dst[c] += sv * src[c];
                }
            }
        std::vector<double> out(std::size_t(M) * M * M, 0.0);
        for (int i = 0; i < n0; ++i)
            for (int a = 0; a < M; ++a) {
                double sv = est.sin_table[0][std::size_t(a) * n0 + i];
                const double* src = &p1[std::size_t(i) * M * M];
                double* dst = &out[std::size_t(a) * M * M];
                for (int bc = 0; bc < M * M; ++bc) dst[bc] += sv * src[bc];
            }
        return out;
    }
    throw std::invalid_argument("neg_sobolev: unsupported dimension");
}

}  // namespace detail

inline double neg_sobolev_norm(const ScalarField& g, const NegSobolevEstimator& est) {
    detail::require(g.geom.same_layout(est.geom), "neg_sobolev_norm: grid mismatch");
    auto pair = detail::mode_pairings(g, est);
    const double vol = g.geom.cell_volume();
    double best = 0.0;
    for (std::size_t f = 0; f < pair.size(); ++f)
        best = std::max(best, std::abs(pair[f]) * vol / est.mode_norm[f]);
    return best;
}

inline double neg_sobolev_norm(const VectorField& u, const NegSobolevEstimator& est) {
    double best = 0.0;
    ScalarField comp(u.geom);
    for (int c = 0; c < u.geom.dims; ++c) {
        for (std::size_t i = 0; i < u.cells(); ++i) comp.data[i] = u.at(c, i);
        best = std::max(best, neg_sobolev_norm(comp, est));
    }
    return best;
}

}  // namespace thinlam
