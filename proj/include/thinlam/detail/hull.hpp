#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <map>

#include "thinlam/detail/linalg.hpp"

namespace thinlam::detail {

// Tolerance-based quickhull in R^dim for 2 <= dim <= 5 (good for the lifted
// epigraphs of densities over mu-lattices at desk scale). Coordinates are
// prescaled per axis to [0,1]; the facet/vertex combinatorics are invariant
// under positive axis scalings, and callers recompute exact plane data from
// the original coordinates. Normals returned here refer to scaled space and
// are only meant for orientation queries (e.g. picking the lower hull).

struct HullFacet {
    std::array<int, 5> verts{};        // dim vertex indices into the cloud
    std::array<double, 5> normal{};    // outward, scaled coordinates
    double offset = 0.0;
};

class QuickHull {
public:
    QuickHull(const std::vector<double>& pts, int dim) : dim_(dim), n_(int(pts.size() / dim)) {
        require(dim >= 2 && dim <= 5, "convex_hull: dim must be in [2,5]");
        require(n_ >= dim + 1, "convex_hull: need at least dim+1 points");
        prescale(pts);
        tol_ = 1e-9 * dim_;
        build();
    }

    std::vector<HullFacet> facets() const {
        std::vector<HullFacet> out;
        for (const Facet& f : facets_) {
            if (!f.alive) continue;
            HullFacet hf;
            for (int k = 0; k < dim_; ++k) hf.verts[k] = f.v[k];
            for (int k = 0; k < dim_; ++k) hf.normal[k] = f.n[k];
            hf.offset = f.off;
            out.push_back(hf);
        }
        return out;
    }

private:
    struct Facet {
        std::array<int, 5> v{};
        std::array<double, 5> n{};
        double off = 0.0;
        std::array<int, 5> neigh{};
        std::vector<int> outside;
        int far = -1;
        double fardist = 0.0;
        bool alive = true;
    };

    int dim_, n_;
    std::vector<double> P_;
    double tol_ = 1e-9;
    std::vector<Facet> facets_;
    std::array<double, 5> interior_{};

    const double* pt(int i) const { return &P_[std::size_t(i) * dim_]; }

    double dist(const Facet& f, int p) const {
        double s = -f.off;
        const double* x = pt(p);
        for (int k = 0; k < dim_; ++k) s += f.n[k] * x[k];
        return s;
    }

    void prescale(const std::vector<double>& pts) {
        P_.resize(pts.size());
        for (int a = 0; a < dim_; ++a) {
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (int i = 0; i < n_; ++i) {
                lo = std::min(lo, pts[std::size_t(i) * dim_ + a]);
                hi = std::max(hi, pts[std::size_t(i) * dim_ + a]);
            }
            double s = hi > lo ? 1.0 / (hi - lo) : 1.0;
            for (int i = 0; i < n_; ++i)
                P_[std::size_t(i) * dim_ + a] = (pts[std::size_t(i) * dim_ + a] - lo) * s;
        }
    }

    // Normal of the hyperplane through f.v via the generalized cross product
    // of the edge matrix; oriented away from the interior point.
    bool plane(Facet& f) const {
        std::vector<double> M((dim_ - 1) * dim_);
        for (int r = 0; r + 1 < dim_; ++r)
            for (int c = 0; c < dim_; ++c)
                M[r * dim_ + c] = pt(f.v[r + 1])[c] - pt(f.v[0])[c];
        std::vector<double> minor((dim_ - 1) * (dim_ - 1));
        double norm = 0.0;
        for (int c = 0; c < dim_; ++c) {
            for (int r = 0; r + 1 < dim_; ++r) {
                int mc = 0;
                for (int cc = 0; cc < dim_; ++cc) {
                    if (cc == c) continue;
                    minor[r * (dim_ - 1) + mc++] = M[r * dim_ + cc];
                }
            }
            f.n[c] = ((c % 2) ? -1.0 : 1.0) * small_det(minor, dim_ - 1);
            norm += sqr(f.n[c]);
        }
        norm = std::sqrt(norm);
        if (norm < 1e-14) return false;
        for (int k = 0; k < dim_; ++k) f.n[k] /= norm;
        double off = 0.0;
        for (int k = 0; k < dim_; ++k)
            off += dot(std::span<const double>(f.n.data(), dim_),
                       std::span<const double>(pt(f.v[k]), dim_));
        f.off = off / dim_;
        double side = -f.off;
        for (int k = 0; k < dim_; ++k) side += f.n[k] * interior_[k];
        if (side > 0.0) {
            for (int k = 0; k < dim_; ++k) f.n[k] = -f.n[k];
            f.off = -f.off;
        }
        return true;
    }

    std::vector<int> initial_simplex() const {
        std::vector<int> S;
        int v0 = 0;
        for (int i = 1; i < n_; ++i)
            if (P_[std::size_t(i) * dim_] < P_[std::size_t(v0) * dim_]) v0 = i;
        S.push_back(v0);
        // Orthonormal basis of the current affine span; extend greedily by the
        // farthest point from the span.
        std::vector<std::vector<double>> basis;
        while (int(S.size()) < dim_ + 1) {
            int best = -1;
            double bestd = 0.0;
            std::vector<double> r(dim_), br(dim_);
            for (int i = 0; i < n_; ++i) {
                for (int k = 0; k < dim_; ++k) r[k] = pt(i)[k] - pt(S[0])[k];
                for (const auto& q : basis) {
                    double c = dot(r, q);
                    for (int k = 0; k < dim_; ++k) r[k] -= c * q[k];
                }
                double d = norm2(r);
                if (d > bestd) {
                    bestd = d;
                    best = i;
                    br = r;
                }
            }
            internal_check(best >= 0 && bestd > 1e-12,
                           "convex_hull: point cloud is degenerate (flat)");
            for (double& x : br) x /= bestd;
            basis.push_back(br);
            S.push_back(best);
        }
        return S;
    }

    void link_neighbors(const std::vector<int>& fresh) {
        // Ridge key (sorted vertex tuple minus one) -> (facet, position).
        std::map<std::vector<int>, std::pair<int, int>> ridges;
        for (int fi : fresh) {
            Facet& f = facets_[fi];
            for (int k = 0; k < dim_; ++k) {
                if (f.neigh[k] >= 0) continue;
                std::vector<int> key;
                for (int j = 0; j < dim_; ++j)
                    if (j != k) key.push_back(f.v[j]);
                std::sort(key.begin(), key.end());
                auto it = ridges.find(key);
                if (it == ridges.end()) {
                    ridges[key] = {fi, k};
                } else {
                    f.neigh[k] = it->second.first;
                    facets_[it->second.first].neigh[it->second.second] = fi;
                    ridges.erase(it);
                }
            }
        }
        internal_check(ridges.empty(), "convex_hull: unmatched ridge");
    }

    void assign_outside(const std::vector<int>& pts_idx, const std::vector<int>& facet_idx) {
        for (int p : pts_idx) {
            for (int fi : facet_idx) {
                Facet& f = facets_[fi];
                if (!f.alive) continue;
                double d = dist(f, p);
                if (d > tol_) {
                    f.outside.push_back(p);
                    if (d > f.fardist) {
                        f.fardist = d;
                        f.far = p;
                    }
                    break;
                }
            }
        }
    }

    void build() {
        auto S = initial_simplex();
        for (int k = 0; k < dim_; ++k) interior_[k] = 0.0;
        for (int v : S)
            for (int k = 0; k < dim_; ++k) interior_[k] += pt(v)[k] / (dim_ + 1);

        std::vector<int> fresh;
        for (int skip = 0; skip <= dim_; ++skip) {
            Facet f;
            f.neigh.fill(-1);
            int c = 0;
            for (int j = 0; j <= dim_; ++j)
                if (j != skip) f.v[c++] = S[j];
            internal_check(plane(f), "convex_hull: degenerate initial facet");
            facets_.push_back(f);
            fresh.push_back(int(facets_.size()) - 1);
        }
        link_neighbors(fresh);

        std::vector<int> all;
        for (int i = 0; i < n_; ++i)
            if (std::find(S.begin(), S.end(), i) == S.end()) all.push_back(i);
        assign_outside(all, fresh);

        std::vector<int> stack = fresh;
        while (!stack.empty()) {
            int fi = stack.back();
            stack.pop_back();
            if (!facets_[fi].alive || facets_[fi].outside.empty()) continue;
            int apex = facets_[fi].far;

            // Visible region (BFS over neighbors).
            std::vector<int> visible = {fi};
            std::vector<char> seen(facets_.size(), 0);
            seen[fi] = 1;
            struct Horizon {
                std::vector<int> ridge;
                int hidden;
                int src;  // the visible facet on this side of the ridge
            };
            std::vector<Horizon> horizon;
            for (std::size_t q = 0; q < visible.size(); ++q) {
                Facet& f = facets_[visible[q]];
                for (int k = 0; k < dim_; ++k) {
                    int nb = f.neigh[k];
                    if (nb < 0) continue;
                    if (seen[nb]) continue;
                    if (dist(facets_[nb], apex) > tol_) {
                        seen[nb] = 1;
                        visible.push_back(nb);
                    } else {
                        Horizon h;
                        h.hidden = nb;
                        h.src = visible[q];
                        for (int j = 0; j < dim_; ++j)
                            if (j != k) h.ridge.push_back(f.v[j]);
                        horizon.push_back(std::move(h));
                    }
                }
            }

            // Cone of new facets from the horizon to the apex.
            std::vector<int> created;
            for (const Horizon& h : horizon) {
                Facet f;
                f.neigh.fill(-1);
                for (int j = 0; j + 1 < dim_; ++j) f.v[j] = h.ridge[j];
                f.v[dim_ - 1] = apex;
                internal_check(plane(f), "convex_hull: degenerate cone facet");
                // The ridge opposite the apex is shared with the hidden facet.
                f.neigh[dim_ - 1] = h.hidden;
                facets_.push_back(f);
                int idx = int(facets_.size()) - 1;
                created.push_back(idx);
                Facet& hid = facets_[h.hidden];
                bool relinked = false;
                for (int k = 0; k < dim_; ++k) {
                    if (hid.neigh[k] != h.src) continue;
                    std::vector<int> key;
                    for (int j = 0; j < dim_; ++j)
                        if (j != k) key.push_back(hid.v[j]);
                    std::sort(key.begin(), key.end());
                    std::vector<int> rk = h.ridge;
                    std::sort(rk.begin(), rk.end());
                    if (key == rk) {
                        hid.neigh[k] = idx;
                        relinked = true;
                        break;
                    }
                }
                internal_check(relinked, "convex_hull: horizon relink failed");
            }
            link_neighbors(created);

            // Retire the visible region and redistribute its conflicts.
            std::vector<int> orphans;
            for (int vi : visible) {
                for (int p : facets_[vi].outside)
                    if (p != apex) orphans.push_back(p);
                facets_[vi].alive = false;
                facets_[vi].outside.clear();
            }
            assign_outside(orphans, created);
            for (int idx : created)
                if (!facets_[idx].outside.empty()) stack.push_back(idx);
        }
    }
};

inline std::vector<HullFacet> convex_hull(const std::vector<double>& pts, int dim) {
    return QuickHull(pts, dim).facets();
}

}  // namespace thinlam::detail
