#pragma once

// Cones spanned by rank-one forms q(v), kept together with every vector of
// O_D^2 that realizes each ray, and the search for group elements carrying one
// such cone onto another.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "bianchi/hermitian.hpp"

namespace bianchi {

/// Exact integer linear algebra on small sets of cone points.
namespace linalg {

/// Rank of a list of integer 4-vectors (fraction-free elimination).
inline int rank(const std::vector<ConePoint>& pts)
{
    std::vector<std::array<mpz_class, 4>> m;
    for (const auto& p : pts) m.push_back({detail::to_mpz(p[0]), detail::to_mpz(p[1]), detail::to_mpz(p[2]), detail::to_mpz(p[3])});
    int r = 0;
    for (int col = 0; col < 4 && r < static_cast<int>(m.size()); ++col) {
        int piv = -1;
        for (int i = r; i < static_cast<int>(m.size()); ++i)
            if (m[i][col] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(m[r], m[piv]);
        for (int i = r + 1; i < static_cast<int>(m.size()); ++i) {
            if (m[i][col] == 0) continue;
            mpz_class f = m[i][col], p = m[r][col];
            for (int c = col; c < 4; ++c) m[i][c] = m[i][c] * p - m[r][c] * f;
        }
        ++r;
    }
    return r;
}

/// Determinant of a k x k integer matrix (Bareiss).
inline mpz_class det(std::vector<std::vector<mpz_class>> a)
{
    const int n = static_cast<int>(a.size());
    if (n == 0) return 1;
    int sign = 1;
    mpz_class prev = 1;
    for (int k = 0; k < n - 1; ++k) {
        if (a[k][k] == 0) {
            int piv = -1;
            for (int i = k + 1; i < n; ++i)
                if (a[i][k] != 0) {
                    piv = i;
                    break;
                }
            if (piv < 0) return 0;
            std::swap(a[k], a[piv]);
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i)
            for (int j = k + 1; j < n; ++j) {
                mpz_class t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
                mpz_divexact(t.get_mpz_t(), t.get_mpz_t(), prev.get_mpz_t());
                a[i][j] = t;
            }
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

/// Determinant of the vectors `cols` restricted to coordinates `coords`.
inline mpz_class minor(const std::vector<ConePoint>& cols, const std::vector<int>& coords)
{
    std::vector<std::vector<mpz_class>> a(coords.size(), std::vector<mpz_class>(cols.size()));
    for (std::size_t i = 0; i < coords.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) a[i][j] = detail::to_mpz(cols[j][coords[i]]);
    return det(std::move(a));
}

} // namespace linalg

/// A polyhedral cone given by its extreme rays q(v). `vectors[i]` lists every
/// w in O_D^2 with q(w) = points[i].
struct RaySet {
    std::vector<ConePoint> points;
    std::vector<std::vector<ModuleVector>> vectors;
    /// profile[i]: sorted N(det[v_i v_j]) over j != i. Invariant under the group.
    std::vector<std::vector<Int>> profiles;

    std::size_t size() const { return points.size(); }

    int index_of(const ConePoint& p) const
    {
        auto it = std::lower_bound(points.begin(), points.end(), p);
        if (it == points.end() || *it != p) return -1;
        return static_cast<int>(it - points.begin());
    }

    /// Group-invariant bucketing key.
    std::vector<Int> key() const
    {
        std::vector<std::vector<Int>> ps = profiles;
        std::sort(ps.begin(), ps.end());
        std::vector<Int> k{static_cast<Int>(points.size())};
        for (const auto& p : ps) {
            k.insert(k.end(), p.begin(), p.end());
            k.push_back(-1);
        }
        return k;
    }

    int dimension() const { return linalg::rank(points); }
};

/// Builds a RaySet from vectors (any multiplicity; grouped by their ray).
inline RaySet make_rayset(const OrderContext& ctx, const std::vector<ModuleVector>& vecs)
{
    std::map<ConePoint, std::vector<ModuleVector>> by_ray;
    for (const auto& v : vecs) by_ray[rank_one(ctx, v)].push_back(v);
    RaySet r;
    for (auto& [p, vs] : by_ray) {
        std::sort(vs.begin(), vs.end());
        vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
        r.points.push_back(p);
        r.vectors.push_back(std::move(vs));
    }
    r.profiles.resize(r.points.size());
    for (std::size_t i = 0; i < r.points.size(); ++i) {
        for (std::size_t j = 0; j < r.points.size(); ++j)
            if (i != j) r.profiles[i].push_back(ctx.norm(ctx.det(r.vectors[i][0], r.vectors[j][0])));
        std::sort(r.profiles[i].begin(), r.profiles[i].end());
    }
    return r;
}

/// Sub-cone on a subset of ray indices.
inline RaySet sub_rayset(const OrderContext& ctx, const RaySet& parent, const std::vector<int>& idx)
{
    std::vector<ModuleVector> vs;
    for (int i : idx) vs.insert(vs.end(), parent.vectors[i].begin(), parent.vectors[i].end());
    return make_rayset(ctx, vs);
}

/// Image g.S of a ray set, with g.q(v) = q(g v).
inline RaySet transform_rayset(const OrderContext& ctx, const GroupElement& g, const RaySet& s)
{
    std::vector<ModuleVector> vs;
    for (const auto& list : s.vectors)
        for (const auto& v : list) vs.push_back(ctx.act(g, v));
    return make_rayset(ctx, vs);
}

/// Group elements g of the given flavor with g.A = B. With `all` false, stops
/// at the first; otherwise returns the full set (sorted).
inline std::vector<GroupElement> find_maps(const OrderContext& ctx, Flavor flavor, const RaySet& A, const RaySet& B,
                                           bool all)
{
    std::vector<GroupElement> out;
    const std::size_t n = A.size();
    if (n != B.size() || n < 2) return out;

    // profile multiplicities in B, to anchor on the rarest profiles
    std::map<std::vector<Int>, std::vector<int>> b_by_profile;
    for (std::size_t k = 0; k < n; ++k) b_by_profile[B.profiles[k]].push_back(static_cast<int>(k));
    auto candidates = [&](std::size_t i) -> const std::vector<int>* {
        auto it = b_by_profile.find(A.profiles[i]);
        return it == b_by_profile.end() ? nullptr : &it->second;
    };
    std::size_t i0 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto* c = candidates(i);
        if (!c) return out;
        if (c->size() * B.vectors[(*c)[0]].size() < candidates(i0)->size() * B.vectors[(*candidates(i0))[0]].size())
            i0 = i;
    }
    std::size_t i1 = (i0 == 0) ? 1 : 0;
    for (std::size_t i = 0; i < n; ++i)
        if (i != i0 && candidates(i)->size() < candidates(i1)->size()) i1 = i;

    const ModuleVector& v1 = A.vectors[i0][0];
    const ModuleVector& v2 = A.vectors[i1][0];
    const Int nd = ctx.norm(ctx.det(v1, v2));
    const auto center = ctx.center(flavor);

    auto maps_all = [&](const GroupElement& g) {
        for (std::size_t t = 0; t < n; ++t)
            if (B.index_of(rank_one(ctx, ctx.act(g, A.vectors[t][0]))) < 0) return false;
        return true;
    };

    for (int j : *candidates(i0)) {
        std::vector<ModuleVector> tried;
        for (const auto& w1 : B.vectors[j]) {
            if (!all) {
                bool dup = false;
                for (const auto& c : center)
                    if (std::find(tried.begin(), tried.end(), ctx.act(c, w1)) != tried.end()) dup = true;
                if (dup) continue;
                tried.push_back(w1);
            }
            for (int k : *candidates(i1)) {
                if (k == j) continue;
                for (const auto& w2 : B.vectors[k]) {
                    if (ctx.norm(ctx.det(w1, w2)) != nd) continue;
                    auto g = ctx.solve_map(v1, v2, w1, w2);
                    if (!g || !ctx.in_group(*g, flavor)) continue;
                    if (!maps_all(*g)) continue;
                    out.push_back(*g);
                    if (!all) return out;
                }
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline std::optional<GroupElement> find_map(const OrderContext& ctx, Flavor flavor, const RaySet& A, const RaySet& B)
{
    auto r = find_maps(ctx, flavor, A, B, false);
    if (r.empty()) return std::nullopt;
    return r.front();
}

} // namespace bianchi
