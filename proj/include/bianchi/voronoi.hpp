#pragma once

// Perfect Hermitian forms, their facets, Voronoi neighbors, and the
// enumeration of perfect forms up to the action of GL2(O_D) or SL2(O_D).

#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "bianchi/raycell.hpp"

namespace bianchi {

struct Facet {
    /// Primitive integral form R with <R, r> >= 0 on every ray of the
    /// perfect cone and = 0 exactly on the facet rays.
    HermitianForm normal;
    /// Indices into the parent's ray list, sorted.
    std::vector<int> rays;
};

struct PerfectForm {
    HermitianForm form; // minimum 1
    RaySet rays;        // perfect cone, all minimal vectors per ray
    std::vector<Facet> facets;
    /// Pairs of facet indices meeting in a 2-dimensional face (an edge of the
    /// 3-dimensional cross-section), with the two shared rays.
    std::vector<std::array<int, 2>> edges;
    std::vector<std::vector<int>> edge_rays;
    /// For each facet, indices into `edges`.
    std::vector<std::vector<int>> facet_edges;
};

namespace voronoi_detail {

using I128 = __int128;

inline I128 gcd128(I128 a, I128 b)
{
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        I128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

/// Euclidean normal to three vectors in Z^4 (generalized cross product).
inline std::array<I128, 4> cross3(const ConePoint& u, const ConePoint& v, const ConePoint& w)
{
    auto m3 = [&](int a, int b, int c) {
        I128 r = 0;
        r += static_cast<I128>(u[a]) * (static_cast<I128>(v[b]) * w[c] - static_cast<I128>(v[c]) * w[b]);
        r -= static_cast<I128>(u[b]) * (static_cast<I128>(v[a]) * w[c] - static_cast<I128>(v[c]) * w[a]);
        r += static_cast<I128>(u[c]) * (static_cast<I128>(v[a]) * w[b] - static_cast<I128>(v[b]) * w[a]);
        return r;
    };
    return {-m3(1, 2, 3), m3(0, 2, 3), -m3(0, 1, 3), m3(0, 1, 2)};
}

inline I128 dot(const std::array<I128, 4>& n, const ConePoint& p)
{
    I128 s = 0;
    for (int i = 0; i < 4; ++i) s += n[i] * p[i];
    return s;
}

/// The form R with <R, p> proportional (positive factor -D) to the Euclidean
/// product N . p, reduced to a primitive integral form.
inline HermitianForm form_from_normal(Int D, const std::array<I128, 4>& n)
{
    mpz_class d = detail::to_mpz(D);
    mpz_class n0 = detail::to_mpz(n[0]), n1 = detail::to_mpz(n[1]), n2 = detail::to_mpz(n[2]),
              n3 = detail::to_mpz(n[3]);
    // pairing matrix middle block [[2, D], [D, (D^2+D)/2]] has determinant D
    std::array<mpz_class, 4> r{-d * n0, -((d * d + d) / 2 * n1 - d * n2), -(-d * n1 + 2 * n2), -d * n3};
    mpz_class g = 0;
    for (const auto& x : r) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), x.get_mpz_t());
    if (g == 0) throw internal_guard("facet normal vanished");
    for (auto& x : r) x /= g;
    return HermitianForm{mpq_class(r[0]), mpq_class(r[1]), mpq_class(r[2]), mpq_class(r[3]), D};
}

/// One vector of the rational kernel of the linear functionals p -> <., p>.
inline std::optional<HermitianForm> kernel_form(Int D, const std::vector<ConePoint>& pts)
{
    std::vector<std::array<mpq_class, 4>> rows;
    for (const auto& p : pts) {
        auto l = pairing_coefficients(D, p);
        rows.push_back({mpq_class(l[0]), mpq_class(l[1]), mpq_class(l[2]), mpq_class(l[3])});
    }
    std::vector<int> pivcol;
    int r = 0;
    for (int col = 0; col < 4 && r < static_cast<int>(rows.size()); ++col) {
        int piv = -1;
        for (int i = r; i < static_cast<int>(rows.size()); ++i)
            if (rows[i][col] != 0) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(rows[r], rows[piv]);
        mpq_class inv = 1 / rows[r][col];
        for (int c = 0; c < 4; ++c) rows[r][c] *= inv;
        for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
            if (i == r || rows[i][col] == 0) continue;
            mpq_class f = rows[i][col];
            for (int c = 0; c < 4; ++c) rows[i][c] -= f * rows[r][c];
        }
        pivcol.push_back(col);
        ++r;
    }
    int free = -1;
    for (int c = 0; c < 4; ++c)
        if (std::find(pivcol.begin(), pivcol.end(), c) == pivcol.end()) {
            free = c;
            break;
        }
    if (free < 0) return std::nullopt;
    std::array<mpq_class, 4> k{};
    k[free] = 1;
    for (int i = 0; i < r; ++i) k[pivcol[i]] = -rows[i][free];
    return HermitianForm::from_coords(k, D);
}

} // namespace voronoi_detail

/// All facets of the cone spanned by `rays` (which must be 4-dimensional).
inline std::vector<Facet> compute_facets(Int D, const RaySet& rays)
{
    using namespace voronoi_detail;
    const auto& P = rays.points;
    const int n = static_cast<int>(P.size());
    std::vector<Facet> out;
    std::set<std::vector<int>> seen;
    std::vector<std::vector<char>> member; // per facet, membership bitmap

    auto covered = [&](int i, int j, int k) {
        for (const auto& m : member)
            if (m[i] && m[j] && m[k]) return true;
        return false;
    };

    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = j + 1; k < n; ++k) {
                if (covered(i, j, k)) continue;
                auto nv = cross3(P[i], P[j], P[k]);
                if (nv[0] == 0 && nv[1] == 0 && nv[2] == 0 && nv[3] == 0) continue;
                I128 g = 0;
                for (auto x : nv) g = gcd128(g, x);
                for (auto& x : nv) x /= g;
                int pos = 0, neg = 0;
                std::vector<int> on;
                for (int t = 0; t < n; ++t) {
                    I128 s = dot(nv, P[t]);
                    if (s > 0) ++pos;
                    else if (s < 0) ++neg;
                    else on.push_back(t);
                }
                if (pos > 0 && neg > 0) continue;
                if (pos == 0 && neg == 0) throw internal_guard("cone is not full dimensional");
                if (neg > 0)
                    for (auto& x : nv) x = -x;
                if (!seen.insert(on).second) continue;
                std::vector<char> m(n, 0);
                for (int t : on) m[t] = 1;
                member.push_back(std::move(m));
                out.push_back(Facet{form_from_normal(D, nv), on});
            }
    std::sort(out.begin(), out.end(), [](const Facet& a, const Facet& b) { return a.rays < b.rays; });
    return out;
}

/// Fills facets, edges and the facet/edge incidence of a perfect form.
inline void compute_face_lattice(Int D, PerfectForm& p)
{
    p.facets = compute_facets(D, p.rays);
    p.edges.clear();
    p.edge_rays.clear();
    p.facet_edges.assign(p.facets.size(), {});
    for (std::size_t i = 0; i < p.facets.size(); ++i)
        for (std::size_t j = i + 1; j < p.facets.size(); ++j) {
            std::vector<int> common;
            std::set_intersection(p.facets[i].rays.begin(), p.facets[i].rays.end(), p.facets[j].rays.begin(),
                                  p.facets[j].rays.end(), std::back_inserter(common));
            if (common.size() < 2) continue;
            if (linalg::rank({p.rays.points[common[0]], p.rays.points[common[1]]}) != 2) continue;
            if (common.size() > 2) {
                std::vector<ConePoint> pts;
                for (int t : common) pts.push_back(p.rays.points[t]);
                if (linalg::rank(pts) != 2) continue;
            }
            int e = static_cast<int>(p.edges.size());
            p.edges.push_back({static_cast<int>(i), static_cast<int>(j)});
            p.edge_rays.push_back(common);
            p.facet_edges[i].push_back(e);
            p.facet_edges[j].push_back(e);
        }
}

/// phi + lambda psi for the least lambda > 0 at which a vector w with
/// psi(w) < 0 becomes minimal. phi has minimum 1 and psi >= 0 on S(phi).
inline HermitianForm advance(const OrderContext& ctx, const GramBasis& gb, const HermitianForm& phi,
                             const HermitianForm& psi)
{
    mpq_class lo = 0, up = 1;
    for (int iter = 0; iter < 2000; ++iter) {
        HermitianForm f = phi + up * psi;
        if (!is_positive_definite(ctx, f)) {
            up = (lo + up) / 2;
            continue;
        }
        auto sv = lattice::shortest(gb.gram(f), mpq_class(1));
        if (!sv) throw internal_guard("advance: minimum above 1");
        if (sv->min < 1) {
            const auto w = ModuleVector::from_coords(sv->vectors.front());
            ConePoint p = rank_one(ctx, w);
            mpq_class pw = pair(psi, p);
            if (sgn(pw) >= 0) throw internal_guard("advance: minimum dropped along a nonnegative direction");
            up = (pair(phi, p) - 1) / (-pw);
            continue;
        }
        for (const auto& x : sv->vectors)
            if (sgn(pair(psi, rank_one(ctx, ModuleVector::from_coords(x)))) < 0) return f;
        lo = up;
        up *= 2;
    }
    throw internal_guard("advance: no neighbor found within the iteration cap");
}

inline PerfectForm perfect_from_form(const OrderContext& ctx, const GramBasis& gb, const HermitianForm& f)
{
    auto mv = minimal_vectors(ctx, gb, f);
    if (mv.min_value != 1) throw internal_guard("perfect form must have minimum 1");
    PerfectForm p;
    p.form = f;
    p.rays = make_rayset(ctx, mv.all(ctx));
    if (p.rays.dimension() != 4) throw internal_guard("form is not perfect");
    compute_face_lattice(ctx.D(), p);
    return p;
}

/// Walks from a positive definite form to a perfect one by repeatedly
/// moving in a direction that vanishes on the current minimal vectors.
inline PerfectForm make_perfect(const OrderContext& ctx, const GramBasis& gb, HermitianForm f)
{
    if (!is_positive_definite(ctx, f)) throw std::invalid_argument("make_perfect: form is not positive definite");
    f = (1 / minimal_vectors(ctx, gb, f).min_value) * f;
    for (int step = 0; step < 8; ++step) {
        auto mv = minimal_vectors(ctx, gb, f);
        RaySet rs = make_rayset(ctx, mv.all(ctx));
        if (rs.dimension() == 4) return perfect_from_form(ctx, gb, f);
        auto psi = voronoi_detail::kernel_form(ctx.D(), rs.points);
        if (!psi) throw internal_guard("make_perfect: empty kernel on a deficient cone");
        if (is_positive_semidefinite(ctx, *psi)) psi = -*psi;
        f = advance(ctx, gb, f, *psi);
    }
    throw internal_guard("make_perfect: did not reach a perfect form");
}

inline PerfectForm make_perfect(const OrderContext& ctx, const HermitianForm& f)
{
    return make_perfect(ctx, GramBasis(ctx), f);
}

/// The perfect form on the other side of a facet.
inline PerfectForm neighbor(const OrderContext& ctx, const GramBasis& gb, const PerfectForm& p, const Facet& facet)
{
    return perfect_from_form(ctx, gb, advance(ctx, gb, p.form, facet.normal));
}

inline std::vector<Int> perfect_key(const OrderContext& ctx, const PerfectForm& p)
{
    auto k = p.rays.key();
    mpq_class d = form_det(ctx, p.form);
    k.push_back(detail::narrow(mpz_class(d.get_num())));
    k.push_back(detail::narrow(mpz_class(d.get_den())));
    return k;
}

/// g with q(v) -> q(g v) carrying rays(p2) onto rays(p1), i.e. p2 = p1 o g.
inline std::optional<GroupElement> equivalent(const OrderContext& ctx, Flavor flavor, const PerfectForm& p1,
                                              const PerfectForm& p2)
{
    if (form_det(ctx, p1.form) != form_det(ctx, p2.form)) return std::nullopt;
    auto g = find_map(ctx, flavor, p2.rays, p1.rays);
    if (g && !(pullback(ctx, p1.form, *g) == p2.form)) throw internal_guard("equivalent: ray map is not a form map");
    return g;
}

struct VoronoiEdge {
    int facet;
    int target;
    /// neighbor(node, facet) = nodes[target] o witness
    GroupElement witness;
};

struct VoronoiNode {
    PerfectForm perfect;
    std::vector<VoronoiEdge> edges;
};

struct VoronoiGraph {
    Int D = 0;
    Flavor flavor = Flavor::GL2;
    std::vector<VoronoiNode> nodes;
};

/// Breadth-first enumeration of perfect forms modulo the group, starting at
/// the perfection of the identity form. Deterministic.
inline VoronoiGraph enumerate_perfect_forms(const OrderContext& ctx, Flavor flavor)
{
    GramBasis gb(ctx);
    VoronoiGraph graph;
    graph.D = ctx.D();
    graph.flavor = flavor;
    std::map<std::vector<Int>, std::vector<int>> buckets;

    auto add = [&](PerfectForm p) {
        int id = static_cast<int>(graph.nodes.size());
        buckets[perfect_key(ctx, p)].push_back(id);
        graph.nodes.push_back(VoronoiNode{std::move(p), {}});
        return id;
    };
    add(make_perfect(ctx, gb, HermitianForm::identity(ctx.D())));

    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
        const std::size_t nf = graph.nodes[i].perfect.facets.size();
        std::vector<VoronoiEdge> edges;
        for (std::size_t f = 0; f < nf; ++f) {
            PerfectForm q = neighbor(ctx, gb, graph.nodes[i].perfect, graph.nodes[i].perfect.facets[f]);
            int target = -1;
            GroupElement w = ctx.identity();
            auto it = buckets.find(perfect_key(ctx, q));
            if (it != buckets.end())
                for (int j : it->second) {
                    if (auto g = equivalent(ctx, flavor, graph.nodes[j].perfect, q)) {
                        target = j;
                        w = *g;
                        break;
                    }
                }
            if (target < 0) target = add(std::move(q));
            edges.push_back(VoronoiEdge{static_cast<int>(f), target, w});
        }
        graph.nodes[i].edges = std::move(edges);
    }
    return graph;
}

} // namespace bianchi
