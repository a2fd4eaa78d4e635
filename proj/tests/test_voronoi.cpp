#include <gtest/gtest.h>

#include <random>
#include <set>

#include "bianchi/voronoi.hpp"

using namespace bianchi;

namespace {

mpq_class rat(long n, long d)
{
    mpq_class x(n, d);
    x.canonicalize();
    return x;
}

GroupElement random_element(const OrderContext& ctx, std::mt19937_64& rng, Flavor f)
{
    std::uniform_int_distribution<Int> d(-2, 2);
    GroupElement g = ctx.identity();
    for (int k = 0; k < 3; ++k) {
        g = ctx.compose(g, ctx.make_group_element({1, 0}, {d(rng), d(rng)}, {0, 0}, {1, 0}));
        g = ctx.compose(g, ctx.make_group_element({1, 0}, {0, 0}, {d(rng), d(rng)}, {1, 0}));
    }
    if (f == Flavor::GL2) g = ctx.compose(g, ctx.make_group_element(ctx.units().back(), {0, 0}, {0, 0}, {1, 0}));
    return g;
}

std::set<ConePoint> point_set(const RaySet& r) { return {r.points.begin(), r.points.end()}; }

void check_face_lattice(const OrderContext& ctx, const PerfectForm& p)
{
    const auto& P = p.rays.points;
    const int V = static_cast<int>(P.size());
    const int E = static_cast<int>(p.edges.size());
    const int F = static_cast<int>(p.facets.size());
    // cross-section is a convex 3-polytope
    EXPECT_EQ(V - E + F, 2);
    std::vector<int> ray_facets(V, 0);
    for (std::size_t f = 0; f < p.facets.size(); ++f) {
        const auto& fc = p.facets[f];
        std::vector<ConePoint> on;
        for (int t = 0; t < V; ++t) {
            mpq_class s = pair(fc.normal, P[t]);
            bool member = std::binary_search(fc.rays.begin(), fc.rays.end(), t);
            if (member) {
                EXPECT_EQ(s, 0);
                on.push_back(P[t]);
                ++ray_facets[t];
            } else {
                EXPECT_GT(s, 0);
            }
        }
        EXPECT_EQ(linalg::rank(on), 3);
        // a polygon has as many edges as vertices
        EXPECT_EQ(p.facet_edges[f].size(), fc.rays.size());
        // the facet normal is not positive semidefinite: there is a
        // neighbor on the other side
        EXPECT_FALSE(is_positive_semidefinite(ctx, fc.normal));
    }
    for (int t = 0; t < V; ++t) EXPECT_GE(ray_facets[t], 3);
    for (std::size_t e = 0; e < p.edges.size(); ++e) EXPECT_EQ(p.edge_rays[e].size(), 2u);
}

} // namespace

TEST(Facets, SimplicialCone)
{
    auto ctx = make_order(-3);
    RaySet r = make_rayset(ctx, {ModuleVector{{1, 0}, {0, 0}}, ModuleVector{{0, 0}, {1, 0}},
                                 ModuleVector{{1, 0}, {1, 0}}, ModuleVector{{1, 0}, {0, 1}}});
    ASSERT_EQ(r.dimension(), 4);
    auto f = compute_facets(-3, r);
    ASSERT_EQ(f.size(), 4u);
    for (const auto& x : f) EXPECT_EQ(x.rays.size(), 3u);
}

TEST(PerfectForms, KnownPolytopes)
{
    struct Case {
        Int D;
        std::size_t rays, facets;
    };
    // tetrahedron, octahedron, cuboctahedron, truncated tetrahedron
    for (auto c : {Case{-3, 4, 4}, Case{-4, 6, 8}, Case{-8, 12, 14}, Case{-11, 12, 8}}) {
        auto ctx = make_order(c.D);
        auto p = make_perfect(ctx, HermitianForm::identity(c.D));
        EXPECT_EQ(p.rays.size(), c.rays) << c.D;
        EXPECT_EQ(p.facets.size(), c.facets) << c.D;
        check_face_lattice(ctx, p);
    }
}

TEST(PerfectForms, MakePerfectIsFixedOnPerfectForms)
{
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> d(-3, 3);
    for (Int D : {-3, -4, -7, -15, -20, -23}) {
        auto ctx = make_order(D);
        for (int t = 0; t < 4; ++t) {
            HermitianForm f{5, rat(d(rng), 3), rat(d(rng), 7), 4, D};
            if (!is_positive_definite(ctx, f)) continue;
            auto p = make_perfect(ctx, f);
            EXPECT_EQ(p.rays.dimension(), 4);
            EXPECT_EQ(minimal_vectors(ctx, p.form).min_value, 1);
            auto q = make_perfect(ctx, p.form);
            EXPECT_EQ(q.form, p.form);
            check_face_lattice(ctx, p);
        }
    }
    auto ctx = make_order(-7);
    EXPECT_THROW(make_perfect(ctx, HermitianForm{1, 0, 0, -1, -7}), std::invalid_argument);
}

TEST(Neighbors, CrossTheFacetAndComeBack)
{
    for (Int D : {-3, -4, -7, -8, -15, -24}) {
        auto ctx = make_order(D);
        GramBasis gb(ctx);
        auto p = make_perfect(ctx, gb, HermitianForm::identity(D));
        for (const auto& fc : p.facets) {
            auto q = neighbor(ctx, gb, p, fc);
            check_face_lattice(ctx, q);
            // q = p + lambda R with lambda > 0
            HermitianForm diff = q.form + mpq_class(-1) * p.form;
            mpq_class lambda = 0;
            for (int k = 0; k < 4; ++k)
                if (fc.normal.coords()[k] != 0) {
                    lambda = diff.coords()[k] / fc.normal.coords()[k];
                    break;
                }
            EXPECT_GT(lambda, 0);
            EXPECT_EQ(diff, lambda * fc.normal);
            // facet rays stay minimal; some new ray lies on the negative side
            auto qs = point_set(q.rays);
            for (int t : fc.rays) EXPECT_TRUE(qs.count(p.rays.points[t]));
            bool fresh = false;
            for (const auto& pt : q.rays.points) fresh = fresh || pair(fc.normal, pt) < 0;
            EXPECT_TRUE(fresh);
            // the shared wall is a facet of q and crossing it returns to p
            std::set<ConePoint> wall;
            for (int t : fc.rays) wall.insert(p.rays.points[t]);
            int back = -1;
            for (std::size_t g = 0; g < q.facets.size(); ++g) {
                std::set<ConePoint> s;
                for (int t : q.facets[g].rays) s.insert(q.rays.points[t]);
                if (s == wall) back = static_cast<int>(g);
            }
            ASSERT_GE(back, 0);
            EXPECT_EQ(neighbor(ctx, gb, q, q.facets[back]).form, p.form);
        }
    }
}

TEST(Equivalence, TransformedFormsAreEquivalent)
{
    std::mt19937_64 rng(29);
    for (Int D : {-3, -4, -7, -15, -20}) {
        auto ctx = make_order(D);
        GramBasis gb(ctx);
        auto p = make_perfect(ctx, gb, HermitianForm::identity(D));
        for (Flavor fl : {Flavor::GL2, Flavor::SL2}) {
            auto self = equivalent(ctx, fl, p, p);
            ASSERT_TRUE(self.has_value());
            EXPECT_EQ(pullback(ctx, p.form, *self), p.form);
            for (int t = 0; t < 5; ++t) {
                auto g = random_element(ctx, rng, fl);
                auto q = perfect_from_form(ctx, gb, pullback(ctx, p.form, g));
                auto h = equivalent(ctx, fl, p, q);
                ASSERT_TRUE(h.has_value());
                EXPECT_TRUE(ctx.in_group(*h, fl));
                EXPECT_EQ(pullback(ctx, p.form, *h), q.form);
            }
        }
        // a neighbor with a different ray count is never equivalent
        for (const auto& fc : p.facets) {
            auto q = neighbor(ctx, gb, p, fc);
            if (q.rays.size() != p.rays.size()) {
                EXPECT_FALSE(equivalent(ctx, Flavor::GL2, p, q).has_value());
            }
        }
    }
}

TEST(Enumeration, SmallDiscriminants)
{
    EXPECT_EQ(enumerate_perfect_forms(make_order(-3), Flavor::GL2).nodes.size(), 1u);
    EXPECT_EQ(enumerate_perfect_forms(make_order(-4), Flavor::GL2).nodes.size(), 1u);
    for (Int D : {-3, -4, -7, -8, -11, -15, -19, -20, -24, -40}) {
        auto ctx = make_order(D);
        auto gl = enumerate_perfect_forms(ctx, Flavor::GL2);
        auto sl = enumerate_perfect_forms(ctx, Flavor::SL2);
        EXPECT_LE(gl.nodes.size(), sl.nodes.size()) << D;
        GramBasis gb(ctx);
        for (const auto* g : {&gl, &sl}) {
            for (std::size_t i = 0; i < g->nodes.size(); ++i) {
                const auto& n = g->nodes[i];
                ASSERT_EQ(n.edges.size(), n.perfect.facets.size());
                for (const auto& e : n.edges) {
                    EXPECT_TRUE(ctx.in_group(e.witness, g->flavor));
                    auto q = neighbor(ctx, gb, n.perfect, n.perfect.facets[e.facet]);
                    EXPECT_EQ(pullback(ctx, g->nodes[e.target].perfect.form, e.witness), q.form);
                }
                // representatives are pairwise inequivalent
                for (std::size_t j = 0; j < i; ++j)
                    EXPECT_FALSE(equivalent(ctx, g->flavor, g->nodes[j].perfect, n.perfect).has_value());
            }
        }
    }
}

TEST(Enumeration, Deterministic)
{
    auto ctx = make_order(-23);
    auto a = enumerate_perfect_forms(ctx, Flavor::SL2);
    auto b = enumerate_perfect_forms(ctx, Flavor::SL2);
    ASSERT_EQ(a.nodes.size(), b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        EXPECT_EQ(a.nodes[i].perfect.form, b.nodes[i].perfect.form);
        ASSERT_EQ(a.nodes[i].edges.size(), b.nodes[i].edges.size());
        for (std::size_t k = 0; k < a.nodes[i].edges.size(); ++k) {
            EXPECT_EQ(a.nodes[i].edges[k].target, b.nodes[i].edges[k].target);
            EXPECT_EQ(a.nodes[i].edges[k].witness, b.nodes[i].edges[k].witness);
        }
    }
}
