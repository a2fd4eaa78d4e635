#include <gtest/gtest.h>

#include <set>

#include "bianchi/cellcomplex.hpp"

using namespace bianchi;

namespace {

struct Built {
    OrderContext ctx;
    VoronoiGraph graph;
    CellComplex cx;
};

Built build(Int D, Flavor f)
{
    auto ctx = make_order(D);
    auto g = enumerate_perfect_forms(ctx, f);
    auto cx = faces_of(ctx, g);
    classify_orbits(ctx, cx);
    return {ctx, std::move(g), std::move(cx)};
}

const std::vector<Int> kSmall{-3, -4, -7, -8, -11, -15, -20, -24};

} // namespace

TEST(Faces, TetrahedronCounts)
{
    auto b = build(-3, Flavor::GL2);
    ASSERT_EQ(b.graph.nodes.size(), 1u);
    int n[4] = {0, 0, 0, 0};
    for (const auto& c : b.cx.cells) ++n[c.dim];
    EXPECT_EQ(n[3], 1);
    EXPECT_EQ(n[2], 4);
    EXPECT_EQ(n[1], 6);
}

TEST(Faces, ClosureAndSizes)
{
    for (Int D : kSmall) {
        auto b = build(D, Flavor::GL2);
        for (std::size_t i = 0; i < b.cx.cells.size(); ++i) {
            const Cell& c = b.cx.cells[i];
            EXPECT_EQ(c.rays.dimension(), c.dim + 1);
            if (c.dim == 1) {
                EXPECT_EQ(c.rays.size(), 2u);
            }
            if (c.dim == 2) {
                EXPECT_GE(c.rays.size(), 3u);
            }
            if (c.dim == 3) {
                EXPECT_GE(c.rays.size(), 4u);
            }
            auto faces = b.cx.faces(static_cast<int>(i));
            if (c.dim == 1) EXPECT_TRUE(faces.empty());
            else EXPECT_EQ(faces.size(), c.dim == 2 ? c.rays.size() : b.graph.nodes[c.node].perfect.facets.size());
            for (int f : faces) {
                EXPECT_EQ(b.cx.cells[f].dim, c.dim - 1);
                for (const auto& p : b.cx.cells[f].rays.points) EXPECT_GE(c.rays.index_of(p), 0);
            }
        }
    }
}

TEST(Orbits, WitnessesMapRepresentatives)
{
    for (Int D : kSmall)
        for (Flavor f : {Flavor::GL2, Flavor::SL2}) {
            auto b = build(D, f);
            for (std::size_t i = 0; i < b.cx.cells.size(); ++i) {
                const auto& orb = b.cx.orbit(static_cast<int>(i));
                const auto& g = b.cx.witness[i];
                EXPECT_TRUE(b.ctx.in_group(g, f));
                auto img = transform_rayset(b.ctx, g, orb.representative.rays);
                std::set<ConePoint> a(img.points.begin(), img.points.end()),
                    c(b.cx.cells[i].rays.points.begin(), b.cx.cells[i].rays.points.end());
                EXPECT_EQ(a, c);
            }
        }
}

TEST(Orbits, StabilizersContainCenterAndHaveOrdersDividing2And3)
{
    for (Int D : kSmall)
        for (Flavor f : {Flavor::GL2, Flavor::SL2}) {
            auto b = build(D, f);
            for (int d = 0; d < 3; ++d)
                for (const auto& o : b.cx.orbits[d]) {
                    std::set<GroupElement> st(o.stabilizer.begin(), o.stabilizer.end());
                    EXPECT_EQ(st.size(), o.stabilizer.size());
                    for (const auto& z : b.ctx.center(f)) EXPECT_TRUE(st.count(z));
                    // closed under composition
                    for (const auto& x : o.stabilizer)
                        for (const auto& y : o.stabilizer) EXPECT_TRUE(st.count(b.ctx.compose(x, y)));
                    std::size_t n = o.stabilizer.size();
                    while (n % 2 == 0) n /= 2;
                    while (n % 3 == 0) n /= 3;
                    EXPECT_EQ(n, 1u) << D << " order " << o.stabilizer.size();
                }
        }
}

TEST(Orbits, SpecialLinearHasAtLeastAsManyOrbits)
{
    for (Int D : kSmall) {
        auto gl = build(D, Flavor::GL2), sl = build(D, Flavor::SL2);
        for (int d = 0; d < 3; ++d) EXPECT_GE(sl.cx.orbits[d].size(), gl.cx.orbits[d].size()) << D;
    }
}

TEST(Boundary, SquaresToZero)
{
    for (Int D : {-3, -4, -7, -8, -11, -15, -19, -20, -23, -24, -35, -40, -84})
        for (Flavor f : {Flavor::GL2, Flavor::SL2}) {
            auto b = build(D, f);
            auto d2 = boundary(b.ctx, b.cx, 2), d3 = boundary(b.ctx, b.cx, 3);
            EXPECT_EQ(d2.rows(), chain_rank(b.cx, 1));
            EXPECT_EQ(d2.cols(), chain_rank(b.cx, 2));
            EXPECT_EQ(d3.rows(), chain_rank(b.cx, 2));
            EXPECT_EQ(d3.cols(), chain_rank(b.cx, 3));
            EXPECT_EQ(d2.multiply(d3).nnz(), 0u) << D << ' ' << to_string(f);
        }
    EXPECT_THROW(boundary(make_order(-3), build(-3, Flavor::GL2).cx, 1), std::invalid_argument);
}

TEST(Boundary, IncidenceIndependentOfWitnessChoice)
{
    for (Int D : {-7, -8, -15, -20})
        for (Flavor f : {Flavor::GL2, Flavor::SL2}) {
            auto b = build(D, f);
            for (int n = 2; n <= 3; ++n)
                for (const auto& sigma : b.cx.orbits[n - 1]) {
                    if (!sigma.orientation_preserving) continue;
                    int rep = -1;
                    for (std::size_t i = 0; i < b.cx.cells.size(); ++i)
                        if (b.cx.cells[i].dim == n && b.cx.orbit_of[i] == sigma.orbit_id) {
                            rep = static_cast<int>(i);
                            break;
                        }
                    for (int face : b.cx.faces(rep)) {
                        const auto& tau = b.cx.orbit(face);
                        int base = incidence(b.ctx, b.cx, sigma, face);
                        CellComplex alt = b.cx;
                        for (const auto& s : tau.stabilizer) {
                            alt.witness[face] = b.ctx.compose(b.cx.witness[face], s);
                            int sgn_s = transported_sign(b.ctx, tau.representative.rays, tau.orientation, s) *
                                        tau.orientation.sign;
                            EXPECT_EQ(incidence(b.ctx, alt, sigma, face), base * sgn_s);
                        }
                    }
                }
        }
}

TEST(Orientation, SignMatchesMinor)
{
    auto ctx = make_order(-7);
    RaySet r = make_rayset(ctx, {ModuleVector{{1, 0}, {0, 0}}, ModuleVector{{0, 0}, {1, 0}},
                                 ModuleVector{{1, 0}, {1, 0}}});
    auto o = orient(r);
    ASSERT_EQ(o.basis.size(), 3u);
    std::vector<ConePoint> cols;
    for (int b : o.basis) cols.push_back(r.points[b]);
    EXPECT_EQ(sgn(linalg::minor(cols, o.coords)), o.sign);
    EXPECT_NE(o.sign, 0);
}
