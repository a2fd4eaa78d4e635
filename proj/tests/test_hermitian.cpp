#include <gtest/gtest.h>

#include <random>
#include <set>

#include "bianchi/hermitian.hpp"

using namespace bianchi;

namespace {

mpq_class rat(long n, long d)
{
    mpq_class x(n, d);
    x.canonicalize();
    return x;
}

// phi(v) from the matrix picture v* A v with A = [[a, bbar], [b, c]], in
// exact field arithmetic but without the library's evaluate().
mpq_class naive_value(const OrderContext& ctx, const HermitianForm& f, const ModuleVector& v)
{
    FieldElement x = to_field(v.x), y = to_field(v.y);
    FieldElement b = f.b();
    // x* a x + x* bbar y + y* b x + y* c y
    FieldElement s = FieldElement{f.a, 0};
    s = ctx.mul(s, ctx.mul(ctx.conj(x), x));
    s = s + ctx.mul(ctx.conj(x), ctx.mul(ctx.conj(b), y));
    s = s + ctx.mul(ctx.conj(y), ctx.mul(b, x));
    s = s + ctx.mul(FieldElement{f.c, 0}, ctx.mul(ctx.conj(y), y));
    EXPECT_EQ(s.y, 0);
    return s.x;
}

HermitianForm random_pd(const OrderContext& ctx, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> d(-6, 6), p(1, 9), den(1, 4);
    for (;;) {
        HermitianForm f{rat(p(rng), den(rng)), rat(d(rng), den(rng)), rat(d(rng), den(rng)),
                        rat(p(rng), den(rng)), ctx.D()};
        f.a.canonicalize();
        f.b1.canonicalize();
        f.b2.canonicalize();
        f.c.canonicalize();
        if (is_positive_definite(ctx, f)) return f;
    }
}

// Positive definite with det >= a c / 2 and a, c <= 3: its smallest
// eigenvalue is >= 1/4, which bounds the minimal vectors.
HermitianForm tame_pd(const OrderContext& ctx, std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> d(-4, 4), p(1, 3), den(1, 2);
    for (;;) {
        HermitianForm f{p(rng), rat(d(rng), den(rng)), rat(d(rng), den(rng)), p(rng), ctx.D()};
        f.b1.canonicalize();
        f.b2.canonicalize();
        if (form_det(ctx, f) * 2 >= f.a * f.c) return f;
    }
}

// Every v = (x1 + y1 t, x2 + y2 t) with |x_i|, |y_i| <= r, where t = w + k
// has real part in [-1/2, 0].
std::vector<std::pair<mpq_class, ModuleVector>> box(const OrderContext& ctx, const HermitianForm& f, Int r)
{
    const Int D = ctx.D();
    const Int k = (D % 2 == 0) ? -D / 2 : (-D - 1) / 2;
    auto g = GramBasis(ctx).gram(f);
    std::vector<std::pair<mpq_class, ModuleVector>> out;
    for (Int a = -r; a <= r; ++a)
        for (Int b = -r; b <= r; ++b)
            for (Int c = -r; c <= r; ++c)
                for (Int d = -r; d <= r; ++d) {
                    ModuleVector v{{a + k * b, b}, {c + k * d, d}};
                    if (v.is_zero()) continue;
                    out.push_back({lattice::evaluate(g, v.coords()), v});
                }
    return out;
}

} // namespace

TEST(Gram4, GaussianIdentityIsSumOfSquares)
{
    auto ctx = make_order(-4);
    auto g = gram4(ctx, HermitianForm::identity(-4));
    // w = (-4 + 2i)/2 = -2 + i; N(x1 + x2 w) = (x1 - 2 x2)^2 + x2^2
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<Int> d(-5, 5);
    for (int t = 0; t < 100; ++t) {
        lattice::IntVec x{d(rng), d(rng), d(rng), d(rng)};
        Int e = (x[0] - 2 * x[1]) * (x[0] - 2 * x[1]) + x[1] * x[1] + (x[2] - 2 * x[3]) * (x[2] - 2 * x[3]) +
                x[3] * x[3];
        EXPECT_EQ(lattice::evaluate(g, x), e);
    }
}

TEST(Gram4, EisensteinIdentityMatchesSymbolicNorm)
{
    auto ctx = make_order(-3);
    auto g = gram4(ctx, HermitianForm::identity(-3));
    // w = (-3 + sqrt -3)/2: N(x + y w) = x^2 - 3 x y + 3 y^2
    for (Int a = -3; a <= 3; ++a)
        for (Int b = -3; b <= 3; ++b)
            for (Int c = -2; c <= 2; ++c)
                for (Int d = -2; d <= 2; ++d) {
                    Int e = a * a - 3 * a * b + 3 * b * b + c * c - 3 * c * d + 3 * d * d;
                    EXPECT_EQ(lattice::evaluate(g, {a, b, c, d}), e);
                }
}

TEST(Gram4, AgreesWithDirectArithmetic)
{
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<Int> d(-7, 7);
    for (Int D : {-3, -4, -7, -23, -84, -1007}) {
        auto ctx = make_order(D);
        GramBasis gb(ctx);
        for (int t = 0; t < 20; ++t) {
            auto f = random_pd(ctx, rng);
            auto g = gb.gram(f);
            for (int k = 0; k < 20; ++k) {
                ModuleVector v{{d(rng), d(rng)}, {d(rng), d(rng)}};
                EXPECT_EQ(lattice::evaluate(g, v.coords()), naive_value(ctx, f, v));
                EXPECT_EQ(evaluate(ctx, f, v), naive_value(ctx, f, v));
            }
        }
    }
}

TEST(Gram4, RejectsIndefinite)
{
    auto ctx = make_order(-7);
    EXPECT_THROW(gram4(ctx, HermitianForm{1, 0, 0, -1, -7}), std::invalid_argument);
    EXPECT_THROW(gram4(ctx, HermitianForm{0, 0, 0, 1, -7}), std::invalid_argument);
}

TEST(Evaluate, Basics)
{
    auto ctx = make_order(-11);
    auto id = HermitianForm::identity(-11);
    EXPECT_EQ(evaluate(ctx, id, ModuleVector{{1, 0}, {0, 0}}), 1);
    EXPECT_EQ(evaluate(ctx, id, ModuleVector{{0, 0}, {0, 0}}), 0);
    std::mt19937_64 rng(9);
    auto f = random_pd(ctx, rng);
    ModuleVector v{{2, -1}, {1, 3}};
    for (const auto& u : ctx.units()) EXPECT_EQ(evaluate(ctx, f, ctx.scale(u, v)), evaluate(ctx, f, v));
}

TEST(RankOne, Basics)
{
    auto ctx = make_order(-8);
    EXPECT_EQ(rank_one(ctx, ModuleVector{{1, 0}, {0, 0}}), (ConePoint{1, 0, 0, 0}));
    EXPECT_EQ(rank_one(ctx, ModuleVector{{0, 0}, {1, 0}}), (ConePoint{0, 0, 0, 1}));
    EXPECT_THROW(rank_one(ctx, ModuleVector{}), std::invalid_argument);
}

TEST(RankOne, PairingIdentity)
{
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<Int> d(-6, 6);
    for (Int D : {-3, -4, -15, -40, -487}) {
        auto ctx = make_order(D);
        for (int k = 0; k < 10; ++k) {
            ModuleVector v{{d(rng), d(rng)}, {d(rng), d(rng)}};
            if (v.is_zero()) continue;
            auto p = rank_one(ctx, v);
            for (const auto& u : ctx.units()) EXPECT_EQ(rank_one(ctx, ctx.scale(u, v)), p);
            for (int t = 0; t < 100; ++t) {
                auto f = random_pd(ctx, rng);
                EXPECT_EQ(pair(f, p), naive_value(ctx, f, v));
            }
        }
    }
}

TEST(MinimalVectors, GaussianIdentity)
{
    auto ctx = make_order(-4);
    auto mv = minimal_vectors(ctx, HermitianForm::identity(-4));
    EXPECT_EQ(mv.min_value, 1);
    EXPECT_EQ(mv.vectors.size(), 2u);
    EXPECT_EQ(mv.all(ctx).size(), 8u);
    std::set<ConePoint> rays;
    for (const auto& v : mv.vectors) rays.insert(rank_one(ctx, v));
    EXPECT_EQ(rays, (std::set<ConePoint>{{1, 0, 0, 0}, {0, 0, 0, 1}}));
}

TEST(MinimalVectors, MatchesBoxSearch)
{
    std::mt19937_64 rng(17);
    for (Int D : {-7, -3, -4, -8}) {
        auto ctx = make_order(D);
        std::vector<HermitianForm> forms{HermitianForm::identity(D)};
        for (int t = 0; t < 8; ++t) forms.push_back(tame_pd(ctx, rng));
        for (const auto& f : forms) {
            auto mv = minimal_vectors(ctx, f);
            auto all = box(ctx, f, 6);
            mpq_class m = all.front().first;
            for (const auto& [val, v] : all) m = std::min(m, val);
            EXPECT_EQ(mv.min_value, m);
            std::set<ModuleVector> expect;
            for (const auto& [val, v] : all)
                if (val == m) expect.insert(v);
            std::set<ModuleVector> got;
            for (const auto& v : mv.all(ctx)) got.insert(v);
            // every box minimizer is found; found vectors attain the minimum
            for (const auto& v : expect) EXPECT_TRUE(got.count(v)) << v;
            for (const auto& v : got) EXPECT_EQ(naive_value(ctx, f, v), m);
            // one representative per unit orbit
            std::set<ModuleVector> reps(mv.vectors.begin(), mv.vectors.end());
            EXPECT_EQ(reps.size() * ctx.units().size(), got.size());
        }
    }
    auto ctx = make_order(-7);
    auto mv = minimal_vectors(ctx, HermitianForm::identity(-7));
    EXPECT_EQ(mv.min_value, 1);
    EXPECT_EQ(mv.vectors.size(), 2u);
}

TEST(MinimalVectors, Equivariance)
{
    std::mt19937_64 rng(19);
    for (Int D : {-7, -15, -4}) {
        auto ctx = make_order(D);
        auto g = ctx.compose(ctx.make_group_element({1, 0}, {1, 1}, {0, 0}, {1, 0}),
                             ctx.make_group_element({1, 0}, {0, 0}, {-1, 1}, {1, 0}));
        for (int t = 0; t < 5; ++t) {
            auto f = random_pd(ctx, rng);
            auto fg = pullback(ctx, f, g);
            auto m1 = minimal_vectors(ctx, f), m2 = minimal_vectors(ctx, fg);
            EXPECT_EQ(m1.min_value, m2.min_value);
            // g maps minimal vectors of f o g onto those of f
            std::set<ModuleVector> a, b;
            for (const auto& v : m2.all(ctx)) a.insert(ctx.act(g, v));
            for (const auto& v : m1.all(ctx)) b.insert(v);
            EXPECT_EQ(a, b);
            for (int k = 0; k < 5; ++k) {
                ModuleVector v{{k, 1}, {2, -k}};
                EXPECT_EQ(evaluate(ctx, fg, v), evaluate(ctx, f, ctx.act(g, v)));
            }
        }
    }
}
