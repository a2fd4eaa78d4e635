#pragma once

// Binary Hermitian forms over O_D, their linear coordinates, and exact
// minimal-vector enumeration through the associated quadratic form on Z^4.

#include <algorithm>
#include <array>
#include <map>
#include <ostream>
#include <vector>

#include "bianchi/lattice.hpp"
#include "bianchi/qfield.hpp"

namespace bianchi {

/// phi(x, y) = a x xbar + b x ybar + bbar xbar y + c y ybar with
/// b = b1 + b2 w. As a matrix, A = [[a, bbar], [b, c]] and phi(v) = v* A v.
struct HermitianForm {
    mpq_class a, b1, b2, c;
    Int D = 0;

    std::array<mpq_class, 4> coords() const { return {a, b1, b2, c}; }
    static HermitianForm from_coords(const std::array<mpq_class, 4>& k, Int D) { return {k[0], k[1], k[2], k[3], D}; }

    FieldElement b() const { return {b1, b2}; }

    friend bool operator==(const HermitianForm& l, const HermitianForm& r)
    {
        return l.D == r.D && l.a == r.a && l.b1 == r.b1 && l.b2 == r.b2 && l.c == r.c;
    }

    friend HermitianForm operator+(const HermitianForm& l, const HermitianForm& r)
    {
        return {l.a + r.a, l.b1 + r.b1, l.b2 + r.b2, l.c + r.c, l.D};
    }
    friend HermitianForm operator*(const mpq_class& s, const HermitianForm& f)
    {
        return {s * f.a, s * f.b1, s * f.b2, s * f.c, f.D};
    }
    friend HermitianForm operator-(const HermitianForm& f) { return {-f.a, -f.b1, -f.b2, -f.c, f.D}; }

    static HermitianForm identity(Int D) { return {1, 0, 0, 1, D}; }
};

inline std::ostream& operator<<(std::ostream& os, const HermitianForm& f)
{
    return os << "(a=" << f.a << ", b=" << f.b1 << "+" << f.b2 << "w, c=" << f.c << ")";
}

/// Linear coordinates (p0, p1, p2, p3) of a point in the cone spanned by
/// rank-one forms: q(v) = v v* with p0 = N(x), p1 + p2 w = x ybar, p3 = N(y).
/// Rank-one points are integral.
using ConePoint = std::array<Int, 4>;

/// det(phi) = a c - N(b); invariant under phi -> phi o g for |det g| = 1.
inline mpq_class form_det(const OrderContext& ctx, const HermitianForm& f) { return f.a * f.c - ctx.norm(f.b()); }

inline bool is_positive_definite(const OrderContext& ctx, const HermitianForm& f)
{
    return sgn(f.a) > 0 && sgn(form_det(ctx, f)) > 0;
}

inline bool is_positive_semidefinite(const OrderContext& ctx, const HermitianForm& f)
{
    return sgn(f.a) >= 0 && sgn(f.c) >= 0 && sgn(form_det(ctx, f)) >= 0;
}

inline ConePoint rank_one(const OrderContext& ctx, const ModuleVector& v)
{
    if (v.is_zero()) throw std::invalid_argument("rank_one: zero vector");
    OrderElement z = ctx.mul(v.x, ctx.conj(v.y));
    return {ctx.norm(v.x), z.x, z.y, ctx.norm(v.y)};
}

/// Coefficients L(p) with <phi, p> = a L0 + b1 L1 + b2 L2 + c L3.
/// <phi, p> = a p0 + Tr(b (p1 + p2 w)) + c p3.
inline std::array<mpz_class, 4> pairing_coefficients(Int D, const ConePoint& p)
{
    mpz_class d(static_cast<long>(D));
    mpz_class p1(static_cast<long>(p[1])), p2(static_cast<long>(p[2]));
    return {mpz_class(static_cast<long>(p[0])), 2 * p1 + d * p2, d * p1 + (d * d + d) / 2 * p2,
            mpz_class(static_cast<long>(p[3]))};
}

inline mpq_class pair(const HermitianForm& f, const ConePoint& p)
{
    auto l = pairing_coefficients(f.D, p);
    return f.a * l[0] + f.b1 * l[1] + f.b2 * l[2] + f.c * l[3];
}

/// phi(v) by direct arithmetic in F.
inline mpq_class evaluate(const OrderContext& ctx, const HermitianForm& f, const ModuleVector& v)
{
    FieldElement x = to_field(v.x), y = to_field(v.y);
    FieldElement bxy = ctx.mul(f.b(), ctx.mul(x, ctx.conj(y)));
    return f.a * ctx.norm(x) + ctx.trace(bxy) + f.c * ctx.norm(y);
}

/// Pullback phi o g, i.e. the form v -> phi(g v); matrix g* A g.
inline HermitianForm pullback(const OrderContext& ctx, const HermitianForm& f, const GroupElement& g)
{
    // A = [[a, bbar], [b, c]]
    std::array<std::array<FieldElement, 2>, 2> A{{{FieldElement{f.a, 0}, ctx.conj(f.b())},
                                                  {f.b(), FieldElement{f.c, 0}}}};
    std::array<std::array<FieldElement, 2>, 2> G{{{to_field(g.a), to_field(g.b)}, {to_field(g.c), to_field(g.d)}}};
    auto entry = [&](int i, int j) {
        FieldElement s{0, 0};
        for (int k = 0; k < 2; ++k)
            for (int l = 0; l < 2; ++l) s = s + ctx.mul(ctx.mul(ctx.conj(G[k][i]), A[k][l]), G[l][j]);
        return s;
    };
    FieldElement a = entry(0, 0), b = entry(1, 0), c = entry(1, 1);
    if (a.y != 0 || c.y != 0) throw internal_guard("pullback: diagonal not real");
    return {a.x, b.x, b.y, c.x, f.D};
}

/// Integer matrices 2 H_k with L_k(q(v)) = v^T H_k v on Z^4 coordinates
/// (x1, x2, y1, y2) of v = (x1 + x2 w, y1 + y2 w).
class GramBasis {
public:
    explicit GramBasis(const OrderContext& ctx)
    {
        auto unit = [](int i) {
            std::array<Int, 4> e{};
            e[i] = 1;
            return ModuleVector::from_coords(e);
        };
        auto lk = [&](const ModuleVector& v) { return pairing_coefficients(ctx.D(), rank_one(ctx, v)); };
        for (int i = 0; i < 4; ++i) {
            auto li = lk(unit(i));
            for (int k = 0; k < 4; ++k) twice_[k][i][i] = 2 * li[k];
            for (int j = i + 1; j < 4; ++j) {
                auto cij = unit(i).coords();
                cij[j] = 1;
                auto lij = lk(ModuleVector::from_coords(cij));
                auto lj = lk(unit(j));
                for (int k = 0; k < 4; ++k) {
                    twice_[k][i][j] = lij[k] - li[k] - lj[k];
                    twice_[k][j][i] = twice_[k][i][j];
                }
            }
        }
    }

    lattice::Gram gram(const HermitianForm& f) const
    {
        auto k = f.coords();
        lattice::Gram g;
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) {
                mpq_class s = 0;
                for (int t = 0; t < 4; ++t)
                    if (twice_[t][i][j] != 0) s += k[t] * twice_[t][i][j];
                g[i][j] = s / 2;
            }
        return g;
    }

private:
    std::array<std::array<std::array<mpz_class, 4>, 4>, 4> twice_;
};

/// Gram matrix of v -> phi(v) on Z^4; rejects forms that are not positive definite.
inline lattice::Gram gram4(const OrderContext& ctx, const HermitianForm& f)
{
    if (!is_positive_definite(ctx, f)) throw std::invalid_argument("gram4: form is not positive definite");
    return GramBasis(ctx).gram(f);
}

/// The unit orbit {u v} of v, and its canonical representative (the
/// lexicographically largest coordinate tuple).
inline std::vector<ModuleVector> unit_orbit(const OrderContext& ctx, const ModuleVector& v)
{
    std::vector<ModuleVector> out;
    for (const auto& u : ctx.units()) out.push_back(ctx.scale(u, v));
    std::sort(out.begin(), out.end());
    return out;
}

inline ModuleVector canonical_unit_rep(const OrderContext& ctx, const ModuleVector& v)
{
    auto orbit = unit_orbit(ctx, v);
    return orbit.back();
}

struct MinimalVectorSet {
    mpq_class min_value;
    /// One canonical representative per unit orbit, sorted.
    std::vector<ModuleVector> vectors;

    /// Every minimal vector (all unit multiples), sorted.
    std::vector<ModuleVector> all(const OrderContext& ctx) const
    {
        std::vector<ModuleVector> out;
        for (const auto& v : vectors) {
            auto o = unit_orbit(ctx, v);
            out.insert(out.end(), o.begin(), o.end());
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

inline MinimalVectorSet to_unit_orbits(const OrderContext& ctx, const lattice::ShortVectors& sv)
{
    MinimalVectorSet out;
    out.min_value = sv.min;
    for (const auto& x : sv.vectors) out.vectors.push_back(canonical_unit_rep(ctx, ModuleVector::from_coords(x)));
    std::sort(out.vectors.begin(), out.vectors.end());
    out.vectors.erase(std::unique(out.vectors.begin(), out.vectors.end()), out.vectors.end());
    return out;
}

inline MinimalVectorSet minimal_vectors(const OrderContext& ctx, const GramBasis& gb, const HermitianForm& f)
{
    if (!is_positive_definite(ctx, f)) throw std::invalid_argument("minimal_vectors: form is not positive definite");
    return to_unit_orbits(ctx, lattice::minimum(gb.gram(f)));
}

inline MinimalVectorSet minimal_vectors(const OrderContext& ctx, const HermitianForm& f)
{
    return minimal_vectors(ctx, GramBasis(ctx), f);
}

} // namespace bianchi
