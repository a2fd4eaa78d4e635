#pragma once

// Exact shortest-vector enumeration for positive definite rational quadratic
// forms on Z^4.

#include <array>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "bianchi/common.hpp"

namespace bianchi::lattice {

constexpr int kDim = 4;

using Gram = std::array<std::array<mpq_class, kDim>, kDim>;
using IntVec = std::array<Int, kDim>;
using Basis = std::array<IntVec, kDim>; // columns

struct ShortVectors {
    mpq_class min;
    /// One vector from each {x, -x} pair attaining the minimum.
    std::vector<IntVec> vectors;
};

inline mpq_class evaluate(const Gram& g, const IntVec& x)
{
    mpq_class s = 0;
    for (int i = 0; i < kDim; ++i) {
        if (x[i] == 0) continue;
        mpq_class row = 0;
        for (int j = 0; j < kDim; ++j)
            if (x[j] != 0) row += g[i][j] * static_cast<long>(x[j]);
        s += row * static_cast<long>(x[i]);
    }
    return s;
}

inline Gram transform(const Gram& g, const Basis& u)
{
    Gram r;
    for (int i = 0; i < kDim; ++i)
        for (int j = i; j < kDim; ++j) {
            mpq_class s = 0;
            for (int k = 0; k < kDim; ++k) {
                if (u[i][k] == 0) continue;
                mpq_class t = 0;
                for (int l = 0; l < kDim; ++l)
                    if (u[j][l] != 0) t += g[k][l] * static_cast<long>(u[j][l]);
                s += t * static_cast<long>(u[i][k]);
            }
            r[i][j] = s;
            r[j][i] = s;
        }
    return r;
}

/// Unimodular basis change (columns of the result) chosen by LLL. The Gram
/// matrix of the current basis is recomputed exactly at every step; only the
/// size-reduction coefficients are rounded in long double.
inline Basis lll_basis(const Gram& g)
{
    Basis u{};
    for (int i = 0; i < kDim; ++i) u[i][i] = 1;

    int k = 1;
    for (int iter = 0; iter < 5000 && k < kDim; ++iter) {
        Gram he = transform(g, u);
        std::array<std::array<long double, kDim>, kDim> h{}, mu{};
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j) h[i][j] = he[i][j].get_d();
        std::array<long double, kDim> bstar{};
        for (int i = 0; i < kDim; ++i) {
            for (int j = 0; j < i; ++j) {
                long double s = h[i][j];
                for (int l = 0; l < j; ++l) s -= mu[j][l] * mu[i][l] * bstar[l];
                mu[i][j] = bstar[j] != 0 ? s / bstar[j] : 0;
            }
            long double s = h[i][i];
            for (int l = 0; l < i; ++l) s -= mu[i][l] * mu[i][l] * bstar[l];
            bstar[i] = s;
        }
        bool changed = false;
        for (int j = k - 1; j >= 0; --j) {
            // |mu| = 1/2 is already size reduced; rounding it would cycle
            if (!(std::fabs(mu[k][j]) > 0.501L)) continue;
            long double r = std::round(mu[k][j]);
            if (!std::isfinite(r) || std::fabs(r) > 1e15L) return u;
            if (r != 0) {
                Int ri = static_cast<Int>(r);
                try {
                    for (int l = 0; l < kDim; ++l) u[k][l] = detail::sub(u[k][l], detail::mul(ri, u[j][l]));
                } catch (const arithmetic_overflow&) {
                    return u;
                }
                for (int l = 0; l < j; ++l) mu[k][l] -= r * mu[j][l];
                mu[k][j] -= r;
                changed = true;
            }
        }
        if (changed) continue;
        if (bstar[k] < (0.99L - mu[k][k - 1] * mu[k][k - 1]) * bstar[k - 1]) {
            std::swap(u[k], u[k - 1]);
            k = std::max(k - 1, 1);
        } else {
            ++k;
        }
    }
    return u;
}

/// Exact Cholesky data: Q(x) = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2.
inline std::optional<Gram> cholesky(const Gram& g)
{
    Gram q;
    for (int i = 0; i < kDim; ++i) {
        mpq_class d = g[i][i];
        for (int k = 0; k < i; ++k) d -= q[k][k] * q[k][i] * q[k][i];
        if (sgn(d) <= 0) return std::nullopt;
        q[i][i] = d;
        for (int j = i + 1; j < kDim; ++j) {
            mpq_class s = g[i][j];
            for (int k = 0; k < i; ++k) s -= q[k][k] * q[k][i] * q[k][j];
            q[i][j] = s / d;
        }
    }
    return q;
}

namespace detail_enum {

// Schnorr-Euchner search in long double with a relative safety margin on the
// pruning bound; every leaf is re-evaluated exactly, so the margin only has to
// cover rounding in the Cholesky data, never decide membership.
constexpr long double kSlack = 1e-9L;

struct Enumerator {
    const Gram& g; // exact Gram in the reduced basis
    std::array<std::array<long double, kDim>, kDim> q{};
    mpq_class bound;
    bool have = false;
    mpq_class best;
    long double limit = 0;
    std::vector<IntVec> found;
    IntVec y{};
    std::size_t nodes = 0;

    void set_limit(const mpq_class& v) { limit = v.get_d() * (1 + kSlack) + kSlack * 1e-9L; }

    void leaf()
    {
        mpq_class v = evaluate(g, y);
        if (have ? v > best : v > bound) return;
        if (!have || v < best) {
            have = true;
            best = v;
            found.clear();
            set_limit(best);
        }
        found.push_back(y);
    }

    void run(int level, long double partial, bool all_zero_above)
    {
        if (++nodes > 50'000'000) throw internal_guard("short vector enumeration exceeded node cap");
        long double c = 0;
        for (int j = level + 1; j < kDim; ++j)
            if (y[j] != 0) c -= q[level][j] * static_cast<long double>(y[j]);
        const long double qll = q[level][level];

        auto visit = [&](Int v) -> bool {
            long double diff = static_cast<long double>(v) - c;
            long double val = partial + qll * diff * diff;
            if (val > limit) return false;
            y[level] = v;
            if (level == 0) {
                if (!(all_zero_above && v == 0)) leaf();
            } else {
                run(level - 1, val, all_zero_above && v == 0);
            }
            return true;
        };

        if (all_zero_above) {
            for (Int v = 0;; ++v)
                if (!visit(v)) break;
        } else {
            Int v0 = static_cast<Int>(std::llround(c));
            visit(v0);
            for (Int v = v0 + 1;; ++v)
                if (!visit(v)) break;
            for (Int v = v0 - 1;; --v)
                if (!visit(v)) break;
        }
        y[level] = 0;
    }
};

} // namespace detail_enum

/// All nonzero x (up to sign) minimizing x^T g x, provided the minimum is at
/// most `bound`. Returns nullopt if no nonzero vector has value <= bound.
/// Throws internal_guard if g is not positive definite.
inline std::optional<ShortVectors> shortest(const Gram& g, const mpq_class& bound)
{
    Basis u = lll_basis(g);
    Gram h = transform(g, u);
    auto q = cholesky(h);
    if (!q) throw internal_guard("shortest: form is not positive definite");
    detail_enum::Enumerator e{h, {}, {}, false, {}, 0, {}, {}, 0};
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) e.q[i][j] = (*q)[i][j].get_d();
    e.bound = bound;
    e.set_limit(bound);
    e.run(kDim - 1, 0, true);
    if (!e.have) return std::nullopt;
    ShortVectors out;
    out.min = e.best;
    for (const auto& yv : e.found) {
        IntVec x{};
        for (int j = 0; j < kDim; ++j)
            for (int i = 0; i < kDim; ++i)
                x[j] = bianchi::detail::add(x[j], bianchi::detail::mul(u[i][j], yv[i]));
        out.vectors.push_back(x);
    }
    return out;
}

/// Minimum and minimal vectors, bounded by the smallest diagonal entry.
inline ShortVectors minimum(const Gram& g)
{
    Basis u = lll_basis(g);
    Gram h = transform(g, u);
    mpq_class b = h[0][0];
    for (int i = 1; i < kDim; ++i)
        if (h[i][i] < b) b = h[i][i];
    auto r = shortest(g, b);
    if (!r) throw internal_guard("minimum: enumeration found no vector below a diagonal entry");
    return *r;
}

} // namespace bianchi::lattice
