#pragma once

// Class groups of imaginary quadratic orders, the cuspidal/Eisenstein split of
// the homology, and growth statistics.

#include <cmath>
#include <map>
#include <optional>
#include <tuple>
#include <vector>

#include "bianchi/qfield.hpp"
#include "bianchi/zhomology.hpp"

namespace bianchi {

/// Primitive positive definite binary quadratic form a x^2 + b x y + c y^2.
struct BinaryForm {
    Int a, b, c;
    friend auto operator<=>(const BinaryForm&, const BinaryForm&) = default;
};

inline BinaryForm reduce(BinaryForm f)
{
    for (;;) {
        if (f.b > f.a || f.b <= -f.a) {
            // b -> b + 2ak in (-a, a]
            Int r = ((f.b % (2 * f.a)) + 2 * f.a) % (2 * f.a);
            if (r > f.a) r -= 2 * f.a;
            Int k = (r - f.b) / (2 * f.a);
            f.c = f.c + k * (f.b + f.a * k);
            f.b = r;
            continue;
        }
        if (f.a > f.c) {
            f = {f.c, -f.b, f.a};
            continue;
        }
        if (f.a == f.c && f.b < 0) f.b = -f.b;
        return f;
    }
}

namespace arith_detail {

inline std::tuple<Int, Int, Int> xgcd(Int a, Int b)
{
    Int x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        Int q = a / b;
        std::tie(a, b) = std::make_pair(b, a - q * b);
        std::tie(x0, x1) = std::make_pair(x1, x0 - q * x1);
        std::tie(y0, y1) = std::make_pair(y1, y0 - q * y1);
    }
    if (a < 0) return {-a, -x0, -y0};
    return {a, x0, y0};
}

inline Int mod(Int a, Int m)
{
    Int r = a % m;
    return r < 0 ? r + m : r;
}

} // namespace arith_detail

/// Gauss composition followed by reduction.
inline BinaryForm compose(const BinaryForm& f, const BinaryForm& g)
{
    using namespace arith_detail;
    BinaryForm f1 = f, f2 = g;
    if (f1.a > f2.a) std::swap(f1, f2);
    const Int s = (f1.b + f2.b) / 2, n = f2.b - s;
    Int y1, d;
    if (f2.a % f1.a == 0) {
        y1 = 0;
        d = f1.a;
    } else {
        auto [dd, u, v] = xgcd(f2.a, f1.a);
        (void)v;
        d = dd;
        y1 = u;
    }
    Int x2, y2, d1;
    if (s % d == 0) {
        y2 = -1;
        x2 = 0;
        d1 = d;
    } else {
        auto [dd, xx, yy] = xgcd(s, d);
        d1 = dd;
        x2 = xx;
        y2 = -yy;
    }
    const Int v1 = f1.a / d1, v2 = f2.a / d1;
    __int128 rr = (static_cast<__int128>(y1) * y2 % v1 * n - static_cast<__int128>(x2) * f2.c) % v1;
    Int r = mod(static_cast<Int>(rr), v1);
    Int b3 = f2.b + 2 * v2 * r;
    Int a3 = v1 * v2;
    __int128 c3 = (static_cast<__int128>(f2.c) * d1 + static_cast<__int128>(r) * (f2.b + v2 * r)) / v1;
    return reduce({a3, b3, detail::narrow(c3)});
}

/// All reduced primitive forms of discriminant D, sorted.
inline std::vector<BinaryForm> reduced_forms(Int D)
{
    std::vector<BinaryForm> out;
    for (Int a = 1; 3 * a * a <= -D; ++a)
        for (Int b = -a + 1; b <= a; ++b) {
            Int num = b * b - D;
            if (num % (4 * a) != 0) continue;
            Int c = num / (4 * a);
            if (c < a) continue;
            if (a == c && b < 0) continue;
            if (detail::gcd(detail::gcd(a, b), c) != 1) continue;
            out.push_back({a, b, c});
        }
    std::sort(out.begin(), out.end());
    return out;
}

struct ClassGroup {
    Int h = 1;
    /// d_1 | d_2 | ..., product h; empty when h = 1.
    std::vector<Int> elementary_divisors;
};

/// Structure of Cl(O_D) from the sizes of its p-power torsion subgroups.
inline ClassGroup class_group(const Discriminant& disc)
{
    const Int D = disc.value();
    const auto forms = reduced_forms(D);
    const BinaryForm one = reduce({1, D % 2 == 0 ? 0 : 1, D % 2 == 0 ? -D / 4 : (1 - D) / 4});
    ClassGroup cg;
    cg.h = static_cast<Int>(forms.size());

    auto power = [&](BinaryForm f, Int e) {
        BinaryForm r = one;
        while (e > 0) {
            if (e & 1) r = compose(r, f);
            f = compose(f, f);
            e >>= 1;
        }
        return r;
    };

    std::map<Int, std::vector<int>> exps; // prime -> cyclic factor exponents
    Int m = cg.h;
    for (Int p = 2; m > 1; ++p) {
        if (m % p != 0) continue;
        int e = 0;
        while (m % p == 0) {
            m /= p;
            ++e;
        }
        // s[k] = log_p |G[p^k]|
        std::vector<int> s{0};
        Int pk = 1;
        for (int k = 1; k <= e; ++k) {
            pk *= p;
            Int count = 0;
            for (const auto& f : forms)
                if (power(f, pk) == one) ++count;
            int lg = 0;
            for (Int c = count; c > 1; c /= p) ++lg;
            s.push_back(lg);
            if (lg == e) break;
        }
        // number of cyclic factors of order >= p^k is s[k] - s[k-1]
        std::vector<int> ge;
        for (std::size_t k = 1; k < s.size(); ++k) ge.push_back(s[k] - s[k - 1]);
        std::vector<int> list; // exponents, largest first
        for (int j = 0; j < (ge.empty() ? 0 : ge[0]); ++j) {
            int ex = 0;
            for (int v : ge)
                if (v > j) ++ex;
            list.push_back(ex);
        }
        exps[p] = list;
    }
    std::size_t n = 0;
    for (const auto& [p, l] : exps) n = std::max(n, l.size());
    std::vector<Int> inv(n, 1); // largest first
    for (const auto& [p, l] : exps)
        for (std::size_t i = 0; i < l.size(); ++i)
            for (int k = 0; k < l[i]; ++k) inv[i] *= p;
    std::reverse(inv.begin(), inv.end());
    cg.elementary_divisors = inv;
    return cg;
}

inline ClassGroup class_group(Int D) { return class_group(Discriminant(D)); }

struct CohomologySplit {
    int cusp_dim = 0;
    int eis_dim_H2 = 0;
    int eis_dim_H1 = 0;
};

/// cusp = betti_1 - (h - 1), cross-checked against betti_2.
inline CohomologySplit cusp_dimension(const HomologyResult& hr, const ClassGroup& cg, Flavor flavor, Int D)
{
    const int h = static_cast<int>(cg.h);
    CohomologySplit s;
    s.cusp_dim = hr.betti[0] - (h - 1);
    s.eis_dim_H2 = h - 1;
    const bool small = (D == -3 || D == -4);
    s.eis_dim_H1 = (flavor == Flavor::SL2 && !small) ? h : 0;
    if (s.cusp_dim < 0) throw internal_guard("cusp_dimension: negative cuspidal dimension");
    const int expect_b2 = flavor == Flavor::GL2 ? s.cusp_dim : (small ? 0 : s.cusp_dim + h);
    if (hr.betti[1] != expect_b2)
        throw internal_guard("cusp_dimension: betti_2 = " + std::to_string(hr.betti[1]) + ", expected " +
                             std::to_string(expect_b2));
    return s;
}

inline double log_order(const std::vector<mpz_class>& factors)
{
    double s = 0;
    for (const auto& f : factors) {
        long ex;
        double m = mpz_get_d_2exp(&ex, f.get_mpz_t());
        s += std::log(m) + static_cast<double>(ex) * std::log(2.0);
    }
    return s;
}

struct GrowthStats {
    double logtor = 0;
    int generator_rank = 0;
    std::optional<int> rohlfs_gap;
};

inline int generator_rank(const HomologyResult& hr)
{
    return hr.betti[0] + static_cast<int>(hr.torsion[0].size());
}

/// Euler's totient.
inline Int euler_phi(Int n)
{
    if (n <= 0) throw std::invalid_argument("euler_phi: n must be positive");
    Int r = n;
    for (Int p = 2; p * p <= n; ++p)
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            r -= r / p;
        }
    if (n > 1) r -= r / n;
    return r;
}

/// Lower bound on the SL2 cuspidal dimension from the Lefschetz number of
/// complex conjugation. The explicit formula is not available to this
/// library, so the bound is reported as absent.
inline std::optional<Int> rohlfs_lower_bound(const Discriminant&) { return std::nullopt; }

inline GrowthStats growth_stats(const HomologyResult& hr, Flavor flavor, Int D)
{
    GrowthStats g;
    const double e = flavor == Flavor::GL2 ? 2.0 : 1.5;
    g.logtor = log_order(hr.torsion[0]) / std::pow(static_cast<double>(-D), e);
    g.generator_rank = generator_rank(hr);
    if (flavor == Flavor::SL2)
        if (auto b = rohlfs_lower_bound(Discriminant(D))) {
            const int h = static_cast<int>(class_group(D).h);
            g.rohlfs_gap = hr.betti[0] - (h - 1) - static_cast<int>(*b);
        }
    return g;
}

} // namespace bianchi
