#pragma once

// Exact arithmetic in the imaginary quadratic order O_D = Z[w],
// w = (D + sqrt(D)) / 2, and in the module O_D^2.

#include <algorithm>
#include <array>
#include <compare>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bianchi/common.hpp"

namespace bianchi {

/// Element x + y*w of O_D (T = Int) or of F = Q(sqrt D) (T = mpq_class).
template <class T>
struct QuadNumber {
    T x{0};
    T y{0};

    friend bool operator==(const QuadNumber&, const QuadNumber&) = default;

    friend QuadNumber operator+(const QuadNumber& a, const QuadNumber& b)
    {
        return {detail::add(a.x, b.x), detail::add(a.y, b.y)};
    }
    friend QuadNumber operator-(const QuadNumber& a, const QuadNumber& b)
    {
        return {detail::sub(a.x, b.x), detail::sub(a.y, b.y)};
    }
    friend QuadNumber operator-(const QuadNumber& a) { return {detail::neg(a.x), detail::neg(a.y)}; }

    bool is_zero() const { return x == 0 && y == 0; }
};

using OrderElement = QuadNumber<Int>;
using FieldElement = QuadNumber<mpq_class>;

inline auto operator<=>(const OrderElement& a, const OrderElement& b)
{
    if (auto c = a.x <=> b.x; c != 0) return c;
    return a.y <=> b.y;
}

inline FieldElement to_field(const OrderElement& a) { return {mpq_class(static_cast<long>(a.x)), mpq_class(static_cast<long>(a.y))}; }

inline std::ostream& operator<<(std::ostream& os, const OrderElement& a) { return os << '(' << a.x << ',' << a.y << ')'; }

/// A fundamental discriminant D < 0.
class Discriminant {
public:
    explicit Discriminant(Int value) : value_(validate(value)) {}

    Int value() const { return value_; }
    Int abs() const { return -value_; }

    static bool is_squarefree(Int n)
    {
        if (n < 0) n = -n;
        if (n == 0) return false;
        for (Int p = 2; p * p <= n; ++p) {
            if (n % (p * p) == 0) return false;
            if (n % p == 0) n /= p;
        }
        return true;
    }

    static bool is_fundamental(Int d)
    {
        if (d >= 0) return false;
        Int r = ((d % 4) + 4) % 4;
        if (r == 1) return is_squarefree(d);
        if (r != 0) return false;
        Int m = d / 4;
        Int mr = ((m % 4) + 4) % 4;
        return (mr == 2 || mr == 3) && is_squarefree(m);
    }

private:
    static Int validate(Int d)
    {
        if (d >= 0) throw invalid_discriminant("discriminant must be negative, got " + std::to_string(d));
        Int r = ((d % 4) + 4) % 4;
        if (r != 0 && r != 1)
            throw invalid_discriminant(std::to_string(d) + " is not a discriminant (must be 0 or 1 mod 4)");
        if (!is_fundamental(d))
            throw non_fundamental_discriminant(std::to_string(d) + " is not a fundamental discriminant");
        return d;
    }

    Int value_;
};

/// Column vector (x, y) in O_D^2.
struct ModuleVector {
    OrderElement x, y;

    friend bool operator==(const ModuleVector&, const ModuleVector&) = default;
    friend auto operator<=>(const ModuleVector& a, const ModuleVector& b)
    {
        if (auto c = a.x <=> b.x; c != 0) return c;
        return a.y <=> b.y;
    }

    std::array<Int, 4> coords() const { return {x.x, x.y, y.x, y.y}; }
    static ModuleVector from_coords(const std::array<Int, 4>& c) { return {{c[0], c[1]}, {c[2], c[3]}}; }

    bool is_zero() const { return x.is_zero() && y.is_zero(); }
    bool is_primitive() const { return detail::gcd(detail::gcd(x.x, x.y), detail::gcd(y.x, y.y)) == 1; }

    friend ModuleVector operator-(const ModuleVector& v) { return {-v.x, -v.y}; }
};

inline std::ostream& operator<<(std::ostream& os, const ModuleVector& v) { return os << '[' << v.x << ',' << v.y << ']'; }

/// 2x2 matrix [[a, b], [c, d]] over O_D with its determinant.
struct GroupElement {
    OrderElement a, b, c, d;
    OrderElement det;

    friend bool operator==(const GroupElement& l, const GroupElement& r)
    {
        return l.a == r.a && l.b == r.b && l.c == r.c && l.d == r.d;
    }
    friend auto operator<=>(const GroupElement& l, const GroupElement& r)
    {
        if (auto c = l.a <=> r.a; c != 0) return c;
        if (auto c = l.b <=> r.b; c != 0) return c;
        if (auto c = l.c <=> r.c; c != 0) return c;
        return l.d <=> r.d;
    }

    std::array<Int, 8> coords() const { return {a.x, a.y, b.x, b.y, c.x, c.y, d.x, d.y}; }
};

/// The order O_D: basis {1, w}, multiplication, conjugation, norm, units.
/// Immutable after construction.
class OrderContext {
public:
    explicit OrderContext(Discriminant disc)
        : disc_(disc), D_(disc.value()), n0_((D_ * D_ - D_) / 4)
    {
        find_units();
    }

    const Discriminant& discriminant() const { return disc_; }
    Int D() const { return D_; }
    /// N(w) = (D^2 - D) / 4.
    Int norm_omega() const { return n0_; }

    template <class T>
    QuadNumber<T> mul(const QuadNumber<T>& a, const QuadNumber<T>& b) const
    {
        using detail::add, detail::sub, detail::mul;
        // w^2 = D w - n0
        T xy = mul(a.y, b.y);
        return {sub(mul(a.x, b.x), mul(T(n0_), xy)),
                add(add(mul(a.x, b.y), mul(a.y, b.x)), mul(T(D_), xy))};
    }

    template <class T>
    QuadNumber<T> conj(const QuadNumber<T>& a) const
    {
        // conj(w) = D - w
        return {detail::add(a.x, detail::mul(T(D_), a.y)), detail::neg(a.y)};
    }

    template <class T>
    T norm(const QuadNumber<T>& a) const
    {
        using detail::add, detail::mul;
        return add(add(mul(a.x, a.x), mul(T(D_), mul(a.x, a.y))), mul(T(n0_), mul(a.y, a.y)));
    }

    template <class T>
    T trace(const QuadNumber<T>& a) const
    {
        return detail::add(detail::mul(T(2), a.x), detail::mul(T(D_), a.y));
    }

    /// a / b in F.
    FieldElement div(const FieldElement& a, const FieldElement& b) const
    {
        FieldElement num = mul(a, conj(b));
        mpq_class n = norm(b);
        return {num.x / n, num.y / n};
    }

    /// a / b if the quotient lies in O_D.
    std::optional<OrderElement> exact_div(const OrderElement& a, const OrderElement& b) const
    {
        Int n = norm(b);
        OrderElement num = mul(a, conj(b));
        if (num.x % n != 0 || num.y % n != 0) return std::nullopt;
        return OrderElement{num.x / n, num.y / n};
    }

    const std::vector<OrderElement>& units() const { return units_; }

    bool is_unit(const OrderElement& a) const { return norm(a) == 1; }

    /// Inverse of a unit.
    OrderElement unit_inverse(const OrderElement& u) const { return conj(u); }

    // --- matrices and vectors -------------------------------------------

    GroupElement make_group_element(OrderElement a, OrderElement b, OrderElement c, OrderElement d) const
    {
        GroupElement g{a, b, c, d, {}};
        g.det = mul(a, d) - mul(b, c);
        return g;
    }

    GroupElement identity() const { return make_group_element({1, 0}, {0, 0}, {0, 0}, {1, 0}); }

    GroupElement scalar(const OrderElement& u) const { return make_group_element(u, {0, 0}, {0, 0}, u); }

    GroupElement compose(const GroupElement& g, const GroupElement& h) const
    {
        return make_group_element(mul(g.a, h.a) + mul(g.b, h.c), mul(g.a, h.b) + mul(g.b, h.d),
                                  mul(g.c, h.a) + mul(g.d, h.c), mul(g.c, h.b) + mul(g.d, h.d));
    }

    /// Inverse of a matrix whose determinant is a unit.
    GroupElement inverse(const GroupElement& g) const
    {
        if (!is_unit(g.det)) throw internal_guard("inverse of a matrix with non-unit determinant");
        OrderElement di = unit_inverse(g.det);
        return make_group_element(mul(di, g.d), mul(di, -g.b), mul(di, -g.c), mul(di, g.a));
    }

    ModuleVector act(const GroupElement& g, const ModuleVector& v) const
    {
        return {mul(g.a, v.x) + mul(g.b, v.y), mul(g.c, v.x) + mul(g.d, v.y)};
    }

    ModuleVector scale(const OrderElement& u, const ModuleVector& v) const { return {mul(u, v.x), mul(u, v.y)}; }

    /// det [v w] (columns v, w).
    OrderElement det(const ModuleVector& v, const ModuleVector& w) const { return mul(v.x, w.y) - mul(v.y, w.x); }

    bool in_group(const GroupElement& g, Flavor f) const
    {
        if (f == Flavor::SL2) return g.det == OrderElement{1, 0};
        return is_unit(g.det);
    }

    /// Central elements u*I of the group.
    std::vector<GroupElement> center(Flavor f) const
    {
        std::vector<GroupElement> out;
        for (const auto& u : units_) {
            GroupElement s = scalar(u);
            if (in_group(s, f)) out.push_back(s);
        }
        return out;
    }

    /// The matrix g with g*v1 = w1 and g*v2 = w2, if it has entries in O_D.
    std::optional<GroupElement> solve_map(const ModuleVector& v1, const ModuleVector& v2, const ModuleVector& w1,
                                          const ModuleVector& w2) const
    {
        // g = [w1 w2] adj([v1 v2]) / det[v1 v2]
        OrderElement delta = det(v1, v2);
        if (delta.is_zero()) return std::nullopt;
        const OrderElement &p = v1.x, &q = v2.x, &r = v1.y, &s = v2.y;
        OrderElement ga = mul(w1.x, s) - mul(w2.x, r);
        OrderElement gb = mul(w2.x, p) - mul(w1.x, q);
        OrderElement gc = mul(w1.y, s) - mul(w2.y, r);
        OrderElement gd = mul(w2.y, p) - mul(w1.y, q);
        auto a = exact_div(ga, delta);
        if (!a) return std::nullopt;
        auto b = exact_div(gb, delta);
        if (!b) return std::nullopt;
        auto c = exact_div(gc, delta);
        if (!c) return std::nullopt;
        auto d = exact_div(gd, delta);
        if (!d) return std::nullopt;
        return make_group_element(*a, *b, *c, *d);
    }

private:
    void find_units()
    {
        // N(x + y w) = (x + D y / 2)^2 + |D| y^2 / 4, so |y| <= 2 / sqrt|D|.
        for (Int y = -2; y <= 2; ++y) {
            for (Int x = -2 * (-D_) - 4; x <= 2 * (-D_) + 4; ++x) {
                OrderElement u{x, y};
                if (norm(u) == 1) units_.push_back(u);
            }
        }
        // order as powers of a generator of the cyclic unit group
        OrderElement gen = units_.front();
        for (const auto& u : units_) {
            OrderElement p = u;
            std::size_t ord = 1;
            while (!(p == OrderElement{1, 0})) {
                p = mul(p, u);
                ++ord;
            }
            if (ord == units_.size()) {
                gen = u;
                break;
            }
        }
        std::vector<OrderElement> cyc;
        OrderElement p{1, 0};
        for (std::size_t i = 0; i < units_.size(); ++i) {
            cyc.push_back(p);
            p = mul(p, gen);
        }
        units_ = std::move(cyc);
    }

    Discriminant disc_;
    Int D_;
    Int n0_;
    std::vector<OrderElement> units_;
};

/// make_order: validates D and builds the order context.
inline OrderContext make_order(Int D) { return OrderContext(Discriminant(D)); }

} // namespace bianchi
