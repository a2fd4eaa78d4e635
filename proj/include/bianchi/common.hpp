#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <gmpxx.h>

namespace bianchi {

using Int = std::int64_t;

/// D >= 0 or D not congruent to 0, 1 mod 4.
struct invalid_discriminant : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A discriminant that is not the discriminant of a quadratic field.
struct non_fundamental_discriminant : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when an internal consistency check fails. Indicates a bug, not a
/// mathematical case.
struct internal_guard : std::logic_error {
    using std::logic_error::logic_error;
};

/// Machine-word arithmetic left its exact range.
struct arithmetic_overflow : internal_guard {
    using internal_guard::internal_guard;
};

struct cache_corruption : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Flavor { GL2, SL2 };

inline std::string to_string(Flavor f) { return f == Flavor::GL2 ? "gl2" : "sl2"; }

inline Flavor parse_flavor(const std::string& s)
{
    if (s == "gl2" || s == "GL2") return Flavor::GL2;
    if (s == "sl2" || s == "SL2") return Flavor::SL2;
    throw std::invalid_argument("unknown group flavor '" + s + "' (expected gl2 or sl2)");
}

namespace detail {

// Checked word arithmetic. Overloads for other number types fall through to
// the plain operators, which lets the quadratic-number templates serve both
// the order (Int) and the field (mpq_class).
inline Int add(Int a, Int b)
{
    Int r;
    if (__builtin_add_overflow(a, b, &r)) throw arithmetic_overflow("int64 add overflow");
    return r;
}
inline Int sub(Int a, Int b)
{
    Int r;
    if (__builtin_sub_overflow(a, b, &r)) throw arithmetic_overflow("int64 sub overflow");
    return r;
}
inline Int mul(Int a, Int b)
{
    Int r;
    if (__builtin_mul_overflow(a, b, &r)) throw arithmetic_overflow("int64 mul overflow");
    return r;
}
inline Int neg(Int a) { return sub(0, a); }

inline mpq_class add(const mpq_class& a, const mpq_class& b) { return a + b; }
inline mpq_class sub(const mpq_class& a, const mpq_class& b) { return a - b; }
inline mpq_class mul(const mpq_class& a, const mpq_class& b) { return a * b; }
inline mpq_class neg(const mpq_class& a) { return -a; }

inline mpz_class add(const mpz_class& a, const mpz_class& b) { return a + b; }
inline mpz_class sub(const mpz_class& a, const mpz_class& b) { return a - b; }
inline mpz_class mul(const mpz_class& a, const mpz_class& b) { return a * b; }
inline mpz_class neg(const mpz_class& a) { return -a; }

inline Int narrow(const mpz_class& z)
{
    if (!z.fits_slong_p()) throw arithmetic_overflow("integer does not fit in int64");
    return z.get_si();
}

inline Int narrow(__int128 v)
{
    if (v > INT64_MAX || v < INT64_MIN) throw arithmetic_overflow("int128 does not fit in int64");
    return static_cast<Int>(v);
}

inline Int gcd(Int a, Int b)
{
    a = a < 0 ? -a : a;
    b = b < 0 ? -b : b;
    while (b != 0) {
        Int t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline mpz_class to_mpz(__int128 v)
{
    bool negative = v < 0;
    unsigned __int128 u = negative ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
    mpz_class hi(static_cast<unsigned long>(u >> 64));
    mpz_class lo(static_cast<unsigned long>(u & 0xFFFFFFFFFFFFFFFFULL));
    mpz_class r = (hi << 64) + lo;
    return negative ? mpz_class(-r) : r;
}

inline mpz_class to_mpz(Int v) { return mpz_class(static_cast<long>(v)); }

} // namespace detail
} // namespace bianchi
