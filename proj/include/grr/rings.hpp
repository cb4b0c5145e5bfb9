#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

namespace grr {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;
using Complex = std::complex<double>;

/// The two-element field.  Arithmetic is mod 2; the only stored
/// nonzero coefficient is 1.
struct GF2 {
    std::uint8_t v = 0;

    GF2() = default;
    explicit GF2(long x) : v(static_cast<std::uint8_t>(((x % 2) + 2) % 2)) {}

    friend GF2 operator+(GF2 a, GF2 b) { return GF2(a.v ^ b.v); }
    friend GF2 operator-(GF2 a, GF2 b) { return GF2(a.v ^ b.v); }
    friend GF2 operator*(GF2 a, GF2 b) { return GF2(a.v & b.v); }
    GF2 operator-() const { return *this; }
    GF2& operator+=(GF2 o) { v ^= o.v; return *this; }
    GF2& operator-=(GF2 o) { v ^= o.v; return *this; }
    GF2& operator*=(GF2 o) { v &= o.v; return *this; }
    friend bool operator==(GF2 a, GF2 b) { return a.v == b.v; }
    friend bool operator!=(GF2 a, GF2 b) { return a.v != b.v; }
};

/// Per-coefficient-ring glue used by SparsePoly.  `exact` selects exact
/// equality semantics instead of tolerance-based ones.
template <class C>
struct ring_traits;

template <>
struct ring_traits<GF2> {
    static constexpr bool exact = true;
    static GF2 zero() { return GF2(); }
    static GF2 one() { return GF2(1); }
    static bool is_zero(const GF2& c) { return c.v == 0; }
    static GF2 from_long(long x) { return GF2(x); }
    static double abs2(const GF2& c) { return c.v ? 1.0 : 0.0; }
};

template <>
struct ring_traits<Rational> {
    static constexpr bool exact = true;
    static Rational zero() { return Rational(0); }
    static Rational one() { return Rational(1); }
    static bool is_zero(const Rational& c) { return c == 0; }
    static Rational from_long(long x) { return Rational(x); }
    static double abs2(const Rational& c) {
        double d = c.convert_to<double>();
        return d * d;
    }
};

template <>
struct ring_traits<double> {
    static constexpr bool exact = false;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static bool is_zero(const double& c) { return c == 0.0; }
    static double from_long(long x) { return static_cast<double>(x); }
    static double abs2(const double& c) { return c * c; }
};

template <>
struct ring_traits<Complex> {
    static constexpr bool exact = false;
    static Complex zero() { return Complex(0.0, 0.0); }
    static Complex one() { return Complex(1.0, 0.0); }
    static bool is_zero(const Complex& c) { return c == Complex(0.0, 0.0); }
    static Complex from_long(long x) { return Complex(static_cast<double>(x), 0.0); }
    static double abs2(const Complex& c) { return std::norm(c); }
};

/// Exact square root of a nonnegative rational, if it is a perfect square.
inline std::optional<Rational> rational_sqrt(const Rational& r) {
    if (r < 0) return std::nullopt;
    if (r == 0) return Rational(0);
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    BigInt sn = boost::multiprecision::sqrt(num);
    BigInt sd = boost::multiprecision::sqrt(den);
    if (sn * sn != num || sd * sd != den) return std::nullopt;
    return Rational(sn) / Rational(sd);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

/// Embeds an exact rational into another coefficient ring.
template <class C>
C rational_to(const Rational& r) {
    if constexpr (std::is_same_v<C, Rational>) {
        return r;
    } else if constexpr (std::is_same_v<C, double>) {
        return to_double(r);
    } else if constexpr (std::is_same_v<C, Complex>) {
        return Complex(to_double(r), 0.0);
    } else {
        static_assert(std::is_same_v<C, Rational>, "no rational embedding for this ring");
    }
}

}  // namespace grr
