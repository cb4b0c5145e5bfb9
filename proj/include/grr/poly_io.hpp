#pragma once

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "grr/poly.hpp"

namespace grr {

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)),
          offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

namespace detail {

/// Shortest decimal string that scans back to exactly the same double.
inline std::string double_repr(double x) {
    char buf[64];
    for (int prec = 15; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) return buf;
    }
    return buf;
}

template <class C>
struct CoeffFormat;

template <>
struct CoeffFormat<GF2> {
    // GF(2) coefficients are always 1; sign handling is trivial.
    static bool is_negative(const GF2&) { return false; }
    static GF2 abs(const GF2& c) { return c; }
    static bool is_one(const GF2& c) { return c.v == 1; }
    static std::string str(const GF2&) { return "1"; }
};

template <>
struct CoeffFormat<Rational> {
    static bool is_negative(const Rational& c) { return c < 0; }
    static Rational abs(const Rational& c) { return c < 0 ? Rational(-c) : c; }
    static bool is_one(const Rational& c) { return c == 1; }
    static std::string str(const Rational& c) {
        BigInt num = boost::multiprecision::numerator(c);
        BigInt den = boost::multiprecision::denominator(c);
        if (den == 1) return num.str();
        return num.str() + "/" + den.str();
    }
};

template <>
struct CoeffFormat<double> {
    static bool is_negative(const double& c) { return c < 0; }
    static double abs(const double& c) { return c < 0 ? -c : c; }
    static bool is_one(const double& c) { return c == 1.0; }
    static std::string str(const double& c) { return double_repr(c); }
};

template <>
struct CoeffFormat<Complex> {
    // Only real coefficients take part in sign splitting; genuinely
    // complex ones are printed in full as (a+bi).
    static bool is_negative(const Complex& c) { return c.imag() == 0.0 && c.real() < 0; }
    static Complex abs(const Complex& c) { return is_negative(c) ? -c : c; }
    static bool is_one(const Complex& c) { return c == Complex(1.0, 0.0); }
    static std::string str(const Complex& c) {
        if (c.imag() == 0.0) return double_repr(c.real());
        std::string s = "(" + double_repr(c.real());
        if (c.imag() < 0)
            s += "-" + double_repr(-c.imag());
        else
            s += "+" + double_repr(c.imag());
        return s + "i)";
    }
};

inline std::string monomial_str(const Monomial& m) {
    std::string s;
    for (std::size_t i = 0; i < m.e.size(); ++i) {
        if (m.e[i] == 0) continue;
        if (!s.empty()) s += "*";
        s += "x" + std::to_string(i + 1);
        if (m.e[i] > 1) s += "^" + std::to_string(m.e[i]);
    }
    return s;
}

/// Single-pass scanner shared by every coefficient ring.
class Cursor {
public:
    explicit Cursor(const std::string& text) : s_(text) {}

    std::size_t pos() const { return i_; }
    void skip_ws() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    }
    bool done() {
        skip_ws();
        return i_ >= s_.size();
    }
    char peek() {
        skip_ws();
        return i_ < s_.size() ? s_[i_] : '\0';
    }
    bool accept(char c) {
        skip_ws();
        if (i_ < s_.size() && s_[i_] == c) {
            ++i_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw ParseError("syntax error", pos_after_ws());
    }
    std::size_t pos_after_ws() {
        skip_ws();
        return i_;
    }

    /// Unsigned decimal integer; throws when no digit is present.
    std::string integer_digits() {
        skip_ws();
        std::size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (i_ == start) throw ParseError("syntax error", start);
        return s_.substr(start, i_ - start);
    }

    /// Unsigned decimal float: digits [. digits] [e [sign] digits].
    /// Returns the consumed slice; requires a leading digit.
    std::string float_digits() {
        skip_ws();
        std::size_t start = i_;
        while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        if (i_ == start) throw ParseError("syntax error", start);
        if (i_ < s_.size() && s_[i_] == '.') {
            ++i_;
            while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
        }
        if (i_ < s_.size() && (s_[i_] == 'e' || s_[i_] == 'E')) {
            std::size_t mark = i_;
            ++i_;
            if (i_ < s_.size() && (s_[i_] == '+' || s_[i_] == '-')) ++i_;
            if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
                while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
            } else {
                i_ = mark;  // "e" belonged to something else; back off
            }
        }
        return s_.substr(start, i_ - start);
    }

    bool starts_number() {
        skip_ws();
        return i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]));
    }

private:
    const std::string& s_;
    std::size_t i_ = 0;
};

template <class C>
struct CoeffParse;

template <>
struct CoeffParse<GF2> {
    static GF2 parse(Cursor& c) { return GF2(std::stol(c.integer_digits())); }
    static bool starts(Cursor& c) { return c.starts_number(); }
};

template <>
struct CoeffParse<Rational> {
    static Rational parse(Cursor& c) {
        std::string s = c.float_digits();
        auto dot = s.find('.');
        auto exp = s.find_first_of("eE");
        if (dot == std::string::npos && exp == std::string::npos) {
            Rational r{BigInt(s)};
            if (c.accept('/')) {
                BigInt den(c.integer_digits());
                if (den == 0) throw ParseError("zero denominator", c.pos());
                r /= Rational(den);
            }
            return r;
        }
        // Exact decimal: digits scaled by a power of ten.
        long e10 = 0;
        if (exp != std::string::npos) {
            e10 = std::stol(s.substr(exp + 1));
            s = s.substr(0, exp);
            dot = s.find('.');
        }
        if (dot != std::string::npos) {
            e10 -= static_cast<long>(s.size() - dot - 1);
            s.erase(dot, 1);
        }
        Rational r{BigInt(s)};
        BigInt p10 = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(std::abs(e10)));
        if (e10 >= 0)
            r *= Rational(p10);
        else
            r /= Rational(p10);
        return r;
    }
    static bool starts(Cursor& c) { return c.starts_number(); }
};

template <>
struct CoeffParse<double> {
    static double parse(Cursor& c) { return std::strtod(c.float_digits().c_str(), nullptr); }
    static bool starts(Cursor& c) { return c.starts_number(); }
};

template <>
struct CoeffParse<Complex> {
    static Complex parse(Cursor& c) {
        if (c.accept('(')) {
            double re = signed_part(c);
            std::size_t sign_pos = c.pos_after_ws();
            double im;
            if (c.accept('+'))
                im = signed_part(c);
            else if (c.accept('-'))
                im = -signed_part(c);
            else
                throw ParseError("syntax error", sign_pos);
            c.expect('i');
            c.expect(')');
            return Complex(re, im);
        }
        return Complex(std::strtod(c.float_digits().c_str(), nullptr), 0.0);
    }
    static bool starts(Cursor& c) { return c.starts_number() || c.peek() == '('; }

private:
    static double signed_part(Cursor& c) {
        bool neg = false;
        if (c.accept('-'))
            neg = true;
        else
            c.accept('+');
        double v = std::strtod(c.float_digits().c_str(), nullptr);
        return neg ? -v : v;
    }
};

}  // namespace detail

/// Renders terms in graded-lex descending order; parse_poly inverts this
/// exactly (including float coefficients, which use shortest round-trip
/// decimal form).
template <class C>
std::string format_poly(const SparsePoly<C>& f) {
    using CF = detail::CoeffFormat<C>;
    if (f.is_zero()) return "0";
    std::string out;
    const auto& terms = f.terms();
    for (auto it = terms.rbegin(); it != terms.rend(); ++it) {
        const auto& [m, c] = *it;
        bool neg = CF::is_negative(c);
        C a = CF::abs(c);
        if (out.empty()) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        std::string ms = detail::monomial_str(m);
        if (ms.empty()) {
            out += CF::str(a);
        } else if (CF::is_one(a)) {
            out += ms;
        } else {
            out += CF::str(a) + "*" + ms;
        }
    }
    return out;
}

/// Parses the +/- separated term grammar.  With nvars < 0 the variable
/// count is inferred from the highest index used; otherwise indices must
/// stay within 1..nvars.
template <class C>
SparsePoly<C> parse_poly(const std::string& text, int nvars = -1) {
    using CP = detail::CoeffParse<C>;
    detail::Cursor cur(text);

    struct RawTerm {
        C coeff;
        std::map<int, unsigned> exps;  // 0-based variable -> exponent
    };
    std::vector<RawTerm> raw;
    int max_var = 0;  // count of variables actually referenced

    bool first = true;
    while (true) {
        if (cur.done()) {
            if (first) break;  // empty input parses as 0
            throw ParseError("syntax error", cur.pos());
        }
        bool neg = false;
        if (cur.accept('-'))
            neg = true;
        else if (!cur.accept('+') && !first)
            throw ParseError("syntax error", cur.pos_after_ws());
        if (cur.done()) throw ParseError("syntax error", cur.pos());
        first = false;

        RawTerm term;
        term.coeff = ring_traits<C>::one();
        bool have_any = false;
        if (CP::starts(cur)) {
            term.coeff = CP::parse(cur);
            have_any = true;
            cur.accept('*');
        }
        // Factor list: xN[^e], '*'-joined (juxtaposition after the
        // coefficient is also accepted).
        while (cur.peek() == 'x') {
            cur.accept('x');
            std::size_t idx_pos = cur.pos_after_ws();
            long n = std::stol(cur.integer_digits());
            if (n < 1) throw ParseError("variable index out of range", idx_pos);
            if (nvars >= 0 && n > nvars)
                throw ParseError("variable index out of range", idx_pos);
            unsigned e = 1;
            if (cur.accept('^')) e = static_cast<unsigned>(std::stoul(cur.integer_digits()));
            term.exps[static_cast<int>(n - 1)] += e;
            max_var = std::max(max_var, static_cast<int>(n));
            have_any = true;
            if (cur.accept('*')) {
                if (cur.peek() != 'x') throw ParseError("syntax error", cur.pos_after_ws());
            }
        }
        if (neg) term.coeff = -term.coeff;
        if (!have_any) throw ParseError("syntax error", cur.pos_after_ws());
        raw.push_back(std::move(term));

        if (cur.done()) break;
        char next = cur.peek();
        if (next != '+' && next != '-') throw ParseError("syntax error", cur.pos_after_ws());
    }

    int k = nvars >= 0 ? nvars : max_var;
    SparsePoly<C> out(k);
    for (const auto& t : raw) {
        Monomial m(static_cast<std::size_t>(k));
        for (const auto& [var, e] : t.exps) {
            m.e[static_cast<std::size_t>(var)] = e;
            m.deg += e;
        }
        out.add_term(m, t.coeff);
    }
    return out;
}

}  // namespace grr
