#pragma once

#include <optional>
#include <stdexcept>

#include "grr/rings.hpp"
#include "grr/schur.hpp"
#include "grr/weights.hpp"

namespace grr {

enum class Field { RealMod2, ComplexInt };

/// Falling-factorial binomial: defined for any integer n and r >= 0
/// (so C(-1, 0) = 1), matching the generating-function convention.
inline BigInt binomial(long n, long r) {
    if (r < 0) return BigInt(0);
    BigInt acc = 1;
    for (long i = 0; i < r; ++i) {
        acc *= n - i;
        acc /= i + 1;  // exact at every step
    }
    return acc;
}

inline long binomial_long(long n, long r) {
    return binomial(n, r).convert_to<long>();
}

/// Top Stiefel-Whitney class of the bundle with the given weights:
/// the mod-2 product of all weights, in the Schur basis.  Any weight
/// that vanishes mod 2 kills the class.
inline SchurExpansion<GF2> top_sw_class(const WeightSystem& ws) {
    ws.validate();
    SparsePoly<GF2> prod = SparsePoly<GF2>::one(ws.k);
    for (const auto& w : ws.weights) {
        SparsePoly<GF2> wm(ws.k);
        for (const auto& [m, c] : w.terms())
            wm.add_term(m, GF2(boost::multiprecision::numerator(c).convert_to<long>()));
        prod = prod * wm;  // a zero factor zeroes the product
        if (prod.is_zero()) break;
    }
    if (prod.is_zero()) {
        SchurExpansion<GF2> z;
        z.k = ws.k;
        return z;
    }
    return expand_in_schur(prod, ws.k);
}

/// Top Chern class: the exact integer product of all weights, in the
/// Schur basis.
inline SchurExpansion<Rational> top_chern_class(const WeightSystem& ws) {
    ws.validate();
    SparsePoly<Rational> prod = SparsePoly<Rational>::one(ws.k);
    for (const auto& w : ws.weights) {
        prod = prod * w;
        if (prod.is_zero()) break;
    }
    if (prod.is_zero()) {
        SchurExpansion<Rational> z;
        z.k = ws.k;
        return z;
    }
    return expand_in_schur(prod, ws.k);
}

/// Does the class survive restriction to the Grassmannian of k-planes
/// in n-space?
template <class C>
bool survives_in(const SchurExpansion<C>& cls, int n) {
    return !truncate_to_grassmannian(cls, n).is_zero();
}

/// Least lambda_1 over the support; the class survives exactly for
/// n >= k + that minimum.
template <class C>
std::optional<int> minimal_survival_n(const SchurExpansion<C>& cls) {
    if (cls.is_zero()) return std::nullopt;
    int best = -1;
    for (const auto& [lam, c] : cls.coeffs) {
        int l1 = lam.first();
        if (best < 0 || l1 < best) best = l1;
    }
    return cls.k + best;
}

/// Least n at which the top class of the d-th symmetric power survives;
/// absent when the class already vanishes over the infinite Grassmannian.
inline std::optional<int> minimal_n(int d, int k, Field field) {
    WeightSystem ws = symmetric_power_weights(d, k);
    if (field == Field::RealMod2) return minimal_survival_n(top_sw_class(ws));
    return minimal_survival_n(top_chern_class(ws));
}

// ---- Bound formulas ------------------------------------------------------

/// k + C(d+k-1, d), for odd d: the guaranteed-zero dimension for one
/// polynomial over the reals.
inline long bound_thm4(int d, int k) {
    if (d < 1 || k < 1) throw std::invalid_argument("bound arguments must be >= 1");
    if (d % 2 == 0) throw std::invalid_argument("this bound requires odd degree");
    return k + binomial_long(d + k - 1, d);
}

/// k + m * sum over odd delta <= d of C(delta+k-1, delta): m polynomials
/// of degree <= d with all odd-degree parts killed.
inline long bound_thm5(int d, int k, int m) {
    if (d < 1 || k < 1 || m < 1) throw std::invalid_argument("bound arguments must be >= 1");
    if (d % 2 == 0) throw std::invalid_argument("this bound requires odd degree");
    long s = 0;
    for (int delta = 1; delta <= d; delta += 2) s += binomial_long(delta + k - 1, delta);
    return k + static_cast<long>(m) * s;
}

/// Complex analogue of the single-polynomial bound; same formula, any d.
inline long bound_thm6(int d, int k) {
    if (d < 1 || k < 1) throw std::invalid_argument("bound arguments must be >= 1");
    return k + binomial_long(d + k - 1, d);
}

/// k + m * C(d+k, d): m complex polynomials of degree <= d, zero
/// constant term.
inline long bound_thm7(int d, int k, int m) {
    if (d < 1 || k < 1 || m < 1) throw std::invalid_argument("bound arguments must be >= 1");
    return k + static_cast<long>(m) * binomial_long(d + k, d);
}

/// Dimension-count floor k + C(d+k-1, d)/k, rounded up to an integer.
inline long bound_lower(int d, int k) {
    if (d < 1 || k < 1) throw std::invalid_argument("bound arguments must be >= 1");
    BigInt c = binomial(d + k - 1, d);
    BigInt q = (c + k - 1) / k;
    return k + q.convert_to<long>();
}

/// Exact answer in the quadratic case: n(2, k) = 2k - 1.
inline long bound_remark_quadratic(int k) {
    if (k < 1) throw std::invalid_argument("bound arguments must be >= 1");
    return 2L * k - 1;
}

/// sum over delta = 0..d of C(delta+k-1, delta) equals C(d+k, k), exactly.
/// (The summand is the monomial count C(delta+k-1, k-1) written in the
/// form that also degrades gracefully at k = 0.)
inline bool binomial_identity_check(int d, int k) {
    if (d < 0 || k < 0) throw std::invalid_argument("identity arguments must be >= 0");
    BigInt lhs = 0;
    for (int delta = 0; delta <= d; ++delta) lhs += binomial(delta + k - 1, delta);
    return lhs == binomial(d + k, k);
}

}  // namespace grr
