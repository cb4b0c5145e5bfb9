#pragma once

#include <stdexcept>
#include <vector>

#include "grr/poly.hpp"

namespace grr {

/// Multiset of integer linear forms in the roots t_1..t_k.  Models a
/// vector bundle through its splitting-principle weight data; the zero
/// form stands for a trivial line summand.
struct WeightSystem {
    int k = 0;
    std::vector<SparsePoly<Rational>> weights;

    int zero_multiplicity() const {
        int z = 0;
        for (const auto& w : weights)
            if (w.is_zero()) ++z;
        return z;
    }

    void validate() const {
        for (const auto& w : weights) {
            if (w.nvars() != k)
                throw std::invalid_argument("weight has wrong variable count");
            if (!w.is_zero() && (w.degree() != 1 || !w.is_homogeneous()))
                throw std::invalid_argument("weight is not a linear form");
        }
    }
};

/// Weight system of the d-th symmetric power of the rank-k canonical
/// bundle: one form i_1 t_1 + ... + i_k t_k per multi-index of total
/// degree d; the count is C(d+k-1, d).
inline WeightSystem symmetric_power_weights(int d, int k) {
    if (d < 1 || k < 1)
        throw std::invalid_argument("symmetric power requires d >= 1 and k >= 1");
    WeightSystem ws;
    ws.k = k;
    for (const Monomial& idx : monomial_basis(k, d)) {
        SparsePoly<Rational> w(k);
        for (int j = 0; j < k; ++j) {
            Monomial tj(static_cast<std::size_t>(k));
            tj.e[static_cast<std::size_t>(j)] = 1;
            tj.deg = 1;
            w.add_term(tj, Rational(static_cast<long>(idx.e[static_cast<std::size_t>(j)])));
        }
        ws.weights.push_back(std::move(w));
    }
    return ws;
}

/// Euler/Pontryagin data of an oriented weight system.  Nonzero weights
/// must pair off as {w, -w}; zero weights form a trivial summand.
struct PontryaginData {
    SparsePoly<Rational> total_p;  // product of (1 + w^2), one per pair
    SparsePoly<Rational> euler;    // product of one representative per pair
    int trivial_rank = 0;
};

inline PontryaginData pontryagin_from_weights(const WeightSystem& ws) {
    ws.validate();
    PontryaginData out;
    out.total_p = SparsePoly<Rational>::one(ws.k);
    out.euler = SparsePoly<Rational>::one(ws.k);

    std::vector<bool> used(ws.weights.size(), false);
    for (std::size_t i = 0; i < ws.weights.size(); ++i) {
        if (used[i]) continue;
        const auto& w = ws.weights[i];
        if (w.is_zero()) {
            ++out.trivial_rank;
            used[i] = true;
            continue;
        }
        SparsePoly<Rational> neg = -w;
        bool paired = false;
        for (std::size_t j = i + 1; j < ws.weights.size(); ++j) {
            if (!used[j] && ws.weights[j] == neg) {
                used[i] = used[j] = true;
                paired = true;
                break;
            }
        }
        if (!paired)
            throw std::invalid_argument("unpaired nonzero weight in oriented system");
        out.total_p *= SparsePoly<Rational>::one(ws.k) + w * w;
        out.euler *= w;  // representative: first of the pair in input order
    }
    return out;
}

/// The degree-d graded piece of a polynomial.
template <class C>
SparsePoly<C> graded_part(const SparsePoly<C>& f, int d) {
    SparsePoly<C> out(f.nvars());
    for (const auto& [m, c] : f.terms())
        if (static_cast<int>(m.deg) == d) out.add_term(m, c);
    return out;
}

}  // namespace grr
