#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "grr/poly.hpp"

namespace grr {

/// Integer partition: weakly decreasing positive parts.
struct Partition {
    std::vector<int> parts;

    Partition() = default;
    explicit Partition(std::vector<int> p) : parts(std::move(p)) {
        normalize();
        validate();
    }

    int weight() const {
        int w = 0;
        for (int p : parts) w += p;
        return w;
    }
    std::size_t length() const { return parts.size(); }
    int first() const { return parts.empty() ? 0 : parts.front(); }

    /// Sorted exponent vector of a monomial, zeros dropped.
    static Partition from_monomial(const Monomial& m) {
        std::vector<int> p;
        for (unsigned e : m.e)
            if (e > 0) p.push_back(static_cast<int>(e));
        std::sort(p.begin(), p.end(), std::greater<int>());
        Partition out;
        out.parts = std::move(p);
        return out;
    }

    friend bool operator==(const Partition& a, const Partition& b) {
        return a.parts == b.parts;
    }
    friend bool operator<(const Partition& a, const Partition& b) {
        return a.parts < b.parts;
    }

    std::string str() const {
        std::string s = "[";
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(parts[i]);
        }
        return s + "]";
    }

private:
    void normalize() {
        while (!parts.empty() && parts.back() == 0) parts.pop_back();
    }
    void validate() const {
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (parts[i] <= 0)
                throw std::invalid_argument("partition parts must be positive");
            if (i && parts[i] > parts[i - 1])
                throw std::invalid_argument("partition parts must be weakly decreasing");
        }
    }
};

/// Complete homogeneous symmetric polynomial h_m in k variables
/// (sum of all degree-m monomials); h_0 = 1, h_{m<0} = 0.
template <class C>
SparsePoly<C> complete_homogeneous(int m, int k) {
    if (m < 0) return SparsePoly<C>::zero(k);
    SparsePoly<C> h(k);
    for (const Monomial& mono : monomial_basis(k, m))
        h.add_term(mono, ring_traits<C>::one());
    return h;
}

namespace detail {

/// Cofactor-expansion determinant; the Jacobi-Trudi matrices here are tiny.
template <class C>
SparsePoly<C> poly_det(const std::vector<std::vector<SparsePoly<C>>>& a) {
    std::size_t n = a.size();
    if (n == 0) throw std::logic_error("empty determinant");
    if (n == 1) return a[0][0];
    int k = a[0][0].nvars();
    SparsePoly<C> det(k);
    for (std::size_t j = 0; j < n; ++j) {
        if (a[0][j].is_zero()) continue;
        std::vector<std::vector<SparsePoly<C>>> minor;
        minor.reserve(n - 1);
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<SparsePoly<C>> row;
            row.reserve(n - 1);
            for (std::size_t c = 0; c < n; ++c)
                if (c != j) row.push_back(a[r][c]);
            minor.push_back(std::move(row));
        }
        SparsePoly<C> term = a[0][j] * poly_det(minor);
        if (j % 2 == 0)
            det += term;
        else
            det -= term;
    }
    return det;
}

}  // namespace detail

/// Schur polynomial s_lambda(t_1..t_k) via the Jacobi-Trudi determinant
/// det(h_{lambda_i - i + j}).  More parts than variables gives the zero
/// polynomial, matching s_lambda = 0.
template <class C>
SparsePoly<C> schur_polynomial(const Partition& lam, int k) {
    if (k <= 0) throw std::invalid_argument("variable count must be positive");
    if (lam.length() > static_cast<std::size_t>(k)) return SparsePoly<C>::zero(k);
    std::size_t l = lam.length();
    if (l == 0) return SparsePoly<C>::one(k);
    std::vector<std::vector<SparsePoly<C>>> jt(l, std::vector<SparsePoly<C>>());
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = 0; j < l; ++j) {
            int idx = lam.parts[i] - static_cast<int>(i) + static_cast<int>(j);
            jt[i].push_back(complete_homogeneous<C>(idx, k));
        }
    }
    return detail::poly_det(jt);
}

/// A symmetric polynomial written in the Schur basis.
template <class C>
struct SchurExpansion {
    int k = 0;
    std::map<Partition, C> coeffs;

    bool is_zero() const { return coeffs.empty(); }

    void add(const Partition& lam, const C& c) {
        if (ring_traits<C>::is_zero(c)) return;
        auto [it, inserted] = coeffs.emplace(lam, c);
        if (!inserted) {
            it->second += c;
            if (ring_traits<C>::is_zero(it->second)) coeffs.erase(it);
        }
    }

    SparsePoly<C> to_poly() const {
        SparsePoly<C> f(k);
        for (const auto& [lam, c] : coeffs)
            f += schur_polynomial<C>(lam, k).scaled(c);
        return f;
    }

    friend bool operator==(const SchurExpansion& a, const SchurExpansion& b) {
        return a.k == b.k && a.coeffs == b.coeffs;
    }
};

/// Writes a symmetric polynomial as sum c_lambda s_lambda by peeling the
/// graded-lex leading term: that term is the staircase monomial of some
/// partition, with Schur coefficient exactly the leading coefficient.
template <class C>
SchurExpansion<C> expand_in_schur(const SparsePoly<C>& f, int k) {
    if (f.nvars() != k)
        throw std::invalid_argument("variable count mismatch");
    if (!f.is_symmetric())
        throw std::invalid_argument("expand_in_schur requires a symmetric polynomial");

    SchurExpansion<C> out;
    out.k = k;
    SparsePoly<C> rem = f;
    while (!rem.is_zero()) {
        const auto& [m, c] = rem.leading_term();
        // Leading exponents of a symmetric polynomial are already
        // weakly decreasing; from_monomial sorts defensively anyway.
        Partition lam = Partition::from_monomial(m);
        out.add(lam, c);
        rem -= schur_polynomial<C>(lam, k).scaled(c);
    }
    return out;
}

/// Models restriction to the finite Grassmannian of k-planes in n-space:
/// basis classes with lambda_1 > n-k die.
template <class C>
SchurExpansion<C> truncate_to_grassmannian(const SchurExpansion<C>& e, int n) {
    if (n < e.k)
        throw std::invalid_argument("ambient dimension below plane dimension");
    SchurExpansion<C> out;
    out.k = e.k;
    for (const auto& [lam, c] : e.coeffs)
        if (lam.first() <= n - e.k) out.coeffs.emplace(lam, c);
    return out;
}

}  // namespace grr
