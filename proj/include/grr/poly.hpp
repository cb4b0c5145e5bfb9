#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "grr/monomial.hpp"
#include "grr/rings.hpp"

namespace grr {

/// Sparse multivariate polynomial over a coefficient ring C
/// (GF2, Rational, double, or Complex).  Terms are kept in graded-lex
/// order; stored coefficients are never the exact ring zero.  Small
/// float coefficients are dropped only by an explicit cleanup() call.
template <class C>
class SparsePoly {
public:
    using Terms = std::map<Monomial, C, GradedLexLess>;

    SparsePoly() : nvars_(0) {}
    explicit SparsePoly(int nvars) : nvars_(nvars) {
        if (nvars < 0) throw std::invalid_argument("negative variable count");
    }

    static SparsePoly zero(int nvars) { return SparsePoly(nvars); }

    static SparsePoly constant(int nvars, const C& c) {
        SparsePoly p(nvars);
        p.add_term(Monomial(static_cast<std::size_t>(nvars)), c);
        return p;
    }

    static SparsePoly one(int nvars) {
        return constant(nvars, ring_traits<C>::one());
    }

    /// The i-th coordinate function x_{i+1} (0-based index).
    static SparsePoly variable(int nvars, int i) {
        if (i < 0 || i >= nvars)
            throw std::invalid_argument("variable index out of range");
        Monomial m(static_cast<std::size_t>(nvars));
        m.e[static_cast<std::size_t>(i)] = 1;
        m.deg = 1;
        SparsePoly p(nvars);
        p.add_term(m, ring_traits<C>::one());
        return p;
    }

    /// The standard quadratic form x1^2 + ... + xk^2.
    static SparsePoly standard_q(int nvars) {
        SparsePoly p(nvars);
        for (int i = 0; i < nvars; ++i) {
            Monomial m(static_cast<std::size_t>(nvars));
            m.e[static_cast<std::size_t>(i)] = 2;
            m.deg = 2;
            p.add_term(m, ring_traits<C>::one());
        }
        return p;
    }

    int nvars() const { return nvars_; }
    const Terms& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }

    /// Total degree; -1 for the zero polynomial.
    int degree() const {
        if (terms_.empty()) return -1;
        return static_cast<int>(terms_.rbegin()->first.deg);
    }

    bool is_homogeneous() const {
        if (terms_.empty()) return true;
        unsigned d = terms_.begin()->first.deg;
        for (const auto& [m, c] : terms_)
            if (m.deg != d) return false;
        return true;
    }

    const std::pair<const Monomial, C>& leading_term() const {
        if (terms_.empty()) throw std::logic_error("leading term of zero polynomial");
        return *terms_.rbegin();
    }

    C coeff(const Monomial& m) const {
        auto it = terms_.find(m);
        return it == terms_.end() ? ring_traits<C>::zero() : it->second;
    }

    /// Adds c to the coefficient of m, pruning exact zeros.
    void add_term(const Monomial& m, const C& c) {
        if (m.nvars() != static_cast<std::size_t>(nvars_))
            throw std::invalid_argument("monomial variable count mismatch");
        if (ring_traits<C>::is_zero(c)) return;
        auto [it, inserted] = terms_.emplace(m, c);
        if (!inserted) {
            it->second += c;
            if (ring_traits<C>::is_zero(it->second)) terms_.erase(it);
        }
    }

    void set_coeff(const Monomial& m, const C& c) {
        if (m.nvars() != static_cast<std::size_t>(nvars_))
            throw std::invalid_argument("monomial variable count mismatch");
        if (ring_traits<C>::is_zero(c)) {
            terms_.erase(m);
        } else {
            terms_[m] = c;
        }
    }

    SparsePoly& operator+=(const SparsePoly& o) {
        check_compatible(o);
        for (const auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    SparsePoly& operator-=(const SparsePoly& o) {
        check_compatible(o);
        for (const auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }
    friend SparsePoly operator+(SparsePoly a, const SparsePoly& b) { a += b; return a; }
    friend SparsePoly operator-(SparsePoly a, const SparsePoly& b) { a -= b; return a; }
    SparsePoly operator-() const {
        SparsePoly r(nvars_);
        for (const auto& [m, c] : terms_) r.terms_.emplace(m, -c);
        return r;
    }

    friend SparsePoly operator*(const SparsePoly& a, const SparsePoly& b) {
        a.check_compatible(b);
        SparsePoly r(a.nvars_);
        for (const auto& [ma, ca] : a.terms_)
            for (const auto& [mb, cb] : b.terms_)
                r.add_term(ma.times(mb), ca * cb);
        return r;
    }
    SparsePoly& operator*=(const SparsePoly& o) { *this = *this * o; return *this; }

    SparsePoly scaled(const C& c) const {
        SparsePoly r(nvars_);
        if (ring_traits<C>::is_zero(c)) return r;
        for (const auto& [m, cm] : terms_) {
            C p = cm * c;
            if (!ring_traits<C>::is_zero(p)) r.terms_.emplace(m, p);
        }
        return r;
    }

    SparsePoly pow(unsigned n) const {
        SparsePoly r = one(nvars_);
        SparsePoly base = *this;
        while (n) {
            if (n & 1u) r = r * base;
            n >>= 1u;
            if (n) base = base * base;
        }
        return r;
    }

    friend bool operator==(const SparsePoly& a, const SparsePoly& b) {
        return a.nvars_ == b.nvars_ && a.terms_ == b.terms_;
    }
    friend bool operator!=(const SparsePoly& a, const SparsePoly& b) {
        return !(a == b);
    }

    /// Partial derivative with respect to variable i (0-based).
    SparsePoly derivative(int i) const {
        if (i < 0 || i >= nvars_)
            throw std::invalid_argument("variable index out of range");
        SparsePoly r(nvars_);
        for (const auto& [m, c] : terms_) {
            unsigned ei = m.e[static_cast<std::size_t>(i)];
            if (ei == 0) continue;
            Monomial dm = m;
            dm.e[static_cast<std::size_t>(i)] = ei - 1;
            dm.deg = m.deg - 1;
            r.add_term(dm, c * ring_traits<C>::from_long(static_cast<long>(ei)));
        }
        return r;
    }

    template <class X>
    X evaluate(const std::vector<X>& x) const {
        if (x.size() != static_cast<std::size_t>(nvars_))
            throw std::invalid_argument("evaluation point dimension mismatch");
        X total{};
        for (const auto& [m, c] : terms_) {
            X term = coeff_as<X>(c);
            for (std::size_t i = 0; i < m.e.size(); ++i)
                for (unsigned j = 0; j < m.e[i]; ++j) term *= x[i];
            total += term;
        }
        return total;
    }

    /// Substitutes variable i by the linear image sum_j M[i][j] * x_j.
    /// M has nvars() rows; the column count is the new variable count.
    SparsePoly compose_linear(const std::vector<std::vector<C>>& M) const {
        if (M.size() != static_cast<std::size_t>(nvars_))
            throw std::invalid_argument("substitution matrix row count mismatch");
        std::size_t m_out = nvars_ ? M[0].size() : 0;
        for (const auto& row : M)
            if (row.size() != m_out)
                throw std::invalid_argument("substitution matrix is ragged");

        std::vector<SparsePoly> images;
        images.reserve(M.size());
        for (const auto& row : M) {
            SparsePoly li(static_cast<int>(m_out));
            for (std::size_t j = 0; j < m_out; ++j) {
                Monomial mj(m_out);
                mj.e[j] = 1;
                mj.deg = 1;
                li.add_term(mj, row[j]);
            }
            images.push_back(std::move(li));
        }
        return substitute(images);
    }

    /// Substitutes variable i by images[i]; all images share one variable
    /// count, which becomes the result's.
    SparsePoly substitute(const std::vector<SparsePoly>& images) const {
        if (images.size() != static_cast<std::size_t>(nvars_))
            throw std::invalid_argument("substitution image count mismatch");
        int m_out = nvars_ ? images[0].nvars() : 0;
        for (const auto& g : images)
            if (g.nvars() != m_out)
                throw std::invalid_argument("substitution images disagree on variable count");

        // Cache image powers; exponents here stay small.
        std::vector<std::vector<SparsePoly>> powers(images.size());
        for (std::size_t i = 0; i < images.size(); ++i)
            powers[i].push_back(one(m_out));

        SparsePoly result(m_out);
        for (const auto& [m, c] : terms_) {
            SparsePoly term = constant(m_out, c);
            for (std::size_t i = 0; i < m.e.size(); ++i) {
                unsigned ei = m.e[i];
                if (ei == 0) continue;
                auto& pw = powers[i];
                while (pw.size() <= ei) pw.push_back(pw.back() * images[i]);
                term = term * pw[ei];
            }
            result += term;
        }
        return result;
    }

    /// Relabels variables: result uses variable perm[i] where the input
    /// used variable i.
    SparsePoly permute_vars(const std::vector<int>& perm) const {
        if (perm.size() != static_cast<std::size_t>(nvars_))
            throw std::invalid_argument("permutation length mismatch");
        SparsePoly r(nvars_);
        for (const auto& [m, c] : terms_) {
            Monomial pm(static_cast<std::size_t>(nvars_));
            for (std::size_t i = 0; i < m.e.size(); ++i) {
                int t = perm[i];
                if (t < 0 || t >= nvars_)
                    throw std::invalid_argument("permutation target out of range");
                pm.e[static_cast<std::size_t>(t)] = m.e[i];
            }
            pm.deg = m.deg;
            r.add_term(pm, c);
        }
        return r;
    }

    /// Invariance under every adjacent transposition, hence under all of S_n.
    bool is_symmetric() const {
        std::vector<int> perm(static_cast<std::size_t>(nvars_));
        for (int i = 0; i < nvars_; ++i) perm[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i + 1 < nvars_; ++i) {
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(i) + 1]);
            if (permute_vars(perm) != *this) return false;
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(i) + 1]);
        }
        return true;
    }

    /// Reinterprets the polynomial in a wider variable set; existing
    /// variables keep their indices.
    SparsePoly widen(int new_nvars) const {
        if (new_nvars < nvars_)
            throw std::invalid_argument("widen cannot drop variables");
        SparsePoly r(new_nvars);
        for (const auto& [m, c] : terms_) {
            Monomial wm(static_cast<std::size_t>(new_nvars));
            std::copy(m.e.begin(), m.e.end(), wm.e.begin());
            wm.deg = m.deg;
            r.terms_.emplace(wm, c);
        }
        return r;
    }

    /// Sum of squared coefficient magnitudes.
    double coeff_norm2() const {
        double s = 0.0;
        for (const auto& [m, c] : terms_) s += ring_traits<C>::abs2(c);
        return s;
    }

    double coeff_norm() const { return std::sqrt(coeff_norm2()); }

    /// Drops float coefficients below rel_tol times the largest magnitude.
    /// This is the only place small-but-nonzero terms are discarded.
    void cleanup(double rel_tol = 1e-14) {
        if constexpr (ring_traits<C>::exact) return;
        double max2 = 0.0;
        for (const auto& [m, c] : terms_) max2 = std::max(max2, ring_traits<C>::abs2(c));
        double cut2 = rel_tol * rel_tol * max2;
        for (auto it = terms_.begin(); it != terms_.end();) {
            if (ring_traits<C>::abs2(it->second) <= cut2)
                it = terms_.erase(it);
            else
                ++it;
        }
    }

private:
    void check_compatible(const SparsePoly& o) const {
        if (nvars_ != o.nvars_)
            throw std::invalid_argument("polynomial variable count mismatch");
    }

    template <class X>
    static X coeff_as(const C& c) {
        if constexpr (std::is_same_v<X, C>) {
            return c;
        } else if constexpr (std::is_same_v<C, Rational>) {
            return X(to_double(c));
        } else {
            return X(c);
        }
    }

    int nvars_;
    Terms terms_;
};

/// c with ||f - c*g|| <= tol*||f|| in the coefficient 2-norm (exact
/// equality over exact rings); absent when no such scalar exists.
template <class C>
std::optional<C> proportional_scalar(const SparsePoly<C>& f, const SparsePoly<C>& g,
                                     double tol = 1e-9) {
    if (f.nvars() != g.nvars())
        throw std::invalid_argument("polynomial variable count mismatch");
    if (g.is_zero())
        throw std::invalid_argument("proportionality against the zero polynomial");
    if (f.is_zero()) return ring_traits<C>::zero();

    if constexpr (ring_traits<C>::exact) {
        const auto& [gm, gc] = g.leading_term();
        C fc = f.coeff(gm);
        if (ring_traits<C>::is_zero(fc)) return std::nullopt;
        C c;
        if constexpr (std::is_same_v<C, GF2>) {
            c = fc;  // gc is necessarily 1
        } else {
            c = fc / gc;
        }
        if (f == g.scaled(c)) return c;
        return std::nullopt;
    } else {
        // Least-squares scalar in the coefficient inner product.
        C num = ring_traits<C>::zero();
        double den = 0.0;
        for (const auto& [m, gc] : g.terms()) {
            C fc = f.coeff(m);
            if constexpr (std::is_same_v<C, Complex>) {
                num += fc * std::conj(gc);
            } else {
                num += fc * gc;
            }
            den += ring_traits<C>::abs2(gc);
        }
        C c = num;
        if constexpr (std::is_same_v<C, Complex>) {
            c /= den;
        } else {
            c /= static_cast<C>(den);
        }
        SparsePoly<C> resid = f - g.scaled(c);
        if (resid.coeff_norm() <= tol * f.coeff_norm()) return c;
        return std::nullopt;
    }
}

/// All monomials of degree exactly d in k variables, graded-lex ascending.
inline std::vector<Monomial> monomial_basis(int k, int d) {
    if (k < 0 || d < 0) throw std::invalid_argument("negative basis parameters");
    std::vector<Monomial> out;
    if (k == 0) {
        if (d == 0) out.emplace_back(std::size_t{0});
        return out;
    }
    std::vector<unsigned> e(static_cast<std::size_t>(k), 0u);
    // Recursive enumeration of weak compositions of d into k parts.
    auto rec = [&](auto&& self, int pos, int rem) -> void {
        if (pos == k - 1) {
            e[static_cast<std::size_t>(pos)] = static_cast<unsigned>(rem);
            out.emplace_back(e);
            return;
        }
        for (int v = 0; v <= rem; ++v) {
            e[static_cast<std::size_t>(pos)] = static_cast<unsigned>(v);
            self(self, pos + 1, rem - v);
        }
    };
    rec(rec, 0, d);
    std::sort(out.begin(), out.end(), [](const Monomial& a, const Monomial& b) {
        return GradedLexLess{}(a, b);
    });
    return out;
}

/// Explicit coefficient-ring conversion (there is no implicit coercion).
template <class To, class From>
SparsePoly<To> convert_ring(const SparsePoly<From>& f) {
    SparsePoly<To> r(f.nvars());
    for (const auto& [m, c] : f.terms()) {
        To tc;
        if constexpr (std::is_same_v<From, Rational> && std::is_same_v<To, double>) {
            tc = to_double(c);
        } else if constexpr (std::is_same_v<From, Rational> && std::is_same_v<To, Complex>) {
            tc = Complex(to_double(c), 0.0);
        } else if constexpr (std::is_same_v<From, Rational> && std::is_same_v<To, GF2>) {
            if (boost::multiprecision::denominator(c) % 2 == 0)
                throw std::invalid_argument("rational with even denominator has no GF(2) image");
            tc = GF2(boost::multiprecision::numerator(c).template convert_to<long>());
        } else if constexpr (std::is_same_v<From, double> && std::is_same_v<To, Complex>) {
            tc = Complex(c, 0.0);
        } else if constexpr (std::is_same_v<From, To>) {
            tc = c;
        } else {
            static_assert(std::is_same_v<From, To> ||
                              (std::is_same_v<From, Rational> &&
                               (std::is_same_v<To, double> || std::is_same_v<To, Complex> ||
                                std::is_same_v<To, GF2>)) ||
                              (std::is_same_v<From, double> && std::is_same_v<To, Complex>),
                          "unsupported ring conversion");
        }
        r.add_term(m, tc);
    }
    return r;
}

/// Ordered list of degree-1 forms in k variables; the carrier for the
/// lambda_i / l_t families of the averaging constructions.
template <class C>
struct LinearFormSet {
    int k = 0;
    std::vector<SparsePoly<C>> forms;

    void validate() const {
        for (const auto& f : forms) {
            if (f.nvars() != k)
                throw std::invalid_argument("linear form has wrong variable count");
            if (!f.is_zero() && (f.degree() != 1 || !f.is_homogeneous()))
                throw std::invalid_argument("linear form is not homogeneous of degree 1");
        }
    }
};

}  // namespace grr
