#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "grr/exact_linalg.hpp"
#include "grr/poly.hpp"

namespace grr {

struct GradedGenerator {
    std::string name;
    int degree = 0;  // cohomological degree; must be positive
};

/// Commutative graded ring given by generators with degrees and
/// homogeneous polynomial relations.  Graded components are computed by
/// exact linear algebra: the span of monomial multiples of the relations
/// is row-reduced, and non-pivot monomials form the component basis.
/// Generators are assumed even-degree (no sign rules).
class PresentedRing {
public:
    static constexpr int kDegreeCap = 32;

    PresentedRing(std::vector<GradedGenerator> gens,
                  std::vector<SparsePoly<Rational>> relations)
        : gens_(std::move(gens)), relations_(std::move(relations)) {
        if (gens_.empty()) throw std::invalid_argument("ring needs at least one generator");
        for (const auto& g : gens_)
            if (g.degree <= 0)
                throw std::invalid_argument(
                    "generator of nonpositive degree makes graded components infinite");
        for (const auto& r : relations_) {
            if (r.nvars() != static_cast<int>(gens_.size()))
                throw std::invalid_argument("relation has wrong variable count");
            if (r.is_zero()) continue;
            if (weighted_degree_checked(r) < 0)
                throw std::invalid_argument("relation is not homogeneous in the grading");
        }
    }

    int ngens() const { return static_cast<int>(gens_.size()); }
    const std::vector<GradedGenerator>& generators() const { return gens_; }

    int gen_index(const std::string& name) const {
        for (std::size_t i = 0; i < gens_.size(); ++i)
            if (gens_[i].name == name) return static_cast<int>(i);
        throw std::invalid_argument("unknown generator: " + name);
    }

    SparsePoly<Rational> gen(const std::string& name) const {
        return SparsePoly<Rational>::variable(ngens(), gen_index(name));
    }

    /// Weighted (cohomological) degree of a generator-monomial.
    int weighted_degree(const Monomial& m) const {
        int d = 0;
        for (std::size_t i = 0; i < m.e.size(); ++i)
            d += static_cast<int>(m.e[i]) * gens_[i].degree;
        return d;
    }

    /// Common weighted degree of a homogeneous element; -1 if mixed.
    int weighted_degree_checked(const SparsePoly<Rational>& f) const {
        int d = -1;
        for (const auto& [m, c] : f.terms()) {
            int md = weighted_degree(m);
            if (d < 0)
                d = md;
            else if (d != md)
                return -1;
        }
        return d;
    }

    struct GradedComponent {
        std::vector<Monomial> monomials;            // all monomials of this degree
        std::map<Monomial, std::size_t, GradedLexLess> index;
        Rref relation_span;                         // RREF over monomial coordinates
        std::vector<std::size_t> basis;             // non-pivot monomial positions
    };

    const GradedComponent& component(int degree) const {
        if (degree < 0) throw std::invalid_argument("negative degree");
        if (degree > kDegreeCap)
            throw std::domain_error("graded component beyond the degree cap " +
                                    std::to_string(kDegreeCap));
        auto it = cache_.find(degree);
        if (it != cache_.end()) return it->second;

        GradedComponent comp;
        comp.monomials = weighted_monomials(degree);
        for (std::size_t i = 0; i < comp.monomials.size(); ++i)
            comp.index.emplace(comp.monomials[i], i);

        RatMatrix span;
        for (const auto& r : relations_) {
            if (r.is_zero()) continue;
            int rd = weighted_degree_checked(r);
            if (rd > degree) continue;
            for (const Monomial& m : weighted_monomials(degree - rd)) {
                SparsePoly<Rational> shifted(ngens());
                shifted.add_term(m, Rational(1));
                span.push_back(coords_in(comp, shifted * r));
            }
        }
        comp.relation_span = rref(std::move(span));

        std::vector<bool> pivot(comp.monomials.size(), false);
        for (std::size_t p : comp.relation_span.pivots) pivot[p] = true;
        for (std::size_t i = 0; i < comp.monomials.size(); ++i)
            if (!pivot[i]) comp.basis.push_back(i);

        return cache_.emplace(degree, std::move(comp)).first->second;
    }

    /// Canonical coordinates of a homogeneous element over the component
    /// basis of its weighted degree.
    RatVector reduce_to_basis(const SparsePoly<Rational>& f, int degree) const {
        const GradedComponent& comp = component(degree);
        RatVector v = coords_in(comp, f);
        // Kill pivot coordinates with the reduced relation rows.
        const auto& rows = comp.relation_span.rows;
        const auto& pivots = comp.relation_span.pivots;
        for (std::size_t i = 0; i < pivots.size(); ++i) {
            Rational c = v[pivots[i]];
            if (c == 0) continue;
            for (std::size_t j = 0; j < v.size(); ++j) v[j] -= c * rows[i][j];
        }
        RatVector out;
        out.reserve(comp.basis.size());
        for (std::size_t b : comp.basis) out.push_back(v[b]);
        return out;
    }

    /// The element sum coords[i] * basis_monomial[i] of the given degree.
    SparsePoly<Rational> from_basis_coords(int degree, const RatVector& coords) const {
        const GradedComponent& comp = component(degree);
        if (coords.size() != comp.basis.size())
            throw std::invalid_argument("coordinate length mismatch");
        SparsePoly<Rational> f(ngens());
        for (std::size_t i = 0; i < coords.size(); ++i)
            f.add_term(comp.monomials[comp.basis[i]], coords[i]);
        return f;
    }

    /// Ambient embedding: generator index -> polynomial in the root
    /// variables.  Deliberately partial (a generator like the degree-8
    /// class c of the rank-4 oriented ring has no root expression).
    void set_ambient(const std::string& name, SparsePoly<Rational> image) {
        if (root_vars_ == 0)
            root_vars_ = image.nvars();
        else if (image.nvars() != root_vars_)
            throw std::invalid_argument("ambient images disagree on root count");
        ambient_[gen_index(name)] = std::move(image);
    }

    bool has_ambient(int gen_index_) const { return ambient_.count(gen_index_) > 0; }
    int root_vars() const { return root_vars_; }

    /// Root-variable image of a generator-polynomial; requires every
    /// generator that appears to have an ambient image.
    SparsePoly<Rational> ambient_image(const SparsePoly<Rational>& f) const {
        if (root_vars_ == 0) throw std::logic_error("ring has no ambient embedding");
        SparsePoly<Rational> out(root_vars_);
        for (const auto& [m, c] : f.terms()) {
            SparsePoly<Rational> term = SparsePoly<Rational>::constant(root_vars_, c);
            for (std::size_t i = 0; i < m.e.size(); ++i) {
                if (m.e[i] == 0) continue;
                auto it = ambient_.find(static_cast<int>(i));
                if (it == ambient_.end())
                    throw std::invalid_argument("generator " + gens_[i].name +
                                                " has no ambient image");
                term = term * it->second.pow(m.e[i]);
            }
            out += term;
        }
        return out;
    }

    /// Rewrites a root-variable polynomial over the component basis of
    /// the given degree (using only basis monomials with ambient images);
    /// absent when the polynomial is not in their span.
    std::optional<SparsePoly<Rational>> express_in_generators(
        const SparsePoly<Rational>& root_poly, int degree) const {
        const GradedComponent& comp = component(degree);
        std::vector<std::size_t> usable;
        std::vector<SparsePoly<Rational>> images;
        for (std::size_t b : comp.basis) {
            const Monomial& m = comp.monomials[b];
            bool ok = true;
            for (std::size_t i = 0; i < m.e.size() && ok; ++i)
                if (m.e[i] > 0 && !ambient_.count(static_cast<int>(i))) ok = false;
            if (!ok) continue;
            SparsePoly<Rational> mono(ngens());
            mono.add_term(m, Rational(1));
            usable.push_back(b);
            images.push_back(ambient_image(mono));
        }
        // Root-monomial coordinate system shared by target and images.
        std::map<Monomial, std::size_t, GradedLexLess> rows;
        auto note = [&rows](const SparsePoly<Rational>& f) {
            for (const auto& [m, c] : f.terms()) rows.emplace(m, 0);
        };
        note(root_poly);
        for (const auto& img : images) note(img);
        std::size_t nr = 0;
        for (auto& [m, idx] : rows) idx = nr++;

        RatMatrix a(nr, RatVector(usable.size(), Rational(0)));
        RatVector b(nr, Rational(0));
        for (std::size_t j = 0; j < images.size(); ++j)
            for (const auto& [m, c] : images[j].terms()) a[rows.at(m)][j] = c;
        for (const auto& [m, c] : root_poly.terms()) b[rows.at(m)] = c;

        auto sol = solve(a, b);
        if (!sol) return std::nullopt;
        SparsePoly<Rational> out(ngens());
        for (std::size_t j = 0; j < usable.size(); ++j)
            out.add_term(comp.monomials[usable[j]], (*sol)[j]);
        return out;
    }

private:
    RatVector coords_in(const GradedComponent& comp, const SparsePoly<Rational>& f) const {
        RatVector v(comp.monomials.size(), Rational(0));
        for (const auto& [m, c] : f.terms()) {
            auto it = comp.index.find(m);
            if (it == comp.index.end())
                throw std::invalid_argument("element is not homogeneous of the expected degree");
            v[it->second] = c;
        }
        return v;
    }

    std::vector<Monomial> weighted_monomials(int degree) const {
        std::vector<Monomial> out;
        std::vector<unsigned> e(gens_.size(), 0u);
        auto rec = [&](auto&& self, std::size_t pos, int rem) -> void {
            if (pos == gens_.size()) {
                if (rem == 0) out.emplace_back(e);
                return;
            }
            int d = gens_[pos].degree;
            for (int v = 0; v * d <= rem; ++v) {
                e[pos] = static_cast<unsigned>(v);
                self(self, pos + 1, rem - v * d);
            }
            e[pos] = 0;
        };
        rec(rec, 0, degree);
        std::sort(out.begin(), out.end(), [](const Monomial& a, const Monomial& b) {
            return GradedLexLess{}(a, b);
        });
        return out;
    }

    std::vector<GradedGenerator> gens_;
    std::vector<SparsePoly<Rational>> relations_;
    std::map<int, SparsePoly<Rational>> ambient_;
    int root_vars_ = 0;
    mutable std::map<int, GradedComponent> cache_;
};

namespace detail {

/// Branching elimination over a system of polynomial equations with
/// rational coefficients.  The rule set mirrors hand elimination:
/// constants, isolated linear variables, pure squares, positive
/// diagonal sums of squares, and single-monomial zero products.
class SquareRootSystem {
public:
    SquareRootSystem(std::vector<SparsePoly<Rational>> eqs, int nvars)
        : nvars_(nvars) {
        State s;
        s.eqs = std::move(eqs);
        run(std::move(s));
        std::sort(solutions_.begin(), solutions_.end());
        solutions_.erase(std::unique(solutions_.begin(), solutions_.end()),
                         solutions_.end());
    }

    const std::vector<RatVector>& solutions() const { return solutions_; }

private:
    struct State {
        std::vector<SparsePoly<Rational>> eqs;
        std::vector<std::pair<int, SparsePoly<Rational>>> assigned;  // chronological
    };

    void run(State s) {
        if (++branches_ > kBranchBudget)
            throw std::runtime_error("square-root elimination exceeded its branch budget");

        // Normalize: drop satisfied equations, kill the branch on a
        // nonzero constant.
        auto& eqs = s.eqs;
        for (auto it = eqs.begin(); it != eqs.end();) {
            if (it->is_zero()) {
                it = eqs.erase(it);
            } else if (it->degree() == 0) {
                return;  // nonzero constant: contradiction
            } else {
                ++it;
            }
        }
        if (eqs.empty()) {
            emit(s);
            return;
        }

        // Isolated linear variable: a*x_i + rest, rest free of x_i.
        for (std::size_t q = 0; q < eqs.size(); ++q) {
            for (int i = 0; i < nvars_; ++i) {
                auto lin = isolate_linear(eqs[q], i);
                if (!lin) continue;
                substitute_and_run(std::move(s), i, *lin);
                return;
            }
        }

        // Pure square: alpha*x_i^2 + beta = 0.
        for (std::size_t q = 0; q < eqs.size(); ++q) {
            auto sq = as_pure_square(eqs[q]);
            if (!sq) continue;
            auto [i, v] = *sq;  // x_i^2 = v
            if (v < 0) return;  // no real (a fortiori no rational) solution
            if (v == 0) {
                substitute_and_run(std::move(s), i, SparsePoly<Rational>::zero(nvars_));
                return;
            }
            auto root = rational_sqrt(v);
            if (!root) return;  // no rational solution on this branch
            substitute_and_run(State(s), i, SparsePoly<Rational>::constant(nvars_, *root));
            substitute_and_run(std::move(s), i, SparsePoly<Rational>::constant(nvars_, -*root));
            return;
        }

        // Positive diagonal: sum alpha_i x_i^2 + beta with all alpha_i > 0.
        for (std::size_t q = 0; q < eqs.size(); ++q) {
            auto diag = as_positive_diagonal(eqs[q]);
            if (!diag) continue;
            auto [vars, beta] = *diag;
            if (beta > 0) return;  // positive sum of squares cannot vanish
            if (beta == 0) {
                State t = std::move(s);
                for (std::size_t vi = 0; vi + 1 < vars.size(); ++vi)
                    t = substitute(std::move(t), vars[vi], SparsePoly<Rational>::zero(nvars_));
                substitute_and_run(std::move(t), vars.back(),
                                   SparsePoly<Rational>::zero(nvars_));
                return;
            }
        }

        // Zero product: c * monomial = 0 forces one of its variables to 0.
        for (std::size_t q = 0; q < eqs.size(); ++q) {
            if (eqs[q].term_count() != 1) continue;
            const Monomial& m = eqs[q].terms().begin()->first;
            for (std::size_t i = 0; i < m.e.size(); ++i) {
                if (m.e[i] == 0) continue;
                substitute_and_run(State(s), static_cast<int>(i),
                                   SparsePoly<Rational>::zero(nvars_));
            }
            return;
        }

        throw std::runtime_error(
            "square-root elimination is stuck: no rule applies to the system");
    }

    State substitute(State s, int var, const SparsePoly<Rational>& value) {
        std::vector<SparsePoly<Rational>> images;
        images.reserve(static_cast<std::size_t>(nvars_));
        for (int j = 0; j < nvars_; ++j)
            images.push_back(j == var ? value : SparsePoly<Rational>::variable(nvars_, j));
        for (auto& e : s.eqs) e = e.substitute(images);
        s.assigned.emplace_back(var, value);
        return s;
    }

    void substitute_and_run(State s, int var, const SparsePoly<Rational>& value) {
        run(substitute(std::move(s), var, value));
    }

    void emit(const State& s) {
        std::vector<Rational> val(static_cast<std::size_t>(nvars_), Rational(0));
        // Resolve in reverse: each assignment references only variables
        // still live at its time, all of which resolve later (or are free,
        // hence zero).
        for (auto it = s.assigned.rbegin(); it != s.assigned.rend(); ++it)
            val[static_cast<std::size_t>(it->first)] = it->second.evaluate<Rational>(val);
        solutions_.push_back(std::move(val));
    }

    /// a*x_i + rest with constant a != 0 and rest free of x_i: returns
    /// the substitution -rest/a.
    std::optional<SparsePoly<Rational>> isolate_linear(const SparsePoly<Rational>& eq,
                                                       int i) const {
        Rational a(0);
        SparsePoly<Rational> rest(nvars_);
        for (const auto& [m, c] : eq.terms()) {
            unsigned ei = m.e[static_cast<std::size_t>(i)];
            if (ei == 0) {
                rest.add_term(m, c);
            } else if (ei == 1 && m.deg == 1) {
                a = c;
            } else {
                return std::nullopt;  // x_i appears nonlinearly or mixed
            }
        }
        if (a == 0) return std::nullopt;
        return rest.scaled(Rational(-1) / a);
    }

    /// alpha*x_i^2 + beta: returns (i, -beta/alpha).
    std::optional<std::pair<int, Rational>> as_pure_square(
        const SparsePoly<Rational>& eq) const {
        int var = -1;
        Rational alpha(0), beta(0);
        for (const auto& [m, c] : eq.terms()) {
            if (m.deg == 0) {
                beta = c;
            } else if (m.deg == 2) {
                int i = single_variable(m);
                if (i < 0 || (var >= 0 && var != i)) return std::nullopt;
                var = i;
                alpha = c;
            } else {
                return std::nullopt;
            }
        }
        if (var < 0) return std::nullopt;
        return std::make_pair(var, -beta / alpha);
    }

    /// sum alpha_i x_i^2 + beta with every alpha_i > 0 (an overall sign
    /// flip is applied first if every alpha_i < 0).
    std::optional<std::pair<std::vector<int>, Rational>> as_positive_diagonal(
        const SparsePoly<Rational>& eq) const {
        std::vector<int> vars;
        Rational beta(0);
        int sign = 0;
        for (const auto& [m, c] : eq.terms()) {
            if (m.deg == 0) {
                beta = c;
                continue;
            }
            if (m.deg != 2) return std::nullopt;
            int i = single_variable(m);
            if (i < 0) return std::nullopt;
            int s = c > 0 ? 1 : -1;
            if (sign == 0)
                sign = s;
            else if (sign != s)
                return std::nullopt;
            vars.push_back(i);
        }
        if (vars.empty()) return std::nullopt;
        if (sign < 0) beta = -beta;
        return std::make_pair(std::move(vars), beta);
    }

    /// Index of the only variable in m, or -1 when several occur.
    static int single_variable(const Monomial& m) {
        int var = -1;
        for (std::size_t i = 0; i < m.e.size(); ++i) {
            if (m.e[i] == 0) continue;
            if (var >= 0) return -1;
            var = static_cast<int>(i);
        }
        return var;
    }

    static constexpr long kBranchBudget = 4096;
    int nvars_;
    long branches_ = 0;
    std::vector<RatVector> solutions_;
};

}  // namespace detail

struct SquareRootResult {
    std::optional<SparsePoly<Rational>> root;   // one representative
    std::vector<SparsePoly<Rational>> all;      // every rational root found
};

/// Searches for u with u^2 = target modulo the ring relations, by an
/// exact ansatz over the half-degree component basis and branching
/// elimination of the resulting quadratic system.  "No root" means the
/// system has no rational solution.
inline SquareRootResult sqrt_in_presented_ring(const SparsePoly<Rational>& target,
                                               const PresentedRing& ring,
                                               int half_degree) {
    int wd = ring.weighted_degree_checked(target);
    if (!target.is_zero() && wd != 2 * half_degree)
        throw std::invalid_argument("target is not homogeneous of twice the half degree");

    const auto& comp_h = ring.component(half_degree);
    std::size_t s = comp_h.basis.size();
    RatVector t_coords = ring.reduce_to_basis(target, 2 * half_degree);
    std::size_t n2 = t_coords.size();

    // Coordinates of b_i * b_j over the double-degree basis.
    std::vector<std::vector<RatVector>> prod(s, std::vector<RatVector>(s));
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = i; j < s; ++j) {
            SparsePoly<Rational> bi(ring.ngens()), bj(ring.ngens());
            bi.add_term(comp_h.monomials[comp_h.basis[i]], Rational(1));
            bj.add_term(comp_h.monomials[comp_h.basis[j]], Rational(1));
            prod[i][j] = ring.reduce_to_basis(bi * bj, 2 * half_degree);
        }
    }

    // One quadratic equation per double-degree basis coordinate.
    std::vector<SparsePoly<Rational>> eqs;
    for (std::size_t pos = 0; pos < n2; ++pos) {
        SparsePoly<Rational> eq(static_cast<int>(s));
        for (std::size_t i = 0; i < s; ++i) {
            for (std::size_t j = i; j < s; ++j) {
                Rational c = prod[i][j][pos];
                if (i != j) c *= 2;
                if (c == 0) continue;
                Monomial m(s);
                m.e[i] += 1;
                m.e[j] += 1;
                m.deg = 2;
                eq.add_term(m, c);
            }
        }
        eq.add_term(Monomial(s), -t_coords[pos]);
        eqs.push_back(std::move(eq));
    }

    detail::SquareRootSystem solver(std::move(eqs), static_cast<int>(s));
    SquareRootResult out;
    for (const RatVector& sol : solver.solutions())
        out.all.push_back(ring.from_basis_coords(half_degree, sol));
    if (!out.all.empty()) out.root = out.all.front();
    return out;
}

/// The rank-4 oriented-Grassmannian model ring of the square-root
/// computation: generators e, p of degree 4 and c of degree 8, with
/// relations e*c = 0 and c^2 = p^4, and ambient images e = ab,
/// p = a^2 + b^2 in the roots a, b.
inline PresentedRing oriented_rank4_ring() {
    std::vector<GradedGenerator> gens{{"e", 4}, {"p", 4}, {"c", 8}};
    SparsePoly<Rational> e = SparsePoly<Rational>::variable(3, 0);
    SparsePoly<Rational> p = SparsePoly<Rational>::variable(3, 1);
    SparsePoly<Rational> c = SparsePoly<Rational>::variable(3, 2);
    std::vector<SparsePoly<Rational>> rels{e * c, c * c - p.pow(4)};
    PresentedRing ring(std::move(gens), std::move(rels));
    SparsePoly<Rational> a = SparsePoly<Rational>::variable(2, 0);
    SparsePoly<Rational> b = SparsePoly<Rational>::variable(2, 1);
    ring.set_ambient("e", a * b);
    ring.set_ambient("p", a * a + b * b);
    return ring;
}

}  // namespace grr
