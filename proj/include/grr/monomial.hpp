#pragma once

#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace grr {

/// Exponent vector of a single monomial.  The ambient variable count is
/// the vector length; the total degree is cached.
struct Monomial {
    std::vector<unsigned> e;
    unsigned deg = 0;

    Monomial() = default;
    explicit Monomial(std::size_t nvars) : e(nvars, 0u), deg(0) {}
    explicit Monomial(std::vector<unsigned> exps)
        : e(std::move(exps)),
          deg(std::accumulate(e.begin(), e.end(), 0u)) {}

    std::size_t nvars() const { return e.size(); }

    Monomial times(const Monomial& o) const {
        if (e.size() != o.e.size())
            throw std::invalid_argument("monomial variable count mismatch");
        Monomial r(*this);
        for (std::size_t i = 0; i < e.size(); ++i) r.e[i] += o.e[i];
        r.deg = deg + o.deg;
        return r;
    }

    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.e == b.e;
    }
    friend bool operator!=(const Monomial& a, const Monomial& b) {
        return !(a == b);
    }
};

/// Graded lexicographic "less", with x1 > x2 > ... inside a degree block.
/// Maps keyed by this comparator have the leading term at rbegin().
struct GradedLexLess {
    bool operator()(const Monomial& a, const Monomial& b) const {
        if (a.deg != b.deg) return a.deg < b.deg;
        for (std::size_t i = 0; i < a.e.size() && i < b.e.size(); ++i) {
            if (a.e[i] != b.e[i]) return a.e[i] < b.e[i];
        }
        return a.e.size() > b.e.size();  // shorter-but-equal treated as larger
    }
};

}  // namespace grr
