#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "grr/rings.hpp"

namespace grr {

/// Dense exact-rational matrix helpers: row reduction, nullspace, and
/// linear solves.  Sizes here are tiny (graded components, quadratic-form
/// spaces), so plain Gaussian elimination is the right tool.
using RatMatrix = std::vector<std::vector<Rational>>;
using RatVector = std::vector<Rational>;

struct Rref {
    RatMatrix rows;              // reduced rows, zero rows dropped
    std::vector<std::size_t> pivots;  // pivot column per kept row
};

inline Rref rref(RatMatrix a) {
    Rref out;
    if (a.empty()) return out;
    std::size_t ncols = a[0].size();
    std::size_t row = 0;
    for (std::size_t col = 0; col < ncols && row < a.size(); ++col) {
        std::size_t piv = row;
        while (piv < a.size() && a[piv][col] == 0) ++piv;
        if (piv == a.size()) continue;
        std::swap(a[row], a[piv]);
        Rational inv = a[row][col];
        for (auto& x : a[row]) x /= inv;
        for (std::size_t r = 0; r < a.size(); ++r) {
            if (r == row || a[r][col] == 0) continue;
            Rational f = a[r][col];
            for (std::size_t c = 0; c < ncols; ++c) a[r][c] -= f * a[row][c];
        }
        out.pivots.push_back(col);
        ++row;
    }
    a.resize(row);
    out.rows = std::move(a);
    return out;
}

/// Basis of the solution space of A x = 0.
inline std::vector<RatVector> nullspace(const RatMatrix& a) {
    std::vector<RatVector> basis;
    if (a.empty()) return basis;
    std::size_t n = a[0].size();
    Rref r = rref(a);
    std::vector<bool> is_pivot(n, false);
    for (std::size_t p : r.pivots) is_pivot[p] = true;
    for (std::size_t free = 0; free < n; ++free) {
        if (is_pivot[free]) continue;
        RatVector v(n, Rational(0));
        v[free] = 1;
        for (std::size_t i = 0; i < r.pivots.size(); ++i)
            v[r.pivots[i]] = -r.rows[i][free];
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Solves A x = b exactly; absent when inconsistent.  When the system is
/// underdetermined, free variables are set to zero.
inline std::optional<RatVector> solve(const RatMatrix& a, const RatVector& b) {
    if (a.empty()) {
        for (const auto& x : b)
            if (x != 0) return std::nullopt;
        return RatVector{};
    }
    std::size_t n = a[0].size();
    RatMatrix aug = a;
    for (std::size_t i = 0; i < a.size(); ++i) aug[i].push_back(b[i]);
    Rref r = rref(aug);
    RatVector x(n, Rational(0));
    for (std::size_t i = 0; i < r.pivots.size(); ++i) {
        if (r.pivots[i] == n) return std::nullopt;  // pivot in the constant column
        // With free variables pinned to zero the pivot value is the rhs.
        x[r.pivots[i]] = r.rows[i][n];
    }
    return x;
}

inline std::size_t rank(const RatMatrix& a) { return rref(a).pivots.size(); }

}  // namespace grr
