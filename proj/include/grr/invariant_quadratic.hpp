#pragma once

#include <stdexcept>
#include <vector>

#include "grr/exact_linalg.hpp"
#include "grr/poly.hpp"

namespace grr {

/// Quadratic forms on R^k invariant under given linear symmetries,
/// computed exactly.  A form is the symmetric matrix A of
/// f(x) = x^T A x; invariance under a one-parameter rotation group is
/// imposed infinitesimally (J^T A + A J = 0 for the generator J, which
/// is exact and linear, unlike sampling the group), and invariance
/// under a discrete element P as P^T A P = A.
struct InvariantFormSpace {
    int k = 0;
    std::vector<RatMatrix> basis_matrices;
    std::vector<SparsePoly<Rational>> basis_forms;

    int dim() const { return static_cast<int>(basis_matrices.size()); }
};

namespace detail {

/// Symmetric-matrix coordinates: entries (i,j) with i <= j.
inline std::vector<std::pair<int, int>> sym_coords(int k) {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) out.emplace_back(i, j);
    return out;
}

inline RatMatrix mat_mul(const RatMatrix& a, const RatMatrix& b) {
    std::size_t n = a.size(), m = b[0].size(), inner = b.size();
    RatMatrix c(n, RatVector(m, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < inner; ++l) {
            if (a[i][l] == 0) continue;
            for (std::size_t j = 0; j < m; ++j) c[i][j] += a[i][l] * b[l][j];
        }
    return c;
}

inline RatMatrix mat_transpose(const RatMatrix& a) {
    RatMatrix t(a[0].size(), RatVector(a.size(), Rational(0)));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < a[i].size(); ++j) t[j][i] = a[i][j];
    return t;
}

}  // namespace detail

/// Solves the linear invariance constraints over the space of symmetric
/// k x k matrices and returns a basis of the solution space.
inline InvariantFormSpace invariant_quadratic_forms(
    int k, const std::vector<RatMatrix>& infinitesimal_generators,
    const std::vector<RatMatrix>& group_elements) {
    auto coords = detail::sym_coords(k);
    std::size_t dim = coords.size();

    auto basis_matrix = [&](std::size_t c) {
        auto [i, j] = coords[c];
        RatMatrix a(k, RatVector(k, Rational(0)));
        a[i][j] = 1;
        a[j][i] = 1;  // diagonal case overwrites with the same value
        return a;
    };

    // Build the constraint matrix column by column: for each symmetric
    // basis matrix E_c, every constraint residual (J^T A + A J, or
    // P^T A P - A) is linear in A, so its stacked entries at A = E_c
    // form column c.
    std::size_t block_rows = 0;
    std::vector<RatVector> residual_cols(dim);
    for (std::size_t c = 0; c < dim; ++c) {
        RatMatrix a = basis_matrix(c);
        RatVector stacked;
        for (const auto& jgen : infinitesimal_generators) {
            RatMatrix r = detail::mat_mul(detail::mat_transpose(jgen), a);
            RatMatrix r2 = detail::mat_mul(a, jgen);
            for (int i = 0; i < k; ++i)
                for (int j = i; j < k; ++j) stacked.push_back(r[i][j] + r2[i][j]);
        }
        for (const auto& p : group_elements) {
            RatMatrix r = detail::mat_mul(detail::mat_mul(detail::mat_transpose(p), a), p);
            for (int i = 0; i < k; ++i)
                for (int j = i; j < k; ++j) stacked.push_back(r[i][j] - a[i][j]);
        }
        block_rows = stacked.size();
        residual_cols[c] = std::move(stacked);
    }
    RatMatrix constraints(block_rows, RatVector(dim, Rational(0)));
    for (std::size_t c = 0; c < dim; ++c)
        for (std::size_t r = 0; r < block_rows; ++r) constraints[r][c] = residual_cols[c][r];

    InvariantFormSpace out;
    out.k = k;
    std::vector<RatVector> null;
    if (block_rows == 0) {
        // No constraints: the whole symmetric space.
        for (std::size_t c = 0; c < dim; ++c) {
            RatVector v(dim, Rational(0));
            v[c] = 1;
            null.push_back(std::move(v));
        }
    } else {
        null = nullspace(constraints);
    }
    for (const RatVector& v : null) {
        RatMatrix a(k, RatVector(k, Rational(0)));
        SparsePoly<Rational> f(k);
        for (std::size_t c = 0; c < dim; ++c) {
            if (v[c] == 0) continue;
            auto [i, j] = coords[c];
            a[i][j] += v[c];
            if (i != j) a[j][i] += v[c];
            Monomial m(static_cast<std::size_t>(k));
            m.e[static_cast<std::size_t>(i)] += 1;
            m.e[static_cast<std::size_t>(j)] += 1;
            m.deg = 2;
            // f = x^T A x: off-diagonal entries contribute twice.
            f.add_term(m, i == j ? v[c] : 2 * v[c]);
        }
        out.basis_matrices.push_back(std::move(a));
        out.basis_forms.push_back(std::move(f));
    }
    return out;
}

/// Block rotation generator J_b: the 2x2 block [[0,-1],[1,0]] in block b
/// of k/2 blocks, zero elsewhere.
inline RatMatrix block_rotation_generator(int k, int b) {
    RatMatrix j(k, RatVector(k, Rational(0)));
    j[2 * b][2 * b + 1] = -1;
    j[2 * b + 1][2 * b] = 1;
    return j;
}

/// Cyclic permutation of the k/2 consecutive 2x2 blocks.
inline RatMatrix block_cycle_matrix(int k) {
    int blocks = k / 2;
    RatMatrix p(k, RatVector(k, Rational(0)));
    for (int b = 0; b < blocks; ++b) {
        int t = (b + 1) % blocks;
        // Block b is sent to block t: column pair of b maps onto rows of t.
        p[2 * t][2 * b] = 1;
        p[2 * t + 1][2 * b + 1] = 1;
    }
    return p;
}

struct InvariantQuadraticReport {
    int k = 0;
    InvariantFormSpace torus;  // invariants of the maximal torus
    InvariantFormSpace group;  // invariants of torus + block cycle
    int dim_torus() const { return torus.dim(); }
    int dim_group() const { return group.dim(); }
};

/// The invariant-form computation for k = 2 p^alpha: the torus of
/// independent block rotations leaves the p^alpha-dimensional space of
/// blockwise multiples, and adding the cyclic block permutation cuts it
/// to multiples of the standard quadratic form.
inline InvariantQuadraticReport invariant_quadratic_space(int p, int alpha) {
    if (p < 2 || alpha < 1)
        throw std::invalid_argument("invariant space needs p >= 2, alpha >= 1");
    long blocks = 1;
    for (int i = 0; i < alpha; ++i) {
        blocks *= p;
        if (blocks > 64) throw std::invalid_argument("p^alpha too large");
    }
    int k = static_cast<int>(2 * blocks);

    std::vector<RatMatrix> gens;
    for (long b = 0; b < blocks; ++b)
        gens.push_back(block_rotation_generator(k, static_cast<int>(b)));
    std::vector<RatMatrix> cycle{block_cycle_matrix(k)};

    InvariantQuadraticReport rep;
    rep.k = k;
    rep.torus = invariant_quadratic_forms(k, gens, {});
    rep.group = invariant_quadratic_forms(k, gens, cycle);
    return rep;
}

}  // namespace grr
