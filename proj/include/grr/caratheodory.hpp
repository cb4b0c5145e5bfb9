#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "grr/exact_linalg.hpp"
#include "grr/rings.hpp"

namespace grr {

/// Support-reduction result: surviving indices into the input list with
/// their updated weights.
template <class T>
struct CaratheodoryResult {
    std::vector<std::size_t> indices;
    std::vector<T> weights;
};

namespace detail {

/// One nontrivial linear dependency among the given columns, or nullopt
/// if they are independent.  Double path: full-pivot LU with a 1e-13
/// relative threshold (worst-conditioned pivots are switched away by
/// the full pivoting).  Rational path: exact nullspace.
inline std::optional<std::vector<double>> column_dependency(
    const std::vector<std::vector<double>>& cols) {
    if (cols.empty()) return std::nullopt;
    const std::size_t dim = cols[0].size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < dim; ++i)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = cols[j][i];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    lu.setThreshold(1e-13);
    if (lu.rank() >= static_cast<Eigen::Index>(cols.size())) return std::nullopt;
    Eigen::MatrixXd kernel = lu.kernel();
    std::vector<double> dep(cols.size());
    // Normalize so the largest entry is +-1; keeps step ratios well scaled.
    Eigen::Index best = 0;
    kernel.col(0).cwiseAbs().maxCoeff(&best);
    for (std::size_t j = 0; j < cols.size(); ++j)
        dep[j] = kernel(static_cast<Eigen::Index>(j), 0) / kernel(best, 0);
    return dep;
}

inline std::optional<std::vector<Rational>> column_dependency(
    const std::vector<std::vector<Rational>>& cols) {
    if (cols.empty()) return std::nullopt;
    const std::size_t dim = cols[0].size();
    RatMatrix m(dim, RatVector(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t i = 0; i < dim; ++i) m[i][j] = cols[j][i];
    auto null = nullspace(m);
    if (null.empty()) return std::nullopt;
    std::vector<Rational> dep(null[0].begin(), null[0].end());
    return dep;
}

template <class T>
bool weight_negligible(const T& w, const T& scale) {
    if constexpr (ring_traits<T>::exact) {
        (void)scale;
        return w == 0;
    } else {
        return w <= scale * 1e-14;
    }
}

/// Shared pivoting loop: repeatedly find a dependency among the support
/// columns and drive one weight to zero along it without leaving the
/// nonnegative orthant.  The weighted sum of the columns is unchanged
/// by every step (the direction is a null vector).
template <class T>
CaratheodoryResult<T> reduce_conic_impl(const std::vector<std::vector<T>>& vectors,
                                        const std::vector<T>& weights) {
    if (vectors.size() != weights.size())
        throw std::invalid_argument("vector/weight count mismatch");
    CaratheodoryResult<T> cur;
    T wmax = ring_traits<T>::zero();
    for (const T& w : weights) {
        if (w < ring_traits<T>::zero()) throw std::invalid_argument("negative weight");
        if (w > wmax) wmax = w;
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (!weight_negligible(weights[i], wmax)) {
            cur.indices.push_back(i);
            cur.weights.push_back(weights[i]);
        }
    }
    if (cur.indices.empty()) throw std::invalid_argument("all weights vanish");
    if (!vectors.empty()) {
        const std::size_t dim = vectors[0].size();
        for (const auto& v : vectors)
            if (v.size() != dim) throw std::invalid_argument("ragged vector list");
    }

    for (;;) {
        std::vector<std::vector<T>> cols;
        cols.reserve(cur.indices.size());
        for (std::size_t idx : cur.indices) cols.push_back(vectors[idx]);
        auto dep = column_dependency(cols);
        if (!dep) break;

        // Largest step t with w - t*dep >= 0; positive dep entries bind.
        // If none is positive, flip the direction (dep is nontrivial).
        bool has_pos = false;
        for (const T& d : *dep)
            if (d > ring_traits<T>::zero()) { has_pos = true; break; }
        if (!has_pos)
            for (T& d : *dep) d = -d;

        bool first = true;
        T step = ring_traits<T>::zero();
        for (std::size_t j = 0; j < dep->size(); ++j) {
            if (!((*dep)[j] > ring_traits<T>::zero())) continue;
            T cand = cur.weights[j] / (*dep)[j];
            if (first || cand < step) { step = cand; first = false; }
        }
        if (first) throw std::runtime_error("degenerate dependency direction");

        CaratheodoryResult<T> next;
        T scale = ring_traits<T>::zero();
        for (std::size_t j = 0; j < cur.weights.size(); ++j) {
            cur.weights[j] = cur.weights[j] - step * (*dep)[j];
            if (cur.weights[j] > scale) scale = cur.weights[j];
        }
        bool removed = false;
        for (std::size_t j = 0; j < cur.weights.size(); ++j) {
            if (weight_negligible(cur.weights[j], scale) || cur.weights[j] < ring_traits<T>::zero()) {
                removed = true;
                continue;
            }
            next.indices.push_back(cur.indices[j]);
            next.weights.push_back(cur.weights[j]);
        }
        if (!removed) {
            // Force out the binding column to guarantee progress.
            std::size_t bind = 0;
            for (std::size_t j = 1; j < cur.weights.size(); ++j)
                if (cur.weights[j] < cur.weights[bind]) bind = j;
            next.indices.clear();
            next.weights.clear();
            for (std::size_t j = 0; j < cur.weights.size(); ++j) {
                if (j == bind) continue;
                next.indices.push_back(cur.indices[j]);
                next.weights.push_back(cur.weights[j]);
            }
        }
        cur = std::move(next);
        if (cur.indices.empty()) throw std::runtime_error("support reduction emptied the set");
    }
    return cur;
}

}  // namespace detail

/// Conic Caratheodory reduction: keeps Sum w_i v_i fixed while shrinking
/// the support to a linearly independent set (at most dim(v) points).
template <class T>
CaratheodoryResult<T> caratheodory_reduce_conic(const std::vector<std::vector<T>>& vectors,
                                                const std::vector<T>& weights) {
    return detail::reduce_conic_impl(vectors, weights);
}

/// Convex Caratheodory reduction: keeps both the weighted sum and the
/// total weight fixed, shrinking the support to at most dim + 1 points.
/// Implemented by lifting each point to (p, 1) and reducing conically.
template <class T>
CaratheodoryResult<T> caratheodory_reduce(const std::vector<std::vector<T>>& points,
                                          const std::vector<T>& weights) {
    std::vector<std::vector<T>> lifted;
    lifted.reserve(points.size());
    for (const auto& p : points) {
        std::vector<T> q = p;
        q.push_back(ring_traits<T>::one());
        lifted.push_back(std::move(q));
    }
    return detail::reduce_conic_impl(lifted, weights);
}

}  // namespace grr
