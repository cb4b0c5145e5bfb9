#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "grr/poly.hpp"
#include "grr/rings.hpp"

namespace grr {

/// Multiset of leaves of the full binary tree of height h
/// (leaf indices 1..2^h, multiplicities >= 1).
struct LeafMultiset {
    int h = 0;
    std::map<int, int> entries;  // leaf index -> multiplicity

    int leaves() const { return 1 << h; }

    int cardinality() const {
        int c = 0;
        for (const auto& [i, m] : entries) c += m;
        return c;
    }

    void validate() const {
        if (h < 0 || h > 24) throw std::invalid_argument("tree height out of range");
        if (entries.empty()) throw std::invalid_argument("empty leaf multiset");
        for (const auto& [i, m] : entries) {
            if (i < 1 || i > leaves())
                throw std::invalid_argument("leaf index out of range");
            if (m < 1) throw std::invalid_argument("multiplicity must be positive");
        }
    }
};

/// Canonical orbit invariant of a leaf multiset under the
/// grading-preserving tree automorphisms: the fork topology of the
/// minimal spanning subtree with fork gradings (depth measured from the
/// leaf level) and leaf multiplicities.  Single-child chains are
/// contracted; the surviving fork keeps its grading.
struct OrbitKey {
    int depth = 0;         // fork grading; 0 for a leaf
    int multiplicity = 0;  // > 0 exactly for a leaf
    std::vector<OrbitKey> children;  // empty (leaf) or two, sorted

    bool is_leaf() const { return children.empty(); }

    int cardinality() const {
        if (is_leaf()) return multiplicity;
        return children[0].cardinality() + children[1].cardinality();
    }

    static OrbitKey leaf(int mult) {
        OrbitKey k;
        k.multiplicity = mult;
        return k;
    }

    static OrbitKey fork(int depth, OrbitKey a, OrbitKey b) {
        OrbitKey k;
        k.depth = depth;
        if (b.str() < a.str()) std::swap(a, b);
        k.children.push_back(std::move(a));
        k.children.push_back(std::move(b));
        return k;
    }

    /// Canonical serialization; doubles as the total order for sorting
    /// children and as the map key order.
    std::string str() const {
        if (is_leaf()) return "(" + std::to_string(multiplicity) + ")";
        return "[" + std::to_string(depth) + ":" + children[0].str() + "," +
               children[1].str() + "]";
    }

    friend bool operator==(const OrbitKey& a, const OrbitKey& b) {
        return a.str() == b.str();
    }
    friend bool operator<(const OrbitKey& a, const OrbitKey& b) {
        return a.str() < b.str();
    }
};

namespace detail {

/// Key of the part of S inside the leaf range [lo, lo+2^t), given
/// nonempty intersection.
inline OrbitKey orbit_key_range(const LeafMultiset& s, int lo, int t) {
    if (t == 0) return OrbitKey::leaf(s.entries.at(lo));
    int half = 1 << (t - 1);
    bool left = false, right = false;
    for (const auto& [i, m] : s.entries) {
        if (i < lo || i >= lo + 2 * half) continue;
        (i < lo + half ? left : right) = true;
    }
    if (left && right)
        return OrbitKey::fork(t, orbit_key_range(s, lo, t - 1),
                              orbit_key_range(s, lo + half, t - 1));
    // Chain contraction: descend into the occupied half only.
    return orbit_key_range(s, left ? lo : lo + half, t - 1);
}

}  // namespace detail

inline OrbitKey orbit_key(const LeafMultiset& s) {
    s.validate();
    return detail::orbit_key_range(s, 1, s.h);
}

/// Order of the grading-preserving automorphism group: 2^(2^h - 1)
/// (one independent swap per internal node).
inline BigInt group_order(int h) {
    if (h < 0 || h > 60) throw std::invalid_argument("tree height out of range");
    return boost::multiprecision::pow(BigInt(2), (1u << h) - 1);
}

/// The node-swap involutions: for every internal node, exchange its two
/// subtrees.  0-based permutations of the 2^h leaves.
inline std::vector<std::vector<int>> group_generators(int h) {
    if (h < 0 || h > 16) throw std::invalid_argument("tree height out of range");
    int m = 1 << h;
    std::vector<std::vector<int>> gens;
    for (int t = 1; t <= h; ++t) {
        int size = 1 << t, half = size / 2;
        for (int lo = 0; lo < m; lo += size) {
            std::vector<int> perm(m);
            for (int i = 0; i < m; ++i) perm[i] = i;
            for (int i = 0; i < half; ++i) std::swap(perm[lo + i], perm[lo + half + i]);
            gens.push_back(std::move(perm));
        }
    }
    return gens;
}

/// Brute-force closure of the involutions; h <= 3 keeps this at 128
/// elements.
inline std::vector<std::vector<int>> group_elements(int h) {
    if (h > 3) throw std::invalid_argument("explicit element listing limited to h <= 3");
    int m = 1 << h;
    std::vector<int> identity(m);
    for (int i = 0; i < m; ++i) identity[i] = i;

    auto gens = group_generators(h);
    std::set<std::vector<int>> seen{identity};
    std::vector<std::vector<int>> frontier{identity};
    while (!frontier.empty()) {
        std::vector<std::vector<int>> next;
        for (const auto& p : frontier) {
            for (const auto& g : gens) {
                std::vector<int> q(m);
                for (int i = 0; i < m; ++i) q[i] = g[p[i]];
                if (seen.insert(q).second) next.push_back(std::move(q));
            }
        }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

/// Invariance under every node-swap generator (the generators generate,
/// so this settles invariance under the whole group).
template <class C>
bool is_invariant(const SparsePoly<C>& f, int h) {
    int m = 1 << h;
    if (f.nvars() != m)
        throw std::invalid_argument("variable count must be 2^h");
    for (const auto& g : group_generators(h))
        if (f.permute_vars(g) != f) return false;
    return true;
}

struct OrbitList {
    std::vector<OrbitKey> keys;
    std::vector<LeafMultiset> representatives;  // aligned with keys
};

namespace detail {

/// All canonical keys of cardinality-delta multisets living in a
/// height-t subtree: a single leaf, or a fork of grading g <= t whose
/// halves carry a split of delta.
inline void enum_keys(int delta, int t, std::vector<OrbitKey>& out,
                      std::size_t cap) {
    out.push_back(OrbitKey::leaf(delta));
    for (int g = 1; g <= t; ++g) {
        for (int dl = 1; dl < delta; ++dl) {
            std::vector<OrbitKey> ls, rs;
            enum_keys(dl, g - 1, ls, cap);
            enum_keys(delta - dl, g - 1, rs, cap);
            for (const auto& a : ls)
                for (const auto& b : rs) {
                    out.push_back(OrbitKey::fork(g, a, b));
                    if (out.size() > cap)
                        throw std::runtime_error("orbit enumeration exceeded its cap");
                }
        }
    }
}

/// Leftmost embedding of a key into the full tree, leaves starting at
/// `base` inside a height-t range.
inline void place_representative(const OrbitKey& k, int base, LeafMultiset& s) {
    if (k.is_leaf()) {
        s.entries[base] += k.multiplicity;
        return;
    }
    int half = 1 << (k.depth - 1);
    place_representative(k.children[0], base, s);
    place_representative(k.children[1], base + half, s);
}

}  // namespace detail

/// Complete duplicate-free orbit list for cardinality delta at height h,
/// with a leftmost representative per orbit.
inline OrbitList enumerate_orbits(int delta, int h) {
    if (delta < 1 || h < 1) throw std::invalid_argument("delta and h must be >= 1");
    if (h > 16) throw std::invalid_argument("height too large for enumeration");
    std::vector<OrbitKey> raw;
    detail::enum_keys(delta, h, raw, 1000000);
    std::sort(raw.begin(), raw.end());
    raw.erase(std::unique(raw.begin(), raw.end()), raw.end());

    OrbitList out;
    for (const auto& k : raw) {
        LeafMultiset s;
        s.h = h;
        detail::place_representative(k, 1, s);
        out.keys.push_back(k);
        out.representatives.push_back(std::move(s));
    }
    return out;
}

/// Full orbit of a multiset under the generators (BFS closure).
inline std::vector<std::map<int, int>> multiset_orbit(const LeafMultiset& u,
                                                      std::size_t cap = 100000) {
    u.validate();
    auto gens = group_generators(u.h);
    std::set<std::map<int, int>> seen{u.entries};
    std::vector<std::map<int, int>> frontier{u.entries};
    while (!frontier.empty()) {
        std::vector<std::map<int, int>> next;
        for (const auto& s : frontier) {
            for (const auto& g : gens) {
                std::map<int, int> img;
                for (const auto& [i, m] : s) img[g[i - 1] + 1] += m;
                if (seen.insert(img).second) {
                    if (seen.size() > cap)
                        throw std::runtime_error("orbit size exceeded its cap");
                    next.push_back(std::move(img));
                }
            }
        }
        frontier = std::move(next);
    }
    return {seen.begin(), seen.end()};
}

/// The invariant polynomial g_U: the sum of ybar^{2 sigma(U)} over the
/// orbit of U; homogeneous of degree 2 * cardinality.
template <class C>
SparsePoly<C> orbit_polynomial(const LeafMultiset& u) {
    if (u.h > 4)
        throw std::invalid_argument("dense orbit polynomials limited to h <= 4");
    int m = u.leaves();
    SparsePoly<C> g(m);
    for (const auto& s : multiset_orbit(u)) {
        Monomial mono(static_cast<std::size_t>(m));
        for (const auto& [i, mult] : s) {
            mono.e[static_cast<std::size_t>(i - 1)] = 2 * static_cast<unsigned>(mult);
        }
        mono.deg = 2 * static_cast<unsigned>(u.cardinality());
        g.add_term(mono, ring_traits<C>::one());
    }
    return g;
}

/// Coefficient assignment constant on orbits: one value per orbit of
/// cardinality delta at height h.  Polynomials of this shape are exactly
/// the invariant ones among sums of squared-monomial orbit terms.
struct InvariantCoefficients {
    int h = 0;
    int delta = 0;
    std::map<OrbitKey, double> values;

    void validate() const {
        for (const auto& [k, v] : values) {
            if (k.cardinality() != delta)
                throw std::invalid_argument("orbit key cardinality mismatch");
            if (!k.is_leaf() && k.depth > h)
                throw std::invalid_argument("orbit key exceeds tree height");
        }
    }

    /// The invariant polynomial sum a_U * g_U in 2^h variables.
    SparsePoly<double> to_polynomial() const {
        validate();
        int m = 1 << h;
        SparsePoly<double> f(m);
        for (const auto& [k, v] : values) {
            LeafMultiset rep;
            rep.h = h;
            detail::place_representative(k, 1, rep);
            f += orbit_polynomial<double>(rep).scaled(v);
        }
        return f;
    }
};

}  // namespace grr
