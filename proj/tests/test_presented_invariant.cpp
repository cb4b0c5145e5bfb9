// Graded presented rings, square roots modulo relations, and invariant
// quadratic forms.
//
// Derived expectations are recomputed by independent oracles first: a
// floating-point invariance solver with sampled finite rotations for the
// form-space dimensions, and an exhaustive rational grid for the
// square-root nonexistence claim.

#include <catch2/catch_amalgamated.hpp>

#include <grr/invariant_quadratic.hpp>
#include <grr/presented_ring.hpp>
#include <grr/rng.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

using namespace grr;

namespace {

// ---------------------------------------------------------------------------
// Oracle 1: dimension of the space of quadratic forms invariant under a
// sampled set of orthogonal maps, via a floating-point nullspace.  This
// uses finite rotations (not the infinitesimal condition the library
// imposes), so agreement is a genuine cross-check.
int sampled_invariant_dim(int k, const std::vector<Eigen::MatrixXd>& samples) {
    std::vector<std::pair<int, int>> coords;
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) coords.emplace_back(i, j);
    const int m = static_cast<int>(coords.size());
    Eigen::MatrixXd rows(static_cast<int>(samples.size()) * m, m);
    int r0 = 0;
    for (const auto& r : samples) {
        for (int c = 0; c < m; ++c) {
            auto [i, j] = coords[c];
            Eigen::MatrixXd e = Eigen::MatrixXd::Zero(k, k);
            e(i, j) = e(j, i) = 1.0;
            Eigen::MatrixXd resid = r.transpose() * e * r - e;
            for (int c2 = 0; c2 < m; ++c2) {
                auto [i2, j2] = coords[c2];
                rows(r0 + c2, c) = resid(i2, j2);
            }
        }
        r0 += m;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
    const auto& sv = svd.singularValues();
    double cut = 1e-9 * (sv.size() ? sv(0) : 1.0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cut) ++rank;
    return m - rank;
}

Eigen::MatrixXd block_rotation(int k, int b, double theta) {
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(k, k);
    r(2 * b, 2 * b) = std::cos(theta);
    r(2 * b, 2 * b + 1) = -std::sin(theta);
    r(2 * b + 1, 2 * b) = std::sin(theta);
    r(2 * b + 1, 2 * b + 1) = std::cos(theta);
    return r;
}

Eigen::MatrixXd to_double(const RatMatrix& m) {
    Eigen::MatrixXd out(m.size(), m[0].size());
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < m[i].size(); ++j)
            out(static_cast<int>(i), static_cast<int>(j)) =
                rational_to<double>(m[i][j]);
    return out;
}

// Directional derivative of f along the linear field x -> J x.
SparsePoly<Rational> lie_derivative(const SparsePoly<Rational>& f,
                                    const RatMatrix& j) {
    int k = f.nvars();
    SparsePoly<Rational> out(k);
    for (int v = 0; v < k; ++v) {
        SparsePoly<Rational> jv(k);  // (J x)_v
        for (int c = 0; c < k; ++c)
            if (!(j[v][c] == Rational(0)))
                jv += SparsePoly<Rational>::variable(k, c).scaled(j[v][c]);
        out += f.derivative(v) * jv;
    }
    return out;
}

}  // namespace

TEST_CASE("invariant form dimensions match a sampled-rotation oracle", "[invariant]") {
    // Oracle first, for k = 6 (p = 3, alpha = 1).
    {
        int k = 6;
        Rng rng(21);
        std::vector<Eigen::MatrixXd> torus_samples;
        for (int b = 0; b < 3; ++b)
            for (int s = 0; s < 2; ++s)
                torus_samples.push_back(block_rotation(k, b, rng.uniform(0.3, 2.8)));
        REQUIRE(sampled_invariant_dim(k, torus_samples) == 3);

        auto with_cycle = torus_samples;
        Eigen::MatrixXd cyc = to_double(block_cycle_matrix(k));
        with_cycle.push_back(cyc);
        REQUIRE(sampled_invariant_dim(k, with_cycle) == 1);
    }

    auto rep31 = invariant_quadratic_space(3, 1);
    REQUIRE(rep31.k == 6);
    REQUIRE(rep31.dim_torus() == 3);
    REQUIRE(rep31.dim_group() == 1);

    auto rep21 = invariant_quadratic_space(2, 1);
    REQUIRE(rep21.k == 4);
    REQUIRE(rep21.dim_torus() == 2);
    REQUIRE(rep21.dim_group() == 1);

    // Trivial sanity: no constraints leave all k(k+1)/2 forms.
    auto all = invariant_quadratic_forms(4, {}, {});
    REQUIRE(all.dim() == 10);
}

TEST_CASE("group-invariant form is the standard quadratic", "[invariant]") {
    auto rep = invariant_quadratic_space(2, 1);
    REQUIRE(rep.group.basis_forms.size() == 1);
    auto f = rep.group.basis_forms[0];
    // Must be a nonzero multiple of x1^2 + ... + x4^2.
    auto q = SparsePoly<Rational>::standard_q(4);
    auto c = proportional_scalar(f, q);
    REQUIRE(c.has_value());
    REQUIRE_FALSE(*c == Rational(0));
}

TEST_CASE("invariant bases pass direct substitution checks", "[invariant]") {
    for (auto [p, alpha] : {std::pair{2, 1}, std::pair{3, 1}}) {
        auto rep = invariant_quadratic_space(p, alpha);
        int k = rep.k;
        std::vector<RatMatrix> gens;
        for (int b = 0; b < k / 2; ++b)
            gens.push_back(block_rotation_generator(k, b));
        RatMatrix cyc = block_cycle_matrix(k);
        for (const auto& f : rep.torus.basis_forms) {
            for (const auto& j : gens) REQUIRE(lie_derivative(f, j).is_zero());
        }
        for (const auto& f : rep.group.basis_forms) {
            for (const auto& j : gens) REQUIRE(lie_derivative(f, j).is_zero());
            REQUIRE(f.compose_linear(cyc) == f);
        }
    }
}

TEST_CASE("square roots in a free graded ring", "[presented]") {
    // (e p)^2 has the obvious roots +- e p.
    PresentedRing free_ring({{"e", 2}, {"p", 4}}, {});
    auto e = free_ring.gen("e");
    auto p = free_ring.gen("p");
    auto target = (e * p) * (e * p);
    auto res = sqrt_in_presented_ring(target, free_ring, 6);
    REQUIRE(res.root.has_value());
    bool root_is_ep = (*res.root == e * p) || (*res.root == (e * p).scaled(Rational(-1)));
    REQUIRE(root_is_ep);
    REQUIRE(res.all.size() == 2);
}

TEST_CASE("square root of the degree-16 class exists in the root ring", "[presented]") {
    // In the free ring on the roots a, b the class 16 a^2 b^2 (a^2-b^2)^2
    // is the perfect square of 4 a b (a^2 - b^2).
    PresentedRing roots({{"a", 1}, {"b", 1}}, {});
    auto a = roots.gen("a");
    auto b = roots.gen("b");
    auto target = (a * b).pow(2).scaled(Rational(16)) * (a * a - b * b).pow(2);
    auto res = sqrt_in_presented_ring(target, roots, 4);
    REQUIRE(res.root.has_value());
    auto expect = (a * b * (a * a - b * b)).scaled(Rational(4));
    bool match = (*res.root == expect) || (*res.root == expect.scaled(Rational(-1)));
    REQUIRE(match);
}

TEST_CASE("relation-supplied square root", "[presented]") {
    // With c^2 = p^4 available, p^4's roots are +-c and +-p^2.
    auto ring = oriented_rank4_ring();
    auto p = ring.gen("p");
    auto c = ring.gen("c");
    auto res = sqrt_in_presented_ring(p.pow(4), ring, 8);
    REQUIRE(res.root.has_value());
    REQUIRE(res.all.size() == 4);
    auto contains = [&](const SparsePoly<Rational>& u) {
        for (const auto& r : res.all)
            if (r == u) return true;
        return false;
    };
    REQUIRE(contains(c));
    REQUIRE(contains(c.scaled(Rational(-1))));
    REQUIRE(contains(p * p));
    REQUIRE(contains((p * p).scaled(Rational(-1))));
}

TEST_CASE("no square root for the obstruction class in the quotient", "[presented]") {
    auto ring = oriented_rank4_ring();
    // Express 16 a^2 b^2 (a^2-b^2)^2 through e = ab, p = a^2+b^2:
    // (a^2-b^2)^2 = p^2 - 4 e^2, so the class is 16 e^2 p^2 - 64 e^4.
    auto e = ring.gen("e");
    auto p = ring.gen("p");
    auto target = (e * e * p * p).scaled(Rational(16)) -
                  e.pow(4).scaled(Rational(64));
    // Cross-check the ambient identity before using it.
    auto av = SparsePoly<Rational>::variable(2, 0);
    auto bv = SparsePoly<Rational>::variable(2, 1);
    auto ambient_target =
        (av * bv).pow(2).scaled(Rational(16)) * (av * av - bv * bv).pow(2);
    REQUIRE(ring.ambient_image(target) == ambient_target);

    // Oracle first: exhaustive grid over the 4-dimensional degree-8
    // coefficient space (numerators -4..4 over denominator 2) finds no
    // candidate squaring to the target.
    const auto& comp = ring.component(8);
    REQUIRE(comp.basis.size() == 4);
    std::vector<SparsePoly<Rational>> basis_polys;
    for (std::size_t bpos : comp.basis) {
        SparsePoly<Rational> mono(ring.ngens());
        mono.add_term(comp.monomials[bpos], Rational(1));
        basis_polys.push_back(mono);
    }
    auto t_coords = ring.reduce_to_basis(target, 16);
    bool grid_hit = false;
    for (int x = -4; x <= 4 && !grid_hit; ++x)
        for (int y = -4; y <= 4 && !grid_hit; ++y)
            for (int z = -4; z <= 4 && !grid_hit; ++z)
                for (int w = -4; w <= 4 && !grid_hit; ++w) {
                    SparsePoly<Rational> u(ring.ngens());
                    u += basis_polys[0].scaled(Rational(x, 2));
                    u += basis_polys[1].scaled(Rational(y, 2));
                    u += basis_polys[2].scaled(Rational(z, 2));
                    u += basis_polys[3].scaled(Rational(w, 2));
                    if (ring.reduce_to_basis(u * u, 16) == t_coords) grid_hit = true;
                }
    REQUIRE_FALSE(grid_hit);

    auto res = sqrt_in_presented_ring(target, ring, 8);
    REQUIRE_FALSE(res.root.has_value());
    REQUIRE(res.all.empty());
}

TEST_CASE("presented ring guards its degree cap", "[presented]") {
    auto ring = oriented_rank4_ring();
    REQUIRE_NOTHROW(ring.component(32));
    REQUIRE_THROWS_AS(ring.component(33), std::domain_error);
    REQUIRE_THROWS_AS(ring.component(-1), std::invalid_argument);
}
