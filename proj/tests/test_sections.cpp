// Polytope projections and sections, circumscribed and inscribed
// ellipsoids, and the round-view subspace search.
//
// Oracles first: an independent half-plane membership test in 2-d, the
// circumscribed-sphere formula for the regular simplex, a hand dual
// certificate for the box ellipse, and a direct KKT solve for inscribed
// optimality.

#include <catch2/catch_amalgamated.hpp>

#include <grr/rng.hpp>
#include <grr/sections.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <vector>

using namespace grr;

namespace {

Eigen::VectorXd vec2(double x, double y) {
    Eigen::VectorXd v(2);
    v << x, y;
    return v;
}
Eigen::VectorXd vec3(double x, double y, double z) {
    Eigen::VectorXd v(3);
    v << x, y, z;
    return v;
}

Polytope cube3() {
    Polytope p;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1}) p.vertices.push_back(vec3(sx, sy, sz));
    for (int axis = 0; axis < 3; ++axis)
        for (int sign : {-1, 1}) {
            Facet f;
            f.normal = Eigen::VectorXd::Zero(3);
            f.normal(axis) = sign;
            f.offset = 1.0;
            p.facets.push_back(f);
        }
    return p;
}

Polytope simplex3() {
    // Regular tetrahedron centered at the origin.
    Polytope p;
    p.vertices = {vec3(1, 1, 1), vec3(1, -1, -1), vec3(-1, 1, -1),
                  vec3(-1, -1, 1)};
    // Facets: each opposite a vertex; normal points away from it.
    for (int skip = 0; skip < 4; ++skip) {
        std::vector<Eigen::VectorXd> tri;
        for (int i = 0; i < 4; ++i)
            if (i != skip) tri.push_back(p.vertices[static_cast<std::size_t>(i)]);
        Eigen::Vector3d a = tri[1].head<3>() - tri[0].head<3>();
        Eigen::Vector3d b = tri[2].head<3>() - tri[0].head<3>();
        Eigen::Vector3d nrm = a.cross(b);
        if (nrm.dot(p.vertices[static_cast<std::size_t>(skip)].head<3>()) > 0)
            nrm = -nrm;
        Facet f;
        f.normal = nrm.normalized();
        f.offset = f.normal.dot(tri[0]);
        p.facets.push_back(f);
    }
    return p;
}

// Oracle: 2-d membership by checking every half-plane spanned by a hull
// edge, independent of the library's hull or NNLS code.
bool inside_2d_oracle(const Eigen::VectorXd& q,
                      const std::vector<Eigen::VectorXd>& pts, double tol) {
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            Eigen::Vector2d d = pts[j].head<2>() - pts[i].head<2>();
            if (d.norm() < 1e-14) continue;
            Eigen::Vector2d nrm(d.y(), -d.x());
            double off = nrm.dot(pts[i].head<2>());
            // If every point lies on one side, q must too.
            double mn = 1e300, mx = -1e300;
            for (const auto& p : pts) {
                double s = nrm.dot(p.head<2>()) - off;
                mn = std::min(mn, s);
                mx = std::max(mx, s);
            }
            double sq = nrm.dot(q.head<2>()) - off;
            if (mn >= -1e-12 && sq < -tol) return false;
            if (mx <= 1e-12 && sq > tol) return false;
        }
    }
    return true;
}

// Oracle: nonnegative KKT multipliers certifying inscribed optimality.
// For maximize log det B s.t. a_i . c + |B a_i| <= b_i, stationarity
// reads  B^{-1} = sum mu_i sym(a_i (B a_i)^T)/|B a_i|  together with
// sum mu_i a_i = 0 over the active facets.
double john_kkt_residual(const Polytope& poly, const Ellipsoid& e) {
    const int k = poly.dim();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.shape);
    Eigen::MatrixXd binv_sq = e.shape;  // shape = (B^2)^{-1}
    Eigen::MatrixXd b = es.operatorInverseSqrt();
    std::vector<int> active;
    for (std::size_t i = 0; i < poly.facets.size(); ++i) {
        const auto& f = poly.facets[i];
        double slack = f.offset - f.normal.dot(e.center) - (b * f.normal).norm();
        if (slack <= 1e-6 * (1.0 + std::abs(f.offset)))
            active.push_back(static_cast<int>(i));
    }
    if (active.empty()) return 1e300;
    const int rows = k * (k + 1) / 2 + k;
    Eigen::MatrixXd sys(rows, static_cast<int>(active.size()));
    Eigen::VectorXd rhs(rows);
    Eigen::MatrixXd binv = b.inverse();
    int r = 0;
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) rhs(r++) = binv(i, j);
    for (int i = 0; i < k; ++i) rhs(r++) = 0.0;
    for (std::size_t t = 0; t < active.size(); ++t) {
        const auto& f = poly.facets[static_cast<std::size_t>(active[t])];
        Eigen::VectorXd ba = b * f.normal;
        Eigen::MatrixXd sym =
            (f.normal * ba.transpose() + ba * f.normal.transpose()) /
            (2.0 * ba.norm());
        r = 0;
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j)
                sys(r++, static_cast<int>(t)) = sym(i, j);
        for (int i = 0; i < k; ++i)
            sys(r++, static_cast<int>(t)) = f.normal(i);
    }
    Eigen::VectorXd mu = sys.colPivHouseholderQr().solve(rhs);
    double neg = 0.0;
    for (int i = 0; i < mu.size(); ++i) neg = std::min(neg, mu(i));
    double resid = (sys * mu - rhs).norm() / rhs.norm();
    return resid + std::max(0.0, -neg);
}

}  // namespace

TEST_CASE("cube projects to the unit square", "[project]") {
    Eigen::MatrixXd rows(2, 3);
    rows << 1, 0, 0, 0, 1, 0;
    auto sq = project(cube3(), Frame<double>{rows});
    REQUIRE_FALSE(sq.degenerate);
    REQUIRE(sq.vertices.size() == 4);
    for (const auto& v : sq.vertices) {
        REQUIRE(std::abs(std::abs(v(0)) - 1.0) <= 1e-12);
        REQUIRE(std::abs(std::abs(v(1)) - 1.0) <= 1e-12);
    }
    REQUIRE(sq.has_facets());
    REQUIRE(sq.facets.size() == 4);
}

TEST_CASE("projected simplex equals the hull of projected vertices", "[project]") {
    Rng rng(121);
    Polytope s = simplex3();
    Frame<double> a{rng.haar_frame(2, 3)};
    auto q = project(s, a);
    REQUIRE_FALSE(q.degenerate);
    // Oracle: every projected original vertex is inside the reported
    // hull; every reported vertex is one of the projected originals.
    std::vector<Eigen::VectorXd> raw;
    for (const auto& v : s.vertices) raw.push_back(a.rows * v);
    for (const auto& v : raw) REQUIRE(inside_2d_oracle(v, q.vertices, 1e-9));
    for (const auto& v : q.vertices) {
        bool matches = false;
        for (const auto& w : raw) matches = matches || (v - w).norm() <= 1e-9;
        REQUIRE(matches);
    }
    // Random interior points pass both membership tests; far points fail.
    for (int t = 0; t < 20; ++t) {
        Eigen::VectorXd mix = Eigen::VectorXd::Zero(2);
        double tot = 0.0;
        for (const auto& v : raw) {
            double w = rng.uniform(0.05, 1.0);
            mix += w * v;
            tot += w;
        }
        mix /= tot;
        REQUIRE(inside_2d_oracle(mix, q.vertices, 1e-9));
        REQUIRE(detail::point_in_hull(mix, q.vertices, 1e-9));
        Eigen::VectorXd far = mix + vec2(10.0, 0.0);
        REQUIRE_FALSE(detail::point_in_hull(far, q.vertices, 1e-9));
    }
}

TEST_CASE("orthogonal projection of a segment is degenerate", "[project]") {
    Polytope seg;
    seg.vertices = {vec3(0, 0, -1), vec3(0, 0, 1)};
    Eigen::MatrixXd rows(2, 3);
    rows << 1, 0, 0, 0, 1, 0;
    auto q = project(seg, Frame<double>{rows});
    REQUIRE(q.degenerate);
}

TEST_CASE("cube sectioned through the center is a square", "[section]") {
    Eigen::MatrixXd rows(2, 3);
    rows << 1, 0, 0, 0, 1, 0;
    auto slice = section(cube3(), Frame<double>{rows}, vec3(0, 0, 0));
    REQUIRE_FALSE(slice.degenerate);
    REQUIRE(slice.vertices.size() == 4);
    for (const auto& v : slice.vertices) {
        REQUIRE(std::abs(std::abs(v(0)) - 1.0) <= 1e-12);
        REQUIRE(std::abs(std::abs(v(1)) - 1.0) <= 1e-12);
    }
}

TEST_CASE("simplex sectioned near a vertex is a small triangle", "[section]") {
    Polytope s = simplex3();
    // Plane orthogonal to the direction of vertex (1,1,1), close to it.
    Eigen::Vector3d dir = Eigen::Vector3d(1, 1, 1).normalized();
    Eigen::MatrixXd rows(2, 3);
    Eigen::Vector3d u = dir.unitOrthogonal();
    Eigen::Vector3d w = dir.cross(u);
    rows.row(0) = u.transpose();
    rows.row(1) = w.transpose();
    Eigen::VectorXd x = 0.8 * std::sqrt(3.0) * dir;  // near the vertex
    auto slice = section(s, Frame<double>{rows}, x);
    REQUIRE_FALSE(slice.degenerate);
    REQUIRE(slice.vertices.size() == 3);  // oracle: facet count of the slice
    // All slice vertices are close to the vertex region.
    for (const auto& v : slice.vertices) REQUIRE(v.norm() <= 1.5);
}

TEST_CASE("section requires an interior base point", "[section]") {
    Eigen::MatrixXd rows(2, 3);
    rows << 1, 0, 0, 0, 1, 0;
    REQUIRE_THROWS_AS(section(cube3(), Frame<double>{rows}, vec3(0, 0, 1)),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(section(cube3(), Frame<double>{rows}, vec3(0, 0, 2)),
                      std::invalid_argument);
}

TEST_CASE("circumscribed ellipsoid of the regular simplex is its circumsphere", "[lowner]") {
    // Oracle first: all four vertices have norm sqrt(3) from the
    // centroid 0, so the circumscribed sphere has radius sqrt(3) and the
    // minimum-volume ellipsoid can be no smaller by symmetry.
    Polytope s = simplex3();
    for (const auto& v : s.vertices) REQUIRE(v.norm() == Catch::Approx(std::sqrt(3.0)));
    auto e = lowner_mvee(s.vertices, 1e-9);
    REQUIRE(e.center.norm() <= 1e-6);
    // shape must be close to I/3.
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double expect = (i == j) ? 1.0 / 3.0 : 0.0;
            REQUIRE(e.shape(i, j) == Catch::Approx(expect).margin(1e-6));
        }
    REQUIRE(ball_residual(e) <= 1e-5);
}

TEST_CASE("points on a circle give a disk with zero residual", "[lowner]") {
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < 12; ++i) {
        double th = 2.0 * M_PI * i / 12.0;
        pts.push_back(vec2(2.0 * std::cos(th), 2.0 * std::sin(th)));
    }
    auto e = lowner_mvee(pts, 1e-9);
    REQUIRE(e.center.norm() <= 1e-7);
    REQUIRE(ball_residual(e) <= 1e-6);
}

TEST_CASE("box ellipse matches its dual certificate", "[lowner]") {
    // Oracle first: with equal weight 1/4 on each corner of
    // [-1,1]x[-2,2], the Khachiyan moment matrix is diag(1,4) and the
    // induced ellipse shape is diag(1/2, 1/8); the four corners land
    // exactly on its boundary, certifying optimality.
    std::vector<Eigen::VectorXd> corners{vec2(-1, -2), vec2(1, -2), vec2(-1, 2),
                                         vec2(1, 2)};
    Eigen::MatrixXd moment = Eigen::MatrixXd::Zero(2, 2);
    for (const auto& v : corners) moment += 0.25 * v * v.transpose();
    Eigen::MatrixXd oracle_shape = (2.0 * moment).inverse();
    REQUIRE(oracle_shape(0, 0) == Catch::Approx(0.5));
    REQUIRE(oracle_shape(1, 1) == Catch::Approx(0.125));
    for (const auto& v : corners)
        REQUIRE(v.dot(oracle_shape * v) == Catch::Approx(1.0));

    auto e = lowner_mvee(corners, 1e-9);
    REQUIRE(e.center.norm() <= 1e-6);
    REQUIRE((e.shape - oracle_shape).cwiseAbs().maxCoeff() <= 1e-5);
    // Containment within the certified tolerance.
    for (const auto& v : corners) {
        Eigen::VectorXd d = v - e.center;
        REQUIRE(d.dot(e.shape * d) <= 1.0 + 1e-9);
    }
}

TEST_CASE("circumscribed ellipsoid always contains its points", "[lowner]") {
    Rng rng(131);
    for (int trial = 0; trial < 5; ++trial) {
        int n = 2 + trial % 3;
        std::vector<Eigen::VectorXd> pts;
        for (int i = 0; i < 12 + 3 * n; ++i) {
            Eigen::VectorXd v(n);
            for (int j = 0; j < n; ++j) v(j) = rng.normal();
            pts.push_back(v);
        }
        auto e = lowner_mvee(pts, 1e-8);
        for (const auto& v : pts) {
            Eigen::VectorXd d = v - e.center;
            REQUIRE(d.dot(e.shape * d) <= 1.0 + 1e-9);
        }
    }
    // Degenerate affine hull is rejected.
    std::vector<Eigen::VectorXd> line{vec2(0, 0), vec2(1, 1), vec2(2, 2)};
    REQUIRE_THROWS_AS(lowner_mvee(line, 1e-8), std::invalid_argument);
}

TEST_CASE("circumscribed ellipsoid is rotation-equivariant", "[lowner]") {
    Rng rng(132);
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < 15; ++i) {
        Eigen::VectorXd v(3);
        for (int j = 0; j < 3; ++j) v(j) = rng.normal();
        pts.push_back(v + vec3(0.3, -0.6, 1.1));
    }
    Eigen::MatrixXd r = rng.haar_rotation(3);
    std::vector<Eigen::VectorXd> rot;
    for (const auto& v : pts) rot.push_back(r * v);
    auto e1 = lowner_mvee(pts, 1e-9);
    auto e2 = lowner_mvee(rot, 1e-9);
    REQUIRE((e2.center - r * e1.center).norm() <= 1e-8 * (1.0 + e1.center.norm()));
    Eigen::MatrixXd conj = r * e1.shape * r.transpose();
    REQUIRE((e2.shape - conj).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("circumscribed shape depends continuously on the points", "[lowner]") {
    Rng rng(133);
    std::vector<Eigen::VectorXd> pts;
    for (int i = 0; i < 10; ++i) {
        Eigen::VectorXd v(2);
        v << rng.normal(), rng.normal();
        pts.push_back(v);
    }
    auto base = lowner_mvee(pts, 1e-10);
    double eta = 1e-6;
    auto moved = pts;
    for (auto& v : moved)
        for (int j = 0; j < 2; ++j) v(j) += eta * rng.uniform(-1.0, 1.0);
    auto shifted = lowner_mvee(moved, 1e-10);
    REQUIRE((shifted.shape - base.shape).cwiseAbs().maxCoeff() <= 1e-3);
}

TEST_CASE("ball residual vanishes exactly for multiples of the identity", "[lowner]") {
    Ellipsoid e;
    e.center = Eigen::VectorXd::Zero(3);
    e.shape = 2.0 * Eigen::MatrixXd::Identity(3, 3);
    REQUIRE(ball_residual(e) <= 1e-12);
    e.shape(2, 2) = 2.0 + 1e-13;  // within the spectral-spread tolerance
    REQUIRE(ball_residual(e) <= 1e-12);
    e.shape(2, 2) = 4.0;
    REQUIRE(ball_residual(e) == Catch::Approx(1.0));
    e.shape(2, 2) = -1.0;
    REQUIRE_THROWS_AS(ball_residual(e), std::invalid_argument);
}

TEST_CASE("inscribed ellipsoid of the square is the unit disk", "[john]") {
    Eigen::MatrixXd rows(2, 3);
    rows << 1, 0, 0, 0, 1, 0;
    auto sq = section(cube3(), Frame<double>{rows}, vec3(0, 0, 0));
    auto e = john_inscribed(sq);
    REQUIRE(e.center.norm() <= 1e-8);
    REQUIRE((e.shape - Eigen::MatrixXd::Identity(2, 2)).cwiseAbs().maxCoeff() <=
            1e-7);
}

TEST_CASE("inscribed ellipse of a symmetric hexagon passes the KKT oracle", "[john]") {
    Polytope hex;
    std::vector<double> angles{0.2, 1.1, 2.3};
    for (double th : angles) {
        for (int sign : {-1, 1}) {
            Facet f;
            f.normal = vec2(sign * std::cos(th), sign * std::sin(th));
            f.offset = (th < 1.0) ? 1.0 : 1.4;
            hex.facets.push_back(f);
        }
    }
    hex.vertices = enumerate_vertices(hex.facets, 2);
    REQUIRE(hex.vertices.size() == 6);
    auto e = john_inscribed(hex);
    // Central symmetry pins the center at the origin.
    REQUIRE(e.center.norm() <= 1e-8);
    // Inscribed: every facet satisfied with slack >= -1e-9.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.shape);
    Eigen::MatrixXd b = es.operatorInverseSqrt();
    for (const auto& f : hex.facets)
        REQUIRE(f.normal.dot(e.center) + (b * f.normal).norm() <=
                f.offset + 1e-9);
    REQUIRE(john_kkt_residual(hex, e) <= 1e-8);
}

TEST_CASE("inscribed ellipse of a triangle touches all three sides", "[john]") {
    Polytope tri;
    tri.vertices = {vec2(0, 0), vec2(4, 0), vec2(1, 3)};
    tri.facets = facets_of_hull_2d(convex_hull_2d(tri.vertices));
    REQUIRE(tri.facets.size() == 3);
    auto e = john_inscribed(tri);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.shape);
    Eigen::MatrixXd b = es.operatorInverseSqrt();
    int tangencies = 0;
    for (const auto& f : tri.facets) {
        double slack = f.offset - f.normal.dot(e.center) - (b * f.normal).norm();
        REQUIRE(slack >= -1e-9);
        if (slack <= 1e-7) ++tangencies;
    }
    REQUIRE(tangencies == 3);
    // Steiner inellipse area check: for any triangle the maximal
    // inscribed ellipse has area pi/(3 sqrt 3) times the triangle area.
    double tri_area = 6.0;  // base 4, height 3
    double ell_area = M_PI / std::sqrt(e.shape.determinant());
    REQUIRE(ell_area ==
            Catch::Approx(tri_area * M_PI / (3.0 * std::sqrt(3.0))).epsilon(1e-6));
}

TEST_CASE("round-view search on a symmetric five-dimensional polytope", "[viewsearch]") {
    // Cross-polytope in R^5 stretched by a generic diagonal map; plane
    // views through the circumscribed ellipsoid can be made round.
    Rng rng(141);
    Polytope body;
    std::vector<double> stretch{1.0, 1.3, 0.8, 1.7, 1.1};
    for (int i = 0; i < 5; ++i)
        for (int sign : {-1, 1}) {
            Eigen::VectorXd v = Eigen::VectorXd::Zero(5);
            v(i) = sign * stretch[static_cast<std::size_t>(i)];
            body.vertices.push_back(v);
        }
    auto rep = search_section_subspace({body}, 2, BodyMode::Projection,
                                       std::nullopt, EllipsoidKind::Lowner, 64,
                                       142, 1e-6);
    REQUIRE(rep.found);
    REQUIRE(rep.residual <= 1e-6);
    REQUIRE(rep.frame.is_orthonormal());
    // Certify with a fresh ellipsoid solve at the reported frame.
    auto view = project(body, rep.frame);
    auto e = lowner_mvee(view.vertices, 1e-10);
    REQUIRE(ball_residual(e) <= 1e-5);
}

TEST_CASE("simultaneous round views for two bodies", "[viewsearch]") {
    Rng rng(143);
    std::vector<Polytope> bodies;
    for (int b = 0; b < 2; ++b) {
        Polytope body;
        for (int i = 0; i < 8; ++i)
            for (int sign : {-1, 1}) {
                Eigen::VectorXd v = Eigen::VectorXd::Zero(8);
                v(i) = sign * (1.0 + 0.4 * rng.uniform());
                body.vertices.push_back(v);
            }
        bodies.push_back(std::move(body));
    }
    auto rep = search_section_subspace(bodies, 2, BodyMode::Projection,
                                       std::nullopt, EllipsoidKind::Lowner, 48,
                                       144, 1e-4);
    REQUIRE(rep.residual <= 1e-4);
}

TEST_CASE("section-mode search through the cube center", "[viewsearch]") {
    std::optional<Eigen::VectorXd> x = Eigen::VectorXd::Zero(3);
    auto rep = search_section_subspace({cube3()}, 2, BodyMode::Section, x,
                                       EllipsoidKind::John, 24, 145, 1e-6);
    REQUIRE(rep.found);
    REQUIRE(rep.residual <= 1e-6);
    REQUIRE(rep.body_mode == BodyMode::Section);
    REQUIRE(rep.kind == EllipsoidKind::John);
}

TEST_CASE("search input validation", "[viewsearch]") {
    REQUIRE_THROWS_AS(search_section_subspace({}, 2, BodyMode::Projection,
                                              std::nullopt,
                                              EllipsoidKind::Lowner, 4, 1),
                      std::invalid_argument);
    REQUIRE_THROWS_AS(
        search_section_subspace({cube3()}, 2, BodyMode::Section, std::nullopt,
                                EllipsoidKind::Lowner, 4, 1),
        std::invalid_argument);
}
