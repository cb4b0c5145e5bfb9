#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "grr/nnls.hpp"
#include "grr/rng.hpp"
#include "grr/roundsearch.hpp"

namespace grr {

// ---------------------------------------------------------------------------
// Polytopes
// ---------------------------------------------------------------------------

struct Facet {
    Eigen::VectorXd normal;
    double offset = 0.0;  ///< halfspace normal . x <= offset
};

/// Convex polytope carried as a vertex list (V-representation), with an
/// optional facet list (H-representation) when one is known.
struct Polytope {
    std::vector<Eigen::VectorXd> vertices;
    std::vector<Facet> facets;
    bool degenerate = false;  ///< set when the body is not full-dimensional

    bool has_facets() const { return !facets.empty(); }
    int dim() const {
        if (!vertices.empty()) return static_cast<int>(vertices[0].size());
        if (!facets.empty()) return static_cast<int>(facets[0].normal.size());
        return 0;
    }
};

/// Dimension of the affine hull of a point set.
inline int affine_rank(const std::vector<Eigen::VectorXd>& pts, double tol = 1e-9) {
    if (pts.size() < 2) return 0;
    const int n = static_cast<int>(pts[0].size());
    Eigen::MatrixXd diff(n, static_cast<Eigen::Index>(pts.size() - 1));
    for (std::size_t i = 1; i < pts.size(); ++i) diff.col(static_cast<Eigen::Index>(i - 1)) = pts[i] - pts[0];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(diff);
    qr.setThreshold(tol);
    return static_cast<int>(qr.rank());
}

namespace detail {

/// p in conv(pts)?  Feasibility of the lifted nonnegative system
/// [pts; 1] w = [p; 1] decided by the nonnegative least-squares
/// residual.
inline bool point_in_hull(const Eigen::VectorXd& p, const std::vector<Eigen::VectorXd>& pts,
                          double tol = 1e-9) {
    if (pts.empty()) return false;
    const int k = static_cast<int>(p.size());
    Eigen::MatrixXd a(k + 1, static_cast<Eigen::Index>(pts.size()));
    for (std::size_t j = 0; j < pts.size(); ++j) {
        a.col(static_cast<Eigen::Index>(j)).head(k) = pts[j];
        a(k, static_cast<Eigen::Index>(j)) = 1.0;
    }
    Eigen::VectorXd b(k + 1);
    b.head(k) = p;
    b(k) = 1.0;
    auto r = nnls(a, b);
    return r.residual <= tol * std::max(1.0, b.norm());
}

inline bool near_duplicate(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
    return (a - b).lpNorm<Eigen::Infinity>() <= tol * (1.0 + a.lpNorm<Eigen::Infinity>());
}

}  // namespace detail

/// Deduplicates and removes every point lying in the hull of the
/// others, leaving the extreme points.
inline std::vector<Eigen::VectorXd> prune_to_extreme(const std::vector<Eigen::VectorXd>& pts,
                                                     double tol = 1e-9) {
    std::vector<Eigen::VectorXd> uniq;
    for (const auto& p : pts) {
        bool dup = false;
        for (const auto& q : uniq)
            if (detail::near_duplicate(p, q, 1e-9)) {
                dup = true;
                break;
            }
        if (!dup) uniq.push_back(p);
    }
    if (uniq.size() <= 1) return uniq;
    std::vector<Eigen::VectorXd> out;
    for (std::size_t i = 0; i < uniq.size(); ++i) {
        std::vector<Eigen::VectorXd> others;
        for (std::size_t j = 0; j < uniq.size(); ++j)
            if (j != i) others.push_back(uniq[j]);
        if (!detail::point_in_hull(uniq[i], others, tol)) out.push_back(uniq[i]);
    }
    return out;
}

/// Counterclockwise convex hull of planar points (monotone chain);
/// collinear interior points dropped.
inline std::vector<Eigen::VectorXd> convex_hull_2d(std::vector<Eigen::VectorXd> pts) {
    for (const auto& p : pts)
        if (p.size() != 2) throw std::invalid_argument("convex_hull_2d needs planar points");
    std::sort(pts.begin(), pts.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
                              return detail::near_duplicate(a, b, 1e-12);
                          }),
              pts.end());
    if (pts.size() <= 2) return pts;
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, p.lpNorm<Eigen::Infinity>());
    const double eps = 1e-12 * std::max(1.0, scale * scale);
    auto cross = [](const Eigen::VectorXd& o, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
    };
    std::vector<Eigen::VectorXd> hull(2 * pts.size());
    std::size_t h = 0;
    for (const auto& p : pts) {  // lower chain
        while (h >= 2 && cross(hull[h - 2], hull[h - 1], p) <= eps) --h;
        hull[h++] = p;
    }
    for (std::size_t i = pts.size() - 1, lower = h + 1; i-- > 0;) {  // upper chain
        while (h >= lower && cross(hull[h - 2], hull[h - 1], pts[i]) <= eps) --h;
        hull[h++] = pts[i];
    }
    hull.resize(h - 1);
    return hull;
}

/// Edge halfspaces of a counterclockwise-ordered planar hull.
inline std::vector<Facet> facets_of_hull_2d(const std::vector<Eigen::VectorXd>& hull) {
    std::vector<Facet> out;
    const std::size_t n = hull.size();
    if (n < 3) return out;
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::VectorXd& p = hull[i];
        const Eigen::VectorXd& q = hull[(i + 1) % n];
        Eigen::Vector2d d(q(0) - p(0), q(1) - p(1));
        double len = d.norm();
        if (len == 0.0) continue;
        Facet f;
        f.normal = Eigen::Vector2d(d(1), -d(0)) / len;  // outward for ccw order
        f.offset = f.normal.dot(p);
        out.push_back(std::move(f));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Projection and section
// ---------------------------------------------------------------------------

/// Orthogonal projection onto the row span of the frame, in frame
/// coordinates.  Extreme-point pruning for k <= 3; planar results also
/// carry the edge halfspaces.
inline Polytope project(const Polytope& p, const Frame<double>& a) {
    if (p.vertices.empty()) throw std::invalid_argument("projection needs vertices");
    if (p.dim() != a.n()) throw std::invalid_argument("frame/polytope dimension mismatch");
    const int k = a.k();
    Polytope out;
    for (const auto& v : p.vertices) out.vertices.push_back(a.rows * v);
    if (affine_rank(out.vertices) < k) {
        out.degenerate = true;
        return out;
    }
    if (k <= 3) out.vertices = prune_to_extreme(out.vertices);
    if (k == 2) {
        out.vertices = convex_hull_2d(out.vertices);
        out.facets = facets_of_hull_2d(out.vertices);
    }
    return out;
}

/// Vertices of a small-dimensional H-polytope: feasible intersection
/// points of k facet hyperplanes (k <= 3).
inline std::vector<Eigen::VectorXd> enumerate_vertices(const std::vector<Facet>& facets, int k,
                                                       double tol = 1e-9) {
    if (k < 1 || k > 3) throw std::invalid_argument("vertex enumeration supports dimensions 1..3");
    const int m = static_cast<int>(facets.size());
    std::vector<Eigen::VectorXd> out;
    auto feasible = [&](const Eigen::VectorXd& u) {
        for (const auto& f : facets) {
            double scale = std::max({1.0, std::abs(f.offset), f.normal.norm() * u.norm()});
            if (f.normal.dot(u) > f.offset + tol * scale) return false;
        }
        return true;
    };
    auto push_unique = [&](const Eigen::VectorXd& u) {
        for (const auto& v : out)
            if (detail::near_duplicate(u, v, 1e-8)) return;
        out.push_back(u);
    };
    std::vector<int> idx(static_cast<std::size_t>(k));
    auto try_tuple = [&](const std::vector<int>& sel) {
        Eigen::MatrixXd A(k, k);
        Eigen::VectorXd b(k);
        double nscale = 1.0;
        for (int r = 0; r < k; ++r) {
            A.row(r) = facets[static_cast<std::size_t>(sel[static_cast<std::size_t>(r)])].normal;
            b(r) = facets[static_cast<std::size_t>(sel[static_cast<std::size_t>(r)])].offset;
            nscale *= std::max(1e-300, A.row(r).norm());
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
        lu.setThreshold(1e-10);
        if (lu.rank() < k) return;
        if (std::abs(lu.determinant()) < 1e-10 * nscale) return;
        Eigen::VectorXd u = lu.solve(b);
        if (feasible(u)) push_unique(u);
    };
    if (k == 1) {
        for (int i = 0; i < m; ++i) try_tuple({i});
    } else if (k == 2) {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) try_tuple({i, j});
    } else {
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j)
                for (int l = j + 1; l < m; ++l) try_tuple({i, j, l});
    }
    return out;
}

/// Slice by the affine subspace x + row-span(A): halfspaces pull back
/// to (A n) . u <= offset - n . x.  The base point must be strictly
/// interior.  Vertices are enumerated for k <= 3.
inline Polytope section(const Polytope& p, const Frame<double>& a, const Eigen::VectorXd& x) {
    if (!p.has_facets()) throw std::invalid_argument("section needs a facet representation");
    if (p.dim() != a.n()) throw std::invalid_argument("frame/polytope dimension mismatch");
    if (x.size() != a.n()) throw std::invalid_argument("base point dimension mismatch");
    const int k = a.k();
    Polytope out;
    for (const auto& f : p.facets) {
        double slack = f.offset - f.normal.dot(x);
        double scale = std::max({1.0, std::abs(f.offset), f.normal.norm() * x.norm()});
        if (slack <= 1e-12 * scale) throw std::invalid_argument("base point is not interior");
        Facet g;
        g.normal = a.rows * f.normal;
        g.offset = slack;
        if (g.normal.norm() <= 1e-12 * f.normal.norm()) continue;  // plane parallel to the slice
        out.facets.push_back(std::move(g));
    }
    if (k <= 3) {
        out.vertices = enumerate_vertices(out.facets, k);
        if (k == 2 && out.vertices.size() >= 3) out.vertices = convex_hull_2d(out.vertices);
        if (affine_rank(out.vertices) < k) out.degenerate = true;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Ellipsoids
// ---------------------------------------------------------------------------

/// { y : (y - center)^T shape (y - center) <= 1 } with shape symmetric
/// positive-definite.
struct Ellipsoid {
    Eigen::VectorXd center;
    Eigen::MatrixXd shape;
};

/// Eigenvalue spread of the shape: lambda_max / lambda_min - 1; zero
/// exactly for balls.
inline double ball_residual(const Ellipsoid& e) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(e.shape);
    double lo = es.eigenvalues().minCoeff();
    double hi = es.eigenvalues().maxCoeff();
    if (lo <= 0.0) throw std::invalid_argument("ellipsoid shape is not positive-definite");
    return hi / lo - 1.0;
}

/// Minimum-volume enclosing ellipsoid by barycentric-coordinate ascent
/// on the lifted points, with away steps for linear convergence.  The
/// returned ellipsoid is rescaled so every input point satisfies the
/// containment inequality outright; the eps certificate bounds the
/// volume gap.
inline Ellipsoid lowner_mvee(const std::vector<Eigen::VectorXd>& pts, double eps = 1e-7) {
    const int m = static_cast<int>(pts.size());
    if (m == 0) throw std::invalid_argument("empty point set");
    const int n = static_cast<int>(pts[0].size());
    for (const auto& p : pts)
        if (p.size() != n) throw std::invalid_argument("points must share one dimension");
    if (affine_rank(pts) < n) throw std::invalid_argument("degenerate affine hull");

    const int dd = n + 1;
    Eigen::MatrixXd q(dd, m);
    for (int j = 0; j < m; ++j) {
        q.col(j).head(n) = pts[static_cast<std::size_t>(j)];
        q(n, j) = 1.0;
    }
    Eigen::VectorXd u = Eigen::VectorXd::Constant(m, 1.0 / m);

    const int max_iter = 200000;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::MatrixXd mm = q * u.asDiagonal() * q.transpose();
        Eigen::LDLT<Eigen::MatrixXd> ldlt(mm);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
            throw std::runtime_error("enclosing ellipsoid: singular moment matrix");
        Eigen::MatrixXd sol = ldlt.solve(q);
        Eigen::VectorXd w = (q.array() * sol.array()).colwise().sum();

        int iplus = 0;
        double wplus = -std::numeric_limits<double>::infinity();
        int iminus = -1;
        double wminus = std::numeric_limits<double>::infinity();
        for (int j = 0; j < m; ++j) {
            if (w(j) > wplus) {
                wplus = w(j);
                iplus = j;
            }
            if (u(j) > 0.0 && w(j) < wminus) {
                wminus = w(j);
                iminus = j;
            }
        }
        double eplus = wplus / dd - 1.0;
        double eminus = 1.0 - wminus / dd;
        if (std::max(eplus, eminus) <= eps) break;

        if (eplus >= eminus) {
            double beta = (wplus - dd) / (dd * (wplus - 1.0));
            u *= (1.0 - beta);
            u(iplus) += beta;
        } else {
            double denom = dd * (wminus - 1.0);
            double beta = denom > 0.0 ? (wminus - dd) / denom
                                      : -u(iminus) / (1.0 - u(iminus));
            double cap = -u(iminus) / (1.0 - u(iminus));
            bool drop = beta <= cap;
            if (drop) beta = cap;
            u *= (1.0 - beta);
            u(iminus) += beta;
            if (drop) u(iminus) = 0.0;
        }
    }

    Ellipsoid e;
    e.center = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < m; ++j) e.center += u(j) * pts[static_cast<std::size_t>(j)];
    Eigen::MatrixXd second = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < m; ++j)
        second += u(j) * pts[static_cast<std::size_t>(j)] * pts[static_cast<std::size_t>(j)].transpose();
    Eigen::MatrixXd cov = second - e.center * e.center.transpose();
    Eigen::LDLT<Eigen::MatrixXd> cldlt(cov);
    if (cldlt.info() != Eigen::Success || !cldlt.isPositive())
        throw std::runtime_error("enclosing ellipsoid: degenerate support covariance");
    e.shape = cldlt.solve(Eigen::MatrixXd::Identity(n, n)) / n;
    e.shape = 0.5 * (e.shape + e.shape.transpose()).eval();

    double worst = 0.0;
    for (const auto& p : pts) {
        Eigen::VectorXd d = p - e.center;
        worst = std::max(worst, d.dot(e.shape * d));
    }
    if (worst > 1.0) e.shape /= worst;  // hard containment certificate
    return e;
}

namespace detail {

/// Interior-point state for the inscribed-ellipsoid solver: the
/// ellipsoid is { c + B y : |y| <= 1 } with B symmetric
/// positive-definite; parameters are c followed by the upper triangle
/// of B.
struct JohnParams {
    int k = 0;
    Eigen::VectorXd theta;

    static JohnParams pack(const Eigen::VectorXd& c, const Eigen::MatrixXd& b) {
        JohnParams p;
        p.k = static_cast<int>(c.size());
        p.theta.resize(p.k + p.k * (p.k + 1) / 2);
        p.theta.head(p.k) = c;
        int t = p.k;
        for (int i = 0; i < p.k; ++i)
            for (int j = i; j < p.k; ++j) p.theta(t++) = b(i, j);
        return p;
    }
    Eigen::VectorXd center() const { return theta.head(k); }
    Eigen::MatrixXd bmat() const {
        Eigen::MatrixXd b(k, k);
        int t = k;
        for (int i = 0; i < k; ++i)
            for (int j = i; j < k; ++j) {
                b(i, j) = theta(t);
                b(j, i) = theta(t);
                ++t;
            }
        return b;
    }
};

struct JohnBarrier {
    double value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd gradient;
    bool feasible = false;
};

/// Symmetric basis matrix for the parameter at packed index t >= k.
inline Eigen::MatrixXd john_basis(int k, int t) {
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(k, k);
    int idx = k;
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) {
            if (idx == t) {
                e(i, j) = 1.0;
                e(j, i) = 1.0;
                return e;
            }
            ++idx;
        }
    throw std::logic_error("bad parameter index");
}

/// f_t = -t log det B - sum log(offset_i - a_i.c - |B a_i|); value,
/// gradient, and (optionally) the Hessian are analytic — slacks shrink
/// like 1/t on the central path, so differenced curvature would drown
/// in third-derivative noise.  Infeasible points report value = +inf.
inline JohnBarrier john_barrier(const std::vector<Facet>& facets, const JohnParams& p, double t,
                                Eigen::MatrixXd* hess = nullptr) {
    JohnBarrier out;
    const int k = p.k;
    const int nparam = static_cast<int>(p.theta.size());
    Eigen::VectorXd c = p.center();
    Eigen::MatrixXd b = p.bmat();
    Eigen::LLT<Eigen::MatrixXd> llt(b);
    if (llt.info() != Eigen::Success) return out;
    double logdet = 0.0;
    for (int i = 0; i < k; ++i) logdet += std::log(llt.matrixL()(i, i));
    logdet *= 2.0;
    Eigen::MatrixXd binv = llt.solve(Eigen::MatrixXd::Identity(k, k));

    double val = -t * logdet;
    Eigen::VectorXd gc = Eigen::VectorXd::Zero(k);
    Eigen::MatrixXd gb = -t * binv;
    if (hess) hess->setZero(nparam, nparam);

    for (const auto& f : facets) {
        const Eigen::VectorXd& a = f.normal;
        Eigen::VectorXd v = b * a;
        double r = v.norm();
        double s = f.offset - a.dot(c) - r;
        if (s <= 0.0 || r <= 0.0) return out;
        val -= std::log(s);
        gc += a / s;
        Eigen::MatrixXd g = v * a.transpose() / r;
        gb += 0.5 * (g + g.transpose()) / s;
        if (hess) {
            // ds in each parameter direction; d2s only couples B-pairs.
            Eigen::VectorXd ds(nparam);
            ds.head(k) = -a;
            std::vector<Eigen::VectorXd> ea(static_cast<std::size_t>(nparam - k));
            for (int u = k; u < nparam; ++u) {
                ea[static_cast<std::size_t>(u - k)] = john_basis(k, u) * a;
                ds(u) = -v.dot(ea[static_cast<std::size_t>(u - k)]) / r;
            }
            *hess += (ds * ds.transpose()) / (s * s);
            for (int u = k; u < nparam; ++u)
                for (int w = k; w < nparam; ++w) {
                    const Eigen::VectorXd& eu = ea[static_cast<std::size_t>(u - k)];
                    const Eigen::VectorXd& ew = ea[static_cast<std::size_t>(w - k)];
                    double d2r = (eu.dot(ew) - (v.dot(eu)) * (v.dot(ew)) / (r * r)) / r;
                    (*hess)(u, w) += d2r / s;  // -(1/s) d2s with d2s = -d2r
                }
        }
    }
    if (hess) {
        for (int u = k; u < nparam; ++u)
            for (int w = k; w < nparam; ++w) {
                Eigen::MatrixXd eu = john_basis(k, u);
                Eigen::MatrixXd ew = john_basis(k, w);
                (*hess)(u, w) += t * (binv * eu * binv * ew).trace();
            }
    }
    out.value = val;
    out.feasible = true;
    out.gradient.resize(nparam);
    out.gradient.head(k) = gc;
    int idx = k;
    for (int i = 0; i < k; ++i)
        for (int j = i; j < k; ++j) out.gradient(idx++) = (i == j ? 1.0 : 2.0) * gb(i, j);
    return out;
}

}  // namespace detail

/// Maximum-volume inscribed ellipsoid of a bounded full-dimensional
/// H-polytope in dimension <= 3 (path-following log-det maximization).
inline Ellipsoid john_inscribed(const Polytope& poly, double tol = 1e-9, int max_iters = 200) {
    const int k = poly.dim();
    if (k < 1 || k > 3) throw std::invalid_argument("inscribed ellipsoid supports dimensions 1..3");
    if (!poly.has_facets()) throw std::invalid_argument("inscribed ellipsoid needs facets");

    std::vector<Facet> facets;
    for (const auto& f : poly.facets) {
        double nn = f.normal.norm();
        if (nn <= 0.0) continue;
        facets.push_back({f.normal / nn, f.offset / nn});
    }
    if (facets.empty()) throw std::invalid_argument("inscribed ellipsoid needs facets");

    std::vector<Eigen::VectorXd> verts =
        poly.vertices.empty() ? enumerate_vertices(facets, k) : poly.vertices;
    if (static_cast<int>(verts.size()) < k + 1 || affine_rank(verts) < k)
        throw std::invalid_argument("polytope is lower-dimensional, empty, or unbounded");

    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(k);
    for (const auto& v : verts) c0 += v;
    c0 /= static_cast<double>(verts.size());
    double smin = std::numeric_limits<double>::infinity();
    double bscale = 1.0;
    for (const auto& f : facets) {
        smin = std::min(smin, f.offset - f.normal.dot(c0));
        bscale = std::max(bscale, std::abs(f.offset));
    }
    if (smin <= 0.0) throw std::invalid_argument("polytope has empty interior");

    detail::JohnParams p =
        detail::JohnParams::pack(c0, 0.5 * smin * Eigen::MatrixXd::Identity(k, k));
    const int nparam = static_cast<int>(p.theta.size());
    const double mfac = static_cast<double>(facets.size());

    int steps = 0;
    for (double t = 1.0; mfac / t > 0.1 * tol && steps < max_iters; t *= 8.0) {
        for (int inner = 0; inner < 12 && steps < max_iters; ++inner, ++steps) {
            Eigen::MatrixXd hess;
            auto cur = detail::john_barrier(facets, p, t, &hess);
            if (!cur.feasible) throw std::runtime_error("inscribed ellipsoid lost feasibility");
            if (p.bmat().norm() > 1e9 * bscale)
                throw std::invalid_argument("polytope is unbounded");
            double mu = 0.0;
            Eigen::VectorXd dir;
            for (int attempt = 0; attempt < 12; ++attempt) {
                Eigen::LDLT<Eigen::MatrixXd> hd(
                    hess + mu * Eigen::MatrixXd::Identity(nparam, nparam));
                dir = hd.solve(-cur.gradient);
                if (hd.info() == Eigen::Success && cur.gradient.dot(dir) < 0.0) break;
                mu = std::max(mu * 100.0, 1e-8 * std::max(1.0, hess.trace() / nparam));
            }
            double decrement2 = -cur.gradient.dot(dir);
            if (decrement2 <= 1e-14) break;  // converged for this stage
            double step = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 50; ++ls) {
                detail::JohnParams cand = p;
                cand.theta += step * dir;
                auto probe = detail::john_barrier(facets, cand, t);
                if (probe.feasible &&
                    probe.value <= cur.value + 1e-4 * step * cur.gradient.dot(dir)) {
                    p = cand;
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved) break;
        }
    }

    Ellipsoid e;
    e.center = p.center();
    Eigen::MatrixXd b = p.bmat();
    Eigen::MatrixXd b2 = b * b;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(b2);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
        throw std::runtime_error("inscribed ellipsoid: indefinite result");
    e.shape = ldlt.solve(Eigen::MatrixXd::Identity(k, k));
    e.shape = 0.5 * (e.shape + e.shape.transpose()).eval();
    return e;
}

// ---------------------------------------------------------------------------
// Subspace search for round projections/sections
// ---------------------------------------------------------------------------

enum class BodyMode { Projection, Section };
enum class EllipsoidKind { Lowner, John };

inline std::string to_string(BodyMode m) {
    return m == BodyMode::Projection ? "projection" : "section";
}
inline std::string to_string(EllipsoidKind k) {
    return k == EllipsoidKind::Lowner ? "lowner" : "john";
}

struct SectionSearchReport {
    Frame<double> frame;
    double residual = std::numeric_limits<double>::infinity();
    BodyMode body_mode = BodyMode::Projection;
    EllipsoidKind kind = EllipsoidKind::Lowner;
    int restarts_requested = 0;
    int restarts_used = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    bool found = false;
    std::vector<double> per_restart;
};

namespace detail {

/// Ellipsoid of one body viewed through a frame; throws on degenerate
/// views (callers convert that to an infinite score).
inline Ellipsoid view_ellipsoid(const Polytope& body, const Frame<double>& a, BodyMode mode,
                                const std::optional<Eigen::VectorXd>& x, EllipsoidKind kind) {
    Polytope q = mode == BodyMode::Projection ? project(body, a) : section(body, a, *x);
    if (q.degenerate) throw std::runtime_error("degenerate view");
    if (kind == EllipsoidKind::Lowner) return lowner_mvee(q.vertices, 1e-10);
    return john_inscribed(q);
}

/// Smooth roundness surrogate: k tr(S^2)/tr(S)^2 - 1, zero iff the
/// shape S is a multiple of the identity.
inline double roundness_surrogate(const Eigen::MatrixXd& s) {
    double tr = s.trace();
    double tr2 = (s * s).trace();
    return s.rows() * tr2 / (tr * tr) - 1.0;
}

struct SectionObjective {
    double surrogate = std::numeric_limits<double>::infinity();
    double residual = std::numeric_limits<double>::infinity();
};

inline SectionObjective section_objective(const std::vector<Polytope>& bodies,
                                          const Frame<double>& a, BodyMode mode,
                                          const std::optional<Eigen::VectorXd>& x,
                                          EllipsoidKind kind) {
    SectionObjective out;
    out.surrogate = 0.0;
    out.residual = 0.0;
    try {
        for (const auto& body : bodies) {
            Ellipsoid e = view_ellipsoid(body, a, mode, x, kind);
            out.surrogate += roundness_surrogate(e.shape);
            out.residual = std::max(out.residual, ball_residual(e));
        }
    } catch (const std::exception&) {
        out.surrogate = std::numeric_limits<double>::infinity();
        out.residual = std::numeric_limits<double>::infinity();
    }
    return out;
}

/// Normalized shape deviations stacked over bodies; the Gauss-Newton
/// residual vector for the polish phase.
inline bool section_residual_vector(const std::vector<Polytope>& bodies, const Frame<double>& a,
                                    BodyMode mode, const std::optional<Eigen::VectorXd>& x,
                                    EllipsoidKind kind, Eigen::VectorXd& out) {
    const int k = a.k();
    const int per = k * (k + 1) / 2;
    out.resize(static_cast<Eigen::Index>(bodies.size()) * per);
    try {
        int at = 0;
        for (const auto& body : bodies) {
            Eigen::MatrixXd s = view_ellipsoid(body, a, mode, x, kind).shape;
            s /= s.trace();
            for (int i = 0; i < k; ++i)
                for (int j = i; j < k; ++j)
                    out(at++) = (i == j ? 1.0 : std::numbers::sqrt2) * (s(i, j) - (i == j ? 1.0 / k : 0.0));
        }
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

inline std::pair<Frame<double>, double> section_local_search(
    const std::vector<Polytope>& bodies, Frame<double> a, BodyMode mode,
    const std::optional<Eigen::VectorXd>& x, EllipsoidKind kind, double tol) {
    const int k = a.k();
    const int n = a.n();
    const double fd = 1e-5;
    a.rows = orthonormalize_rows<double>(a.rows);
    auto cur = section_objective(bodies, a, mode, x, kind);
    if (!std::isfinite(cur.surrogate)) return {a, cur.residual};

    // Armijo descent on the smooth surrogate with finite-difference
    // gradients (the ellipsoid map is only piecewise smooth).
    for (int it = 0; it < 60 && cur.residual > tol; ++it) {
        Eigen::MatrixXd grad(k, n);
        for (int b = 0; b < k; ++b)
            for (int j = 0; j < n; ++j) {
                Frame<double> ap = a, am = a;
                ap.rows(b, j) += fd;
                am.rows(b, j) -= fd;
                ap.rows = orthonormalize_rows<double>(ap.rows);
                am.rows = orthonormalize_rows<double>(am.rows);
                double vp = section_objective(bodies, ap, mode, x, kind).surrogate;
                double vm = section_objective(bodies, am, mode, x, kind).surrogate;
                if (!std::isfinite(vp) || !std::isfinite(vm)) {
                    grad(b, j) = 0.0;
                    continue;
                }
                grad(b, j) = (vp - vm) / (2.0 * fd);
            }
        double g2 = grad.squaredNorm();
        if (g2 <= 1e-24) break;
        double step = 1.0;
        bool ok = false;
        while (step > 1e-12) {
            Frame<double> cand{orthonormalize_rows<double>(Eigen::MatrixXd(a.rows - step * grad))};
            auto probe = section_objective(bodies, cand, mode, x, kind);
            if (probe.surrogate <= cur.surrogate - 1e-4 * step * g2) {
                a = cand;
                cur = probe;
                ok = true;
                break;
            }
            step *= 0.5;
        }
        if (!ok) break;
    }

    // Gauss-Newton polish on the stacked shape deviations.
    Eigen::VectorXd r;
    if (section_residual_vector(bodies, a, mode, x, kind, r)) {
        for (int it = 0; it < 20 && cur.residual > 1e-14; ++it) {
            Eigen::MatrixXd jac(r.size(), k * n);
            bool jac_ok = true;
            for (int b = 0; b < k && jac_ok; ++b)
                for (int j = 0; j < n && jac_ok; ++j) {
                    Frame<double> ap = a, am = a;
                    ap.rows(b, j) += fd;
                    am.rows(b, j) -= fd;
                    ap.rows = orthonormalize_rows<double>(ap.rows);
                    am.rows = orthonormalize_rows<double>(am.rows);
                    Eigen::VectorXd rp, rm;
                    if (!section_residual_vector(bodies, ap, mode, x, kind, rp) ||
                        !section_residual_vector(bodies, am, mode, x, kind, rm)) {
                        jac_ok = false;
                        break;
                    }
                    jac.col(b * n + j) = (rp - rm) / (2.0 * fd);
                }
            if (!jac_ok) break;
            Eigen::MatrixXd jtj = jac.transpose() * jac;
            Eigen::VectorXd jtr = jac.transpose() * r;
            double mu = 1e-10 * std::max(1.0, jtj.trace() / (k * n));
            bool moved = false;
            for (int attempt = 0; attempt < 6; ++attempt) {
                Eigen::VectorXd step =
                    (jtj + mu * Eigen::MatrixXd::Identity(k * n, k * n)).ldlt().solve(jtr);
                Eigen::MatrixXd cm = a.rows;
                for (int b = 0; b < k; ++b)
                    for (int j = 0; j < n; ++j) cm(b, j) -= step(b * n + j);
                Frame<double> cand{orthonormalize_rows<double>(cm)};
                Eigen::VectorXd rc;
                if (section_residual_vector(bodies, cand, mode, x, kind, rc) &&
                    rc.squaredNorm() < r.squaredNorm()) {
                    a = cand;
                    r = rc;
                    moved = true;
                    break;
                }
                mu *= 10.0;
            }
            if (!moved) break;
        }
        cur = section_objective(bodies, a, mode, x, kind);
    }
    return {a, cur.residual};
}

}  // namespace detail

/// Seeded multi-restart search for a frame whose projected or
/// sectioned bodies all have a near-ball ellipsoid.  Deterministic for
/// a fixed seed independently of the thread count.
inline SectionSearchReport search_section_subspace(
    const std::vector<Polytope>& bodies, int k, BodyMode mode,
    const std::optional<Eigen::VectorXd>& x, EllipsoidKind kind, int restarts,
    std::uint64_t seed, double tol = 1e-6, int threads = 0) {
    if (bodies.empty()) throw std::invalid_argument("search needs at least one body");
    const int n = bodies[0].dim();
    for (const auto& body : bodies)
        if (body.dim() != n) throw std::invalid_argument("bodies must share one dimension");
    if (k < 1 || k > n) throw std::invalid_argument("subspace dimension out of range");
    if (kind == EllipsoidKind::John && k > 3)
        throw std::invalid_argument("inscribed-ellipsoid mode supports k <= 3");
    if (mode == BodyMode::Section) {
        if (!x) throw std::invalid_argument("section mode needs a base point");
        for (const auto& body : bodies)
            if (!body.has_facets())
                throw std::invalid_argument("section mode needs facet representations");
    }
    if (restarts < 1) throw std::invalid_argument("need at least one restart");

    SectionSearchReport rep;
    rep.body_mode = mode;
    rep.kind = kind;
    rep.restarts_requested = restarts;
    rep.seed = seed;
    rep.tol = tol;

    const int chunk = 16;
    const int nthreads = detail::resolve_threads(threads);
    std::vector<Frame<double>> frames(static_cast<std::size_t>(restarts));
    std::vector<double> finals(static_cast<std::size_t>(restarts),
                               std::numeric_limits<double>::infinity());

    for (int lo = 0; lo < restarts && !rep.found; lo += chunk) {
        const int hi = std::min(lo + chunk, restarts);
        auto work = [&](int begin, int stride) {
            for (int i = begin; i < hi; i += stride) {
                Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
                Frame<double> start{rng.haar_frame(k, n)};
                auto [frame, residual] =
                    detail::section_local_search(bodies, start, mode, x, kind, tol);
                frames[static_cast<std::size_t>(i)] = std::move(frame);
                finals[static_cast<std::size_t>(i)] = residual;
            }
        };
        const int used = std::min(nthreads, hi - lo);
        if (used <= 1) {
            work(lo, 1);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < used; ++t) pool.emplace_back(work, lo + t, used);
            for (auto& th : pool) th.join();
        }
        for (int i = lo; i < hi; ++i) {
            rep.per_restart.push_back(finals[static_cast<std::size_t>(i)]);
            if (finals[static_cast<std::size_t>(i)] < rep.residual) {
                rep.residual = finals[static_cast<std::size_t>(i)];
                rep.frame = frames[static_cast<std::size_t>(i)];
            }
        }
        rep.restarts_used = hi;
        if (rep.residual <= tol) rep.found = true;
    }
    return rep;
}

}  // namespace grr
