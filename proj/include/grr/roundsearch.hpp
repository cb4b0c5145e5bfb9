#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "grr/monomial.hpp"
#include "grr/poly.hpp"
#include "grr/rings.hpp"
#include "grr/rng.hpp"

namespace grr {

// ---------------------------------------------------------------------------
// Frames
// ---------------------------------------------------------------------------

/// Orthonormal k-row matrix representing a k-dimensional subspace of
/// n-space (Hermitian-orthonormal in the complex case).
template <class Scalar = double>
struct Frame {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Matrix rows;

    int k() const { return static_cast<int>(rows.rows()); }
    int n() const { return static_cast<int>(rows.cols()); }

    bool is_orthonormal(double tol = 1e-12) const {
        Matrix g = rows * rows.adjoint();
        return (g - Matrix::Identity(k(), k())).cwiseAbs().maxCoeff() <= tol;
    }
};

/// Re-orthonormalizes the rows (thin QR of the transpose with a
/// diagonal sign/phase fix so the map is continuous near orthonormal
/// inputs).
template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> orthonormalize_rows(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& a) {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const int k = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    Eigen::HouseholderQR<Matrix> qr(a.adjoint());
    Matrix q = qr.householderQ() * Matrix::Identity(n, k);
    Matrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
    for (int j = 0; j < k; ++j) {
        if constexpr (std::is_same_v<Scalar, Complex>) {
            double m = std::abs(r(j, j));
            if (m > 0) q.col(j) *= std::conj(r(j, j)) / m;
        } else {
            if (r(j, j) < 0) q.col(j) = -q.col(j);
        }
    }
    return q.adjoint();
}

// ---------------------------------------------------------------------------
// Restriction and Bombieri-weighted residuals
// ---------------------------------------------------------------------------

/// f|_V(u) = f(A^T u): the polynomial pulled back to frame coordinates.
template <class C, class Scalar>
SparsePoly<C> restrict_poly(const SparsePoly<C>& f, const Frame<Scalar>& a) {
    if (f.nvars() != a.n()) throw std::invalid_argument("frame/polynomial dimension mismatch");
    const int k = a.k();
    const int n = a.n();
    std::vector<std::vector<C>> m(static_cast<std::size_t>(n),
                                  std::vector<C>(static_cast<std::size_t>(k)));
    for (int i = 0; i < n; ++i)
        for (int b = 0; b < k; ++b)
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(b)] = C(a.rows(b, i));
    SparsePoly<C> r = f.compose_linear(m);
    r.cleanup();
    return r;
}

/// Bombieri weight of a monomial: prod a_i! / |a|!.  The associated
/// coefficient norm is invariant under orthogonal (resp. unitary)
/// changes of variables, which makes the residuals functions of the
/// subspace rather than of the particular frame chosen for it.
inline double bombieri_weight(const Monomial& m) {
    double num = 1.0;
    for (unsigned e : m.e)
        for (unsigned i = 2; i <= e; ++i) num *= i;
    double den = 1.0;
    for (unsigned i = 2; i <= m.deg; ++i) den *= i;
    return num / den;
}

template <class C>
double bombieri_norm2(const SparsePoly<C>& f) {
    double s = 0.0;
    for (const auto& [m, c] : f.terms()) s += bombieri_weight(m) * ring_traits<C>::abs2(c);
    return s;
}

template <class C>
double bombieri_norm(const SparsePoly<C>& f) {
    return std::sqrt(bombieri_norm2(f));
}

/// <f, g>_B; conjugate-linear in g over the complex ring.
inline double bombieri_dot(const SparsePoly<double>& f, const SparsePoly<double>& g) {
    double s = 0.0;
    for (const auto& [m, c] : f.terms()) {
        auto it = g.terms().find(m);
        if (it != g.terms().end()) s += bombieri_weight(m) * c * it->second;
    }
    return s;
}

inline Complex bombieri_dot(const SparsePoly<Complex>& f, const SparsePoly<Complex>& g) {
    Complex s(0.0, 0.0);
    for (const auto& [m, c] : f.terms()) {
        auto it = g.terms().find(m);
        if (it != g.terms().end()) s += bombieri_weight(m) * c * std::conj(it->second);
    }
    return s;
}

enum class SearchMode { EvenRound, OddZero };

inline std::string to_string(SearchMode m) {
    return m == SearchMode::EvenRound ? "even-round" : "odd-zero";
}

namespace detail {

/// Relative floor for the even-round denominator; keeps frames that
/// nearly annihilate the restriction from distorting the score.
constexpr double kEvenFloorFactor = 1e-6;

inline double real_part(double x) { return x; }
inline double real_part(const Complex& x) { return x.real(); }
inline double imag_part(double) { return 0.0; }
inline double imag_part(const Complex& x) { return x.imag(); }

}  // namespace detail

/// Distance of the restriction from the target set, invariant under
/// frame rotation and under scaling of f:
///   odd-zero:   ||f|_V||_B / ||f||_B
///   even-round: min_l ||f|_V - l Q^(d/2)||_B / max(||f|_V||_B, 1e-6 ||f||_B)
template <class C, class Scalar>
double restriction_residual(const SparsePoly<C>& f, const Frame<Scalar>& a, SearchMode mode) {
    SparsePoly<C> r = restrict_poly(f, a);
    double fnorm = bombieri_norm(f);
    if (fnorm == 0.0) return 0.0;
    if (mode == SearchMode::OddZero) return bombieri_norm(r) / fnorm;
    if (f.degree() % 2 != 0)
        throw std::invalid_argument("even-round residual needs an even-degree polynomial");
    SparsePoly<C> p = SparsePoly<C>::standard_q(a.k()).pow(f.degree() / 2);
    C lambda = bombieri_dot(r, p) * C(1.0 / bombieri_norm2(p));
    SparsePoly<C> g = r - p.scaled(lambda);
    double denom = std::max(bombieri_norm(r), detail::kEvenFloorFactor * fnorm);
    return bombieri_norm(g) / denom;
}

// ---------------------------------------------------------------------------
// Search machinery
// ---------------------------------------------------------------------------

template <class Scalar = double>
struct SearchReport {
    Frame<Scalar> frame;
    double residual = std::numeric_limits<double>::infinity();
    SearchMode mode = SearchMode::OddZero;
    int restarts_requested = 0;
    int restarts_used = 0;
    std::uint64_t seed = 0;
    double tol = 0.0;
    bool found = false;
    std::vector<double> per_restart;  ///< final residual of each restart run
};

namespace detail {

/// Everything fixed about one polynomial during a search.
template <class C>
struct SearchTarget {
    SparsePoly<C> f;
    std::vector<SparsePoly<C>> partials;
    double fnorm = 0.0;
    SparsePoly<C> p;  // Q^(d/2) in k vars; zero in odd-zero mode
    double pnorm2 = 1.0;

    static SearchTarget make(const SparsePoly<C>& f, int k, SearchMode mode) {
        SearchTarget t;
        t.f = f;
        t.fnorm = bombieri_norm(f);
        for (int j = 0; j < f.nvars(); ++j) t.partials.push_back(f.derivative(j));
        if (mode == SearchMode::EvenRound) {
            if (f.degree() % 2 != 0)
                throw std::invalid_argument("even-round search needs even-degree polynomials");
            t.p = SparsePoly<C>::standard_q(k).pow(f.degree() / 2);
            t.pnorm2 = bombieri_norm2(t.p);
        } else {
            t.p = SparsePoly<C>::zero(k);
        }
        return t;
    }
};

/// <u_b * g, h>_B without materializing u_b * g.
template <class C>
C shifted_bombieri_dot(const SparsePoly<C>& g, int b, const SparsePoly<C>& h) {
    C s = ring_traits<C>::zero();
    for (const auto& [m, c] : g.terms()) {
        Monomial mb = m;
        mb.e[static_cast<std::size_t>(b)] += 1;
        mb.deg += 1;
        auto it = h.terms().find(mb);
        if (it == h.terms().end()) continue;
        if constexpr (std::is_same_v<C, Complex>) {
            s += bombieri_weight(mb) * c * std::conj(it->second);
        } else {
            s += bombieri_weight(mb) * c * it->second;
        }
    }
    return s;
}

template <class Scalar>
struct Objective {
    using Matrix = typename Frame<Scalar>::Matrix;
    double value = 0.0;         ///< sum of squared residuals
    double max_residual = 0.0;  ///< reported success metric
    Matrix gradient;            ///< complex: d/dRe + i d/dIm entrywise
};

/// Objective (sum of squared residuals) with its analytic gradient.
/// Derivative of the restriction: d(f(A^T u))/dA(b,j) = u_b * (d_j f)|_A;
/// the least-squares scalar contributes nothing by its optimality, and
/// the denominator is differentiated unless pinned at the floor.
template <class C, class Scalar>
Objective<Scalar> evaluate_objective(const std::vector<SearchTarget<C>>& targets,
                                     const Frame<Scalar>& a, SearchMode mode,
                                     bool want_gradient) {
    using Matrix = typename Frame<Scalar>::Matrix;
    const int k = a.k();
    const int n = a.n();
    Objective<Scalar> out;
    out.gradient = Matrix::Zero(k, n);

    for (const auto& t : targets) {
        if (t.fnorm == 0.0) continue;
        SparsePoly<C> r = restrict_poly(t.f, a);
        double rnorm2 = bombieri_norm2(r);

        SparsePoly<C> g = r;
        double num2, den2;
        bool den_fixed;
        if (mode == SearchMode::EvenRound) {
            C lambda = bombieri_dot(r, t.p) * C(1.0 / t.pnorm2);
            g = r - t.p.scaled(lambda);
            num2 = bombieri_norm2(g);
            double floor2 = kEvenFloorFactor * kEvenFloorFactor * t.fnorm * t.fnorm;
            den_fixed = rnorm2 < floor2;
            den2 = den_fixed ? floor2 : rnorm2;
        } else {
            num2 = rnorm2;
            den2 = t.fnorm * t.fnorm;
            den_fixed = true;
        }
        double rho2 = num2 / den2;
        out.value += rho2;
        out.max_residual = std::max(out.max_residual, std::sqrt(rho2));

        if (!want_gradient) continue;
        std::vector<SparsePoly<C>> rp;
        rp.reserve(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            rp.push_back(restrict_poly(t.partials[static_cast<std::size_t>(j)], a));
        for (int b = 0; b < k; ++b) {
            for (int j = 0; j < n; ++j) {
                const SparsePoly<C>& rj = rp[static_cast<std::size_t>(j)];
                C dot_g = shifted_bombieri_dot(rj, b, g);
                double dnum_re = 2.0 * real_part(dot_g);
                double dden_re = 0.0;
                C dot_r = ring_traits<C>::zero();
                if (!den_fixed) {
                    dot_r = shifted_bombieri_dot(rj, b, r);
                    dden_re = 2.0 * real_part(dot_r);
                }
                double dre = (dnum_re * den2 - num2 * dden_re) / (den2 * den2);
                if constexpr (std::is_same_v<Scalar, Complex>) {
                    double dnum_im = -2.0 * imag_part(dot_g);
                    double dden_im = den_fixed ? 0.0 : -2.0 * imag_part(dot_r);
                    double dim = (dnum_im * den2 - num2 * dden_im) / (den2 * den2);
                    out.gradient(b, j) += Scalar(dre, dim);
                } else {
                    out.gradient(b, j) += dre;
                }
            }
        }
    }
    return out;
}

template <class Scalar>
double gradient_norm2(const typename Frame<Scalar>::Matrix& g) {
    return g.squaredNorm();
}

/// Gauss-Newton/Levenberg polish: residual vector = Bombieri-weighted
/// coefficients of each polynomial's residual, denominators frozen at
/// the current iterate; Jacobian from the same restricted partials with
/// the Q-component projected out in even mode.
template <class C, class Scalar>
bool gauss_newton_step(const std::vector<SearchTarget<C>>& targets, Frame<Scalar>& a,
                       SearchMode mode, double& obj_value) {
    using Matrix = typename Frame<Scalar>::Matrix;
    constexpr bool complex_scalar = std::is_same_v<Scalar, Complex>;
    const int k = a.k();
    const int n = a.n();
    const int nparam = (complex_scalar ? 2 : 1) * k * n;

    // Collect residual entries and their derivatives.
    std::vector<double> res;
    std::vector<std::vector<double>> jac;  // per entry: nparam derivatives
    for (const auto& t : targets) {
        if (t.fnorm == 0.0) continue;
        SparsePoly<C> r = restrict_poly(t.f, a);
        double rnorm2 = bombieri_norm2(r);
        SparsePoly<C> g = r;
        double den;
        if (mode == SearchMode::EvenRound) {
            C lambda = bombieri_dot(r, t.p) * C(1.0 / t.pnorm2);
            g = r - t.p.scaled(lambda);
            den = std::max(std::sqrt(rnorm2), kEvenFloorFactor * t.fnorm);
        } else {
            den = t.fnorm;
        }
        std::vector<SparsePoly<C>> rp;
        for (int j = 0; j < n; ++j)
            rp.push_back(restrict_poly(t.partials[static_cast<std::size_t>(j)], a));

        // Index the monomials supporting g or any derivative image.
        std::map<Monomial, std::size_t, GradedLexLess> index;
        auto note = [&](const Monomial& m) {
            if (!index.count(m)) index.emplace(m, index.size());
        };
        for (const auto& [m, c] : g.terms()) note(m);
        for (int j = 0; j < n; ++j)
            for (const auto& [m, c] : rp[static_cast<std::size_t>(j)].terms())
                for (int b = 0; b < k; ++b) {
                    Monomial mb = m;
                    mb.e[static_cast<std::size_t>(b)] += 1;
                    mb.deg += 1;
                    note(mb);
                }
        if (mode == SearchMode::EvenRound)
            for (const auto& [m, c] : t.p.terms()) note(m);

        const std::size_t base = res.size();
        const std::size_t rows = index.size() * (complex_scalar ? 2 : 1);
        res.resize(base + rows, 0.0);
        jac.resize(base + rows, std::vector<double>(static_cast<std::size_t>(nparam), 0.0));

        auto put = [&](std::size_t slot, const C& value, double scale) {
            if constexpr (complex_scalar) {
                res[base + 2 * slot] = value.real() * scale;
                res[base + 2 * slot + 1] = value.imag() * scale;
            } else {
                res[base + slot] = real_part(value) * scale;
            }
        };
        for (const auto& [m, slot] : index) {
            auto it = g.terms().find(m);
            if (it == g.terms().end()) continue;
            put(slot, it->second, std::sqrt(bombieri_weight(m)) / den);
        }
        // Derivative of g's coefficients in direction (b, j):
        // u_b * rj minus its Q-projection (even mode).
        for (int b = 0; b < k; ++b) {
            for (int j = 0; j < n; ++j) {
                const SparsePoly<C>& rj = rp[static_cast<std::size_t>(j)];
                SparsePoly<C> dir(static_cast<int>(k));
                {
                    SparsePoly<C> tmp(static_cast<int>(k));
                    for (const auto& [m, c] : rj.terms()) {
                        Monomial mb = m;
                        mb.e[static_cast<std::size_t>(b)] += 1;
                        mb.deg += 1;
                        tmp.add_term(mb, c);
                    }
                    dir = std::move(tmp);
                }
                if (mode == SearchMode::EvenRound) {
                    C proj = bombieri_dot(dir, t.p) * C(1.0 / t.pnorm2);
                    dir -= t.p.scaled(proj);
                }
                const int col_re = b * n + j;
                const int col_im = k * n + b * n + j;
                for (const auto& [m, c] : dir.terms()) {
                    auto it = index.find(m);
                    if (it == index.end()) continue;
                    double w = std::sqrt(bombieri_weight(m)) / den;
                    if constexpr (complex_scalar) {
                        // d/dRe adds c; d/dIm adds i*c.
                        jac[base + 2 * it->second][static_cast<std::size_t>(col_re)] +=
                            c.real() * w;
                        jac[base + 2 * it->second + 1][static_cast<std::size_t>(col_re)] +=
                            c.imag() * w;
                        jac[base + 2 * it->second][static_cast<std::size_t>(col_im)] +=
                            -c.imag() * w;
                        jac[base + 2 * it->second + 1][static_cast<std::size_t>(col_im)] +=
                            c.real() * w;
                    } else {
                        jac[base + it->second][static_cast<std::size_t>(col_re)] +=
                            real_part(c) * w;
                    }
                }
            }
        }
    }

    if (res.empty()) return false;
    const Eigen::Index rows = static_cast<Eigen::Index>(res.size());
    Eigen::VectorXd rv(rows);
    Eigen::MatrixXd jm(rows, nparam);
    for (Eigen::Index i = 0; i < rows; ++i) {
        rv(i) = res[static_cast<std::size_t>(i)];
        for (int p = 0; p < nparam; ++p) jm(i, p) = jac[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)];
    }

    Eigen::MatrixXd jtj = jm.transpose() * jm;
    Eigen::VectorXd jtr = jm.transpose() * rv;
    double mu = 1e-12 * std::max(1.0, jtj.trace() / nparam);
    for (int attempt = 0; attempt < 8; ++attempt) {
        Eigen::MatrixXd damped = jtj + mu * Eigen::MatrixXd::Identity(nparam, nparam);
        Eigen::VectorXd step = damped.ldlt().solve(jtr);
        Matrix cand = a.rows;
        for (int b = 0; b < k; ++b)
            for (int j = 0; j < n; ++j) {
                if constexpr (complex_scalar) {
                    cand(b, j) -= Scalar(step(b * n + j), step(k * n + b * n + j));
                } else {
                    cand(b, j) -= step(b * n + j);
                }
            }
        Frame<Scalar> next{orthonormalize_rows<Scalar>(cand)};
        auto probe = evaluate_objective(targets, next, mode, false);
        if (probe.value < obj_value) {
            a = next;
            obj_value = probe.value;
            return true;
        }
        mu *= 10.0;
    }
    return false;
}

/// One restart: Armijo gradient descent with row re-orthonormalization,
/// then Gauss-Newton polishing.
template <class C, class Scalar>
std::pair<Frame<Scalar>, double> local_search(const std::vector<SearchTarget<C>>& targets,
                                              Frame<Scalar> a, SearchMode mode,
                                              double tol) {
    using Matrix = typename Frame<Scalar>::Matrix;
    a.rows = orthonormalize_rows<Scalar>(a.rows);
    auto cur = evaluate_objective(targets, a, mode, true);
    const double stop2 = 0.25 * tol * tol;

    for (int it = 0; it < 150 && cur.value > stop2; ++it) {
        double g2 = cur.gradient.squaredNorm();
        if (g2 <= 1e-30) break;
        double step = 1.0;
        bool accepted = false;
        while (step > 1e-14) {
            Matrix cand = a.rows - step * cur.gradient;
            Frame<Scalar> next{orthonormalize_rows<Scalar>(cand)};
            auto probe = evaluate_objective(targets, next, mode, true);
            if (probe.value <= cur.value - 1e-4 * step * g2) {
                a = next;
                cur = std::move(probe);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
    }
    double obj = cur.value;
    for (int it = 0; it < 30 && obj > 1e-28; ++it)
        if (!gauss_newton_step(targets, a, mode, obj)) break;

    auto fin = evaluate_objective(targets, a, mode, false);
    return {a, fin.max_residual};
}

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

/// Restart driver shared by the real and complex searches.  Restarts
/// are processed in fixed-size chunks (parallel inside a chunk, results
/// keyed by restart index), so the outcome is a deterministic function
/// of the seed regardless of thread count.
template <class C, class Scalar>
SearchReport<Scalar> run_search(const std::vector<SparsePoly<C>>& fs, int k, SearchMode mode,
                                int restarts, std::uint64_t seed, double tol, int threads) {
    if (fs.empty()) throw std::invalid_argument("search needs at least one polynomial");
    const int n = fs[0].nvars();
    for (const auto& f : fs)
        if (f.nvars() != n) throw std::invalid_argument("polynomials must share one variable count");
    if (n < k) throw std::invalid_argument("subspace dimension exceeds ambient dimension");
    if (restarts < 1) throw std::invalid_argument("need at least one restart");

    std::vector<SearchTarget<C>> targets;
    for (const auto& f : fs) targets.push_back(SearchTarget<C>::make(f, k, mode));

    SearchReport<Scalar> rep;
    rep.mode = mode;
    rep.restarts_requested = restarts;
    rep.seed = seed;
    rep.tol = tol;

    const int chunk = 16;
    const int nthreads = resolve_threads(threads);
    std::vector<Frame<Scalar>> frames(static_cast<std::size_t>(restarts));
    std::vector<double> finals(static_cast<std::size_t>(restarts),
                               std::numeric_limits<double>::infinity());

    for (int lo = 0; lo < restarts && !rep.found; lo += chunk) {
        const int hi = std::min(lo + chunk, restarts);
        auto work = [&](int begin, int stride) {
            for (int i = begin; i < hi; i += stride) {
                Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(i));
                Frame<Scalar> start;
                if constexpr (std::is_same_v<Scalar, Complex>) {
                    start.rows = rng.haar_frame_c(k, n);
                } else {
                    start.rows = rng.haar_frame(k, n);
                }
                auto [frame, residual] = local_search(targets, start, mode, tol);
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

}  // namespace detail

/// Minimizes the worst per-polynomial residual over the Stiefel
/// manifold by seeded random restarts with gradient descent and
/// Gauss-Newton polishing.  Failure to reach tol is reported, never
/// thrown: a large residual says "not found", not "does not exist".
inline SearchReport<double> search(const std::vector<SparsePoly<double>>& fs, int k,
                                   SearchMode mode, int restarts, std::uint64_t seed,
                                   double tol, int threads = 0) {
    return detail::run_search<double, double>(fs, k, mode, restarts, seed, tol, threads);
}

/// Zero-restriction search over unitary frames for complex polynomials.
inline SearchReport<Complex> complex_search(const std::vector<SparsePoly<Complex>>& fs, int k,
                                            int restarts, std::uint64_t seed, double tol,
                                            int threads = 0) {
    return detail::run_search<Complex, Complex>(fs, k, SearchMode::OddZero, restarts, seed, tol,
                                                threads);
}

// ---------------------------------------------------------------------------
// Exact construction for quadratic forms
// ---------------------------------------------------------------------------

struct QuadraticRound {
    Frame<double> frame;
    double lambda = 0.0;
    double residual = 0.0;  ///< max |(A|_V - lambda I)_{ij}|
};

/// Exact k-subspace on which a symmetric matrix restricts to a multiple
/// of the identity, built from the top 2k-1 eigenpairs: the median
/// eigenvalue survives as is, and the i-th largest is mixed with the
/// (2k-i)-th so every Rayleigh quotient equals the median.
inline QuadraticRound exact_round_quadratic(const Eigen::MatrixXd& asym, int k) {
    const int n = static_cast<int>(asym.rows());
    if (asym.cols() != n) throw std::invalid_argument("matrix must be square");
    if ((asym - asym.transpose()).cwiseAbs().maxCoeff() > 1e-10 * (1 + asym.cwiseAbs().maxCoeff()))
        throw std::invalid_argument("matrix must be symmetric");
    if (k < 1) throw std::invalid_argument("k must be positive");
    if (n < 2 * k - 1) throw std::invalid_argument("need dimension at least 2k-1");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(asym);
    // Descending among the top 2k-1.
    auto mu = [&](int i) { return es.eigenvalues()(n - 1 - i); };          // i = 0-based rank
    auto vec = [&](int i) { return es.eigenvectors().col(n - 1 - i); };

    QuadraticRound out;
    out.lambda = mu(k - 1);
    out.frame.rows = Eigen::MatrixXd(k, n);
    out.frame.rows.row(k - 1) = vec(k - 1).transpose();
    for (int i = 0; i < k - 1; ++i) {
        const int lo = 2 * k - 2 - i;  // partner index (0-based rank)
        double hi_v = mu(i), lo_v = mu(lo);
        double c2 = (hi_v - lo_v) > 1e-14 * (1 + std::abs(hi_v))
                        ? (out.lambda - lo_v) / (hi_v - lo_v)
                        : 0.0;
        c2 = std::clamp(c2, 0.0, 1.0);
        out.frame.rows.row(i) =
            (std::sqrt(c2) * vec(i) + std::sqrt(1.0 - c2) * vec(lo)).transpose();
    }
    Eigen::MatrixXd restricted = out.frame.rows * asym * out.frame.rows.transpose();
    out.residual =
        (restricted - out.lambda * Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff();
    return out;
}

}  // namespace grr
