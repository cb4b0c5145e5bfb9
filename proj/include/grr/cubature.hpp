#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grr/caratheodory.hpp"
#include "grr/nnls.hpp"
#include "grr/poly.hpp"
#include "grr/rings.hpp"
#include "grr/rng.hpp"
#include "grr/sylow.hpp"

namespace grr {

// ---------------------------------------------------------------------------
// Similarity transforms
// ---------------------------------------------------------------------------

/// Rotation composed with a nonnegative homothety; scale zero encodes
/// the zero map (with identity rotation by convention).
struct SimilarityTransform {
    Eigen::MatrixXd rotation;
    double scale = 0.0;

    static SimilarityTransform zero(int k) {
        return {Eigen::MatrixXd::Identity(k, k), 0.0};
    }
    static SimilarityTransform identity(int k) {
        return {Eigen::MatrixXd::Identity(k, k), 1.0};
    }

    int k() const { return static_cast<int>(rotation.rows()); }

    bool is_valid(double tol = 1e-12) const {
        if (scale < 0.0) return false;
        if (rotation.rows() != rotation.cols()) return false;
        Eigen::MatrixXd g = rotation.transpose() * rotation;
        double ortho = (g - Eigen::MatrixXd::Identity(k(), k())).cwiseAbs().maxCoeff();
        return ortho <= tol && std::abs(rotation.determinant() - 1.0) <= 16 * tol;
    }
};

/// f(sigma x): substitutes the scaled rotation into the polynomial.
inline SparsePoly<double> apply_transform(const SparsePoly<double>& f,
                                          const SimilarityTransform& sigma) {
    int k = sigma.k();
    if (f.nvars() != k) throw std::invalid_argument("transform dimension mismatch");
    if (sigma.scale == 0.0) {
        // x -> 0 kills every positive-degree term; the constant survives.
        SparsePoly<double> r(k);
        auto it = f.terms().find(Monomial(static_cast<std::size_t>(k)));
        if (it != f.terms().end()) r.add_term(it->first, it->second);
        return r;
    }
    std::vector<std::vector<double>> m(static_cast<std::size_t>(k),
                                       std::vector<double>(static_cast<std::size_t>(k)));
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                sigma.scale * sigma.rotation(i, j);
    return f.compose_linear(m);
}

inline SparsePoly<double> transform_sum(const SparsePoly<double>& f,
                                        const std::vector<SimilarityTransform>& sigmas) {
    SparsePoly<double> s = SparsePoly<double>::zero(f.nvars());
    for (const auto& t : sigmas) s += apply_transform(f, t);
    s.cleanup();
    return s;
}

// ---------------------------------------------------------------------------
// Exact sphere moments and rotation averages
// ---------------------------------------------------------------------------

/// Exact moment of the monomial x^a over the unit sphere in k-space
/// (normalized measure): zero when any exponent is odd, otherwise
/// prod (2b_i - 1)!! / prod_{j<|b|} (k + 2j) with a = 2b.
inline Rational sphere_moment(const Monomial& a, int k) {
    if (k <= 0) throw std::invalid_argument("sphere moment needs positive dimension");
    BigInt num = 1;
    unsigned half = 0;
    for (unsigned e : a.e) {
        if (e % 2 != 0) return Rational(0);
        unsigned b = e / 2;
        for (unsigned i = 1; i <= b; ++i) num *= 2 * i - 1;
        half += b;
    }
    BigInt den = 1;
    for (unsigned j = 0; j < half; ++j) den *= k + 2 * static_cast<int>(j);
    return Rational(num) / Rational(den);
}

template <class C>
struct SphereAverage {
    C c{};
    SparsePoly<C> certificate;  ///< c * Q^(d/2), the rotation average itself
};

/// Average of f over the rotation group: c with average = c * Q^(d/2).
/// Odd-degree input averages to zero (zero certificate).
template <class C>
SphereAverage<C> sphere_average(const SparsePoly<C>& f, int k) {
    if (f.nvars() != k) throw std::invalid_argument("variable count mismatch");
    SphereAverage<C> out;
    out.c = ring_traits<C>::zero();
    out.certificate = SparsePoly<C>::zero(k);
    if (f.is_zero()) return out;
    if (!f.is_homogeneous())
        throw std::invalid_argument("sphere average requires a homogeneous polynomial");
    for (const auto& [m, coeff] : f.terms())
        out.c += coeff * rational_to<C>(sphere_moment(m, k));
    unsigned d = f.degree();
    if (d % 2 == 0 && !ring_traits<C>::is_zero(out.c))
        out.certificate = SparsePoly<C>::standard_q(k).pow(d / 2).scaled(out.c);
    return out;
}

// ---------------------------------------------------------------------------
// Proportionality residuals (plain coefficient norm)
// ---------------------------------------------------------------------------

struct Proportionality {
    double scalar = 0.0;
    double residual = 0.0;
};

/// Least-squares proportionality of f against nonzero p: the scalar
/// minimizing ||f - scalar*p|| and the relative residual
/// ||f - s*p|| / max(||f||, floor_scale).  The floor keeps a sum that
/// should vanish (tiny ||f||) from being normalized against itself.
inline Proportionality proportional_residual(const SparsePoly<double>& f,
                                             const SparsePoly<double>& p,
                                             double floor_scale = 0.0) {
    if (f.nvars() != p.nvars())
        throw std::invalid_argument("polynomial variable count mismatch");
    if (p.is_zero()) throw std::invalid_argument("proportionality against zero");
    Proportionality out;
    double fn = f.coeff_norm();
    double denom = std::max(fn, floor_scale);
    if (denom == 0.0) return out;
    double dot = 0.0;
    for (const auto& [m, c] : f.terms()) {
        auto it = p.terms().find(m);
        if (it != p.terms().end()) dot += c * it->second;
    }
    out.scalar = dot / p.coeff_norm2();
    SparsePoly<double> r = f - p.scaled(out.scalar);
    out.residual = r.coeff_norm() / denom;
    return out;
}

// ---------------------------------------------------------------------------
// Lemma-2 style cubature construction
// ---------------------------------------------------------------------------

struct Lemma2Cubature {
    std::vector<SimilarityTransform> transforms;
    std::vector<SparsePoly<double>> rounded_inputs;  ///< degree-equalized inputs
    std::vector<double> residuals;  ///< proportionality residual per input
    int degree = 0;                 ///< common (even) degree after equalization
    std::size_t samples_used = 0;   ///< rotations sampled before feasibility
};

namespace detail {

/// Core solver shared by the cubature builders: finds nonnegative
/// weights on sampled rotations reproducing each polynomial's exact
/// rotation average, reduces the support, and folds the weights into
/// homothety scales via w^(1/d).
inline Lemma2Cubature cubature_from_averages(const std::vector<SparsePoly<double>>& gs,
                                             int k, int d, Rng& rng,
                                             double nnls_tol = 1e-10) {
    Lemma2Cubature out;
    out.degree = d;
    out.rounded_inputs = gs;
    for (const auto& g : gs)
        if (!g.is_zero() && g.degree() != static_cast<unsigned>(d))
            throw std::logic_error("cubature inputs must share one degree");

    auto basis = monomial_basis(k, d);
    const std::size_t nb = basis.size();
    const std::size_t l = gs.size();
    SparsePoly<double> qd = SparsePoly<double>::standard_q(k).pow(static_cast<unsigned>(d) / 2);

    auto coeffs_in_basis = [&](const SparsePoly<double>& p, double* dst) {
        for (std::size_t r = 0; r < nb; ++r) dst[r] = 0.0;
        for (const auto& [m, c] : p.terms()) {
            auto it = std::lower_bound(basis.begin(), basis.end(), m, GradedLexLess{});
            if (it == basis.end() || !(*it == m))
                throw std::logic_error("monomial outside the degree-d basis");
            dst[static_cast<std::size_t>(it - basis.begin())] = c;
        }
    };

    Eigen::VectorXd target(static_cast<Eigen::Index>(l * nb));
    for (std::size_t j = 0; j < l; ++j) {
        auto avg = sphere_average(gs[j], k);
        std::vector<double> row(nb);
        coeffs_in_basis(avg.certificate, row.data());
        for (std::size_t r = 0; r < nb; ++r)
            target(static_cast<Eigen::Index>(j * nb + r)) = row[r];
    }
    // A zero target (all inputs average to zero) needs the convex
    // normalization row so the weights cannot collapse to zero.
    bool normalize = target.norm() == 0.0;
    const std::size_t rows = l * nb + (normalize ? 1 : 0);
    Eigen::VectorXd b(static_cast<Eigen::Index>(rows));
    b.head(static_cast<Eigen::Index>(l * nb)) = target;
    if (normalize) b(static_cast<Eigen::Index>(rows - 1)) = 1.0;

    std::vector<Eigen::MatrixXd> rotations;
    Eigen::MatrixXd a(static_cast<Eigen::Index>(rows), 0);
    auto extend_samples = [&](std::size_t n) {
        std::size_t old = rotations.size();
        rotations.reserve(n);
        a.conservativeResize(Eigen::NoChange, static_cast<Eigen::Index>(n));
        std::vector<double> row(nb);
        for (std::size_t i = old; i < n; ++i) {
            rotations.push_back(rng.haar_rotation(k));
            SimilarityTransform t{rotations.back(), 1.0};
            for (std::size_t j = 0; j < l; ++j) {
                coeffs_in_basis(apply_transform(gs[j], t), row.data());
                for (std::size_t r = 0; r < nb; ++r)
                    a(static_cast<Eigen::Index>(j * nb + r), static_cast<Eigen::Index>(i)) = row[r];
            }
            if (normalize) a(static_cast<Eigen::Index>(rows - 1), static_cast<Eigen::Index>(i)) = 1.0;
        }
    };

    const double accept = nnls_tol * std::max(1.0, b.norm());
    std::size_t n = 4 * (rows + 1);
    NnlsResult sol;
    double best = std::numeric_limits<double>::infinity();
    for (int round = 0; round <= 6; ++round) {
        extend_samples(n);
        sol = nnls(a, b);
        best = std::min(best, sol.residual);
        if (sol.residual <= accept) break;
        n *= 2;
    }
    out.samples_used = rotations.size();
    if (sol.residual > accept) {
        std::ostringstream msg;
        msg << "cubature feasibility not reached: residual " << best << " after "
            << rotations.size() << " rotation samples (accept " << accept << ")";
        throw std::runtime_error(msg.str());
    }

    std::vector<std::vector<double>> cols;
    std::vector<double> weights;
    std::vector<std::size_t> col_rot;
    for (std::size_t i = 0; i < rotations.size(); ++i) {
        double w = sol.x(static_cast<Eigen::Index>(i));
        if (w <= 0.0) continue;
        std::vector<double> col(rows);
        for (std::size_t r = 0; r < rows; ++r)
            col[r] = a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(i));
        cols.push_back(std::move(col));
        weights.push_back(w);
        col_rot.push_back(i);
    }
    auto reduced = caratheodory_reduce_conic(cols, weights);

    for (std::size_t j = 0; j < reduced.indices.size(); ++j) {
        SimilarityTransform t;
        t.rotation = rotations[col_rot[reduced.indices[j]]];
        t.scale = std::pow(reduced.weights[j], 1.0 / d);
        out.transforms.push_back(std::move(t));
    }

    out.residuals.resize(l);
    for (std::size_t j = 0; j < l; ++j) {
        SparsePoly<double> s = transform_sum(gs[j], out.transforms);
        out.residuals[j] = proportional_residual(s, qd, gs[j].coeff_norm()).residual;
    }
    return out;
}

}  // namespace detail

/// Finite set of similarity transforms whose pushforward sum turns each
/// input into a multiple of the corresponding power of Q.  Inputs of
/// lower degree are first multiplied by powers of Q to reach the common
/// even degree d; the returned rounded_inputs are those equalized
/// polynomials, and residuals certify each of them.
inline Lemma2Cubature build_lemma2_cubature(const std::vector<SparsePoly<double>>& polys,
                                            int k, std::uint64_t seed) {
    if (polys.empty()) throw std::invalid_argument("cubature needs at least one polynomial");
    int d = 0;
    for (const auto& f : polys) {
        if (f.nvars() != k) throw std::invalid_argument("variable count mismatch");
        if (f.is_zero()) continue;
        if (!f.is_homogeneous())
            throw std::invalid_argument("cubature inputs must be homogeneous");
        if (f.degree() % 2 != 0)
            throw std::invalid_argument("cubature inputs must have even degree");
        d = std::max(d, static_cast<int>(f.degree()));
    }
    if (d == 0) {
        Lemma2Cubature trivial;
        trivial.transforms = {SimilarityTransform::identity(k)};
        trivial.rounded_inputs = polys;
        trivial.residuals.assign(polys.size(), 0.0);
        return trivial;
    }
    SparsePoly<double> q = SparsePoly<double>::standard_q(k);
    std::vector<SparsePoly<double>> gs;
    gs.reserve(polys.size());
    for (const auto& f : polys) {
        unsigned gap = f.is_zero() ? 0 : static_cast<unsigned>(d) - f.degree();
        gs.push_back(gap ? f * q.pow(gap / 2) : f);
    }
    Rng rng(seed);
    return detail::cubature_from_averages(gs, k, d, rng);
}

/// One transform list that simultaneously rounds every monomial of
/// degree d (hence, by linearity, every degree-d polynomial).
inline Lemma2Cubature universal_cubature(int k, int d, std::uint64_t seed) {
    if (d <= 0 || d % 2 != 0) throw std::invalid_argument("universal cubature needs even degree");
    std::vector<SparsePoly<double>> monos;
    for (const auto& m : monomial_basis(k, d)) {
        SparsePoly<double> p(k);
        p.add_term(m, 1.0);
        monos.push_back(std::move(p));
    }
    Rng rng(seed);
    return detail::cubature_from_averages(monos, k, d, rng);
}

// ---------------------------------------------------------------------------
// Recursive construction of linear-form families
// ---------------------------------------------------------------------------

/// Doubling schedule for the block sizes of the recursive construction:
/// 1 = s_0 < s_1 < ... < s_delta, all powers of two, with s_1 >= k.
struct ConstructionSchedule {
    int k = 0;
    int d = 0;
    std::vector<int> blocks;

    int delta() const { return d / 2; }
    int m() const { return blocks.back(); }

    static int height_of(int s) {
        int h = 0;
        while ((1 << h) < s) ++h;
        return h;
    }

    void validate() const {
        if (k < 1) throw std::invalid_argument("schedule needs k >= 1");
        if (d < 2 || d % 2 != 0) throw std::invalid_argument("schedule needs even d >= 2");
        if (blocks.size() != static_cast<std::size_t>(delta()) + 1)
            throw std::invalid_argument("schedule needs d/2 + 1 block sizes");
        if (blocks[0] != 1) throw std::invalid_argument("schedule must start at 1");
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            int s = blocks[i];
            if (s < 1 || (s & (s - 1)) != 0)
                throw std::invalid_argument("block sizes must be powers of two");
            if (i > 0 && blocks[i] <= blocks[i - 1])
                throw std::invalid_argument("block sizes must strictly increase");
        }
        if (blocks[1] < k)
            throw std::invalid_argument("first block cannot hold the seed forms");
    }

    static ConstructionSchedule parse(int k, int d, const std::string& text) {
        ConstructionSchedule s;
        s.k = k;
        s.d = d;
        std::stringstream in(text);
        std::string tok;
        while (std::getline(in, tok, ',')) {
            if (tok.empty()) continue;
            s.blocks.push_back(std::stoi(tok));
        }
        s.validate();
        return s;
    }
};

struct RecursiveFormsResult {
    LinearFormSet<double> forms;
    std::vector<int> stage_counts;  ///< transforms consumed per doubling stage
    double max_residual = 0.0;      ///< worst orbit residual at the final height
};

namespace detail {

inline std::vector<double> linear_form_coeffs(const SparsePoly<double>& f) {
    std::vector<double> c(static_cast<std::size_t>(f.nvars()), 0.0);
    for (const auto& [m, coeff] : f.terms()) {
        if (m.deg != 1) throw std::invalid_argument("not a linear form");
        for (std::size_t i = 0; i < m.e.size(); ++i)
            if (m.e[i] == 1) c[i] = coeff;
    }
    return c;
}

inline SparsePoly<double> compose_with_forms(const SparsePoly<double>& g,
                                             const std::vector<SparsePoly<double>>& block,
                                             int k) {
    if (g.nvars() != static_cast<int>(block.size()))
        throw std::invalid_argument("orbit polynomial/block size mismatch");
    std::vector<std::vector<double>> m;
    m.reserve(block.size());
    for (const auto& f : block) m.push_back(linear_form_coeffs(f));
    (void)k;
    return g.compose_linear(m);
}

/// Residual of g_U(block) against proportionality to Q^|U|.
inline double orbit_roundness_residual(const OrbitKey& key, int h,
                                       const std::vector<SparsePoly<double>>& block, int k) {
    LeafMultiset rep;
    rep.h = h;
    place_representative(key, 1, rep);
    SparsePoly<double> g = orbit_polynomial<double>(rep);
    SparsePoly<double> composed = compose_with_forms(g, block, k);
    if (composed.is_zero()) return 0.0;
    SparsePoly<double> target =
        SparsePoly<double>::standard_q(k).pow(static_cast<unsigned>(key.cardinality()));
    return proportional_residual(composed, target, target.coeff_norm()).residual;
}

}  // namespace detail

/// Block-doubling construction: seeds x_1..x_k (zero padded) so the
/// squares sum to Q, then repeatedly replicates the block through a
/// transform set that rounds every orbit sum of the next cardinality.
/// After stage b, every orbit multiset of cardinality <= b at the
/// block's height evaluates to a multiple of Q^|U|; the final set of
/// m = s_delta forms does so for all cardinalities <= d/2.
inline RecursiveFormsResult build_recursive_forms(const ConstructionSchedule& sched,
                                                  std::uint64_t seed,
                                                  double stage_tol = 1e-7) {
    sched.validate();
    const int k = sched.k;
    const int delta = sched.delta();

    std::vector<SparsePoly<double>> block;
    for (int i = 0; i < sched.blocks[1]; ++i)
        block.push_back(i < k ? SparsePoly<double>::variable(k, i)
                              : SparsePoly<double>::zero(k));

    RecursiveFormsResult out;
    double final_worst = 0.0;
    auto verify_stage = [&](int b) {
        int h = ConstructionSchedule::height_of(sched.blocks[static_cast<std::size_t>(b)]);
        double worst = 0.0;
        for (int card = 1; card <= std::min(b, delta); ++card) {
            OrbitList orbits = enumerate_orbits(card, h);
            for (const auto& key : orbits.keys) {
                double r = detail::orbit_roundness_residual(key, h, block, k);
                worst = std::max(worst, r);
                if (r > stage_tol) {
                    std::ostringstream msg;
                    msg << "recursive construction stage " << b << ": orbit " << key.str()
                        << " residual " << r << " exceeds " << stage_tol;
                    throw std::runtime_error(msg.str());
                }
            }
        }
        return worst;
    };
    final_worst = verify_stage(1);

    for (int b = 1; b < delta; ++b) {
        const int s_cur = sched.blocks[static_cast<std::size_t>(b)];
        const int s_next = sched.blocks[static_cast<std::size_t>(b) + 1];
        const int h_cur = ConstructionSchedule::height_of(s_cur);
        const int stage_degree = 2 * (b + 1);

        std::vector<SimilarityTransform> sigmas;
        if (k == 2) {
            // Equal-angle circle rule: rotations by j*pi/N annihilate all
            // nonconstant even trigonometric frequencies below 2N, so
            // N = (stage degree)/2 + 1 rotations average every polynomial
            // of the stage degree exactly.
            int n_rot = stage_degree / 2 + 1;
            for (int j = 0; j < n_rot; ++j) {
                double th = j * M_PI / n_rot;
                SimilarityTransform t;
                t.rotation = Eigen::MatrixXd(2, 2);
                t.rotation << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
                t.scale = 1.0;
                sigmas.push_back(std::move(t));
            }
        } else {
            OrbitList orbits = enumerate_orbits(b + 1, h_cur);
            std::vector<SparsePoly<double>> family;
            for (const auto& key : orbits.keys) {
                LeafMultiset rep;
                rep.h = h_cur;
                detail::place_representative(key, 1, rep);
                SparsePoly<double> phi =
                    detail::compose_with_forms(orbit_polynomial<double>(rep), block, k);
                phi.cleanup();
                if (!phi.is_zero()) family.push_back(std::move(phi));
            }
            if (family.empty()) {
                sigmas.push_back(SimilarityTransform::identity(k));
            } else {
                Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(b));
                Lemma2Cubature cub =
                    detail::cubature_from_averages(family, k, stage_degree, rng);
                sigmas = cub.transforms;
            }
        }

        const int g = static_cast<int>(sigmas.size());
        if (g * s_cur > s_next) {
            std::ostringstream msg;
            msg << "schedule too small at stage " << b + 1 << ": " << g
                << " transforms need " << g * s_cur << " slots but the block has " << s_next;
            throw std::runtime_error(msg.str());
        }
        out.stage_counts.push_back(g);

        std::vector<SparsePoly<double>> next;
        next.reserve(static_cast<std::size_t>(s_next));
        for (const auto& t : sigmas)
            for (const auto& f : block) next.push_back(apply_transform(f, t));
        while (static_cast<int>(next.size()) < s_next)
            next.push_back(SparsePoly<double>::zero(k));
        block = std::move(next);
        final_worst = verify_stage(b + 1);
    }

    out.max_residual = final_worst;
    out.forms.k = k;
    out.forms.forms = std::move(block);
    out.forms.validate();

    Eigen::MatrixXd coeffs(static_cast<Eigen::Index>(out.forms.forms.size()), k);
    for (std::size_t i = 0; i < out.forms.forms.size(); ++i) {
        auto c = detail::linear_form_coeffs(out.forms.forms[i]);
        for (int j = 0; j < k; ++j) coeffs(static_cast<Eigen::Index>(i), j) = c[static_cast<std::size_t>(j)];
    }
    if (coeffs.colPivHouseholderQr().rank() < k)
        throw std::runtime_error("recursive construction produced non-spanning forms");
    return out;
}

// ---------------------------------------------------------------------------
// Final assembly check
// ---------------------------------------------------------------------------

struct RoundRestrictionReport {
    double scalar = 0.0;
    double residual = 0.0;
};

/// Evaluates the invariant combination sum_U a_U g_U at y_i = l_i(x) and
/// reports its proportionality scalar and residual against Q^delta.
inline RoundRestrictionReport verify_round_restriction(const InvariantCoefficients& a,
                                                       const LinearFormSet<double>& forms) {
    a.validate();
    forms.validate();
    if ((std::size_t{1} << a.h) != forms.forms.size())
        throw std::invalid_argument("form count does not match the tree height");
    SparsePoly<double> f = a.to_polynomial();
    SparsePoly<double> composed = detail::compose_with_forms(f, forms.forms, forms.k);
    composed.cleanup();
    RoundRestrictionReport out;
    if (composed.is_zero()) return out;
    SparsePoly<double> target =
        SparsePoly<double>::standard_q(forms.k).pow(static_cast<unsigned>(a.delta));
    Proportionality p = proportional_residual(composed, target, target.coeff_norm());
    out.scalar = p.scalar;
    out.residual = p.residual;
    return out;
}

}  // namespace grr
