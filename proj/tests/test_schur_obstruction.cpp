// Schur expansions, characteristic-class survival, and bound formulas.
//
// Oracles come first: each derived expectation is recomputed here by an
// independent elementary method (tableau counting, multi-index
// enumeration, direct products) before the library value is checked.

#include <catch2/catch_amalgamated.hpp>

#include <grr/charclass.hpp>
#include <grr/schur.hpp>
#include <grr/weights.hpp>

#include <grr/poly_io.hpp>

#include <algorithm>
#include <functional>
#include <set>
#include <string>
#include <vector>

using namespace grr;

namespace {

// ---------------------------------------------------------------------------
// Oracle 1: count semistandard Young tableaux of a (small) shape with
// entries in {1..k} by brute-force filling.  s_lambda(1,...,1) equals this
// count, giving an evaluation check on the Schur polynomial.
long count_ssyt(const std::vector<int>& shape, int k) {
    std::vector<std::vector<int>> t(shape.size());
    for (std::size_t r = 0; r < shape.size(); ++r) t[r].assign(shape[r], 0);
    long count = 0;
    // Fill cells row-major; rows weakly increase, columns strictly increase.
    std::function<void(std::size_t, int)> fill = [&](std::size_t r, int c) {
        if (r == t.size()) {
            ++count;
            return;
        }
        std::size_t nr = r;
        int nc = c + 1;
        if (nc >= shape[r]) {
            nr = r + 1;
            nc = 0;
        }
        int lo = 1;
        if (c > 0) lo = std::max(lo, t[r][c - 1]);
        if (r > 0) lo = std::max(lo, t[r - 1][c] + 1);
        for (int v = lo; v <= k; ++v) {
            t[r][c] = v;
            fill(nr, nc);
        }
    };
    fill(0, 0);
    return count;
}

// Oracle 2: enumerate the multi-indices (i_1,...,i_k) with sum d.
std::set<std::vector<int>> multi_indices(int d, int k) {
    std::set<std::vector<int>> out;
    std::vector<int> idx(k, 0);
    std::function<void(int, int)> rec = [&](int pos, int left) {
        if (pos == k - 1) {
            idx[pos] = left;
            out.insert(idx);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            idx[pos] = v;
            rec(pos + 1, left - v);
        }
    };
    if (k > 0) rec(0, d);
    return out;
}

// Oracle 3: raw product of the weights of one system, in a chosen ring.
// Weight coefficients are integers, so reduction into GF2 is well defined.
template <class C>
C weight_coeff(const Rational& q) {
    if constexpr (std::is_same_v<C, GF2>) {
        REQUIRE(boost::multiprecision::denominator(q) == 1);
        return GF2(boost::multiprecision::numerator(q).convert_to<long>());
    } else {
        return rational_to<C>(q);
    }
}

template <class C>
SparsePoly<C> weight_product(const WeightSystem& ws) {
    auto prod = SparsePoly<C>::one(ws.k);
    for (const auto& w : ws.weights) {
        SparsePoly<C> wc(ws.k);
        for (const auto& [m, q] : w.terms())
            wc.add_term(m, weight_coeff<C>(q));
        prod = prod * wc;
    }
    return prod;
}

// Oracle 4: least n >= k at which the truncated class stays nonzero,
// by scanning n upward instead of reading off the minimal lambda_1.
template <class C>
int scan_minimal_n(const SchurExpansion<C>& cls, int limit) {
    for (int n = cls.k; n <= limit; ++n)
        if (!truncate_to_grassmannian(cls, n).is_zero()) return n;
    return -1;
}

Partition part(std::vector<int> p) { return Partition(std::move(p)); }

SparsePoly<Rational> parse_sym2(const std::string& s) {
    return parse_poly<Rational>(s, 2);
}
SparsePoly<Rational> parse_sym3(const std::string& s) {
    return parse_poly<Rational>(s, 3);
}

// All partitions of w into at most k parts.
std::vector<Partition> partitions_of(int w, int k) {
    std::vector<Partition> out;
    std::vector<int> cur;
    std::function<void(int, int)> rec = [&](int left, int maxpart) {
        if (left == 0) {
            out.push_back(part(cur));
            return;
        }
        if (static_cast<int>(cur.size()) == k) return;
        for (int p = std::min(left, maxpart); p >= 1; --p) {
            cur.push_back(p);
            rec(left - p, p);
            cur.pop_back();
        }
    };
    rec(w, w);
    return out;
}

}  // namespace

TEST_CASE("schur polynomial matches tableau counting", "[schur]") {
    // Oracle first: SSYT of shape (2,1) with entries <= 3.
    REQUIRE(count_ssyt({2, 1}, 3) == 8);
    auto s21 = schur_polynomial<Rational>(part({2, 1}), 3);
    REQUIRE(s21.evaluate(std::vector<Rational>{Rational(1), Rational(1), Rational(1)}) == Rational(8));
    // Broader agreement for all |lambda| <= 4, k <= 3.
    std::vector<std::vector<int>> shapes{{1}, {2}, {1, 1}, {3},    {2, 1},
                                         {1, 1, 1},  {4}, {2, 2}, {3, 1}};
    for (const auto& sh : shapes) {
        for (int k = static_cast<int>(sh.size()); k <= 3; ++k) {
            auto s = schur_polynomial<Rational>(part(sh), k);
            std::vector<Rational> ones(static_cast<std::size_t>(k), Rational(1));
            REQUIRE(s.evaluate(ones) == Rational(count_ssyt(sh, k)));
            REQUIRE(s.is_homogeneous());
        }
    }
}

TEST_CASE("elementary schur shapes", "[schur]") {
    auto e1 = schur_polynomial<Rational>(part({1}), 2);
    REQUIRE(e1 == parse_sym2("x1 + x2"));
    auto e2 = schur_polynomial<Rational>(part({1, 1}), 2);
    REQUIRE(e2 == parse_sym2("x1*x2"));
    // lambda with more parts than variables vanishes.
    REQUIRE(schur_polynomial<Rational>(part({1, 1, 1}), 2).is_zero());
}

TEST_CASE("expansion round-trips and is linear", "[schur]") {
    // Round trip over all |lambda| <= 6, k <= 4.
    for (int k = 1; k <= 4; ++k) {
        for (int w = 1; w <= 6; ++w) {
            for (const auto& lam : partitions_of(w, k)) {
                auto f = schur_polynomial<Rational>(lam, k);
                auto e = expand_in_schur(f, k);
                REQUIRE(e.coeffs.size() == 1);
                REQUIRE(e.coeffs.begin()->first == lam);
                REQUIRE(e.coeffs.begin()->second == Rational(1));
            }
        }
    }
    // Linearity on a random-ish symmetric pair.
    auto f = schur_polynomial<Rational>(part({2, 1}), 3).scaled(Rational(3)) +
             schur_polynomial<Rational>(part({1, 1, 1}), 3);
    auto g = schur_polynomial<Rational>(part({3}), 3).scaled(Rational(-2));
    auto ef = expand_in_schur(f, 3);
    auto eg = expand_in_schur(g, 3);
    auto efg = expand_in_schur(f + g, 3);
    for (const auto& [lam, c] : efg.coeffs) {
        Rational expect(0);
        if (auto it = ef.coeffs.find(lam); it != ef.coeffs.end()) expect += it->second;
        if (auto it = eg.coeffs.find(lam); it != eg.coeffs.end()) expect += it->second;
        REQUIRE(c == expect);
    }
    REQUIRE_THROWS_AS(expand_in_schur(parse_sym2("x1"), 2), std::invalid_argument);
}

TEST_CASE("two-variable power sum expansion", "[schur]") {
    // Oracle: match coefficients of c1*s_(2) + c2*s_(1,1) = t1^2 + t2^2.
    // s_(2) = t1^2 + t1 t2 + t2^2 and s_(1,1) = t1 t2, so the t1^2
    // coordinate forces c1 = 1 and the t1 t2 coordinate forces c2 = -1.
    auto s2 = schur_polynomial<Rational>(part({2}), 2);
    auto s11 = schur_polynomial<Rational>(part({1, 1}), 2);
    Rational c1 = parse_sym2("x1^2 + x2^2").coeff(Monomial({2u, 0u}));
    REQUIRE(s2.coeff(Monomial({2u, 0u})) == Rational(1));
    Rational c2 = parse_sym2("x1^2 + x2^2").coeff(Monomial({1u, 1u})) -
                  c1 * s2.coeff(Monomial({1u, 1u}));
    REQUIRE(c1 == Rational(1));
    REQUIRE(c2 == Rational(-1));

    auto e = expand_in_schur(parse_sym2("x1^2 + x2^2"), 2);
    REQUIRE(e.coeffs.size() == 2);
    REQUIRE(e.coeffs.at(part({2})) == Rational(1));
    REQUIRE(e.coeffs.at(part({1, 1})) == Rational(-1));
    // Over GF2 the sign collapses to 1.
    auto eg = expand_in_schur(parse_poly<GF2>("x1^2 + x2^2", 2), 2);
    REQUIRE(eg.coeffs.at(part({1, 1})) == GF2(1));
}

TEST_CASE("elementary symmetric generating product", "[schur]") {
    auto prod = parse_sym3("1 + x1") ;
    prod = prod * parse_sym3("1 + x2") * parse_sym3("1 + x3");
    auto e = expand_in_schur(prod, 3);
    REQUIRE(e.coeffs.size() == 4);
    REQUIRE(e.coeffs.at(part({})) == Rational(1));
    REQUIRE(e.coeffs.at(part({1})) == Rational(1));
    REQUIRE(e.coeffs.at(part({1, 1})) == Rational(1));
    REQUIRE(e.coeffs.at(part({1, 1, 1})) == Rational(1));
}

TEST_CASE("pieri on the first row", "[schur]") {
    auto s1 = schur_polynomial<Rational>(part({1}), 2);
    auto e = expand_in_schur(s1 * s1, 2);
    REQUIRE(e.coeffs.size() == 2);
    REQUIRE(e.coeffs.at(part({2})) == Rational(1));
    REQUIRE(e.coeffs.at(part({1, 1})) == Rational(1));
}

TEST_CASE("grassmannian truncation drops wide partitions", "[schur]") {
    SchurExpansion<GF2> cls;
    cls.k = 1;
    cls.add(part({3}), GF2(1));
    REQUIRE(truncate_to_grassmannian(cls, 3).is_zero());
    SchurExpansion<GF2> cls2;
    cls2.k = 1;
    cls2.add(part({2}), GF2(1));
    REQUIRE_FALSE(truncate_to_grassmannian(cls2, 3).is_zero());
    SchurExpansion<Rational> cls3;
    cls3.k = 2;
    cls3.add(part({3}), Rational(1));
    cls3.add(part({2, 2}), Rational(5));
    auto t = truncate_to_grassmannian(cls3, 4);
    REQUIRE(t.coeffs.size() == 1);
    REQUIRE(t.coeffs.count(part({2, 2})) == 1);
    REQUIRE_THROWS_AS(truncate_to_grassmannian(cls3, 1), std::invalid_argument);
}

TEST_CASE("truncation commutes with products below the rectangle bound", "[schur]") {
    // With n - k = 4 and |lambda| + |mu| <= 4 nothing is dropped, so
    // expanding the product then truncating equals the product expansion.
    int k = 2, n = 6;
    for (const auto& lam : partitions_of(2, k)) {
        for (const auto& mu : partitions_of(2, k)) {
            auto f = schur_polynomial<Rational>(lam, k) * schur_polynomial<Rational>(mu, k);
            auto e = expand_in_schur(f, k);
            REQUIRE(truncate_to_grassmannian(e, n) == e);
        }
    }
}

TEST_CASE("symmetric power weight systems", "[weights]") {
    // Oracle first: the multi-index sets.
    auto idx32 = multi_indices(3, 2);
    REQUIRE(idx32 == std::set<std::vector<int>>{
                         {3, 0}, {2, 1}, {1, 2}, {0, 3}});
    auto ws32 = symmetric_power_weights(3, 2);
    REQUIRE(ws32.weights.size() == 4);
    std::set<std::vector<int>> got;
    for (const auto& w : ws32.weights) {
        std::vector<int> row(2, 0);
        for (const auto& [m, c] : w.terms())
            for (std::size_t i = 0; i < m.e.size(); ++i)
                if (m.e[i]) row[i] = static_cast<int>(rational_to<double>(c));
        got.insert(row);
    }
    REQUIRE(got == idx32);

    auto ws22 = symmetric_power_weights(2, 2);
    REQUIRE(ws22.weights.size() == 3);
    auto ws13 = symmetric_power_weights(1, 3);
    REQUIRE(ws13.weights.size() == 3);
    for (const auto& w : ws13.weights) REQUIRE(w.degree() == 1);
    // Count identity C(d+k-1, d) for a sweep.
    for (int d = 1; d <= 5; ++d)
        for (int k = 1; k <= 4; ++k)
            REQUIRE(static_cast<long>(symmetric_power_weights(d, k).weights.size()) ==
                    binomial_long(d + k - 1, d));
}

TEST_CASE("top mod-2 class", "[charclass]") {
    // Oracle first: reduce d=3,k=2 weights mod 2 and multiply directly.
    auto ws = symmetric_power_weights(3, 2);
    auto raw = weight_product<GF2>(ws);
    REQUIRE(raw == parse_poly<GF2>("x1^2*x2^2", 2));
    auto cls = top_sw_class(ws);
    REQUIRE(cls.coeffs.size() == 1);
    REQUIRE(cls.coeffs.count(part({2, 2})) == 1);
    // Even d kills the class through the all-even multi-index.
    REQUIRE(top_sw_class(symmetric_power_weights(2, 1)).is_zero());
    // d=1: top class is e_k = s_(1^k).
    for (int k = 1; k <= 4; ++k) {
        auto c1 = top_sw_class(symmetric_power_weights(1, k));
        REQUIRE(c1.coeffs.size() == 1);
        REQUIRE(c1.coeffs.count(part(std::vector<int>(k, 1))) == 1);
    }
}

TEST_CASE("top integral class", "[charclass]") {
    // Oracle first: direct integer product for d=2, k=2.
    auto ws = symmetric_power_weights(2, 2);
    auto raw = weight_product<Rational>(ws);
    REQUIRE(raw == parse_sym2("4*x1^2*x2 + 4*x1*x2^2"));
    auto cls = top_chern_class(ws);
    REQUIRE(cls.coeffs.size() == 1);
    REQUIRE(cls.coeffs.at(part({2, 1})) == Rational(4));

    auto c21 = top_chern_class(symmetric_power_weights(2, 1));
    REQUIRE(c21.coeffs.size() == 1);
    REQUIRE(c21.coeffs.at(part({1})) == Rational(2));
    auto c12 = top_chern_class(symmetric_power_weights(1, 2));
    REQUIRE(c12.coeffs.size() == 1);
    REQUIRE(c12.coeffs.at(part({1, 1})) == Rational(1));
}

TEST_CASE("survival thresholds", "[charclass]") {
    // Oracle first: scan n upward for d=3, k=1.
    auto cls31 = top_sw_class(symmetric_power_weights(3, 1));
    REQUIRE(scan_minimal_n(cls31, 16) == 2);
    auto m31 = minimal_n(3, 1, Field::RealMod2);
    REQUIRE(m31.has_value());
    REQUIRE(*m31 == 2);
    REQUIRE(*m31 == 1 + binomial_long(3, 3));

    REQUIRE_FALSE(minimal_n(2, 1, Field::RealMod2).has_value());

    auto m32 = minimal_n(3, 2, Field::RealMod2);
    REQUIRE(m32.has_value());
    REQUIRE(*m32 <= 2 + binomial_long(4, 3));
    // The scan oracle agrees wherever both apply.
    auto cls32 = top_sw_class(symmetric_power_weights(3, 2));
    REQUIRE(scan_minimal_n(cls32, 32) == *m32);
}

TEST_CASE("bound formulas", "[charclass]") {
    REQUIRE(bound_thm4(3, 2) == 6);
    REQUIRE(bound_thm5(3, 2, 2) == 14);
    REQUIRE(bound_thm6(3, 2) == 6);
    REQUIRE(bound_thm7(2, 1, 1) == 4);
    REQUIRE(bound_remark_quadratic(4) == 7);
    for (int k = 1; k <= 6; ++k) REQUIRE(bound_remark_quadratic(k) == 2 * k - 1);
    REQUIRE_THROWS_AS(bound_thm4(2, 2), std::invalid_argument);
    REQUIRE_THROWS_AS(bound_thm5(4, 2, 1), std::invalid_argument);
    // Lower bound never exceeds the upper bound (odd d).
    for (int d = 1; d <= 7; d += 2)
        for (int k = 1; k <= 4; ++k)
            REQUIRE(bound_lower(d, k) <= bound_thm4(d, k));
}

TEST_CASE("survival stays within the closed-form bounds", "[charclass]") {
    for (int d = 1; d <= 5; d += 2) {
        for (int k = 1; k <= 3; ++k) {
            auto cls = top_sw_class(symmetric_power_weights(d, k));
            REQUIRE_FALSE(cls.is_zero());
            auto mn = minimal_n(d, k, Field::RealMod2);
            REQUIRE(mn.has_value());
            REQUIRE(*mn <= bound_thm4(d, k));
        }
    }
    for (int d = 2; d <= 4; d += 2)
        for (int k = 1; k <= 3; ++k)
            REQUIRE(top_sw_class(symmetric_power_weights(d, k)).is_zero());
    for (int d = 1; d <= 4; ++d) {
        for (int k = 1; k <= 3; ++k) {
            auto cls = top_chern_class(symmetric_power_weights(d, k));
            REQUIRE_FALSE(cls.is_zero());
            auto mn = minimal_n(d, k, Field::ComplexInt);
            REQUIRE(mn.has_value());
            REQUIRE(*mn <= bound_thm6(d, k));
        }
    }
}

TEST_CASE("binomial column-sum identity", "[charclass]") {
    // Oracle first: 1 + 2 + 3 = 6 = C(4,2) by hand for (2,2).
    REQUIRE(binomial_long(4, 2) == 6);
    REQUIRE(binomial_identity_check(2, 2));
    REQUIRE(binomial_identity_check(0, 5));
    for (int d = 0; d <= 8; ++d)
        for (int k = 0; k <= 8; ++k) REQUIRE(binomial_identity_check(d, k));
}

TEST_CASE("pontryagin data from paired weights", "[weights]") {
    // The rank-9 system with weights {+-2a, +-2b, +-(a+b), +-(a-b), 0}.
    WeightSystem ws;
    ws.k = 2;
    auto add = [&](const char* s) {
        ws.weights.push_back(parse_poly<Rational>(s, 2));
    };
    add("2*x1");
    add("-2*x1");
    add("2*x2");
    add("-2*x2");
    add("x1 + x2");
    add("-x1 - x2");
    add("x1 - x2");
    add("-x1 + x2");
    ws.weights.push_back(SparsePoly<Rational>::zero(2));

    auto pd = pontryagin_from_weights(ws);
    REQUIRE(pd.trivial_rank == 1);
    // Top-degree part must equal 16 a^2 b^2 (a^2 - b^2)^2.
    auto a = SparsePoly<Rational>::variable(2, 0);
    auto b = SparsePoly<Rational>::variable(2, 1);
    auto expect = (a * b).pow(2).scaled(Rational(16)) * (a * a - b * b).pow(2);
    SparsePoly<Rational> top(2);
    for (const auto& [m, c] : pd.total_p.terms())
        if (m.deg == 8) top.add_term(m, c);
    REQUIRE(top == expect);

    WeightSystem single;
    single.k = 1;
    single.weights.push_back(parse_poly<Rational>("x1", 1));
    single.weights.push_back(parse_poly<Rational>("-x1", 1));
    auto pd1 = pontryagin_from_weights(single);
    REQUIRE(pd1.total_p == parse_poly<Rational>("1 + x1^2", 1));

    WeightSystem zeros;
    zeros.k = 1;
    zeros.weights.assign(2, SparsePoly<Rational>::zero(1));
    auto pd0 = pontryagin_from_weights(zeros);
    REQUIRE(pd0.trivial_rank == 2);
    REQUIRE(pd0.total_p == SparsePoly<Rational>::one(1));

    WeightSystem bad;
    bad.k = 1;
    bad.weights.push_back(parse_poly<Rational>("x1", 1));
    REQUIRE_THROWS_AS(pontryagin_from_weights(bad), std::invalid_argument);
}
