#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "scdmi/algebra.hpp"
#include "scdmi/error.hpp"

using namespace scdmi;

namespace {

using Values = std::vector<std::array<double, kVarsPerPoint>>;

double eval_point_poly(const PointPolynomial& poly, const Values& values) {
  double sum = 0.0;
  for (const auto& [exps, coeff] : poly.terms()) {
    double term = static_cast<double>(coeff);
    for (std::size_t v = 0; v < exps.size(); ++v) {
      term *= std::pow(values[v / kVarsPerPoint][v % kVarsPerPoint], exps[v]);
    }
    sum += term;
  }
  return sum;
}

Values random_values(int points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Values v(points);
  for (auto& p : v) {
    for (auto& x : p) x = u(rng);
  }
  return v;
}

// Cofactor expansion along the first row of [R; G; B] at columns a, b, c.
double det3(const Values& v, int a, int b, int c) {
  auto at = [&](int row, int col) { return v[col - 1][2 + row]; };
  return at(0, a) * (at(1, b) * at(2, c) - at(1, c) * at(2, b)) -
         at(0, b) * (at(1, a) * at(2, c) - at(1, c) * at(2, a)) +
         at(0, c) * (at(1, a) * at(2, b) - at(1, b) * at(2, a));
}

MonomialTerm term(std::int64_t c, std::vector<MomentIndex> factors) {
  return {c, std::move(factors)};
}

MomentIndex m(int p, int q, int a, int b, int g) { return {p, q, a, b, g}; }

}  // namespace

TEST_SUITE("algebra") {

TEST_CASE("shape primitive S(1,2) is X1 Y2 - X2 Y1") {
  const auto s = expand_shape_primitive(1, 2);
  CHECK(s.size() == 2);
  CHECK(s.coefficient({{{1, Var::X}, 1}, {{2, Var::Y}, 1}}) == 1);
  CHECK(s.coefficient({{{2, Var::X}, 1}, {{1, Var::Y}, 1}}) == -1);
}

TEST_CASE("shape primitive S(1,3) relabels the second point") {
  const auto s = expand_shape_primitive(1, 3);
  CHECK(s.size() == 2);
  CHECK(s.coefficient({{{1, Var::X}, 1}, {{3, Var::Y}, 1}}) == 1);
  CHECK(s.coefficient({{{3, Var::X}, 1}, {{1, Var::Y}, 1}}) == -1);
  CHECK(s.coefficient({{{1, Var::X}, 1}, {{2, Var::Y}, 1}}) == 0);
}

TEST_CASE("shape primitive rejects unordered or repeated points") {
  CHECK_THROWS_AS(expand_shape_primitive(2, 2), InvalidSpec);
  CHECK_THROWS_AS(expand_shape_primitive(3, 1), InvalidSpec);
  CHECK_THROWS_AS(expand_shape_primitive(0, 1), InvalidSpec);
}

TEST_CASE("color primitive C(1,2,3) is the six-term Leibniz expansion") {
  const auto c = expand_color_primitive(1, 2, 3);
  CHECK(c.size() == 6);
  auto coeff = [&](int r, int g, int b) {
    return c.coefficient({{{r, Var::R}, 1}, {{g, Var::G}, 1}, {{b, Var::B}, 1}});
  };
  CHECK(coeff(1, 2, 3) == 1);
  CHECK(coeff(1, 3, 2) == -1);
  CHECK(coeff(2, 1, 3) == -1);
  CHECK(coeff(2, 3, 1) == 1);
  CHECK(coeff(3, 1, 2) == 1);
  CHECK(coeff(3, 2, 1) == -1);
}

TEST_CASE("color primitive C(1,2,4) replaces column 3 by 4") {
  const auto c = expand_color_primitive(1, 2, 4);
  CHECK(c.size() == 6);
  CHECK(c.coefficient({{{1, Var::R}, 1}, {{2, Var::G}, 1}, {{4, Var::B}, 1}}) == 1);
  CHECK(c.coefficient({{{4, Var::R}, 1}, {{2, Var::G}, 1}, {{1, Var::B}, 1}}) == -1);
  CHECK(c.coefficient({{{1, Var::R}, 1}, {{2, Var::G}, 1}, {{3, Var::B}, 1}}) == 0);
}

TEST_CASE("color primitive rejects repeated points") {
  CHECK_THROWS_AS(expand_color_primitive(1, 1, 2), InvalidSpec);
  CHECK_THROWS_AS(expand_color_primitive(2, 1, 3), InvalidSpec);
}

TEST_CASE("color primitive agrees numerically with a cofactor determinant") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Values v = random_values(4, seed);
    for (auto [p, q, r] : {std::array{1, 2, 3}, {1, 2, 4}, {1, 3, 4}, {2, 3, 4}}) {
      const double poly = eval_point_poly(expand_color_primitive(p, q, r), v);
      CHECK(poly == doctest::Approx(det3(v, p, q, r)).epsilon(1e-12));
    }
  }
}

TEST_CASE("determinant antisymmetry under column swaps") {
  const auto c = expand_color_primitive(1, 2, 3);
  CHECK(channel_determinant({2, 1, 3}) == -c);
  CHECK(channel_determinant({1, 3, 2}) == -c);
  CHECK(channel_determinant({3, 2, 1}) == -c);
  CHECK(channel_determinant({2, 3, 1}) == c);
  CHECK(channel_determinant({1, 2, 3}) == c);
}

TEST_CASE("instance 3 numerator is the six-term worked polynomial") {
  const InvariantSpec& spec = table1_specs()[2];
  REQUIRE(spec.id == 3);
  REQUIRE(spec.k == 0);
  const MomentPolynomial expected = MomentPolynomial::from_terms({
      term(6, {m(0, 2, 0, 0, 1), m(1, 1, 0, 1, 0), m(2, 0, 1, 0, 0)}),
      term(-6, {m(0, 2, 0, 0, 1), m(1, 1, 1, 0, 0), m(2, 0, 0, 1, 0)}),
      term(-6, {m(0, 2, 0, 1, 0), m(1, 1, 0, 0, 1), m(2, 0, 1, 0, 0)}),
      term(6, {m(0, 2, 0, 1, 0), m(1, 1, 1, 0, 0), m(2, 0, 0, 0, 1)}),
      term(6, {m(0, 2, 1, 0, 0), m(1, 1, 0, 0, 1), m(2, 0, 0, 1, 0)}),
      term(-6, {m(0, 2, 1, 0, 0), m(1, 1, 0, 1, 0), m(2, 0, 0, 0, 1)}),
  });
  CHECK(spec.numerator.size() == 6);
  CHECK(spec.numerator == expected);
}

TEST_CASE("denominator polynomial has the five quadratic color terms") {
  const MomentPolynomial expected = MomentPolynomial::from_terms({
      term(6, {m(0, 0, 0, 0, 2), m(0, 0, 0, 2, 0), m(0, 0, 2, 0, 0)}),
      term(-6, {m(0, 0, 0, 0, 2), m(0, 0, 1, 1, 0), m(0, 0, 1, 1, 0)}),
      term(-6, {m(0, 0, 0, 1, 1), m(0, 0, 0, 1, 1), m(0, 0, 2, 0, 0)}),
      term(12, {m(0, 0, 0, 1, 1), m(0, 0, 1, 0, 1), m(0, 0, 1, 1, 0)}),
      term(-6, {m(0, 0, 0, 2, 0), m(0, 0, 1, 0, 1), m(0, 0, 1, 0, 1)}),
  });
  const auto& d = denominator_polynomial();
  REQUIRE(d.size() == 5);
  CHECK(d == expected);
  std::vector<std::int64_t> coeffs;
  for (const auto& t : d.terms()) coeffs.push_back(t.coefficient);
  CHECK(coeffs == std::vector<std::int64_t>{6, -6, -6, 12, -6});
  CHECK(d == expand_core(denominator_core()));
}

TEST_CASE("denominator on unit pure second moments and zero cross moments is 6") {
  const double v = static_cast<double>(denominator_polynomial().evaluate([](const MomentIndex& i) {
    const bool pure = i.alpha == 2 || i.beta == 2 || i.gamma == 2;
    return pure ? 1.0 : 0.0;
  }));
  CHECK(v == 6.0);
}

TEST_CASE("empty core expands to the area moment") {
  const CoreSpec empty;
  const MomentPolynomial p = expand_core(empty);
  REQUIRE(p.size() == 1);
  CHECK(p.terms()[0].coefficient == 1);
  CHECK(p.terms()[0].factors == std::vector<MomentIndex>{m(0, 0, 0, 0, 0)});
  const auto e = normalization_exponents(empty);
  CHECK(e.area == Rational(1));
  CHECK(e.denominator == Rational(0));
}

TEST_CASE("normalization exponents for instances 3 and 25") {
  const auto& specs = table1_specs();
  CHECK(specs[2].area_exponent == Rational(9, 2));
  CHECK(specs[2].denom_exponent == Rational(1, 2));
  const CoreSpec& c25 = specs[24].core;
  CHECK(c25.shape_points() == 4);
  CHECK(c25.shape_degree() == 8);
  CHECK(c25.color_points() == 3);  // one triple spans three points
  CHECK(c25.degree() == 4);
  CHECK(c25.color_degree() == 1);
  CHECK(specs[24].area_exponent == Rational(21, 2));
  CHECK(specs[24].denom_exponent == Rational(1, 2));
}

TEST_CASE("exponent uses max(n, N) when shape and color point counts differ") {
  CoreSpec spec;
  spec.shape_factors = {{1, 2, 2}};
  spec.color_triples = {{1, 2, 3, 1}};
  CHECK(spec.shape_points() == 2);
  CHECK(spec.color_points() == 3);
  CHECK(normalization_exponents(spec).area == Rational(3 + 2) - Rational(3, 2));
}

TEST_CASE("table rows 1 and 16 match the printed construction") {
  const auto& specs = table1_specs();
  REQUIRE(specs.size() == 50);
  const CoreSpec& r1 = specs[0].core;
  REQUIRE(r1.shape_factors.size() == 2);
  CHECK(r1.shape_factors[0].i == 1);
  CHECK(r1.shape_factors[0].j == 2);
  CHECK(r1.shape_factors[0].exponent == 1);
  CHECK(r1.shape_factors[1].i == 1);
  CHECK(r1.shape_factors[1].j == 3);
  CHECK(r1.shape_factors[1].exponent == 2);
  REQUIRE(r1.color_triples.size() == 1);
  CHECK(r1.color_triples[0].p == 1);
  CHECK(r1.color_triples[0].q == 2);
  CHECK(r1.color_triples[0].r == 3);

  const CoreSpec& r16 = specs[15].core;
  std::vector<std::array<int, 3>> shape;
  for (const auto& f : r16.shape_factors) shape.push_back({f.i, f.j, f.exponent});
  CHECK(shape == std::vector<std::array<int, 3>>{{1, 2, 1}, {2, 3, 1}, {3, 4, 2}, {1, 4, 1}});
  REQUIRE(r16.color_triples.size() == 1);
  CHECK(r16.color_triples[0].p == 1);
  CHECK(r16.color_triples[0].q == 3);
  CHECK(r16.color_triples[0].r == 4);
}

TEST_CASE("specs 26..50 mirror 1..25 with k = 1") {
  const auto& specs = table1_specs();
  for (std::size_t i = 0; i < 25; ++i) {
    const auto& a = specs[i];
    const auto& b = specs[i + 25];
    CHECK(a.k == 0);
    CHECK(b.k == 1);
    CHECK(a.id == static_cast<int>(i) + 1);
    CHECK(b.id == a.id);
    CHECK(b.core.k == 1);
    CHECK(b.numerator == a.numerator);
    CHECK(b.area_exponent == a.area_exponent);
    REQUIRE(b.core.shape_factors.size() == a.core.shape_factors.size());
    for (std::size_t f = 0; f < a.core.shape_factors.size(); ++f) {
      CHECK(b.core.shape_factors[f].i == a.core.shape_factors[f].i);
      CHECK(b.core.shape_factors[f].j == a.core.shape_factors[f].j);
      CHECK(b.core.shape_factors[f].exponent == a.core.shape_factors[f].exponent);
    }
  }
}

TEST_CASE("every table numerator has color order 1 per point and degree M = 1") {
  for (const auto& spec : table1_specs()) {
    CHECK(spec.core.color_degree() == 1);
    CHECK(spec.denom_exponent == Rational(1, 2));
    for (const auto& t : spec.numerator.terms()) {
      CHECK(t.coefficient != 0);
      for (const auto& f : t.factors) CHECK(f.color_order() <= 1);
    }
  }
}

TEST_CASE("row 18 as printed expands to the zero polynomial") {
  CHECK(table1_specs()[17].numerator.empty());
  CHECK(table1_specs()[42].numerator.empty());
}

TEST_CASE("expansion is canonical and idempotent") {
  const auto cores = table1_cores();
  for (const auto& core : cores) {
    const MomentPolynomial a = expand_core(core);
    const MomentPolynomial b = expand_core(core);
    CHECK(a == b);
    CHECK(serialize_polynomial(a) == serialize_polynomial(b));
    for (std::size_t t = 0; t < a.terms().size(); ++t) {
      const auto& f = a.terms()[t].factors;
      CHECK(std::is_sorted(f.begin(), f.end()));
      if (t > 0) CHECK(a.terms()[t - 1].factors < f);
    }
  }
}

TEST_CASE("exponent on a factor equals repeated factors") {
  CoreSpec squared;
  squared.shape_factors = {{1, 3, 2}};
  squared.color_triples = {{1, 2, 3, 1}};
  CoreSpec repeated;
  repeated.shape_factors = {{1, 3, 1}, {1, 3, 1}};
  repeated.color_triples = {{1, 2, 3, 1}};
  CHECK(expand_core(squared) == expand_core(repeated));
}

TEST_CASE("from_terms merges equal factor multisets and drops zeros") {
  const MomentPolynomial p = MomentPolynomial::from_terms({
      term(3, {m(1, 0, 0, 0, 0), m(0, 1, 0, 0, 0)}),
      term(-3, {m(0, 1, 0, 0, 0), m(1, 0, 0, 0, 0)}),
      term(2, {m(0, 0, 1, 0, 0)}),
      term(5, {m(0, 0, 1, 0, 0)}),
      term(0, {m(2, 0, 0, 0, 0)}),
  });
  REQUIRE(p.size() == 1);
  CHECK(p.terms()[0].coefficient == 7);
}

TEST_CASE("serialization matches the line format") {
  const MomentPolynomial p =
      MomentPolynomial::from_terms({term(6, {m(0, 2, 0, 0, 1), m(1, 1, 0, 1, 0), m(2, 0, 1, 0, 0)})});
  CHECK(serialize_polynomial(p) == "6 0,2,0,0,1 1,1,0,1,0 2,0,1,0,0\n");
  CHECK(to_string(m(1, 2, 3, 4, 5)) == "1,2,3,4,5");
}

TEST_CASE("parse inverts serialize for every generated polynomial") {
  for (const auto& spec : table1_specs()) {
    CHECK(parse_polynomial(serialize_polynomial(spec.numerator)) == spec.numerator);
  }
  CHECK(parse_polynomial(serialize_polynomial(denominator_polynomial())) ==
        denominator_polynomial());
}

TEST_CASE("malformed polynomial text reports the line") {
  CHECK_THROWS_AS(parse_polynomial("x 1,2"), ParseError);
  try {
    parse_polynomial("6 0,2,0,0,1\n-6 0,2,0\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
  CHECK_THROWS_AS(parse_polynomial("6 0,2,0,0,-1"), ParseError);
  CHECK_THROWS_AS(parse_polynomial("6 0,2,0,0,1,4"), ParseError);
}

TEST_CASE("invalid core specs are rejected") {
  CoreSpec bad_pair;
  bad_pair.shape_factors = {{2, 1, 1}};
  CHECK_THROWS_AS(bad_pair.validate(), InvalidSpec);
  CHECK_THROWS_AS(expand_core(bad_pair), InvalidSpec);

  CoreSpec bad_exp;
  bad_exp.shape_factors = {{1, 2, 0}};
  CHECK_THROWS_AS(bad_exp.validate(), InvalidSpec);

  CoreSpec bad_triple;
  bad_triple.color_triples = {{1, 3, 2, 1}};
  CHECK_THROWS_AS(bad_triple.validate(), InvalidSpec);

  CoreSpec bad_k;
  bad_k.k = 2;
  CHECK_THROWS_AS(bad_k.validate(), InvalidSpec);
}

TEST_CASE("derived core counts for instance 3") {
  const CoreSpec& c = table1_specs()[2].core;
  CHECK(c.shape_points() == 3);
  CHECK(c.shape_degree() == 3);
  CHECK(c.color_points() == 3);
  CHECK(c.color_degree() == 1);
  CHECK(c.shape_multiplicity(1) == 2);
  CHECK(c.shape_multiplicity(2) == 2);
  CHECK(c.shape_multiplicity(3) == 2);
  CHECK(c.color_multiplicity(1) == 1);
  CHECK(c.degree() == 3);
}

TEST_CASE("point polynomial arithmetic") {
  const auto x1 = PointPolynomial::variable(2, {1, Var::X});
  const auto y2 = PointPolynomial::variable(2, {2, Var::Y});
  const auto sum = x1 + y2;
  const auto sq = sum.pow(2);
  CHECK(sq.size() == 3);
  CHECK(sq.coefficient({{{1, Var::X}, 1}, {{2, Var::Y}, 1}}) == 2);
  CHECK((sum - sum).size() == 0);
  CHECK(sum * PointPolynomial::constant(2, 3) == sum + sum + sum);
  // Mixed widths widen to the larger point count.
  const auto r3 = PointPolynomial::variable(3, {3, Var::R});
  CHECK((x1 * r3).num_points() == 3);
}

}  // TEST_SUITE
