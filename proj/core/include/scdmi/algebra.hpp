#pragma once

// Symbolic construction of shape-color moment invariants.
//
// An invariant's numerator is the integral, over w independent image points,
// of a product of shape primitives (2x2 coordinate determinants) and color
// primitives (3x3 channel determinants). Expanding that product and
// integrating each point separately turns it into a polynomial over
// generalized moments SCM^k_{p q alpha beta gamma}. Everything here is exact
// integer / rational arithmetic.

#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

namespace scdmi {

using Rational = boost::rational<std::int64_t>;

enum class Var : std::uint8_t { X = 0, Y = 1, R = 2, G = 3, B = 4 };
inline constexpr int kVarsPerPoint = 5;

// One integrand variable: a centered coordinate or channel value at a point.
// Points are 1-based.
struct PointVar {
  int point;
  Var kind;

  auto operator<=>(const PointVar&) const = default;
};

// Integer polynomial over PointVars. Exponents are stored point-major,
// kVarsPerPoint entries per point.
class PointPolynomial {
 public:
  using Exponents = std::vector<std::uint8_t>;

  explicit PointPolynomial(int num_points = 1);

  static PointPolynomial constant(int num_points, std::int64_t value);
  static PointPolynomial variable(int num_points, PointVar v);

  int num_points() const noexcept { return num_points_; }
  const std::map<Exponents, std::int64_t>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }

  // Coefficient of the monomial prod v^e; variables not listed have exponent 0.
  std::int64_t coefficient(const std::vector<std::pair<PointVar, int>>& monomial) const;

  PointPolynomial operator+(const PointPolynomial& rhs) const;
  PointPolynomial operator-(const PointPolynomial& rhs) const;
  PointPolynomial operator*(const PointPolynomial& rhs) const;
  PointPolynomial operator-() const;
  PointPolynomial pow(int exponent) const;

  bool operator==(const PointPolynomial& rhs) const;

 private:
  PointPolynomial widened(int num_points) const;
  void add_term(Exponents e, std::int64_t c);

  int num_points_;
  std::map<Exponents, std::int64_t> terms_;
};

// S(i,j) = X_i Y_j - X_j Y_i.
struct ShapeFactor {
  int i;
  int j;
  int exponent = 1;
};

// C(p,q,r) = det [R;G;B] over columns p,q,r.
struct ColorFactor {
  int p;
  int q;
  int r;
  int exponent = 1;
};

// Product of shape and color primitives over points 1..point_count().
// n, m, N, M and the per-point multiplicities are always derived from the
// factor lists.
struct CoreSpec {
  std::vector<ShapeFactor> shape_factors;
  std::vector<ColorFactor> color_triples;
  int k = 0;

  // Throws InvalidSpec on unordered pairs/triples, nonpositive points or
  // exponents, or k outside {0, 1}.
  void validate() const;

  int shape_points() const;  // n
  int shape_degree() const;  // m
  int color_points() const;  // N
  int color_degree() const;  // M
  int shape_multiplicity(int point) const;  // d_i
  int color_multiplicity(int point) const;  // D_i
  // max(n, N), at least 1 (the empty core integrates over a single point).
  int degree() const;
  // Number of integration points: the largest point label used, at least 1.
  int point_count() const;
};

struct MomentIndex {
  int p = 0;
  int q = 0;
  int alpha = 0;
  int beta = 0;
  int gamma = 0;

  auto operator<=>(const MomentIndex&) const = default;
  int shape_order() const noexcept { return p + q; }
  int color_order() const noexcept { return alpha + beta + gamma; }
};

struct MonomialTerm {
  std::int64_t coefficient = 0;
  std::vector<MomentIndex> factors;  // sorted

  bool operator==(const MonomialTerm&) const = default;
};

class MomentPolynomial {
 public:
  MomentPolynomial() = default;

  // Sorts factors, merges equal factor multisets and drops zero terms.
  static MomentPolynomial from_terms(std::vector<MonomialTerm> terms);

  const std::vector<MonomialTerm>& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }

  // Distinct moment indices referenced, ascending.
  std::vector<MomentIndex> indices() const;

  // Sum of coefficient * prod lookup(index). `lookup` maps MomentIndex to a
  // floating value.
  template <class Lookup>
  long double evaluate(Lookup&& lookup) const {
    long double sum = 0.0L;
    long double compensation = 0.0L;
    for (const auto& term : terms_) {
      long double product = static_cast<long double>(term.coefficient);
      for (const auto& index : term.factors) {
        product *= static_cast<long double>(lookup(index));
      }
      const long double t = sum + product;
      if (std::abs(sum) >= std::abs(product)) {
        compensation += (sum - t) + product;
      } else {
        compensation += (product - t) + sum;
      }
      sum = t;
    }
    return sum + compensation;
  }

  bool operator==(const MomentPolynomial&) const = default;

 private:
  std::vector<MonomialTerm> terms_;
};

struct NormalizationExponents {
  Rational area;         // exponent of the area moment m00
  Rational denominator;  // exponent of the quadratic color core D2
};

// One row of the invariant table for a given derivative order.
struct InvariantSpec {
  int id = 0;  // 1..25 within its k
  int k = 0;
  CoreSpec core;
  MomentPolynomial numerator;
  Rational area_exponent;
  Rational denom_exponent;
};

PointPolynomial expand_shape_primitive(int i, int j);
PointPolynomial expand_color_primitive(int p, int q, int r);
// Determinant over any three distinct columns, in the given column order.
PointPolynomial channel_determinant(std::array<int, 3> columns);

PointPolynomial expand_core_integrand(const CoreSpec& spec);
MomentPolynomial expand_core(const CoreSpec& spec);

// scCore_k(3,2;2,2,2) = C(1,2,3)^2.
CoreSpec denominator_core(int k = 0);
const MomentPolynomial& denominator_polynomial();

NormalizationExponents normalization_exponents(const CoreSpec& spec);

InvariantSpec make_invariant(int id, CoreSpec core);

// The 25 table cores for k = 0, in row order.
std::vector<CoreSpec> table1_cores();
// 25 k=0 specs followed by the same 25 cores with k=1.
const std::vector<InvariantSpec>& table1_specs();

std::string serialize_polynomial(const MomentPolynomial& poly);
MomentPolynomial parse_polynomial(std::string_view text);

std::string to_string(const MomentIndex& index);

}  // namespace scdmi
