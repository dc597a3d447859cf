#include "scdmi/algebra.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <sstream>

#include "scdmi/error.hpp"

namespace scdmi {

namespace {

std::size_t slot(PointVar v) {
  return static_cast<std::size_t>(v.point - 1) * kVarsPerPoint +
         static_cast<std::size_t>(v.kind);
}

}  // namespace

// ---------------------------------------------------------------------------
// PointPolynomial

PointPolynomial::PointPolynomial(int num_points) : num_points_(num_points) {
  if (num_points < 1) throw InvalidSpec("point polynomial needs at least one point");
}

PointPolynomial PointPolynomial::constant(int num_points, std::int64_t value) {
  PointPolynomial out(num_points);
  out.add_term(Exponents(static_cast<std::size_t>(num_points) * kVarsPerPoint, 0), value);
  return out;
}

PointPolynomial PointPolynomial::variable(int num_points, PointVar v) {
  if (v.point < 1 || v.point > num_points) {
    throw InvalidSpec("point index " + std::to_string(v.point) + " outside 1.." +
                      std::to_string(num_points));
  }
  PointPolynomial out(num_points);
  Exponents e(static_cast<std::size_t>(num_points) * kVarsPerPoint, 0);
  e[slot(v)] = 1;
  out.add_term(std::move(e), 1);
  return out;
}

void PointPolynomial::add_term(Exponents e, std::int64_t c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(std::move(e), c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

PointPolynomial PointPolynomial::widened(int num_points) const {
  if (num_points <= num_points_) return *this;
  PointPolynomial out(num_points);
  const std::size_t width = static_cast<std::size_t>(num_points) * kVarsPerPoint;
  for (const auto& [e, c] : terms_) {
    Exponents wide(e);
    wide.resize(width, 0);
    out.terms_.emplace(std::move(wide), c);
  }
  return out;
}

std::int64_t PointPolynomial::coefficient(
    const std::vector<std::pair<PointVar, int>>& monomial) const {
  Exponents e(static_cast<std::size_t>(num_points_) * kVarsPerPoint, 0);
  for (const auto& [v, power] : monomial) {
    if (v.point < 1 || v.point > num_points_) return 0;
    e[slot(v)] = static_cast<std::uint8_t>(e[slot(v)] + power);
  }
  const auto it = terms_.find(e);
  return it == terms_.end() ? 0 : it->second;
}

PointPolynomial PointPolynomial::operator+(const PointPolynomial& rhs) const {
  const int n = std::max(num_points_, rhs.num_points_);
  PointPolynomial out = widened(n);
  for (const auto& [e, c] : rhs.widened(n).terms_) out.add_term(e, c);
  return out;
}

PointPolynomial PointPolynomial::operator-() const {
  PointPolynomial out(num_points_);
  for (const auto& [e, c] : terms_) out.terms_.emplace(e, -c);
  return out;
}

PointPolynomial PointPolynomial::operator-(const PointPolynomial& rhs) const {
  return *this + (-rhs);
}

PointPolynomial PointPolynomial::operator*(const PointPolynomial& rhs) const {
  const int n = std::max(num_points_, rhs.num_points_);
  const PointPolynomial a = widened(n);
  const PointPolynomial b = rhs.widened(n);
  PointPolynomial out(n);
  for (const auto& [ea, ca] : a.terms_) {
    for (const auto& [eb, cb] : b.terms_) {
      Exponents e(ea.size());
      for (std::size_t s = 0; s < e.size(); ++s) {
        e[s] = static_cast<std::uint8_t>(ea[s] + eb[s]);
      }
      out.add_term(std::move(e), ca * cb);
    }
  }
  return out;
}

PointPolynomial PointPolynomial::pow(int exponent) const {
  if (exponent < 0) throw InvalidSpec("negative exponent");
  PointPolynomial out = constant(num_points_, 1);
  for (int i = 0; i < exponent; ++i) out = out * *this;
  return out;
}

bool PointPolynomial::operator==(const PointPolynomial& rhs) const {
  const int n = std::max(num_points_, rhs.num_points_);
  return widened(n).terms_ == rhs.widened(n).terms_;
}

// ---------------------------------------------------------------------------
// Primitives

PointPolynomial expand_shape_primitive(int i, int j) {
  if (i < 1 || i >= j) {
    throw InvalidSpec("shape primitive S(" + std::to_string(i) + "," + std::to_string(j) +
                      ") needs 1 <= i < j");
  }
  const auto var = [j](int point, Var kind) { return PointPolynomial::variable(j, {point, kind}); };
  return var(i, Var::X) * var(j, Var::Y) - var(j, Var::X) * var(i, Var::Y);
}

PointPolynomial channel_determinant(std::array<int, 3> columns) {
  const auto [p, q, r] = columns;
  if (p < 1 || q < 1 || r < 1 || p == q || q == r || p == r) {
    throw InvalidSpec("channel determinant needs three distinct positive points");
  }
  const int n = std::max({p, q, r});
  const auto var = [n](int point, Var kind) { return PointPolynomial::variable(n, {point, kind}); };

  // Leibniz expansion over permutations of the columns; rows are R, G, B.
  constexpr std::array<std::array<int, 3>, 6> kPerms = {{
      {0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  constexpr std::array<int, 6> kSigns = {1, -1, -1, 1, 1, -1};

  PointPolynomial det(n);
  for (std::size_t s = 0; s < kPerms.size(); ++s) {
    const auto& perm = kPerms[s];
    PointPolynomial term = var(columns[perm[0]], Var::R) * var(columns[perm[1]], Var::G) *
                           var(columns[perm[2]], Var::B);
    det = kSigns[s] > 0 ? det + term : det - term;
  }
  return det;
}

PointPolynomial expand_color_primitive(int p, int q, int r) {
  if (p < 1 || !(p < q && q < r)) {
    throw InvalidSpec("color primitive C(" + std::to_string(p) + "," + std::to_string(q) + "," +
                      std::to_string(r) + ") needs 1 <= p < q < r");
  }
  return channel_determinant({p, q, r});
}

// ---------------------------------------------------------------------------
// CoreSpec

void CoreSpec::validate() const {
  if (k != 0 && k != 1) throw InvalidSpec("derivative order k must be 0 or 1");
  for (const auto& f : shape_factors) {
    if (f.i < 1 || f.i >= f.j) throw InvalidSpec("shape factor needs 1 <= i < j");
    if (f.exponent < 1) throw InvalidSpec("shape factor exponent must be positive");
  }
  for (const auto& f : color_triples) {
    if (f.p < 1 || !(f.p < f.q && f.q < f.r)) {
      throw InvalidSpec("color factor needs 1 <= p < q < r");
    }
    if (f.exponent < 1) throw InvalidSpec("color factor exponent must be positive");
  }
}

int CoreSpec::shape_points() const {
  std::set<int> points;
  for (const auto& f : shape_factors) points.insert({f.i, f.j});
  return static_cast<int>(points.size());
}

int CoreSpec::shape_degree() const {
  int m = 0;
  for (const auto& f : shape_factors) m += f.exponent;
  return m;
}

int CoreSpec::color_points() const {
  std::set<int> points;
  for (const auto& f : color_triples) points.insert({f.p, f.q, f.r});
  return static_cast<int>(points.size());
}

int CoreSpec::color_degree() const {
  int m = 0;
  for (const auto& f : color_triples) m += f.exponent;
  return m;
}

int CoreSpec::shape_multiplicity(int point) const {
  int d = 0;
  for (const auto& f : shape_factors) {
    if (f.i == point || f.j == point) d += f.exponent;
  }
  return d;
}

int CoreSpec::color_multiplicity(int point) const {
  int d = 0;
  for (const auto& f : color_triples) {
    if (f.p == point || f.q == point || f.r == point) d += f.exponent;
  }
  return d;
}

int CoreSpec::degree() const { return std::max({shape_points(), color_points(), 1}); }

int CoreSpec::point_count() const {
  int w = 1;
  for (const auto& f : shape_factors) w = std::max(w, f.j);
  for (const auto& f : color_triples) w = std::max(w, f.r);
  return w;
}

// ---------------------------------------------------------------------------
// Expansion

PointPolynomial expand_core_integrand(const CoreSpec& spec) {
  spec.validate();
  const int w = spec.point_count();
  PointPolynomial integrand = PointPolynomial::constant(w, 1);
  for (const auto& f : spec.shape_factors) {
    integrand = integrand * expand_shape_primitive(f.i, f.j).pow(f.exponent);
  }
  for (const auto& f : spec.color_triples) {
    integrand = integrand * expand_color_primitive(f.p, f.q, f.r).pow(f.exponent);
  }
  return integrand;
}

MomentPolynomial expand_core(const CoreSpec& spec) {
  const PointPolynomial integrand = expand_core_integrand(spec);
  const int w = integrand.num_points();

  // Points are integrated independently, so each monomial factorizes into
  // one moment per point.
  std::vector<MonomialTerm> terms;
  terms.reserve(integrand.size());
  for (const auto& [e, c] : integrand.terms()) {
    MonomialTerm term{c, {}};
    term.factors.reserve(static_cast<std::size_t>(w));
    for (int pt = 0; pt < w; ++pt) {
      const std::size_t base = static_cast<std::size_t>(pt) * kVarsPerPoint;
      term.factors.push_back(MomentIndex{e[base + 0], e[base + 1], e[base + 2], e[base + 3],
                                         e[base + 4]});
    }
    terms.push_back(std::move(term));
  }
  return MomentPolynomial::from_terms(std::move(terms));
}

MomentPolynomial MomentPolynomial::from_terms(std::vector<MonomialTerm> terms) {
  std::map<std::vector<MomentIndex>, std::int64_t> merged;
  for (auto& t : terms) {
    std::sort(t.factors.begin(), t.factors.end());
    merged[std::move(t.factors)] += t.coefficient;
  }
  MomentPolynomial out;
  out.terms_.reserve(merged.size());
  for (auto& [factors, c] : merged) {
    if (c != 0) out.terms_.push_back(MonomialTerm{c, factors});
  }
  return out;
}

std::vector<MomentIndex> MomentPolynomial::indices() const {
  std::set<MomentIndex> all;
  for (const auto& t : terms_) all.insert(t.factors.begin(), t.factors.end());
  return {all.begin(), all.end()};
}

CoreSpec denominator_core(int k) {
  CoreSpec spec;
  spec.color_triples = {{1, 2, 3, 2}};
  spec.k = k;
  return spec;
}

const MomentPolynomial& denominator_polynomial() {
  static const MomentPolynomial poly = expand_core(denominator_core(0));
  return poly;
}

NormalizationExponents normalization_exponents(const CoreSpec& spec) {
  spec.validate();
  const Rational m(spec.shape_degree());
  const Rational color(spec.color_degree());
  return NormalizationExponents{Rational(spec.degree()) + m - Rational(3, 2) * color,
                                color / Rational(2)};
}

InvariantSpec make_invariant(int id, CoreSpec core) {
  InvariantSpec spec;
  spec.id = id;
  spec.k = core.k;
  spec.numerator = expand_core(core);
  const auto exps = normalization_exponents(core);
  spec.area_exponent = exps.area;
  spec.denom_exponent = exps.denominator;
  spec.core = std::move(core);
  return spec;
}

std::vector<CoreSpec> table1_cores() {
  using S = ShapeFactor;
  using C = ColorFactor;
  const C c123{1, 2, 3}, c124{1, 2, 4}, c134{1, 3, 4}, c234{2, 3, 4};
  // (x4 y1 - x1 y4) is stored as S(1,4); its sign flip is absorbed in the
  // invariant's sign. Row 9's last factor is S(3,4).
  return {
      {{S{1, 2}, S{1, 3, 2}}, {c123}},
      {{S{1, 2}, S{1, 3, 3}}, {c123}},
      {{S{1, 2}, S{1, 3}, S{2, 3}}, {c123}},
      {{S{1, 2}, S{1, 3}, S{2, 3, 3}}, {c123}},
      {{S{1, 2, 2}, S{1, 3, 2}, S{2, 3}}, {c123}},
      {{S{1, 2}, S{2, 3}, S{3, 4}}, {c124}},
      {{S{1, 2}, S{2, 3}, S{3, 4, 3}}, {c124}},
      {{S{1, 2}, S{2, 3}, S{3, 4, 3}}, {c134}},
      {{S{1, 2, 2}, S{2, 3}, S{3, 4}}, {c123}},
      {{S{1, 2, 2}, S{2, 3}, S{3, 4, 3}}, {c124}},
      {{S{1, 2, 2}, S{2, 3}, S{3, 4, 3}}, {c234}},
      {{S{1, 2, 3}, S{2, 3}, S{3, 4, 3}}, {c124}},
      {{S{1, 2}, S{2, 3, 2}, S{3, 4, 2}}, {c123}},
      {{S{1, 2}, S{2, 3, 2}, S{3, 4, 2}}, {c124}},
      {{S{1, 2}, S{2, 3, 3}, S{3, 4}}, {c124}},
      {{S{1, 2}, S{2, 3}, S{3, 4, 2}, S{1, 4}}, {c134}},
      {{S{1, 2, 2}, S{2, 3}, S{3, 4, 3}, S{1, 4}}, {c123}},
      {{S{1, 2}, S{1, 3}, S{1, 4}}, {c124}},
      {{S{1, 2}, S{1, 3}, S{1, 4}, S{3, 4, 3}}, {c124}},
      {{S{1, 2}, S{1, 3, 2}, S{1, 4}, S{3, 4, 2}}, {c234}},
      {{S{1, 2, 2}, S{1, 3}, S{1, 4}, S{3, 4}}, {c123}},
      {{S{1, 2, 2}, S{1, 3}, S{1, 4}, S{3, 4, 3}}, {c123}},
      {{S{1, 2, 2}, S{1, 3}, S{1, 4}, S{3, 4, 3}}, {c124}},
      {{S{1, 2}, S{2, 3}, S{3, 4, 2}, S{1, 4}, S{2, 4}}, {c124}},
      {{S{1, 2, 2}, S{2, 3}, S{3, 4, 2}, S{1, 4, 2}, S{2, 4}}, {c124}},
  };
}

const std::vector<InvariantSpec>& table1_specs() {
  static const std::vector<InvariantSpec> specs = [] {
    std::vector<InvariantSpec> out;
    const auto cores = table1_cores();
    out.reserve(2 * cores.size());
    for (std::size_t i = 0; i < cores.size(); ++i) {
      out.push_back(make_invariant(static_cast<int>(i) + 1, cores[i]));
    }
    // The expansion is channel-agnostic: k=1 reuses the k=0 polynomial and
    // only swaps the channel set at evaluation time.
    for (std::size_t i = 0; i < cores.size(); ++i) {
      InvariantSpec s = out[i];
      s.k = 1;
      s.core.k = 1;
      out.push_back(std::move(s));
    }
    return out;
  }();
  return specs;
}

// ---------------------------------------------------------------------------
// Text format

std::string to_string(const MomentIndex& index) {
  return std::to_string(index.p) + "," + std::to_string(index.q) + "," +
         std::to_string(index.alpha) + "," + std::to_string(index.beta) + "," +
         std::to_string(index.gamma);
}

std::string serialize_polynomial(const MomentPolynomial& poly) {
  std::string out;
  for (const auto& term : poly.terms()) {
    out += std::to_string(term.coefficient);
    for (const auto& f : term.factors) {
      out += ' ';
      out += to_string(f);
    }
    out += '\n';
  }
  return out;
}

namespace {

template <class Int>
bool parse_int(std::string_view token, Int& value) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  return ec == std::errc() && ptr == token.data() + token.size() && !token.empty();
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

}  // namespace

MomentPolynomial parse_polynomial(std::string_view text) {
  std::vector<MonomialTerm> terms;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;

    MonomialTerm term;
    if (!parse_int(tokens[0], term.coefficient)) {
      throw ParseError(line_no, "bad coefficient '" + std::string(tokens[0]) + "'");
    }
    if (term.coefficient == 0) throw ParseError(line_no, "zero coefficient");
    if (tokens.size() < 2) throw ParseError(line_no, "term has no moment factors");

    for (std::size_t t = 1; t < tokens.size(); ++t) {
      std::array<int, 5> fields{};
      std::string_view rest = tokens[t];
      for (std::size_t f = 0; f < fields.size(); ++f) {
        const std::size_t comma = rest.find(',');
        const bool last = f + 1 == fields.size();
        if (last != (comma == std::string_view::npos)) {
          throw ParseError(line_no, "moment index '" + std::string(tokens[t]) +
                                        "' must have 5 comma-separated fields");
        }
        const std::string_view field = rest.substr(0, comma);
        if (!parse_int(field, fields[f]) || fields[f] < 0) {
          throw ParseError(line_no, "bad moment index '" + std::string(tokens[t]) + "'");
        }
        if (!last) rest = rest.substr(comma + 1);
      }
      term.factors.push_back({fields[0], fields[1], fields[2], fields[3], fields[4]});
    }
    terms.push_back(std::move(term));
  }
  return MomentPolynomial::from_terms(std::move(terms));
}

}  // namespace scdmi
