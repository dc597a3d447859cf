#include <cmath>

#include "doctest.h"
#include "scdmi/algebra.hpp"
#include "scdmi/error.hpp"
#include "scdmi/moments.hpp"
#include "scdmi/oracle.hpp"
#include "scdmi/synthetic.hpp"
#include "scdmi/transforms.hpp"
#include "support.hpp"

using namespace scdmi;

namespace {

double polynomial_core(const RasterImage& img, const CoreSpec& core) {
  const MomentPolynomial p = expand_core(core);
  const MomentTable t = compute_moment_table(make_channel_set(img, core.k), p.indices());
  return static_cast<double>(p.evaluate([&](const MomentIndex& ix) { return t.at(ix); }));
}

InvariantValue polynomial_invariant(const RasterImage& img, const InvariantSpec& spec) {
  std::vector<MomentIndex> needed = spec.numerator.indices();
  for (const auto& ix : denominator_polynomial().indices()) needed.push_back(ix);
  return evaluate_invariant(spec, compute_moment_table(make_channel_set(img, spec.k), needed));
}

RasterImage noise(std::uint64_t i, int size = 6) {
  return random_noise_image(derive_seed(0, 0x0AC1E, i), size, size);
}

bool structurally_zero(const InvariantSpec& spec) {
  return spec.numerator.empty() || spec.id == 9;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("any spec on a single-pixel domain integrates to 0") {
  RasterImage one(1, 1);
  one.r[0] = 0.3;
  one.g[0] = 0.5;
  one.b[0] = 0.9;
  for (std::size_t s = 0; s < kInvariantsPerOrder; ++s) {
    CHECK(brute_force_core_integral(one, table1_specs()[s].core) == 0.0);
  }
  CHECK(brute_force_core_integral(one, denominator_core()) == 0.0);
}

TEST_CASE("denominator core is nonnegative") {
  for (std::uint64_t i = 0; i < 5; ++i) {
    CHECK(brute_force_core_integral(noise(i), denominator_core(0)) >= 0.0);
    CHECK(brute_force_core_integral(random_noise_image(i, 7, 7), denominator_core(1)) >= 0.0);
  }
}

TEST_CASE("instance 3 numerator equals the polynomial on a random 6x6 image") {
  const RasterImage img = noise(0);
  const CoreSpec& core = table1_specs()[2].core;
  const double oracle = brute_force_core_integral(img, core);
  const double poly = polynomial_core(img, core);
  CHECK(std::abs(poly - oracle) <= 1e-9 * std::abs(oracle));
}

TEST_CASE("every table core equals its polynomial on five random images") {
  for (std::uint64_t i = 0; i < 5; ++i) {
    const RasterImage img = noise(i);
    for (const auto& spec : table1_specs()) {
      CoreSpec core = spec.core;
      const double oracle = brute_force_core_integral(img, core);
      const double poly = polynomial_core(img, core);
      CAPTURE(spec.id);
      CAPTURE(spec.k);
      CHECK(std::abs(poly - oracle) <= 1e-9 * std::max(1.0, std::abs(oracle)));
    }
  }
}

TEST_CASE("k = 0 invariants match the oracle to 1e-9 relative on 6x6 images") {
  for (std::uint64_t i = 0; i < 5; ++i) {
    const RasterImage img = noise(i);
    for (std::size_t s = 0; s < kInvariantsPerOrder; ++s) {
      const InvariantSpec& spec = table1_specs()[s];
      const InvariantValue v = polynomial_invariant(img, spec);
      REQUIRE(v.valid);
      const double oracle = brute_force_invariant(img, spec);
      CAPTURE(spec.id);
      if (structurally_zero(spec)) {
        // The oracle sees only rounding here.
        CHECK(v.value == 0.0);
        CHECK(std::abs(oracle) <= 1e-12);
        continue;
      }
      CHECK(std::abs(v.value - oracle) <= 1e-9 * std::abs(oracle));
    }
  }
}

TEST_CASE("k = 1 invariants match the oracle to 1e-9 relative on 9x9 images") {
  // A 6x6 frame erodes to a 2x2 derivative domain where many k = 1 values
  // vanish by symmetry; 9x9 leaves 25 pixels.
  for (std::uint64_t i = 0; i < 3; ++i) {
    const RasterImage img = noise(i, 9);
    for (std::size_t s = kInvariantsPerOrder; s < kFeatureCount; ++s) {
      const InvariantSpec& spec = table1_specs()[s];
      const InvariantValue v = polynomial_invariant(img, spec);
      REQUIRE(v.valid);
      const double oracle = brute_force_invariant(img, spec);
      CAPTURE(spec.id);
      if (structurally_zero(spec)) {
        CHECK(v.value == 0.0);
        CHECK(std::abs(oracle) <= 1e-12);
        continue;
      }
      CHECK(std::abs(v.value - oracle) <= 1e-9 * std::abs(oracle));
    }
  }
}

TEST_CASE("all 50 specs match on 6x6 images under the cancellation floor") {
  // On 6x6 the k = 1 domain is 2x2 and most k = 1 cores cancel to zero; the
  // term scale bounds what rounding can leave behind.
  for (std::uint64_t i = 0; i < 5; ++i) {
    const RasterImage img = noise(i);
    for (const auto& spec : table1_specs()) {
      const MomentTable t = compute_moment_table(make_channel_set(img, spec.k), required_indices());
      const InvariantValue v = evaluate_invariant(spec, t);
      REQUIRE(v.valid);
      const double oracle = brute_force_invariant(img, spec);
      CAPTURE(spec.id);
      CAPTURE(spec.k);
      CHECK(oracle_deviation(v.value, oracle, invariant_term_scale(spec, t)) <= 1e-9);
    }
  }
}

TEST_CASE("a multi-triple spec with even M also matches") {
  CoreSpec core;
  // The integrand is a square, so the integral is strictly positive.
  core.shape_factors = {{1, 2, 2}};
  core.color_triples = {{1, 2, 3, 2}};
  const InvariantSpec spec = make_invariant(1, core);
  CHECK(spec.denom_exponent == Rational(1));
  CHECK(spec.area_exponent == Rational(3 + 2 - 3));
  const RasterImage img = noise(3);
  const double oracle = brute_force_invariant(img, spec);
  CHECK(oracle > 0.0);
  const InvariantValue v = polynomial_invariant(img, spec);
  REQUIRE(v.valid);
  CHECK(std::abs(v.value - oracle) <= 1e-9 * std::abs(oracle));
}

TEST_CASE("grayscale 6x6 image is degenerate") {
  const RasterImage gray = to_grayscale(noise(0));
  CHECK_THROWS_AS(brute_force_invariant(gray, table1_specs()[0]), Degenerate);
  CHECK_THROWS_AS(brute_force_invariant(gray, table1_specs()[30]), Degenerate);
}

TEST_CASE("90 degree rotation of a square domain preserves oracle invariants") {
  const RasterImage img = noise(4);
  ShapeAffine rot;
  rot.matrix = {0.0, -1.0, 1.0, 0.0};
  rot.offset = {5.0, 0.0};
  const RasterImage turned = apply_shape_affine(img, rot);
  REQUIRE(turned.masked_count() == 36);
  for (std::size_t s : {0u, 2u, 5u, 12u, 24u}) {
    const auto& spec = table1_specs()[s];
    const double a = brute_force_invariant(img, spec);
    const double b = brute_force_invariant(turned, spec);
    CHECK(relative_deviation(a, b) <= 1e-9);
  }
}

TEST_CASE("64x64 noise: polynomial path agrees with the oracle on a subsampled copy") {
  const RasterImage big = random_noise_image(99, 64, 64);
  RasterImage small(6, 6);
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 6; ++x) {
      const std::size_t s = big.index(x * 11, y * 11);
      const std::size_t d = small.index(x, y);
      small.r[d] = big.r[s];
      small.g[d] = big.g[s];
      small.b[d] = big.b[s];
    }
  }
  const FeatureVector fv = scdmi50(big);
  CHECK(fv.valid_count() == 50);
  CHECK(test::all_finite(fv));
  for (std::size_t s : {0u, 2u, 10u, 24u, 25u, 27u, 49u}) {
    const auto& spec = table1_specs()[s];
    const double oracle = brute_force_invariant(small, spec);
    const InvariantValue v = polynomial_invariant(small, spec);
    CHECK(std::abs(v.value - oracle) <= 1e-6 * std::abs(oracle));
  }
}

TEST_CASE("tuple budget guard") {
  const RasterImage big = random_noise_image(1, 120, 120);
  CHECK_THROWS_AS(brute_force_core_integral(big, table1_specs()[24].core), TooLarge);
  CHECK_THROWS_AS(brute_force_invariant(big, table1_specs()[24]), TooLarge);
}

TEST_CASE("oracle is deterministic") {
  const RasterImage img = noise(2);
  const auto& spec = table1_specs()[20];
  CHECK(brute_force_invariant(img, spec) == brute_force_invariant(img, spec));
}

}  // TEST_SUITE
