#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "scdmi/algebra.hpp"
#include "scdmi/image.hpp"

namespace scdmi {

inline constexpr std::size_t kFeatureCount = 50;
inline constexpr std::size_t kInvariantsPerOrder = 25;
// Relative floor on D2 / (m00^3 * scale^6) below which an invariant is undefined.
inline constexpr double kDegeneracyEpsilon = 1e-12;

struct CentroidAndMeans {
  double x = 0.0;
  double y = 0.0;
  double r = 0.0;
  double g = 0.0;
  double b = 0.0;
};

// Unweighted means over masked pixels. Throws EmptyDomain.
CentroidAndMeans centroid_and_means(const RasterImage& img);

// Unnormalized 5-point differences C(x-2) - 8C(x-1) + 8C(x+1) - C(x+2) along
// each axis. The mask is eroded so every tap of both stencils is masked;
// derivatives outside it are 0.
struct Gradients {
  int width = 0;
  int height = 0;
  std::array<std::vector<double>, 3> dx;
  std::array<std::vector<double>, 3> dy;
  std::vector<std::uint8_t> mask;
};

// Throws TooSmall below 5x5.
Gradients derivative_channels(const RasterImage& img);

// Planes that enter the moments for one derivative order, already paired with
// the centroid and the channel offsets to subtract.
struct ChannelSet {
  int k = 0;
  int width = 0;
  int height = 0;
  std::array<std::vector<double>, 3> planes;
  std::vector<std::uint8_t> mask;
  double xbar = 0.0;
  double ybar = 0.0;
  std::array<double, 3> means{};  // zero for k = 1

  std::size_t masked_count() const noexcept;
};

ChannelSet raw_channels(const RasterImage& img);
// F1_C = (x - xbar) dC/dx + (y - ybar) dC/dy on the gradient mask.
ChannelSet f1_channels(const Gradients& grad, double xbar, double ybar);
// k = 0: raw channels with masked means. k = 1: F1 channels centered on the
// centroid of the eroded mask. The result may have an empty mask for k = 1.
ChannelSet make_channel_set(const RasterImage& img, int k);

struct MomentTable {
  int k = 0;
  double m00 = 0.0;
  double xbar = 0.0;
  double ybar = 0.0;
  std::map<MomentIndex, double> entries;

  bool contains(const MomentIndex& index) const { return entries.count(index) != 0; }
  // Throws InternalError for an index that was not requested.
  double at(const MomentIndex& index) const;
};

// One pass over the masked pixels, all requested indices accumulated together
// with compensated summation. Throws EmptyDomain.
MomentTable compute_moment_table(const ChannelSet& channels, std::span<const MomentIndex> required);

struct InvariantValue {
  double value = 0.0;
  bool valid = false;
};

// D2: the quadratic color core integral.
double denominator_value(const MomentTable& table);
// epsilon * m00^3 * scale^6, scale^2 being the mean second channel moment.
double degeneracy_threshold(const MomentTable& table);

InvariantValue evaluate_invariant(const InvariantSpec& spec, const MomentTable& table);

// The invariant with every numerator term replaced by its absolute value. It
// bounds the rounding error of evaluate_invariant, so comparisons of values
// that cancel to (near) zero are made against it. 0 when degenerate.
double invariant_term_scale(const InvariantSpec& spec, const MomentTable& table);

// |value - reference| / max(|reference|, kCancellationFloor * term_scale).
inline constexpr double kCancellationFloor = 1e-4;
double oracle_deviation(double value, double reference, double term_scale);

// Every moment index used by the table specs and the denominator, ascending.
const std::vector<MomentIndex>& required_indices();

struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  std::array<bool, kFeatureCount> valid{};

  std::size_t valid_count() const noexcept;
  bool operator==(const FeatureVector&) const = default;
};

// Throws TooSmall, EmptyDomain. k = 1 entries are invalid when the eroded
// mask is empty.
FeatureVector scdmi50(const RasterImage& img);

}  // namespace scdmi
