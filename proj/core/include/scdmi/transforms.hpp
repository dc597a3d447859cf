#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "scdmi/image.hpp"
#include "scdmi/moments.hpp"

namespace scdmi {

inline constexpr double kMinAbsDeterminant = 1e-6;
inline constexpr double kRelativeDeviationFloor = 1e-12;

// x' = SA x + ST, SA row-major.
struct ShapeAffine {
  std::array<double, 4> matrix{1.0, 0.0, 0.0, 1.0};
  std::array<double, 2> offset{0.0, 0.0};

  double det() const noexcept { return matrix[0] * matrix[3] - matrix[1] * matrix[2]; }
};

// (R',G',B') = CA (R,G,B) + CT, CA row-major.
struct ColorAffine {
  std::array<double, 9> matrix{1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0};
  std::array<double, 3> offset{0.0, 0.0, 0.0};

  double det() const noexcept;
};

// Inverse-mapping bilinear warp into an out_width x out_height frame. Taps
// with zero weight are skipped, so grid-aligned maps copy pixels exactly. An
// output pixel is masked when at least half of its bilinear weight falls on
// masked in-frame taps; its value is then the renormalized average of those
// taps alone. Other pixels get the plain interpolation if all taps are in
// frame and zero otherwise. Throws Singular.
RasterImage apply_shape_affine(const RasterImage& img, const ShapeAffine& t, int out_width,
                               int out_height);
RasterImage apply_shape_affine(const RasterImage& img, const ShapeAffine& t);

// Per-pixel affine map in real space; clamps to [0,1] only when `clamp`.
// Throws Singular.
RasterImage apply_color_affine(const RasterImage& img, const ColorAffine& t, bool clamp = false);

// Pixel replication by an integer factor (mask replicated too): the exact
// scaling x -> factor * x of the sample grid.
RasterImage upsample_nearest(const RasterImage& img, int factor);

struct DetRange {
  double lo = 1.0;
  double hi = 1.0;
};

// det log-uniform in range, condition number uniform in [1, max_condition],
// both rotations uniform. The offset keeps `center` fixed.
ShapeAffine sample_shape_affine(std::uint64_t seed, DetRange det_range, double max_condition,
                                std::array<double, 2> center);

// Symmetric positive definite CA = s Q diag(1, u, c) Q^T with c the
// condition number and s log-uniform in [0.5, 2]; offsets uniform in
// [-offset_range, offset_range].
ColorAffine sample_color_affine(std::uint64_t seed, double max_condition, double offset_range);

// |v' - v| / max(|v|, floor).
double relative_deviation(double reference, double value) noexcept;

struct InvarianceStats {
  int id = 0;
  int k = 0;
  double median_rel_dev = 0.0;
  double max_rel_dev = 0.0;
  std::size_t n_valid = 0;  // versions where the entry was valid in both images
};

struct InvarianceReport {
  std::vector<InvarianceStats> all;
  std::vector<InvarianceStats> shape_only;
  std::vector<InvarianceStats> color_only;
  std::vector<InvarianceStats> composed;  // every shape transform followed by every color transform
};

InvarianceReport invariance_report(const RasterImage& img, std::span<const ShapeAffine> shape,
                                   std::span<const ColorAffine> color, bool clamp = false);

// Per-entry deviation stats of `versions` against `reference`.
std::vector<InvarianceStats> deviation_stats(const FeatureVector& reference,
                                             std::span<const FeatureVector> versions);

// Columns: id,k,median_rel_dev,max_rel_dev,n_valid.
std::string invariance_csv(std::span<const InvarianceStats> rows);

}  // namespace scdmi
