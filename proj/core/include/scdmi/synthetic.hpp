#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "scdmi/image.hpp"

namespace scdmi {

// splitmix64-style mixing of a run seed with stream identifiers.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// Independent uniform [0,1] channels, full mask.
RasterImage random_noise_image(std::uint64_t seed, int width, int height);

// Copies the luminance into all three channels.
RasterImage to_grayscale(const RasterImage& img);

// Anisotropic Gaussian blob; coordinates live on the unit square.
struct Blob {
  double cx = 0.5;
  double cy = 0.5;
  double sigma_major = 0.05;
  double sigma_minor = 0.05;
  double angle = 0.0;
  std::array<double, 3> color{};
};

// A smooth analytic color scene. The object is the set where the summed blob
// density reaches `mask_threshold`, cut to a disc of `mask_radius` around the
// center so affine warps of moderate size stay in frame.
struct Scene {
  std::array<double, 3> base{0.5, 0.5, 0.5};
  std::array<double, 3> gradient_x{};
  std::array<double, 3> gradient_y{};
  std::vector<Blob> blobs;
  double mask_threshold = 0.3;
  double mask_radius = 0.2;
};

Scene random_scene(std::uint64_t seed);

// Samples the scene at pixel centers ((i + 0.5) / width, (j + 0.5) / width).
RasterImage render_scene(const Scene& scene, int width, int height);

// Replaces the mask with the pixels whose centers fall strictly inside
// (lo, hi)^2 on the unit square. The mask then covers the same region at
// every resolution.
void apply_square_mask(RasterImage& img, double lo = 0.25, double hi = 0.75);

}  // namespace scdmi
