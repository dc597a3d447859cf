#include "scdmi/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "scdmi/error.hpp"

namespace scdmi {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  const auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL));
}

RasterImage random_noise_image(std::uint64_t seed, int width, int height) {
  RasterImage img(width, height);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    img.r[i] = u(rng);
    img.g[i] = u(rng);
    img.b[i] = u(rng);
  }
  return img;
}

RasterImage to_grayscale(const RasterImage& img) {
  RasterImage out = img;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double l = 0.299 * img.r[i] + 0.587 * img.g[i] + 0.114 * img.b[i];
    out.r[i] = out.g[i] = out.b[i] = l;
  }
  return out;
}

Scene random_scene(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };

  Scene scene;
  for (auto& c : scene.base) c = uniform(0.35, 0.65);
  for (auto& c : scene.gradient_x) c = uniform(-0.3, 0.3);
  for (auto& c : scene.gradient_y) c = uniform(-0.3, 0.3);

  const int count = 3 + static_cast<int>(rng() % 3);
  for (int i = 0; i < count; ++i) {
    Blob b;
    const double radius = uniform(0.0, 0.085);
    const double theta = uniform(0.0, 2.0 * std::numbers::pi);
    b.cx = 0.5 + radius * std::cos(theta);
    b.cy = 0.5 + radius * std::sin(theta);
    b.sigma_major = uniform(0.035, 0.065);
    b.sigma_minor = b.sigma_major * uniform(0.45, 1.0);
    b.angle = uniform(0.0, std::numbers::pi);
    for (auto& c : b.color) c = uniform(-0.4, 0.4);
    scene.blobs.push_back(b);
  }
  return scene;
}

RasterImage render_scene(const Scene& scene, int width, int height) {
  RasterImage img(width, height);
  const double unit = 1.0 / width;
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      const double u = (i + 0.5) * unit;
      const double v = (j + 0.5) * unit;
      std::array<double, 3> color;
      for (std::size_t c = 0; c < 3; ++c) {
        color[c] = scene.base[c] + scene.gradient_x[c] * (u - 0.5) + scene.gradient_y[c] * (v - 0.5);
      }
      double density = 0.0;
      for (const auto& b : scene.blobs) {
        const double du = u - b.cx;
        const double dv = v - b.cy;
        const double ca = std::cos(b.angle), sa = std::sin(b.angle);
        const double a = (ca * du + sa * dv) / b.sigma_major;
        const double m = (-sa * du + ca * dv) / b.sigma_minor;
        const double weight = std::exp(-0.5 * (a * a + m * m));
        density += weight;
        for (std::size_t c = 0; c < 3; ++c) color[c] += weight * b.color[c];
      }
      const double du = u - 0.5;
      const double dv = v - 0.5;
      const std::size_t k = img.index(i, j);
      img.r[k] = color[0];
      img.g[k] = color[1];
      img.b[k] = color[2];
      img.mask[k] = density >= scene.mask_threshold &&
                    du * du + dv * dv <= scene.mask_radius * scene.mask_radius;
    }
  }
  return img;
}

void apply_square_mask(RasterImage& img, double lo, double hi) {
  const double unit = 1.0 / img.width;
  for (int j = 0; j < img.height; ++j) {
    for (int i = 0; i < img.width; ++i) {
      const double u = (i + 0.5) * unit;
      const double v = (j + 0.5) * unit;
      img.mask[img.index(i, j)] = u > lo && u < hi && v > lo && v < hi;
    }
  }
}

}  // namespace scdmi
