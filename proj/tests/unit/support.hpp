#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>

#include "scdmi/image.hpp"
#include "scdmi/moments.hpp"
#include "scdmi/synthetic.hpp"
#include "scdmi/transforms.hpp"

namespace scdmi::test {

inline std::filesystem::path scratch_dir(const std::string& name) {
  const std::filesystem::path dir = std::filesystem::path(SCDMI_TEST_TMPDIR) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline RasterImage scene_image(std::uint64_t seed, int size) {
  return render_scene(random_scene(seed), size, size);
}

inline RasterImage square_scene(std::uint64_t seed, int size) {
  RasterImage img = scene_image(seed, size);
  apply_square_mask(img);
  return img;
}

// Largest relative deviation over entries valid in both vectors; -1 when no
// entry is comparable.
inline double max_deviation(const FeatureVector& a, const FeatureVector& b, std::size_t first = 0,
                            std::size_t last = kFeatureCount) {
  double worst = -1.0;
  for (std::size_t e = first; e < last; ++e) {
    if (!a.valid[e] || !b.valid[e]) continue;
    worst = std::max(worst, relative_deviation(a.values[e], b.values[e]));
  }
  return worst;
}

inline bool all_finite(const FeatureVector& fv) {
  for (double v : fv.values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace scdmi::test
