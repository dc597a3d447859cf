#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace scdmi {

// Three real-valued channel planes plus a participation mask, row-major.
// Pixel (i, j) is column i, row j and sits at coordinate (i, j).
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<double> r, g, b;
  std::vector<std::uint8_t> mask;

  RasterImage() = default;
  // All channels zero, mask fully set.
  RasterImage(int width, int height);

  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(x);
  }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t masked_count() const noexcept;
  bool in_bounds(int x, int y) const noexcept {
    return x >= 0 && y >= 0 && x < width && y < height;
  }

  // Throws InvalidSpec when plane sizes disagree with the dimensions.
  void check_consistent() const;

  bool operator==(const RasterImage&) const = default;
};

// Binary PPM (P6, maxval <= 255). Values map to v / maxval; mask is full.
RasterImage read_ppm(const std::filesystem::path& path);
RasterImage decode_ppm(const std::string& bytes);
// Channels are clamped to [0,1] and rounded to 8 bits.
void write_ppm(const std::filesystem::path& path, const RasterImage& image);
std::string encode_ppm(const RasterImage& image);

}  // namespace scdmi
