#include "scdmi/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include "scdmi/error.hpp"

namespace scdmi {

RasterImage::RasterImage(int w, int h) : width(w), height(h) {
  if (w <= 0 || h <= 0) throw InvalidSpec("image dimensions must be positive");
  const std::size_t n = pixel_count();
  r.assign(n, 0.0);
  g.assign(n, 0.0);
  b.assign(n, 0.0);
  mask.assign(n, 1);
}

std::size_t RasterImage::masked_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(mask.begin(), mask.end(),
                                                 [](std::uint8_t m) { return m != 0; }));
}

void RasterImage::check_consistent() const {
  if (width <= 0 || height <= 0) throw InvalidSpec("image dimensions must be positive");
  const std::size_t n = pixel_count();
  if (r.size() != n || g.size() != n || b.size() != n || mask.size() != n) {
    throw InvalidSpec("image planes do not match " + std::to_string(width) + "x" +
                      std::to_string(height));
  }
}

namespace {

// Reads the next header integer, skipping whitespace and '#' comments.
int next_header_int(const std::string& bytes, std::size_t& pos) {
  while (pos < bytes.size()) {
    const unsigned char c = static_cast<unsigned char>(bytes[pos]);
    if (c == '#') {
      while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
    } else if (std::isspace(c)) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
    throw IoError("malformed PPM header");
  }
  long value = 0;
  while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
    value = value * 10 + (bytes[pos] - '0');
    if (value > 1'000'000) throw IoError("PPM header value out of range");
    ++pos;
  }
  return static_cast<int>(value);
}

}  // namespace

RasterImage decode_ppm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw IoError("not a binary PPM (P6) stream");
  }
  std::size_t pos = 2;
  const int width = next_header_int(bytes, pos);
  const int height = next_header_int(bytes, pos);
  const int maxval = next_header_int(bytes, pos);
  if (width <= 0 || height <= 0) throw IoError("PPM dimensions must be positive");
  if (maxval <= 0 || maxval > 255) throw IoError("only 8-bit PPM (maxval <= 255) is supported");
  if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
    throw IoError("malformed PPM header");
  }
  ++pos;

  RasterImage img(width, height);
  const std::size_t n = img.pixel_count();
  if (bytes.size() - pos < 3 * n) throw IoError("truncated PPM pixel data");
  const double scale = 1.0 / maxval;
  for (std::size_t i = 0; i < n; ++i) {
    img.r[i] = static_cast<unsigned char>(bytes[pos + 3 * i + 0]) * scale;
    img.g[i] = static_cast<unsigned char>(bytes[pos + 3 * i + 1]) * scale;
    img.b[i] = static_cast<unsigned char>(bytes[pos + 3 * i + 2]) * scale;
  }
  return img;
}

RasterImage read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_ppm(bytes);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string encode_ppm(const RasterImage& image) {
  image.check_consistent();
  std::string out = "P6\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                    "\n255\n";
  const auto quantize = [](double v) {
    return static_cast<char>(static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)));
  };
  out.reserve(out.size() + 3 * image.pixel_count());
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    out += quantize(image.r[i]);
    out += quantize(image.g[i]);
    out += quantize(image.b[i]);
  }
  return out;
}

void write_ppm(const std::filesystem::path& path, const RasterImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const std::string bytes = encode_ppm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace scdmi
