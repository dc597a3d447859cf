#include "scdmi/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "scdmi/csv.hpp"
#include "scdmi/error.hpp"

namespace scdmi {

double ColorAffine::det() const noexcept {
  const auto& m = matrix;
  return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

RasterImage apply_shape_affine(const RasterImage& img, const ShapeAffine& t, int out_width,
                               int out_height) {
  img.check_consistent();
  const double det = t.det();
  if (!(std::abs(det) >= kMinAbsDeterminant)) throw Singular("shape affine matrix is singular");
  const auto& a = t.matrix;
  const std::array<double, 4> inv = {a[3] / det, -a[1] / det, -a[2] / det, a[0] / det};

  RasterImage out(out_width, out_height);
  for (int j = 0; j < out_height; ++j) {
    for (int i = 0; i < out_width; ++i) {
      const double u = i - t.offset[0];
      const double v = j - t.offset[1];
      const double sx = inv[0] * u + inv[1] * v;
      const double sy = inv[2] * u + inv[3] * v;
      const double fx0 = std::floor(sx);
      const double fy0 = std::floor(sy);
      const double fx = sx - fx0;
      const double fy = sy - fy0;
      const std::size_t o = out.index(i, j);
      if (std::abs(fx0) > 1e9 || std::abs(fy0) > 1e9) {
        out.mask[o] = 0;
        continue;
      }
      const int x0 = static_cast<int>(fx0);
      const int y0 = static_cast<int>(fy0);

      const std::array<int, 4> tx = {x0, x0 + 1, x0, x0 + 1};
      const std::array<int, 4> ty = {y0, y0, y0 + 1, y0 + 1};
      const std::array<double, 4> w = {(1.0 - fx) * (1.0 - fy), fx * (1.0 - fy),
                                       (1.0 - fx) * fy, fx * fy};
      bool in_frame = true;
      double covered = 0.0;
      std::array<double, 3> all{}, inside{};
      for (std::size_t k = 0; k < 4; ++k) {
        if (w[k] == 0.0) continue;
        if (!img.in_bounds(tx[k], ty[k])) {
          in_frame = false;
          continue;
        }
        const std::size_t s = img.index(tx[k], ty[k]);
        const std::array<double, 3> c = {w[k] * img.r[s], w[k] * img.g[s], w[k] * img.b[s]};
        for (std::size_t ch = 0; ch < 3; ++ch) all[ch] += c[ch];
        if (!img.mask[s]) continue;
        covered += w[k];
        for (std::size_t ch = 0; ch < 3; ++ch) inside[ch] += c[ch];
      }
      // The mask boundary is placed where the interpolated mask crosses 1/2,
      // so the warped domain neither grows nor shrinks on average. Masked
      // outputs draw only on masked taps.
      out.mask[o] = covered >= 0.5;
      if (out.mask[o] && covered < 1.0) {
        out.r[o] = inside[0] / covered;
        out.g[o] = inside[1] / covered;
        out.b[o] = inside[2] / covered;
      } else if (in_frame) {
        out.r[o] = all[0];
        out.g[o] = all[1];
        out.b[o] = all[2];
      }
    }
  }
  return out;
}

RasterImage apply_shape_affine(const RasterImage& img, const ShapeAffine& t) {
  return apply_shape_affine(img, t, img.width, img.height);
}

RasterImage apply_color_affine(const RasterImage& img, const ColorAffine& t, bool clamp) {
  img.check_consistent();
  if (!(std::abs(t.det()) >= kMinAbsDeterminant)) throw Singular("color affine matrix is singular");
  RasterImage out = img;
  const auto& m = t.matrix;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    const double r = img.r[i], g = img.g[i], b = img.b[i];
    double nr = m[0] * r + m[1] * g + m[2] * b + t.offset[0];
    double ng = m[3] * r + m[4] * g + m[5] * b + t.offset[1];
    double nb = m[6] * r + m[7] * g + m[8] * b + t.offset[2];
    if (clamp) {
      nr = std::clamp(nr, 0.0, 1.0);
      ng = std::clamp(ng, 0.0, 1.0);
      nb = std::clamp(nb, 0.0, 1.0);
    }
    out.r[i] = nr;
    out.g[i] = ng;
    out.b[i] = nb;
  }
  return out;
}

RasterImage upsample_nearest(const RasterImage& img, int factor) {
  img.check_consistent();
  if (factor < 1) throw InvalidSpec("upsampling factor must be >= 1");
  RasterImage out(img.width * factor, img.height * factor);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      const std::size_t s = img.index(x / factor, y / factor);
      const std::size_t o = out.index(x, y);
      out.r[o] = img.r[s];
      out.g[o] = img.g[s];
      out.b[o] = img.b[s];
      out.mask[o] = img.mask[s];
    }
  }
  return out;
}

namespace {

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
  if (lo == hi) return lo;
  std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
  return std::exp(u(rng));
}

}  // namespace

ShapeAffine sample_shape_affine(std::uint64_t seed, DetRange det_range, double max_condition,
                                std::array<double, 2> center) {
  if (!(det_range.lo > 0.0) || det_range.hi < det_range.lo) {
    throw InvalidSpec("det_range must satisfy 0 < lo <= hi");
  }
  if (!(max_condition >= 1.0)) throw InvalidSpec("max_condition must be >= 1");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double det = log_uniform(rng, det_range.lo, det_range.hi);
  const double cond = 1.0 + (max_condition - 1.0) * unit(rng);
  const double theta = angle(rng);
  const double phi = angle(rng);

  const double s1 = std::sqrt(det * cond);
  const double s2 = std::sqrt(det / cond);
  const double ct = std::cos(theta), st = std::sin(theta);
  const double cp = std::cos(phi), sp = std::sin(phi);
  // R(theta) * diag(s1, s2) * R(phi)
  const double a00 = ct * s1, a01 = -st * s2, a10 = st * s1, a11 = ct * s2;
  ShapeAffine t;
  t.matrix = {a00 * cp + a01 * sp, -a00 * sp + a01 * cp, a10 * cp + a11 * sp,
              -a10 * sp + a11 * cp};
  t.offset = {center[0] - (t.matrix[0] * center[0] + t.matrix[1] * center[1]),
              center[1] - (t.matrix[2] * center[0] + t.matrix[3] * center[1])};
  return t;
}

ColorAffine sample_color_affine(std::uint64_t seed, double max_condition, double offset_range) {
  if (!(max_condition >= 1.0)) throw InvalidSpec("max_condition must be >= 1");
  if (!(offset_range >= 0.0)) throw InvalidSpec("offset_range must be nonnegative");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Uniform random rotation from a normalized quaternion.
  double w = normal(rng), x = normal(rng), y = normal(rng), z = normal(rng);
  const double norm = std::sqrt(w * w + x * x + y * y + z * z);
  w /= norm;
  x /= norm;
  y /= norm;
  z /= norm;
  const std::array<double, 9> q = {
      1 - 2 * (y * y + z * z), 2 * (x * y - z * w),     2 * (x * z + y * w),
      2 * (x * y + z * w),     1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
      2 * (x * z - y * w),     2 * (y * z + x * w),     1 - 2 * (x * x + y * y)};

  const double cond = 1.0 + (max_condition - 1.0) * unit(rng);
  const double mid = 1.0 + (cond - 1.0) * unit(rng);
  const double scale = log_uniform(rng, 0.5, 2.0);
  const std::array<double, 3> sigma = {scale, scale * mid, scale * cond};

  ColorAffine t;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      double v = 0.0;
      for (int k = 0; k < 3; ++k) v += q[r * 3 + k] * sigma[k] * q[c * 3 + k];
      t.matrix[r * 3 + c] = v;
    }
  }
  if (cond == 1.0) {
    // Q Q^T is the identity only up to rounding; make the isotropic case exact.
    t.matrix = {scale, 0.0, 0.0, 0.0, scale, 0.0, 0.0, 0.0, scale};
  }
  std::uniform_real_distribution<double> off(-offset_range, offset_range);
  for (auto& o : t.offset) o = offset_range > 0.0 ? off(rng) : 0.0;
  return t;
}

double relative_deviation(double reference, double value) noexcept {
  return std::abs(value - reference) / std::max(std::abs(reference), kRelativeDeviationFloor);
}

std::vector<InvarianceStats> deviation_stats(const FeatureVector& reference,
                                             std::span<const FeatureVector> versions) {
  std::vector<InvarianceStats> rows(kFeatureCount);
  for (std::size_t e = 0; e < kFeatureCount; ++e) {
    std::vector<double> devs;
    for (const auto& v : versions) {
      if (reference.valid[e] && v.valid[e]) {
        devs.push_back(relative_deviation(reference.values[e], v.values[e]));
      }
    }
    auto& row = rows[e];
    row.id = static_cast<int>(e % kInvariantsPerOrder) + 1;
    row.k = static_cast<int>(e / kInvariantsPerOrder);
    row.n_valid = devs.size();
    if (devs.empty()) continue;
    std::sort(devs.begin(), devs.end());
    const std::size_t n = devs.size();
    row.median_rel_dev = n % 2 ? devs[n / 2] : 0.5 * (devs[n / 2 - 1] + devs[n / 2]);
    row.max_rel_dev = devs.back();
  }
  return rows;
}

InvarianceReport invariance_report(const RasterImage& img, std::span<const ShapeAffine> shape,
                                   std::span<const ColorAffine> color, bool clamp) {
  const FeatureVector reference = scdmi50(img);

  std::vector<RasterImage> warped;
  warped.reserve(shape.size());
  for (const auto& s : shape) warped.push_back(apply_shape_affine(img, s));

  std::vector<FeatureVector> shape_only, color_only, composed;
  for (const auto& w : warped) shape_only.push_back(scdmi50(w));
  for (const auto& c : color) color_only.push_back(scdmi50(apply_color_affine(img, c, clamp)));
  for (const auto& w : warped) {
    for (const auto& c : color) composed.push_back(scdmi50(apply_color_affine(w, c, clamp)));
  }

  std::vector<FeatureVector> all;
  all.insert(all.end(), shape_only.begin(), shape_only.end());
  all.insert(all.end(), color_only.begin(), color_only.end());
  all.insert(all.end(), composed.begin(), composed.end());

  return {deviation_stats(reference, all), deviation_stats(reference, shape_only),
          deviation_stats(reference, color_only), deviation_stats(reference, composed)};
}

std::string invariance_csv(std::span<const InvarianceStats> rows) {
  std::string out = "id,k,median_rel_dev,max_rel_dev,n_valid\n";
  for (const auto& r : rows) {
    out += std::to_string(r.id) + "," + std::to_string(r.k) + "," +
           format_double(r.median_rel_dev) + "," + format_double(r.max_rel_dev) + "," +
           std::to_string(r.n_valid) + "\n";
  }
  return out;
}

}  // namespace scdmi
