#include "scdmi/oracle.hpp"

#include <cmath>
#include <vector>

#include "scdmi/error.hpp"
#include "scdmi/moments.hpp"
#include "scdmi/parallel.hpp"
#include "scdmi/summation.hpp"

namespace scdmi {

namespace {

struct Sample {
  double x, y, r, g, b;
};

std::vector<Sample> centered_samples(const RasterImage& img, int k) {
  const ChannelSet cs = make_channel_set(img, k);
  std::vector<Sample> out;
  for (int y = 0; y < cs.height; ++y) {
    for (int x = 0; x < cs.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * cs.width + x;
      if (!cs.mask[i]) continue;
      out.push_back({x - cs.xbar, y - cs.ybar, cs.planes[0][i] - cs.means[0],
                     cs.planes[1][i] - cs.means[1], cs.planes[2][i] - cs.means[2]});
    }
  }
  if (out.empty()) throw EmptyDomain("oracle: no masked pixels");
  return out;
}

double ipow(double v, int e) {
  double out = 1.0;
  for (int i = 0; i < e; ++i) out *= v;
  return out;
}

double core_sum(const std::vector<Sample>& samples, const CoreSpec& spec) {
  spec.validate();
  const int w = spec.point_count();
  const double tuples = std::pow(static_cast<double>(samples.size()), w);
  if (tuples > kOracleTupleBudget) {
    throw TooLarge("oracle: " + std::to_string(samples.size()) + "^" + std::to_string(w) +
                   " tuples exceeds the budget");
  }
  const std::size_t n = samples.size();

  // One compensated partial sum per choice of the first point, merged in order.
  std::vector<NeumaierSum> partial(n);
  parallel_for(n, [&](std::size_t first) {
    std::vector<std::size_t> tuple(static_cast<std::size_t>(w), 0);
    tuple[0] = first;
    NeumaierSum acc;
    while (true) {
      double v = 1.0;
      for (const auto& f : spec.shape_factors) {
        const Sample& a = samples[tuple[f.i - 1]];
        const Sample& b = samples[tuple[f.j - 1]];
        v *= ipow(a.x * b.y - b.x * a.y, f.exponent);
      }
      for (const auto& f : spec.color_triples) {
        const Sample& a = samples[tuple[f.p - 1]];
        const Sample& b = samples[tuple[f.q - 1]];
        const Sample& c = samples[tuple[f.r - 1]];
        // Cofactor expansion along the R row; columns are the three points.
        const double det = a.r * (b.g * c.b - c.g * b.b) - b.r * (a.g * c.b - c.g * a.b) +
                           c.r * (a.g * b.b - b.g * a.b);
        v *= ipow(det, f.exponent);
      }
      acc.add(v);

      int pos = w - 1;
      while (pos >= 1 && ++tuple[pos] == n) {
        tuple[pos] = 0;
        --pos;
      }
      if (pos < 1) break;
    }
    partial[first] = acc;
  });

  NeumaierSum total;
  for (const auto& p : partial) total.add(p);
  return total.value();
}

}  // namespace

double brute_force_core_integral(const RasterImage& img, const CoreSpec& spec) {
  return core_sum(centered_samples(img, spec.k), spec);
}

double brute_force_invariant(const RasterImage& img, const InvariantSpec& spec) {
  const auto samples = centered_samples(img, spec.k);
  CoreSpec core = spec.core;
  core.k = spec.k;
  const double numerator = core_sum(samples, core);
  const double d2 = core_sum(samples, denominator_core(spec.k));

  const double m00 = static_cast<double>(samples.size());
  double second = 0.0;
  for (const auto& s : samples) second += s.r * s.r + s.g * s.g + s.b * s.b;
  const double scale_sq = second / (3.0 * m00);
  const double threshold = kDegeneracyEpsilon * m00 * m00 * m00 * std::pow(scale_sq, 3);
  if (!(d2 > threshold)) throw Degenerate("oracle: color normalization vanished");

  const double area_exp = boost::rational_cast<double>(spec.area_exponent);
  const double denom_exp = boost::rational_cast<double>(spec.denom_exponent);
  return numerator / (std::pow(m00, area_exp) * std::pow(d2, denom_exp));
}

}  // namespace scdmi
