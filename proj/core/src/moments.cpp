#include "scdmi/moments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "scdmi/error.hpp"
#include "scdmi/summation.hpp"

namespace scdmi {

CentroidAndMeans centroid_and_means(const RasterImage& img) {
  img.check_consistent();
  NeumaierSum sx, sy, sr, sg, sb;
  std::size_t count = 0;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const std::size_t i = img.index(x, y);
      if (!img.mask[i]) continue;
      sx.add(x);
      sy.add(y);
      sr.add(img.r[i]);
      sg.add(img.g[i]);
      sb.add(img.b[i]);
      ++count;
    }
  }
  if (count == 0) throw EmptyDomain("image mask has no pixels");
  const double n = static_cast<double>(count);
  return {sx.value() / n, sy.value() / n, sr.value() / n, sg.value() / n, sb.value() / n};
}

Gradients derivative_channels(const RasterImage& img) {
  img.check_consistent();
  if (img.width < 5 || img.height < 5) {
    throw TooSmall("derivative stencil needs at least 5x5 pixels, got " +
                   std::to_string(img.width) + "x" + std::to_string(img.height));
  }
  Gradients out;
  out.width = img.width;
  out.height = img.height;
  const std::size_t n = img.pixel_count();
  out.mask.assign(n, 0);
  for (auto& p : out.dx) p.assign(n, 0.0);
  for (auto& p : out.dy) p.assign(n, 0.0);

  const std::array<const std::vector<double>*, 3> planes = {&img.r, &img.g, &img.b};
  const auto masked = [&](int x, int y) { return img.in_bounds(x, y) && img.mask[img.index(x, y)]; };

  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      bool ok = masked(x, y);
      for (int d = 1; d <= 2 && ok; ++d) {
        ok = masked(x - d, y) && masked(x + d, y) && masked(x, y - d) && masked(x, y + d);
      }
      if (!ok) continue;
      const std::size_t i = img.index(x, y);
      out.mask[i] = 1;
      for (std::size_t c = 0; c < 3; ++c) {
        const auto& p = *planes[c];
        const auto at = [&](int xx, int yy) { return p[img.index(xx, yy)]; };
        // Grouped as differences so constant data gives exactly 0.
        out.dx[c][i] = 8.0 * (at(x + 1, y) - at(x - 1, y)) - (at(x + 2, y) - at(x - 2, y));
        out.dy[c][i] = 8.0 * (at(x, y + 1) - at(x, y - 1)) - (at(x, y + 2) - at(x, y - 2));
      }
    }
  }
  return out;
}

std::size_t ChannelSet::masked_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; }));
}

ChannelSet raw_channels(const RasterImage& img) {
  const CentroidAndMeans c = centroid_and_means(img);
  ChannelSet out;
  out.k = 0;
  out.width = img.width;
  out.height = img.height;
  out.planes = {img.r, img.g, img.b};
  out.mask = img.mask;
  out.xbar = c.x;
  out.ybar = c.y;
  out.means = {c.r, c.g, c.b};
  return out;
}

ChannelSet f1_channels(const Gradients& grad, double xbar, double ybar) {
  ChannelSet out;
  out.k = 1;
  out.width = grad.width;
  out.height = grad.height;
  out.mask = grad.mask;
  out.xbar = xbar;
  out.ybar = ybar;
  out.means = {0.0, 0.0, 0.0};
  const std::size_t n = grad.mask.size();
  for (auto& p : out.planes) p.assign(n, 0.0);
  for (int y = 0; y < grad.height; ++y) {
    for (int x = 0; x < grad.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * grad.width + x;
      if (!grad.mask[i]) continue;
      const double cx = x - xbar;
      const double cy = y - ybar;
      for (std::size_t c = 0; c < 3; ++c) {
        out.planes[c][i] = cx * grad.dx[c][i] + cy * grad.dy[c][i];
      }
    }
  }
  return out;
}

ChannelSet make_channel_set(const RasterImage& img, int k) {
  if (k == 0) return raw_channels(img);
  if (k != 1) throw InvalidSpec("only k = 0 and k = 1 channel sets exist");
  const Gradients grad = derivative_channels(img);
  NeumaierSum sx, sy;
  std::size_t count = 0;
  for (int y = 0; y < grad.height; ++y) {
    for (int x = 0; x < grad.width; ++x) {
      if (!grad.mask[static_cast<std::size_t>(y) * grad.width + x]) continue;
      sx.add(x);
      sy.add(y);
      ++count;
    }
  }
  if (count == 0) return f1_channels(grad, 0.0, 0.0);
  const double n = static_cast<double>(count);
  return f1_channels(grad, sx.value() / n, sy.value() / n);
}

double MomentTable::at(const MomentIndex& index) const {
  const auto it = entries.find(index);
  if (it == entries.end()) {
    throw InternalError("moment " + to_string(index) + " was not precomputed");
  }
  return it->second;
}

MomentTable compute_moment_table(const ChannelSet& channels,
                                 std::span<const MomentIndex> required) {
  std::vector<MomentIndex> indices(required.begin(), required.end());
  const MomentIndex area{};
  indices.push_back(area);
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());

  int max_shape = 0;
  int max_color = 0;
  for (const auto& ix : indices) {
    max_shape = std::max({max_shape, ix.p, ix.q});
    max_color = std::max({max_color, ix.alpha, ix.beta, ix.gamma});
  }

  std::vector<NeumaierSum> sums(indices.size());
  std::vector<double> px(max_shape + 1), py(max_shape + 1);
  std::array<std::vector<double>, 3> pc;
  for (auto& v : pc) v.resize(max_color + 1);

  std::size_t count = 0;
  NeumaierSum sum_x, sum_y;
  std::array<NeumaierSum, 3> sum_c;
  for (int y = 0; y < channels.height; ++y) {
    for (int x = 0; x < channels.width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * channels.width + x;
      if (!channels.mask[i]) continue;
      ++count;
      sum_x.add(x);
      sum_y.add(y);
      for (std::size_t c = 0; c < 3; ++c) sum_c[c].add(channels.planes[c][i]);
      const double cx = x - channels.xbar;
      const double cy = y - channels.ybar;
      px[0] = py[0] = 1.0;
      for (int e = 1; e <= max_shape; ++e) {
        px[e] = px[e - 1] * cx;
        py[e] = py[e - 1] * cy;
      }
      for (std::size_t c = 0; c < 3; ++c) {
        const double v = channels.planes[c][i] - channels.means[c];
        pc[c][0] = 1.0;
        for (int e = 1; e <= max_color; ++e) pc[c][e] = pc[c][e - 1] * v;
      }
      for (std::size_t s = 0; s < indices.size(); ++s) {
        const auto& ix = indices[s];
        sums[s].add(px[ix.p] * py[ix.q] * pc[0][ix.alpha] * pc[1][ix.beta] * pc[2][ix.gamma]);
      }
    }
  }
  if (count == 0) throw EmptyDomain("channel set mask has no pixels");

  MomentTable table;
  table.k = channels.k;
  table.xbar = channels.xbar;
  table.ybar = channels.ybar;
  for (std::size_t s = 0; s < indices.size(); ++s) table.entries.emplace(indices[s], sums[s].value());
  table.m00 = table.entries.at(area);

  // A first-order moment about the masked mean is zero by definition and the
  // accumulated value is pure rounding. With the exact zero, a core that
  // integrates a lone centered coordinate evaluates to exactly 0.
  const double n = static_cast<double>(count);
  auto centered = [](double offset, double mean) {
    return std::abs(offset - mean) <= 1e-12 * std::max(1.0, std::abs(mean));
  };
  auto zero = [&](const MomentIndex& ix) {
    if (auto it = table.entries.find(ix); it != table.entries.end()) it->second = 0.0;
  };
  if (centered(channels.xbar, sum_x.value() / n)) zero({1, 0, 0, 0, 0});
  if (centered(channels.ybar, sum_y.value() / n)) zero({0, 1, 0, 0, 0});
  if (centered(channels.means[0], sum_c[0].value() / n)) zero({0, 0, 1, 0, 0});
  if (centered(channels.means[1], sum_c[1].value() / n)) zero({0, 0, 0, 1, 0});
  if (centered(channels.means[2], sum_c[2].value() / n)) zero({0, 0, 0, 0, 1});
  return table;
}

double denominator_value(const MomentTable& table) {
  return static_cast<double>(
      denominator_polynomial().evaluate([&](const MomentIndex& ix) { return table.at(ix); }));
}

double degeneracy_threshold(const MomentTable& table) {
  const double second = table.at({0, 0, 2, 0, 0}) + table.at({0, 0, 0, 2, 0}) +
                        table.at({0, 0, 0, 0, 2});
  const double scale_sq = second / (3.0 * table.m00);
  const double m3 = table.m00 * table.m00 * table.m00;
  return kDegeneracyEpsilon * m3 * scale_sq * scale_sq * scale_sq;
}

namespace {

void check_table_order(const InvariantSpec& spec, const MomentTable& table) {
  if (spec.k != table.k) {
    throw InternalError("spec k=" + std::to_string(spec.k) + " evaluated on a k=" +
                        std::to_string(table.k) + " moment table");
  }
}

// m00^e * D2^(M/2), or 0 when the table is degenerate.
long double normalizer(const InvariantSpec& spec, const MomentTable& table) {
  if (!(table.m00 > 0.0)) return 0.0L;
  const double d2 = denominator_value(table);
  if (!(d2 > degeneracy_threshold(table)) || !std::isfinite(d2)) return 0.0L;
  const long double area_exp = static_cast<long double>(spec.area_exponent.numerator()) /
                               static_cast<long double>(spec.area_exponent.denominator());
  const long double denom_exp = static_cast<long double>(spec.denom_exponent.numerator()) /
                                static_cast<long double>(spec.denom_exponent.denominator());
  return std::pow(static_cast<long double>(table.m00), area_exp) *
         std::pow(static_cast<long double>(d2), denom_exp);
}

}  // namespace

InvariantValue evaluate_invariant(const InvariantSpec& spec, const MomentTable& table) {
  check_table_order(spec, table);
  const long double scale = normalizer(spec, table);
  if (scale == 0.0L) return {};
  const long double numerator =
      spec.numerator.evaluate([&](const MomentIndex& ix) { return table.at(ix); });
  const double value = static_cast<double>(numerator / scale);
  if (!std::isfinite(value)) return {};
  return {value, true};
}

double invariant_term_scale(const InvariantSpec& spec, const MomentTable& table) {
  check_table_order(spec, table);
  const long double scale = normalizer(spec, table);
  if (scale == 0.0L) return 0.0;
  long double sum = 0.0L;
  for (const auto& term : spec.numerator.terms()) {
    long double product = std::abs(static_cast<long double>(term.coefficient));
    for (const auto& ix : term.factors) product *= std::abs(static_cast<long double>(table.at(ix)));
    sum += product;
  }
  return static_cast<double>(sum / scale);
}

double oracle_deviation(double value, double reference, double term_scale) {
  const double diff = std::abs(value - reference);
  if (diff == 0.0) return 0.0;
  const double floor = std::max(std::abs(reference), kCancellationFloor * term_scale);
  return floor > 0.0 ? diff / floor : std::numeric_limits<double>::infinity();
}

const std::vector<MomentIndex>& required_indices() {
  static const std::vector<MomentIndex> indices = [] {
    std::set<MomentIndex> all;
    for (const auto& spec : table1_specs()) {
      for (const auto& ix : spec.numerator.indices()) all.insert(ix);
    }
    for (const auto& ix : denominator_polynomial().indices()) all.insert(ix);
    all.insert(MomentIndex{});
    return std::vector<MomentIndex>(all.begin(), all.end());
  }();
  return indices;
}

std::size_t FeatureVector::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), true));
}

FeatureVector scdmi50(const RasterImage& img) {
  img.check_consistent();
  if (img.width < 5 || img.height < 5) {
    throw TooSmall("feature extraction needs at least 5x5 pixels");
  }
  const auto& specs = table1_specs();
  FeatureVector out;

  for (int k = 0; k <= 1; ++k) {
    const ChannelSet channels = make_channel_set(img, k);
    if (channels.masked_count() == 0) continue;  // eroded mask vanished; k=1 stays invalid
    const MomentTable table = compute_moment_table(channels, required_indices());
    for (std::size_t s = 0; s < kInvariantsPerOrder; ++s) {
      const std::size_t slot = static_cast<std::size_t>(k) * kInvariantsPerOrder + s;
      const InvariantValue v = evaluate_invariant(specs[slot], table);
      out.values[slot] = v.value;
      out.valid[slot] = v.valid;
    }
  }
  return out;
}

}  // namespace scdmi
