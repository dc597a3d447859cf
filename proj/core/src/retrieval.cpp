#include "scdmi/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "scdmi/csv.hpp"
#include "scdmi/error.hpp"
#include "scdmi/parallel.hpp"
#include "scdmi/synthetic.hpp"
#include "scdmi/transforms.hpp"

namespace scdmi {

std::size_t dimension(DescriptorKind kind) noexcept {
  switch (kind) {
    case DescriptorKind::SCDMI50: return 50;
    case DescriptorKind::SCDMI0_25: return 25;
    case DescriptorKind::SCDMI1_25: return 25;
    case DescriptorKind::HU7: return 7;
    case DescriptorKind::COLOR_MOMENTS: return 9;
    case DescriptorKind::RG_HISTOGRAM: return 60;
    case DescriptorKind::TRANSFORMED_COLOR_DIST: return 60;
  }
  return 0;
}

std::string_view name(DescriptorKind kind) noexcept {
  switch (kind) {
    case DescriptorKind::SCDMI50: return "SCDMI50";
    case DescriptorKind::SCDMI0_25: return "SCDMI0_25";
    case DescriptorKind::SCDMI1_25: return "SCDMI1_25";
    case DescriptorKind::HU7: return "HU7";
    case DescriptorKind::COLOR_MOMENTS: return "COLOR_MOMENTS";
    case DescriptorKind::RG_HISTOGRAM: return "RG_HISTOGRAM";
    case DescriptorKind::TRANSFORMED_COLOR_DIST: return "TRANSFORMED_COLOR_DIST";
  }
  return "?";
}

bool is_invariant_kind(DescriptorKind kind) noexcept {
  return kind == DescriptorKind::SCDMI50 || kind == DescriptorKind::SCDMI0_25 ||
         kind == DescriptorKind::SCDMI1_25;
}

bool uses_log_normalization(DescriptorKind kind) noexcept {
  return kind != DescriptorKind::RG_HISTOGRAM && kind != DescriptorKind::TRANSFORMED_COLOR_DIST;
}

RawFeature invariant_descriptor(const FeatureVector& fv, DescriptorKind kind) {
  std::size_t first = 0;
  std::size_t count = kFeatureCount;
  switch (kind) {
    case DescriptorKind::SCDMI50: break;
    case DescriptorKind::SCDMI0_25: count = kInvariantsPerOrder; break;
    case DescriptorKind::SCDMI1_25:
      first = kInvariantsPerOrder;
      count = kInvariantsPerOrder;
      break;
    default: throw InvalidSpec(std::string(name(kind)) + " is not an invariant descriptor");
  }
  RawFeature out;
  out.values.assign(fv.values.begin() + first, fv.values.begin() + first + count);
  for (std::size_t i = first; i < first + count; ++i) out.valid.push_back(fv.valid[i]);
  return out;
}

namespace {

std::vector<std::size_t> masked_pixels(const RasterImage& img) {
  img.check_consistent();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < img.pixel_count(); ++i) {
    if (img.mask[i]) idx.push_back(i);
  }
  if (idx.empty()) throw EmptyDomain("descriptor: image mask has no pixels");
  return idx;
}

std::vector<double> hu_moments(const RasterImage& img) {
  const auto pixels = masked_pixels(img);
  std::vector<double> lum(img.pixel_count(), 0.0);
  double mean = 0.0;
  for (auto i : pixels) {
    lum[i] = 0.299 * img.r[i] + 0.587 * img.g[i] + 0.114 * img.b[i];
    mean += lum[i];
  }
  mean /= static_cast<double>(pixels.size());

  // Image function |L - mean L|: a flat image has no structure at all.
  double m00 = 0.0, m10 = 0.0, m01 = 0.0;
  for (auto i : pixels) {
    const double f = std::abs(lum[i] - mean);
    const double x = static_cast<double>(i % img.width);
    const double y = static_cast<double>(i / img.width);
    m00 += f;
    m10 += f * x;
    m01 += f * y;
  }
  std::vector<double> hu(7, 0.0);
  if (!(m00 > 1e-9 * static_cast<double>(pixels.size()))) return hu;
  const double xc = m10 / m00, yc = m01 / m00;

  std::array<std::array<double, 4>, 4> mu{};
  for (auto i : pixels) {
    const double f = std::abs(lum[i] - mean);
    const double x = static_cast<double>(i % img.width) - xc;
    const double y = static_cast<double>(i / img.width) - yc;
    double xp = 1.0;
    for (int p = 0; p <= 3; ++p) {
      double yq = 1.0;
      for (int q = 0; p + q <= 3; ++q) {
        mu[p][q] += f * xp * yq;
        yq *= y;
      }
      xp *= x;
    }
  }
  const auto eta = [&](int p, int q) { return mu[p][q] / std::pow(m00, 1.0 + (p + q) / 2.0); };
  const double n20 = eta(2, 0), n02 = eta(0, 2), n11 = eta(1, 1);
  const double n30 = eta(3, 0), n03 = eta(0, 3), n21 = eta(2, 1), n12 = eta(1, 2);
  const double a = n30 + n12, b = n21 + n03;
  hu[0] = n20 + n02;
  hu[1] = (n20 - n02) * (n20 - n02) + 4 * n11 * n11;
  hu[2] = (n30 - 3 * n12) * (n30 - 3 * n12) + (3 * n21 - n03) * (3 * n21 - n03);
  hu[3] = a * a + b * b;
  hu[4] = (n30 - 3 * n12) * a * (a * a - 3 * b * b) + (3 * n21 - n03) * b * (3 * a * a - b * b);
  hu[5] = (n20 - n02) * (a * a - b * b) + 4 * n11 * a * b;
  hu[6] = (3 * n21 - n03) * a * (a * a - 3 * b * b) - (n30 - 3 * n12) * b * (3 * a * a - b * b);
  return hu;
}

std::array<const std::vector<double>*, 3> planes(const RasterImage& img) {
  return {&img.r, &img.g, &img.b};
}

std::vector<double> color_moments(const RasterImage& img) {
  const auto pixels = masked_pixels(img);
  const double n = static_cast<double>(pixels.size());
  std::vector<double> out;
  for (const auto* plane : planes(img)) {
    double mean = 0.0;
    for (auto i : pixels) mean += (*plane)[i];
    mean /= n;
    double m2 = 0.0, m3 = 0.0;
    for (auto i : pixels) {
      const double d = (*plane)[i] - mean;
      m2 += d * d;
      m3 += d * d * d;
    }
    out.push_back(mean);
    out.push_back(std::sqrt(m2 / n));
    out.push_back(std::cbrt(m3 / n));
  }
  return out;
}

constexpr int kChromaBins = 30;
constexpr int kStandardizedBins = 20;
constexpr double kStandardizedRange = 3.0;

int bin_of(double v, double lo, double hi, int bins) {
  const int b = static_cast<int>(std::floor((v - lo) / (hi - lo) * bins));
  return std::clamp(b, 0, bins - 1);
}

std::vector<double> rg_histogram(const RasterImage& img) {
  const auto pixels = masked_pixels(img);
  std::vector<double> hist(2 * kChromaBins, 0.0);
  std::size_t counted = 0;
  for (auto i : pixels) {
    const double sum = img.r[i] + img.g[i] + img.b[i];
    if (!(sum > 1e-12)) continue;
    hist[bin_of(img.r[i] / sum, 0.0, 1.0, kChromaBins)] += 1.0;
    hist[kChromaBins + bin_of(img.g[i] / sum, 0.0, 1.0, kChromaBins)] += 1.0;
    ++counted;
  }
  if (counted > 0) {
    for (auto& h : hist) h /= static_cast<double>(counted);
  }
  return hist;
}

std::vector<double> transformed_color_distribution(const RasterImage& img) {
  const auto pixels = masked_pixels(img);
  const double n = static_cast<double>(pixels.size());
  std::vector<double> hist(3 * kStandardizedBins, 0.0);
  int c = 0;
  for (const auto* plane : planes(img)) {
    double mean = 0.0;
    for (auto i : pixels) mean += (*plane)[i];
    mean /= n;
    double var = 0.0;
    for (auto i : pixels) var += ((*plane)[i] - mean) * ((*plane)[i] - mean);
    const double sigma = std::max(std::sqrt(var / n), 1e-12);
    for (auto i : pixels) {
      const double z = ((*plane)[i] - mean) / sigma;
      hist[c * kStandardizedBins +
           bin_of(z, -kStandardizedRange, kStandardizedRange, kStandardizedBins)] += 1.0 / n;
    }
    ++c;
  }
  return hist;
}

}  // namespace

RawFeature baseline_descriptor(const RasterImage& img, DescriptorKind kind) {
  RawFeature out;
  switch (kind) {
    case DescriptorKind::HU7: out.values = hu_moments(img); break;
    case DescriptorKind::COLOR_MOMENTS: out.values = color_moments(img); break;
    case DescriptorKind::RG_HISTOGRAM: out.values = rg_histogram(img); break;
    case DescriptorKind::TRANSFORMED_COLOR_DIST: out.values = transformed_color_distribution(img); break;
    default: throw InvalidSpec(std::string(name(kind)) + " is not a baseline descriptor");
  }
  out.valid.assign(out.values.size(), 1);
  return out;
}

RawFeature descriptor(const RasterImage& img, DescriptorKind kind) {
  if (is_invariant_kind(kind)) return invariant_descriptor(scdmi50(img), kind);
  return baseline_descriptor(img, kind);
}

double chi_square_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw InvalidSpec("chi-square distance of vectors with lengths " + std::to_string(a.size()) +
                      " and " + std::to_string(b.size()));
  }
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    d += diff * diff / (std::abs(a[i]) + std::abs(b[i]) + kChiSquareEpsilon);
  }
  return d;
}

std::vector<std::vector<double>> feature_normalize(std::span<const RawFeature> gallery) {
  std::vector<std::vector<double>> out;
  if (gallery.empty()) return out;
  const std::size_t dims = gallery.front().values.size();
  for (const auto& f : gallery) {
    if (f.values.size() != dims || f.valid.size() != dims) {
      throw InvalidSpec("feature_normalize: inconsistent feature dimensions");
    }
  }
  std::vector<double> scale(dims, 1e-12);
  for (std::size_t d = 0; d < dims; ++d) {
    std::vector<double> mags;
    for (const auto& f : gallery) {
      if (f.valid[d]) mags.push_back(std::abs(f.values[d]));
    }
    if (mags.empty()) continue;
    const std::size_t mid = mags.size() / 2;
    std::nth_element(mags.begin(), mags.begin() + mid, mags.end());
    double median = mags[mid];
    if (mags.size() % 2 == 0) {
      median = 0.5 * (median + *std::max_element(mags.begin(), mags.begin() + mid));
    }
    scale[d] = std::max(median, 1e-12);
  }
  out.reserve(gallery.size());
  for (const auto& f : gallery) {
    std::vector<double> v(dims, 0.0);
    for (std::size_t d = 0; d < dims; ++d) {
      if (!f.valid[d]) continue;
      const double x = f.values[d];
      v[d] = std::copysign(std::log1p(std::abs(x) / scale[d]), x);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string_view to_string(Split split) noexcept {
  return split == Split::Train ? "train" : "test";
}

Split parse_split(std::string_view text) {
  if (text == "train") return Split::Train;
  if (text == "test") return Split::Test;
  throw InvalidSpec("split must be 'train' or 'test', got '" + std::string(text) + "'");
}

double nearest_neighbor_accuracy(const std::vector<std::vector<double>>& features,
                                 std::span<const std::string> labels,
                                 std::span<const Split> splits) {
  if (features.size() != labels.size() || features.size() != splits.size()) {
    throw InvalidSpec("features, labels and splits differ in length");
  }
  std::vector<std::size_t> train, test;
  for (std::size_t i = 0; i < features.size(); ++i) {
    (splits[i] == Split::Train ? train : test).push_back(i);
  }
  if (train.empty() || test.empty()) throw InvalidSpec("classification needs train and test items");

  std::vector<std::uint8_t> correct(test.size(), 0);
  parallel_for(test.size(), [&](std::size_t t) {
    const std::size_t q = test[t];
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = train.front();
    for (auto c : train) {
      const double d = chi_square_distance(features[q], features[c]);
      if (d < best) {
        best = d;
        best_idx = c;
      }
    }
    correct[t] = labels[best_idx] == labels[q];
  });
  const auto hits = std::count(correct.begin(), correct.end(), 1);
  return static_cast<double>(hits) / static_cast<double>(test.size());
}

double PRCurve::area() const noexcept {
  double a = 0.0;
  for (std::size_t i = 1; i < kRecallLevels; ++i) {
    a += 0.5 * (precision[i] + precision[i - 1]) * (recall[i] - recall[i - 1]);
  }
  return a;
}

PRCurve precision_recall_curve(const std::vector<std::vector<double>>& features,
                               std::span<const std::string> labels) {
  const std::size_t n = features.size();
  if (labels.size() != n) throw InvalidSpec("features and labels differ in length");
  std::map<std::string, std::size_t> class_size;
  for (const auto& l : labels) ++class_size[l];
  for (const auto& [label, size] : class_size) {
    if (size < 2) throw InvalidSpec("class '" + label + "' has fewer than two members");
  }

  std::vector<std::array<double, kRecallLevels>> per_query(n);
  parallel_for(n, [&](std::size_t q) {
    std::vector<std::pair<double, std::size_t>> ranked;
    ranked.reserve(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (j != q) ranked.emplace_back(chi_square_distance(features[q], features[j]), j);
    }
    std::sort(ranked.begin(), ranked.end());
    const double relevant = static_cast<double>(class_size.at(labels[q]) - 1);

    std::array<double, kRecallLevels> best{};
    std::size_t hits = 0;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      if (labels[ranked[r].second] != labels[q]) continue;
      ++hits;
      const double precision = static_cast<double>(hits) / static_cast<double>(r + 1);
      const double recall = static_cast<double>(hits) / relevant;
      for (std::size_t level = 0; level < kRecallLevels; ++level) {
        if (recall + 1e-12 >= static_cast<double>(level) / 10.0) {
          best[level] = std::max(best[level], precision);
        }
      }
    }
    per_query[q] = best;
  });

  PRCurve curve;
  for (std::size_t level = 0; level < kRecallLevels; ++level) {
    curve.recall[level] = static_cast<double>(level) / 10.0;
    double sum = 0.0;
    for (const auto& p : per_query) sum += p[level];
    curve.precision[level] = n ? sum / static_cast<double>(n) : 0.0;
  }
  return curve;
}

std::map<DescriptorKind, std::vector<std::vector<double>>> extract_features(
    std::span<const LabeledImage> images, std::span<const DescriptorKind> kinds) {
  const bool need_invariants = std::any_of(kinds.begin(), kinds.end(), is_invariant_kind);
  std::vector<std::map<DescriptorKind, RawFeature>> raw(images.size());
  parallel_for(images.size(), [&](std::size_t i) {
    const RasterImage& img = images[i].image;
    FeatureVector fv;
    if (need_invariants) fv = scdmi50(img);
    for (auto kind : kinds) {
      raw[i][kind] = is_invariant_kind(kind) ? invariant_descriptor(fv, kind)
                                             : baseline_descriptor(img, kind);
    }
  });

  std::map<DescriptorKind, std::vector<std::vector<double>>> out;
  for (auto kind : kinds) {
    std::vector<RawFeature> column;
    column.reserve(raw.size());
    for (auto& r : raw) column.push_back(std::move(r[kind]));
    if (uses_log_normalization(kind)) {
      out[kind] = feature_normalize(column);
    } else {
      auto& dst = out[kind];
      for (auto& f : column) dst.push_back(std::move(f.values));
    }
  }
  return out;
}

namespace {

std::vector<std::string> labels_of(std::span<const LabeledImage> dataset) {
  std::vector<std::string> labels;
  for (const auto& item : dataset) labels.push_back(item.label);
  return labels;
}

std::vector<Split> splits_of(std::span<const LabeledImage> dataset) {
  std::vector<Split> splits;
  for (const auto& item : dataset) splits.push_back(item.split);
  return splits;
}

}  // namespace

double knn_classify(std::span<const LabeledImage> dataset, DescriptorKind kind) {
  const std::array<DescriptorKind, 1> kinds = {kind};
  const auto features = extract_features(dataset, kinds);
  return nearest_neighbor_accuracy(features.at(kind), labels_of(dataset), splits_of(dataset));
}

PRCurve precision_recall(std::span<const LabeledImage> dataset, DescriptorKind kind) {
  const std::array<DescriptorKind, 1> kinds = {kind};
  const auto features = extract_features(dataset, kinds);
  return precision_recall_curve(features.at(kind), labels_of(dataset));
}

BenchResult run_benchmark(std::span<const LabeledImage> dataset,
                          std::span<const DescriptorKind> kinds) {
  const auto features = extract_features(dataset, kinds);
  const auto labels = labels_of(dataset);
  const auto splits = splits_of(dataset);
  const bool has_train = std::count(splits.begin(), splits.end(), Split::Train) > 0;
  const bool has_test = std::count(splits.begin(), splits.end(), Split::Test) > 0;
  BenchResult result;
  for (auto kind : kinds) {
    if (has_train && has_test) {
      result.accuracy.emplace_back(kind,
                                   nearest_neighbor_accuracy(features.at(kind), labels, splits));
    }
    result.curves.emplace_back(kind, precision_recall_curve(features.at(kind), labels));
  }
  return result;
}

std::string accuracy_csv(const BenchResult& result) {
  std::string out = "descriptor,accuracy\n";
  for (const auto& [kind, acc] : result.accuracy) {
    out += std::string(name(kind)) + "," + format_double(acc) + "\n";
  }
  return out;
}

std::string pr_csv(const BenchResult& result) {
  std::string out = "descriptor,recall_level,precision\n";
  for (const auto& [kind, curve] : result.curves) {
    for (std::size_t i = 0; i < kRecallLevels; ++i) {
      out += std::string(name(kind)) + "," + format_double(curve.recall[i]) + "," +
             format_double(curve.precision[i]) + "\n";
    }
  }
  return out;
}

std::vector<ManifestRow> parse_manifest(std::string_view text) {
  std::vector<ManifestRow> rows;
  std::size_t line_no = 0;
  bool first = true;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (first) {
      first = false;
      if (fields.size() == 3 && fields[0] == "path" && fields[1] == "label" && fields[2] == "split") {
        continue;
      }
    }
    if (fields.size() != 3) throw ParseError(line_no, "expected 3 fields: path,label,split");
    if (fields[0].empty()) throw ParseError(line_no, "empty path");
    if (fields[1].empty()) throw ParseError(line_no, "empty label");
    ManifestRow row{fields[0], fields[1], Split::Test};
    try {
      row.split = parse_split(fields[2]);
    } catch (const InvalidSpec& e) {
      throw ParseError(line_no, e.what());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

LabeledDataset load_dataset(const std::filesystem::path& manifest_path) {
  const auto rows = parse_manifest(read_text_file(manifest_path));
  const auto base = manifest_path.parent_path();
  LabeledDataset out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    std::filesystem::path p(row.path);
    if (p.is_relative()) p = base / p;
    out.push_back({row.path, row.label, row.split, read_ppm(p)});
  }
  return out;
}

LabeledDataset make_classification_set(std::uint64_t seed, const ClassificationSetOptions& opts) {
  if (opts.classes < 2 || opts.transforms < 1 || opts.size < 16) {
    throw InvalidSpec("classification set needs >= 2 classes, >= 1 transform and size >= 16");
  }
  const std::array<double, 2> center = {(opts.size - 1) / 2.0, (opts.size - 1) / 2.0};
  const int per_class = opts.transforms + 1;
  const int train_count = std::clamp(static_cast<int>(std::lround(opts.train_fraction * per_class)),
                                     1, per_class - 1);

  LabeledDataset out(static_cast<std::size_t>(opts.classes) * per_class);
  parallel_for(static_cast<std::size_t>(opts.classes), [&](std::size_t c) {
    const RasterImage proto = render_scene(random_scene(derive_seed(seed, c, 0)), opts.size, opts.size);
    std::vector<int> order(static_cast<std::size_t>(per_class));
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(derive_seed(seed, c, 1));
    std::shuffle(order.begin(), order.end(), rng);
    std::set<int> train(order.begin(), order.begin() + train_count);

    for (int v = 0; v < per_class; ++v) {
      RasterImage img = proto;
      if (v > 0) {
        const auto s = sample_shape_affine(derive_seed(seed, c, 2 * v + 100), {opts.det_lo, opts.det_hi},
                                           opts.max_shape_condition, center);
        const auto k = sample_color_affine(derive_seed(seed, c, 2 * v + 101),
                                           opts.max_color_condition, opts.color_offset);
        img = apply_color_affine(apply_shape_affine(proto, s), k);
      }
      auto& item = out[c * per_class + v];
      item.label = "class_" + std::to_string(c);
      item.split = train.count(v) ? Split::Train : Split::Test;
      item.image = std::move(img);
    }
  });
  return out;
}

LabeledDataset make_retrieval_set(std::uint64_t seed, const RetrievalSetOptions& opts) {
  if (opts.classes < 2 || opts.views < 1 || opts.color_transforms < 1 || opts.size < 16) {
    throw InvalidSpec("retrieval set needs >= 2 classes, >= 1 view, >= 1 color map, size >= 16");
  }
  const std::array<double, 2> center = {(opts.size - 1) / 2.0, (opts.size - 1) / 2.0};
  const std::size_t per_class = static_cast<std::size_t>(opts.views) * opts.color_transforms;
  LabeledDataset out(static_cast<std::size_t>(opts.classes) * per_class);
  parallel_for(static_cast<std::size_t>(opts.classes), [&](std::size_t c) {
    const RasterImage proto = render_scene(random_scene(derive_seed(seed, c, 0)), opts.size, opts.size);
    for (int v = 0; v < opts.views; ++v) {
      const auto s = sample_shape_affine(derive_seed(seed, c, 1000 + v), {0.7, 1.4},
                                         opts.max_shape_condition, center);
      const RasterImage view = apply_shape_affine(proto, s);
      for (int t = 0; t < opts.color_transforms; ++t) {
        const auto k = sample_color_affine(derive_seed(seed, c, 2000 + v * 64 + t),
                                           opts.max_color_condition, opts.color_offset);
        auto& item = out[c * per_class + static_cast<std::size_t>(v) * opts.color_transforms + t];
        item.label = "class_" + std::to_string(c);
        item.split = Split::Test;
        item.image = apply_color_affine(view, k);
      }
    }
  });
  return out;
}

}  // namespace scdmi
