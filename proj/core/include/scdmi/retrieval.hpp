#pragma once

// Evaluation protocol: 1-NN classification and precision-recall retrieval
// under the chi-square distance, for the invariant vector and a set of
// classical color/shape descriptors.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scdmi/image.hpp"
#include "scdmi/moments.hpp"

namespace scdmi {

enum class DescriptorKind {
  SCDMI50,
  SCDMI0_25,
  SCDMI1_25,
  HU7,
  COLOR_MOMENTS,
  RG_HISTOGRAM,
  TRANSFORMED_COLOR_DIST,
};

inline constexpr std::array<DescriptorKind, 7> kAllDescriptors = {
    DescriptorKind::SCDMI50,      DescriptorKind::SCDMI0_25,     DescriptorKind::SCDMI1_25,
    DescriptorKind::HU7,          DescriptorKind::COLOR_MOMENTS, DescriptorKind::RG_HISTOGRAM,
    DescriptorKind::TRANSFORMED_COLOR_DIST};

std::size_t dimension(DescriptorKind kind) noexcept;
std::string_view name(DescriptorKind kind) noexcept;
bool is_invariant_kind(DescriptorKind kind) noexcept;
// Histogram descriptors are probability vectors already and skip log compression.
bool uses_log_normalization(DescriptorKind kind) noexcept;

struct RawFeature {
  std::vector<double> values;
  std::vector<std::uint8_t> valid;
};

// Slices SCDMI50 / SCDMI0_25 / SCDMI1_25 out of a full feature vector.
RawFeature invariant_descriptor(const FeatureVector& fv, DescriptorKind kind);

// HU7 (on |L - mean L|), COLOR_MOMENTS, RG_HISTOGRAM, TRANSFORMED_COLOR_DIST
// over the masked pixels. Throws InvalidSpec for the invariant kinds.
RawFeature baseline_descriptor(const RasterImage& img, DescriptorKind kind);

RawFeature descriptor(const RasterImage& img, DescriptorKind kind);

inline constexpr double kChiSquareEpsilon = 1e-10;

// sum (a_i - b_i)^2 / (|a_i| + |b_i| + eps). Throws InvalidSpec on length mismatch.
double chi_square_distance(std::span<const double> a, std::span<const double> b);

// v -> sign(v) log(1 + |v| / s), s the per-dimension median |v| over valid
// gallery entries (floor 1e-12). Invalid entries become 0.
std::vector<std::vector<double>> feature_normalize(std::span<const RawFeature> gallery);

enum class Split { Train, Test };

std::string_view to_string(Split split) noexcept;
Split parse_split(std::string_view text);

struct LabeledImage {
  std::string path;  // empty for generated images
  std::string label;
  Split split = Split::Test;
  RasterImage image;
};

using LabeledDataset = std::vector<LabeledImage>;

// Fraction of test items whose nearest train item (chi-square) shares the
// label. Ties go to the lowest train index. Throws InvalidSpec on empty splits.
double nearest_neighbor_accuracy(const std::vector<std::vector<double>>& features,
                                 std::span<const std::string> labels,
                                 std::span<const Split> splits);

inline constexpr std::size_t kRecallLevels = 11;

struct PRCurve {
  std::array<double, kRecallLevels> recall{};
  std::array<double, kRecallLevels> precision{};

  // Trapezoidal area under the interpolated curve.
  double area() const noexcept;
};

// Leave-one-out ranking of every item against all others; 11-point
// interpolated precision averaged over queries. Throws InvalidSpec when a
// class has fewer than two members.
PRCurve precision_recall_curve(const std::vector<std::vector<double>>& features,
                               std::span<const std::string> labels);

// Normalized descriptors for every image, one scdmi50 pass per image.
std::map<DescriptorKind, std::vector<std::vector<double>>> extract_features(
    std::span<const LabeledImage> images, std::span<const DescriptorKind> kinds);

double knn_classify(std::span<const LabeledImage> dataset, DescriptorKind kind);
PRCurve precision_recall(std::span<const LabeledImage> dataset, DescriptorKind kind);

struct BenchResult {
  std::vector<std::pair<DescriptorKind, double>> accuracy;
  std::vector<std::pair<DescriptorKind, PRCurve>> curves;
};

// Accuracy is reported only when both splits are populated; curves are
// computed over every item.
BenchResult run_benchmark(std::span<const LabeledImage> dataset,
                          std::span<const DescriptorKind> kinds = kAllDescriptors);

// descriptor,accuracy
std::string accuracy_csv(const BenchResult& result);
// descriptor,recall_level,precision
std::string pr_csv(const BenchResult& result);

// Manifest CSV with header `path,label,split`; relative paths resolve against
// the manifest's directory. Throws ParseError with the row number.
struct ManifestRow {
  std::string path;
  std::string label;
  Split split = Split::Test;
};
std::vector<ManifestRow> parse_manifest(std::string_view text);
LabeledDataset load_dataset(const std::filesystem::path& manifest_path);

// 21-image-per-class style set: each class is a random scene plus
// `transforms` versions under a sampled shape warp composed with a color map.
// `train_fraction` of each class (at least one) goes to the train split.
struct ClassificationSetOptions {
  int classes = 20;
  int transforms = 20;
  int size = 128;
  double train_fraction = 0.1;
  double det_lo = 0.5;
  double det_hi = 2.0;
  double max_shape_condition = 2.5;
  double max_color_condition = 10.0;
  double color_offset = 0.2;
};
LabeledDataset make_classification_set(std::uint64_t seed, const ClassificationSetOptions& opts);

// Retrieval set: each class is `views` shape warps of one scene, each under
// `color_transforms` color maps. Every item is in the test split.
struct RetrievalSetOptions {
  int classes = 30;
  int views = 5;
  int color_transforms = 6;
  int size = 96;
  double max_shape_condition = 2.0;
  double max_color_condition = 10.0;
  double color_offset = 0.2;
};
LabeledDataset make_retrieval_set(std::uint64_t seed, const RetrievalSetOptions& opts);

}  // namespace scdmi
