#ifndef HDSEG_DATA_HPP
#define HDSEG_DATA_HPP

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "hdseg/types.hpp"

namespace hdseg {

/// One LiDAR scan: rows are (x, y, z, intensity). Labels, when present, are
/// contiguous class indices with kIgnoreLabel for unmapped points; raw_labels
/// keep the verbatim file words so serialization is bit-exact.
struct PointCloudScan {
  Eigen::Matrix<float, Eigen::Dynamic, 4, Eigen::RowMajor> points;
  std::vector<std::uint32_t> raw_labels;
  std::vector<std::int32_t> labels;

  Index size() const { return points.rows(); }
  bool hasLabels() const { return !labels.empty(); }
};

/// Raw semantic label -> contiguous class index. Anything unmapped becomes
/// the ignore sentinel.
struct ClassRemap {
  std::unordered_map<std::uint32_t, std::int32_t> map;

  std::int32_t remap(std::uint32_t raw_semantic) const {
    const auto it = map.find(raw_semantic);
    return it == map.end() ? kIgnoreLabel : it->second;
  }
};

/// Flat per-point view of one stage's data. scan_ends holds the exclusive end
/// offset of each scan (strictly increasing, back() == numPoints()).
struct LabeledFeatureSet {
  RowMatrixXf features;               // numPoints x feature_dim
  std::vector<std::int32_t> labels;   // kIgnoreLabel = excluded
  std::vector<Index> scan_ends;

  Index numPoints() const { return features.rows(); }
  Index featureDim() const { return features.cols(); }
  Index numScans() const { return static_cast<Index>(scan_ends.size()); }
  Index scanBegin(Index s) const { return s == 0 ? 0 : scan_ends[static_cast<std::size_t>(s - 1)]; }
  Index scanEnd(Index s) const { return scan_ends[static_cast<std::size_t>(s)]; }

  /// Throws ContractError when sizes or scan offsets are inconsistent.
  void validate() const;
};

/// Decodes a KITTI velodyne .bin payload: little-endian float32 quadruples
/// (x, y, z, intensity), 16 bytes per point, in file order.
PointCloudScan parseKittiBin(std::span<const std::byte> bytes);
std::vector<std::byte> serializeKittiBin(const PointCloudScan& scan);

/// Decodes a KITTI .label payload onto an existing scan: one little-endian
/// uint32 per point, low 16 bits semantic label, high 16 bits instance id
/// (parsed, then discarded). Semantic labels go through `remap`.
void attachKittiLabels(PointCloudScan& scan, std::span<const std::byte> bytes,
                       const ClassRemap& remap);
std::vector<std::byte> serializeKittiLabels(const PointCloudScan& scan);

/// Parses "raw_label contiguous_index" lines; '#' starts a comment.
ClassRemap parseClassRemap(const std::string& text);

struct FeatureParams {
  Index feature_dim = 128;
};

/// Deterministic per-point geometric features standing in for a learned
/// extractor: raw (x, y, z, intensity), range, azimuth, elevation and
/// z-height, tiled with fixed-coefficient sinusoidal combinations up to
/// feature_dim. Azimuth and elevation at the origin are 0.
RowMatrixXf extractGeometricFeatures(const PointCloudScan& scan,
                                     const FeatureParams& params);

/// Synthetic three-stage drift benchmark: Gaussian class clusters whose means
/// translate by drift_shift in the adapt and test stages.
struct SyntheticDriftSpec {
  Index num_classes = 6;
  Index feature_dim = 16;
  Index points_per_scan = 2000;
  std::array<Index, 3> scans_per_stage = {20, 20, 20};  // pretrain, adapt, test
  RowMatrixXf class_means;   // num_classes x feature_dim
  double class_scale = 1.0;
  RowMatrixXf drift_shift;   // num_classes x feature_dim
  std::uint64_t seed = 1;

  /// Means on scaled coordinate axes; each class drifts `drift_magnitude`
  /// toward the next class's pre-drift mean.
  static SyntheticDriftSpec build(Index num_classes, Index feature_dim,
                                  Index points_per_scan,
                                  std::array<Index, 3> scans_per_stage,
                                  double class_scale, double mean_separation,
                                  double drift_magnitude, std::uint64_t seed);

  /// The desk-scale default: C=6, p=16, 20 scans x 2000 points per stage,
  /// unit scale, separation 4, drift magnitude 2.
  static SyntheticDriftSpec defaultBenchmark(std::uint64_t seed = 1);

  void validate() const;
};

struct SyntheticStages {
  LabeledFeatureSet pretrain;
  LabeledFeatureSet adapt;
  LabeledFeatureSet test;
};

/// Fully determined by spec.seed; the three stages use independent seeded
/// substreams. Labels are balanced within every scan.
SyntheticStages generateSynthetic(const SyntheticDriftSpec& spec);

}  // namespace hdseg

#endif  // HDSEG_DATA_HPP
