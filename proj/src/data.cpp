#include "hdseg/data.hpp"

#include <bit>
#include <cmath>
#include <sstream>
#include <string>

#include "hdseg/errors.hpp"
#include "hdseg/random.hpp"

namespace hdseg {

namespace {

std::uint32_t readU32LE(const std::byte* p) {
  return static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[0])) |
         static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[1])) << 8 |
         static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[2])) << 16 |
         static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(p[3])) << 24;
}

void writeU32LE(std::uint32_t v, std::vector<std::byte>& out) {
  out.push_back(std::byte(v & 0xff));
  out.push_back(std::byte((v >> 8) & 0xff));
  out.push_back(std::byte((v >> 16) & 0xff));
  out.push_back(std::byte((v >> 24) & 0xff));
}

float readF32LE(const std::byte* p) { return std::bit_cast<float>(readU32LE(p)); }

}  // namespace

void LabeledFeatureSet::validate() const {
  if (static_cast<Index>(labels.size()) != numPoints()) {
    throw ContractError("feature set: " + std::to_string(labels.size()) +
                        " labels for " + std::to_string(numPoints()) +
                        " points");
  }
  Index prev = 0;
  for (Index end : scan_ends) {
    if (end <= prev) {
      throw ContractError("feature set: scan offsets must be strictly increasing");
    }
    prev = end;
  }
  if (!scan_ends.empty() && scan_ends.back() != numPoints()) {
    throw ContractError("feature set: last scan offset must equal point count");
  }
  if (scan_ends.empty() && numPoints() != 0) {
    throw ContractError("feature set: points present but no scan offsets");
  }
}

PointCloudScan parseKittiBin(std::span<const std::byte> bytes) {
  if (bytes.size() % 16 != 0) {
    throw FormatError("velodyne payload length " + std::to_string(bytes.size()) +
                      " is not a multiple of 16");
  }
  const Index n = static_cast<Index>(bytes.size() / 16);
  PointCloudScan scan;
  scan.points.resize(n, 4);
  for (Index i = 0; i < n; ++i) {
    const std::byte* p = bytes.data() + i * 16;
    for (Index c = 0; c < 4; ++c) {
      const float v = readF32LE(p + c * 4);
      if (!std::isfinite(v)) {
        throw FormatError("velodyne point " + std::to_string(i) +
                          " has a non-finite coordinate");
      }
      scan.points(i, c) = v;
    }
  }
  return scan;
}

std::vector<std::byte> serializeKittiBin(const PointCloudScan& scan) {
  std::vector<std::byte> out;
  out.reserve(static_cast<std::size_t>(scan.size()) * 16);
  for (Index i = 0; i < scan.size(); ++i) {
    for (Index c = 0; c < 4; ++c) {
      writeU32LE(std::bit_cast<std::uint32_t>(scan.points(i, c)), out);
    }
  }
  return out;
}

void attachKittiLabels(PointCloudScan& scan, std::span<const std::byte> bytes,
                       const ClassRemap& remap) {
  if (bytes.size() != static_cast<std::size_t>(scan.size()) * 4) {
    throw FormatError("label payload holds " + std::to_string(bytes.size() / 4) +
                      " entries for a scan of " + std::to_string(scan.size()) +
                      " points");
  }
  scan.raw_labels.resize(static_cast<std::size_t>(scan.size()));
  scan.labels.resize(static_cast<std::size_t>(scan.size()));
  for (Index i = 0; i < scan.size(); ++i) {
    const std::uint32_t word = readU32LE(bytes.data() + i * 4);
    const std::uint32_t semantic = word & 0xffffu;  // high half: instance id
    scan.raw_labels[static_cast<std::size_t>(i)] = word;
    scan.labels[static_cast<std::size_t>(i)] = remap.remap(semantic);
  }
}

std::vector<std::byte> serializeKittiLabels(const PointCloudScan& scan) {
  if (static_cast<Index>(scan.raw_labels.size()) != scan.size()) {
    throw ContractError("scan has no raw labels to serialize");
  }
  std::vector<std::byte> out;
  out.reserve(scan.raw_labels.size() * 4);
  for (std::uint32_t word : scan.raw_labels) writeU32LE(word, out);
  return out;
}

ClassRemap parseClassRemap(const std::string& text) {
  ClassRemap remap;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    long long raw = 0, mapped = 0;
    if (!(fields >> raw)) continue;  // blank line
    if (!(fields >> mapped) || raw < 0 || raw > 0xffff || mapped < 0) {
      throw FormatError("class remap line " + std::to_string(line_no) +
                        ": expected 'raw_label contiguous_index'");
    }
    std::string trailing;
    if (fields >> trailing) {
      throw FormatError("class remap line " + std::to_string(line_no) +
                        ": trailing tokens");
    }
    const auto key = static_cast<std::uint32_t>(raw);
    if (!remap.map.emplace(key, static_cast<std::int32_t>(mapped)).second) {
      throw FormatError("class remap line " + std::to_string(line_no) +
                        ": duplicate raw label " + std::to_string(raw));
    }
  }
  return remap;
}

RowMatrixXf extractGeometricFeatures(const PointCloudScan& scan,
                                     const FeatureParams& params) {
  if (scan.size() == 0) {
    throw ContractError("feature extraction requires a non-empty scan");
  }
  if (params.feature_dim < 1) {
    throw ConfigError("feature_dim must be positive");
  }
  const Index p = params.feature_dim;
  RowMatrixXf out(scan.size(), p);
  for (Index i = 0; i < scan.size(); ++i) {
    const double x = scan.points(i, 0);
    const double y = scan.points(i, 1);
    const double z = scan.points(i, 2);
    const double intensity = scan.points(i, 3);
    const double range = std::sqrt(x * x + y * y + z * z);
    const double azimuth = range > 0.0 ? std::atan2(y, x) : 0.0;
    const double elevation = range > 0.0 ? std::asin(z / range) : 0.0;
    const double base[8] = {x, y, z, intensity, range, azimuth, elevation, z};
    for (Index k = 0; k < p; ++k) {
      double v;
      if (k < 8) {
        v = base[k];
      } else {
        const double a = 0.25 * (1.0 + static_cast<double>((k * 5) % 7));
        const double b = 0.125 * (1.0 + static_cast<double>((k * 11) % 5));
        v = std::sin(a * base[k % 8] + b * base[(3 * k + 1) % 8]);
      }
      out(i, k) = static_cast<float>(v);
    }
  }
  return out;
}

SyntheticDriftSpec SyntheticDriftSpec::build(
    Index num_classes, Index feature_dim, Index points_per_scan,
    std::array<Index, 3> scans_per_stage, double class_scale,
    double mean_separation, double drift_magnitude, std::uint64_t seed) {
  if (num_classes > feature_dim) {
    throw ConfigError("synthetic factory places means on axes and needs "
                      "num_classes <= feature_dim");
  }
  SyntheticDriftSpec spec;
  spec.num_classes = num_classes;
  spec.feature_dim = feature_dim;
  spec.points_per_scan = points_per_scan;
  spec.scans_per_stage = scans_per_stage;
  spec.class_scale = class_scale;
  spec.seed = seed;
  spec.class_means = RowMatrixXf::Zero(num_classes, feature_dim);
  for (Index c = 0; c < num_classes; ++c) {
    spec.class_means(c, c) = static_cast<float>(mean_separation);
  }
  spec.drift_shift = RowMatrixXf::Zero(num_classes, feature_dim);
  for (Index c = 0; c < num_classes; ++c) {
    Eigen::RowVectorXf dir =
        spec.class_means.row((c + 1) % num_classes) - spec.class_means.row(c);
    const float norm = dir.norm();
    if (norm > 0.0f) {
      spec.drift_shift.row(c) = dir * (static_cast<float>(drift_magnitude) / norm);
    }
  }
  spec.validate();
  return spec;
}

SyntheticDriftSpec SyntheticDriftSpec::defaultBenchmark(std::uint64_t seed) {
  return build(6, 16, 2000, {20, 20, 20}, 1.0, 4.0, 2.0, seed);
}

void SyntheticDriftSpec::validate() const {
  if (num_classes < 1 || feature_dim < 1 || points_per_scan < 1) {
    throw ConfigError("synthetic spec: counts must be >= 1");
  }
  for (Index s : scans_per_stage) {
    if (s < 1) throw ConfigError("synthetic spec: every stage needs >= 1 scan");
  }
  if (!(class_scale > 0.0)) {
    throw ConfigError("synthetic spec: class_scale must be > 0");
  }
  if (class_means.rows() != num_classes || class_means.cols() != feature_dim ||
      drift_shift.rows() != num_classes || drift_shift.cols() != feature_dim) {
    throw ConfigError("synthetic spec: means/drift shape must be classes x dims");
  }
  for (Index a = 0; a < num_classes; ++a) {
    for (Index b = a + 1; b < num_classes; ++b) {
      if ((class_means.row(a).array() == class_means.row(b).array()).all()) {
        throw ConfigError("synthetic spec: class means must be pairwise distinct");
      }
    }
  }
}

namespace {

LabeledFeatureSet generateStage(const SyntheticDriftSpec& spec, int stage,
                                bool drifted) {
  const Index scans = spec.scans_per_stage[static_cast<std::size_t>(stage)];
  const Index n = scans * spec.points_per_scan;
  LabeledFeatureSet set;
  set.features.resize(n, spec.feature_dim);
  set.labels.resize(static_cast<std::size_t>(n));
  set.scan_ends.reserve(static_cast<std::size_t>(scans));
  NormalSampler sampler(mixSeed(spec.seed, 0x5d47u, static_cast<std::uint64_t>(stage)));
  Index i = 0;
  for (Index s = 0; s < scans; ++s) {
    for (Index q = 0; q < spec.points_per_scan; ++q, ++i) {
      const Index c = q % spec.num_classes;  // balanced within each scan
      set.labels[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(c);
      for (Index j = 0; j < spec.feature_dim; ++j) {
        double mean = spec.class_means(c, j);
        if (drifted) mean += spec.drift_shift(c, j);
        set.features(i, j) =
            static_cast<float>(mean + spec.class_scale * sampler.next());
      }
    }
    set.scan_ends.push_back(i);
  }
  return set;
}

}  // namespace

SyntheticStages generateSynthetic(const SyntheticDriftSpec& spec) {
  spec.validate();
  SyntheticStages stages;
  stages.pretrain = generateStage(spec, 0, false);
  stages.adapt = generateStage(spec, 1, true);
  stages.test = generateStage(spec, 2, true);
  return stages;
}

}  // namespace hdseg
