#include "hdseg/io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <span>

#include "hdseg/errors.hpp"

namespace hdseg {

namespace fs = std::filesystem;

namespace {

constexpr std::uint32_t kModelVersion = 1;
constexpr std::uint32_t kEncoderVersion = 1;
constexpr std::uint32_t kFeatureVersion = 1;
constexpr std::uint16_t kIgnoreLabelFile = 0xffff;

class ByteWriter {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(std::byte((v >> (8 * i)) & 0xff));
  }
  void u16(std::uint16_t v) {
    bytes_.push_back(std::byte(v & 0xff));
    bytes_.push_back(std::byte((v >> 8) & 0xff));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes_.push_back(std::byte((v >> (8 * i)) & 0xff));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void magic(const char (&m)[5]) {
    for (int i = 0; i < 4; ++i) bytes_.push_back(std::byte(m[i]));
  }
  void reserve(std::size_t n) { bytes_.reserve(n); }
  std::vector<std::byte> take() { return std::move(bytes_); }

 private:
  std::vector<std::byte> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= static_cast<std::uint32_t>(std::to_integer<std::uint8_t>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 4;
    return v;
  }
  std::uint16_t u16() {
    need(2);
    const auto lo = std::to_integer<std::uint8_t>(bytes_[pos_]);
    const auto hi = std::to_integer<std::uint8_t>(bytes_[pos_ + 1]);
    pos_ += 2;
    return static_cast<std::uint16_t>(lo | (hi << 8));
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
      v |= static_cast<std::uint64_t>(std::to_integer<std::uint8_t>(bytes_[pos_ + i]))
           << (8 * i);
    }
    pos_ += 8;
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  void expectMagic(const char (&m)[5], const char* what) {
    need(4);
    for (int i = 0; i < 4; ++i) {
      if (std::to_integer<char>(bytes_[pos_ + i]) != m[i]) {
        throw FormatError(std::string(what) + ": bad magic, expected \"" + m +
                          "\"");
      }
    }
    pos_ += 4;
  }
  void expectEnd(const char* what) {
    if (pos_ != bytes_.size()) {
      throw FormatError(std::string(what) + ": trailing bytes");
    }
  }

 private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw FormatError("truncated payload");
    // the caller's message comes from the surrounding expect/parse context
  }

  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

std::vector<fs::path> sortedFiles(const fs::path& dir, const std::string& ext) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ext) {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

}  // namespace

std::vector<std::byte> readFileBytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::byte> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()),
          static_cast<std::streamsize>(size));
  if (!in) throw FormatError("failed reading " + path.string());
  return bytes;
}

void writeFileBytes(const fs::path& path, std::span<const std::byte> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("failed writing " + path.string());
}

std::vector<std::byte> serializeModel(const ClassModel& model) {
  ByteWriter w;
  w.reserve(16 + static_cast<std::size_t>(model.numClasses()) *
                     static_cast<std::size_t>(model.hdDim()) * 4);
  w.magic("HSEG");
  w.u32(kModelVersion);
  w.u32(static_cast<std::uint32_t>(model.numClasses()));
  w.u32(static_cast<std::uint32_t>(model.hdDim()));
  for (Index j = 0; j < model.numClasses(); ++j) {
    for (Index c = 0; c < model.hdDim(); ++c) {
      w.i32(model.accumulators()(j, c));
    }
  }
  return w.take();
}

ClassModel deserializeModel(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  r.expectMagic("HSEG", "model checkpoint");
  const std::uint32_t version = r.u32();
  if (version != kModelVersion) {
    throw FormatError("model checkpoint: unsupported version " +
                      std::to_string(version));
  }
  const auto num_classes = static_cast<Index>(r.u32());
  const auto hd_dim = static_cast<Index>(r.u32());
  if (num_classes < 1 || hd_dim < 1) {
    throw FormatError("model checkpoint: empty dimensions");
  }
  RowMatrixXi acc(num_classes, hd_dim);
  for (Index j = 0; j < num_classes; ++j) {
    for (Index c = 0; c < hd_dim; ++c) acc(j, c) = r.i32();
  }
  r.expectEnd("model checkpoint");
  return ClassModel::fromAccumulators(std::move(acc));
}

void saveModel(const ClassModel& model, const fs::path& path) {
  writeFileBytes(path, serializeModel(model));
}

ClassModel loadModel(const fs::path& path) {
  return deserializeModel(readFileBytes(path));
}

std::vector<std::byte> serializeEncoder(const Encoder& encoder) {
  if (!encoder.seeded()) {
    throw StateError("encoder with an external projection cannot be "
                     "checkpointed by parameters");
  }
  ByteWriter w;
  w.magic("HENC");
  w.u32(kEncoderVersion);
  w.u32(static_cast<std::uint32_t>(encoder.featureDim()));
  w.u32(static_cast<std::uint32_t>(encoder.hdDim()));
  w.u64(encoder.seed());
  w.f64(encoder.epsilon());
  return w.take();
}

Encoder deserializeEncoder(std::span<const std::byte> bytes) {
  ByteReader r(bytes);
  r.expectMagic("HENC", "encoder checkpoint");
  const std::uint32_t version = r.u32();
  if (version != kEncoderVersion) {
    throw FormatError("encoder checkpoint: unsupported version " +
                      std::to_string(version));
  }
  const auto feature_dim = static_cast<Index>(r.u32());
  const auto hd_dim = static_cast<Index>(r.u32());
  const std::uint64_t seed = r.u64();
  const double epsilon = r.f64();
  r.expectEnd("encoder checkpoint");
  return Encoder(feature_dim, hd_dim, seed, epsilon);
}

void saveEncoder(const Encoder& encoder, const fs::path& path) {
  writeFileBytes(path, serializeEncoder(encoder));
}

Encoder loadEncoder(const fs::path& path) {
  return deserializeEncoder(readFileBytes(path));
}

void writeFeatureScan(const fs::path& path,
                      const Eigen::Ref<const RowMatrixXf>& features,
                      std::span<const std::int32_t> labels) {
  if (static_cast<Index>(labels.size()) != features.rows()) {
    throw ContractError("feature scan: label count does not match points");
  }
  ByteWriter w;
  w.reserve(16 + static_cast<std::size_t>(features.size()) * 4 +
            labels.size() * 2);
  w.magic("HFEA");
  w.u32(kFeatureVersion);
  w.u32(static_cast<std::uint32_t>(features.rows()));
  w.u32(static_cast<std::uint32_t>(features.cols()));
  for (Index i = 0; i < features.rows(); ++i) {
    for (Index j = 0; j < features.cols(); ++j) w.f32(features(i, j));
  }
  for (std::int32_t y : labels) {
    if (y == kIgnoreLabel) {
      w.u16(kIgnoreLabelFile);
    } else if (y >= 0 && y < kIgnoreLabelFile) {
      w.u16(static_cast<std::uint16_t>(y));
    } else {
      throw ContractError("feature scan: label " + std::to_string(y) +
                          " not representable");
    }
  }
  writeFileBytes(path, w.take());
}

namespace {

void appendFeatureScan(LabeledFeatureSet& set, const fs::path& path) {
  const auto bytes = readFileBytes(path);
  ByteReader r(std::span<const std::byte>(bytes));
  r.expectMagic("HFEA", "feature scan");
  const std::uint32_t version = r.u32();
  if (version != kFeatureVersion) {
    throw FormatError("feature scan " + path.string() +
                      ": unsupported version " + std::to_string(version));
  }
  const auto count = static_cast<Index>(r.u32());
  const auto dim = static_cast<Index>(r.u32());
  if (count < 1 || dim < 1) {
    throw FormatError("feature scan " + path.string() + ": empty scan");
  }
  if (set.numPoints() > 0 && set.featureDim() != dim) {
    throw FormatError("feature scan " + path.string() + ": feature_dim " +
                      std::to_string(dim) + " differs from earlier scans");
  }
  const Index offset = set.numPoints();
  set.features.conservativeResize(offset + count, dim);
  for (Index i = 0; i < count; ++i) {
    for (Index j = 0; j < dim; ++j) {
      const float v = r.f32();
      if (!std::isfinite(v)) {
        throw FormatError("feature scan " + path.string() + ": point " +
                          std::to_string(i) + " has non-finite features");
      }
      set.features(offset + i, j) = v;
    }
  }
  for (Index i = 0; i < count; ++i) {
    const std::uint16_t y = r.u16();
    set.labels.push_back(y == kIgnoreLabelFile ? kIgnoreLabel
                                               : static_cast<std::int32_t>(y));
  }
  r.expectEnd("feature scan");
  set.scan_ends.push_back(offset + count);
}

}  // namespace

void saveFeatureSet(const fs::path& dir, const LabeledFeatureSet& set,
                    const std::string& prefix) {
  set.validate();
  fs::create_directories(dir);
  char name[64];
  for (Index s = 0; s < set.numScans(); ++s) {
    std::snprintf(name, sizeof(name), "%s%04lld.hfea", prefix.c_str(),
                  static_cast<long long>(s));
    const Index begin = set.scanBegin(s);
    const Index rows = set.scanEnd(s) - begin;
    writeFeatureScan(dir / name, set.features.middleRows(begin, rows),
                     std::span<const std::int32_t>(set.labels.data() + begin,
                                                   static_cast<std::size_t>(rows)));
  }
}

LabeledFeatureSet loadFeatureSet(const fs::path& path) {
  LabeledFeatureSet set;
  if (fs::is_directory(path)) {
    const auto files = sortedFiles(path, ".hfea");
    if (files.empty()) {
      throw FormatError("no .hfea scans found in " + path.string());
    }
    for (const auto& f : files) appendFeatureScan(set, f);
  } else if (fs::exists(path)) {
    appendFeatureScan(set, path);
  } else {
    throw FormatError("stage data missing: " + path.string());
  }
  set.validate();
  return set;
}

LabeledFeatureSet loadKittiSet(const fs::path& dir, const FeatureParams& params,
                               const ClassRemap& remap) {
  if (!fs::is_directory(dir)) {
    throw FormatError("stage data missing: " + dir.string());
  }
  const auto bins = sortedFiles(dir, ".bin");
  if (bins.empty()) {
    throw FormatError("no .bin scans found in " + dir.string());
  }
  LabeledFeatureSet set;
  for (const auto& bin : bins) {
    PointCloudScan scan = parseKittiBin(readFileBytes(bin));
    fs::path label_path = bin;
    label_path.replace_extension(".label");
    if (!fs::exists(label_path)) {
      label_path = bin.parent_path().parent_path() / "labels" /
                   (bin.stem().string() + ".label");
    }
    if (!fs::exists(label_path)) {
      throw FormatError("missing label file for " + bin.string());
    }
    attachKittiLabels(scan, readFileBytes(label_path), remap);
    if (scan.size() == 0) continue;
    const RowMatrixXf feats = extractGeometricFeatures(scan, params);
    const Index offset = set.numPoints();
    set.features.conservativeResize(offset + feats.rows(), feats.cols());
    set.features.bottomRows(feats.rows()) = feats;
    set.labels.insert(set.labels.end(), scan.labels.begin(), scan.labels.end());
    set.scan_ends.push_back(offset + feats.rows());
  }
  if (set.numPoints() == 0) {
    throw FormatError("no points loaded from " + dir.string());
  }
  set.validate();
  return set;
}

ClassRemap loadClassRemap(const fs::path& path) {
  const auto bytes = readFileBytes(path);
  return parseClassRemap(std::string(
      reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::string formatDouble(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

namespace {

void writeCsvHeader(std::ostream& os, Index num_classes) {
  os << "epoch,miou";
  for (Index j = 0; j < num_classes; ++j) os << ",iou_class_" << j;
  os << ",points_processed,wall_time_s\n";
}

void writeCsvRow(std::ostream& os, const EpochRecord& rec, Index num_classes) {
  os << rec.epoch << ',' << formatDouble(rec.miou);
  for (Index j = 0; j < num_classes; ++j) {
    os << ',' << formatDouble(j < rec.per_class_iou.size()
                                  ? rec.per_class_iou[j]
                                  : std::numeric_limits<double>::quiet_NaN());
  }
  os << ',' << rec.points_processed << ',' << formatDouble(rec.wall_time)
     << '\n';
}

}  // namespace

void writeReportCsv(std::ostream& os, const AdaptationReport& report,
                    Index num_classes) {
  writeCsvHeader(os, num_classes);
  for (const EpochRecord& rec : report.epoch_records) {
    writeCsvRow(os, rec, num_classes);
  }
  os << "# throughput_fps," << formatDouble(report.throughput_fps) << '\n';
}

void writeEpochCsv(std::ostream& os, const EpochRecord& rec, Index num_classes) {
  writeCsvHeader(os, num_classes);
  writeCsvRow(os, rec, num_classes);
}

}  // namespace hdseg
