#ifndef HDSEG_IO_HPP
#define HDSEG_IO_HPP

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hdseg/class_model.hpp"
#include "hdseg/data.hpp"
#include "hdseg/encoder.hpp"
#include "hdseg/pipeline.hpp"
#include "hdseg/types.hpp"

namespace hdseg {

// Binary layouts are little-endian throughout.
//
// Class-model checkpoint (.hseg):
//   "HSEG" | version u32 | num_classes u32 | hd_dim u32
//   | num_classes * hd_dim accumulator entries, i32, row-major
//
// Encoder checkpoint (.henc) stores parameters only; the projection matrix is
// regenerated from the seed on load:
//   "HENC" | version u32 | feature_dim u32 | hd_dim u32 | seed u64 | epsilon f64
//
// Per-scan feature file (.hfea):
//   "HFEA" | version u32 | point_count u32 | feature_dim u32
//   | point_count * feature_dim f32 | point_count u16 labels
// The ignore sentinel is stored as 0xffff.

std::vector<std::byte> serializeModel(const ClassModel& model);
ClassModel deserializeModel(std::span<const std::byte> bytes);
void saveModel(const ClassModel& model, const std::filesystem::path& path);
ClassModel loadModel(const std::filesystem::path& path);

std::vector<std::byte> serializeEncoder(const Encoder& encoder);
Encoder deserializeEncoder(std::span<const std::byte> bytes);
void saveEncoder(const Encoder& encoder, const std::filesystem::path& path);
Encoder loadEncoder(const std::filesystem::path& path);

void writeFeatureScan(const std::filesystem::path& path,
                      const Eigen::Ref<const RowMatrixXf>& features,
                      std::span<const std::int32_t> labels);

/// Writes one .hfea file per scan: <dir>/<prefix>NNNN.hfea.
void saveFeatureSet(const std::filesystem::path& dir,
                    const LabeledFeatureSet& set,
                    const std::string& prefix = "scan_");

/// Loads a stage dataset. A .hfea file is one scan; a directory is read as
/// its lexicographically sorted *.hfea files, one scan each.
LabeledFeatureSet loadFeatureSet(const std::filesystem::path& path);

/// Loads KITTI-format scans: every *.bin in the directory (sorted), each with
/// its .label sibling (same stem, same directory or ../labels/), remapped and
/// run through the geometric extractor.
LabeledFeatureSet loadKittiSet(const std::filesystem::path& dir,
                               const FeatureParams& params,
                               const ClassRemap& remap);

ClassRemap loadClassRemap(const std::filesystem::path& path);

std::vector<std::byte> readFileBytes(const std::filesystem::path& path);
void writeFileBytes(const std::filesystem::path& path,
                    std::span<const std::byte> bytes);

/// One row per epoch: epoch, miou, iou_class_0..iou_class_{C-1},
/// points_processed, wall_time_s; then "# throughput_fps,<value>".
void writeReportCsv(std::ostream& os, const AdaptationReport& report,
                    Index num_classes);

/// Same row format, single record, no summary line.
void writeEpochCsv(std::ostream& os, const EpochRecord& rec, Index num_classes);

/// "%.9g" with NaN spelled "nan"; all CSV numbers go through this.
std::string formatDouble(double v);

}  // namespace hdseg

#endif  // HDSEG_IO_HPP
