#include "hdseg/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "hdseg/errors.hpp"

namespace hdseg {

ConfusionMatrix::ConfusionMatrix(Index num_classes) {
  if (num_classes < 1) {
    throw ConfigError("confusion matrix needs at least one class");
  }
  counts_.setZero(num_classes, num_classes);
}

void ConfusionMatrix::accumulate(Index gt, Index pred) {
  if (gt < 0 || gt >= numClasses() || pred < 0 || pred >= numClasses()) {
    throw ContractError("confusion matrix: indices (" + std::to_string(gt) +
                        ", " + std::to_string(pred) + ") out of range for " +
                        std::to_string(numClasses()) + " classes");
  }
  ++counts_(gt, pred);
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.numClasses() != numClasses()) {
    throw ContractError("confusion matrix merge: class counts differ");
  }
  counts_ += other.counts_;
  return *this;
}

IouResult iou(const ConfusionMatrix& cm) {
  const Index c = cm.numClasses();
  IouResult result;
  result.per_class.resize(c);
  double sum = 0.0;
  Index defined = 0;
  for (Index j = 0; j < c; ++j) {
    const std::int64_t tp = cm.at(j, j);
    const std::int64_t fn = cm.counts().row(j).sum() - tp;
    const std::int64_t fp = cm.counts().col(j).sum() - tp;
    const std::int64_t uni = tp + fp + fn;
    if (uni == 0) {
      result.per_class[j] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    result.per_class[j] = static_cast<double>(tp) / static_cast<double>(uni);
    sum += result.per_class[j];
    ++defined;
  }
  if (defined == 0) {
    throw StateError("iou: no data (every class has an empty union)");
  }
  result.miou = sum / static_cast<double>(defined);
  return result;
}

ThroughputRecord measureFps(std::int64_t scan_count, std::int64_t point_count,
                            double wall_time) {
  if (!(wall_time > 0.0)) {
    throw ContractError("measure_fps: wall time must be > 0");
  }
  ThroughputRecord rec;
  rec.scans = scan_count;
  rec.points = point_count;
  rec.wall_time = wall_time;
  rec.fps = static_cast<double>(scan_count) / wall_time;
  return rec;
}

}  // namespace hdseg
