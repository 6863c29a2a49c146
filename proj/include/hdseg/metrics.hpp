#ifndef HDSEG_METRICS_HPP
#define HDSEG_METRICS_HPP

#include <cstdint>

#include <Eigen/Core>

#include "hdseg/types.hpp"

namespace hdseg {

/// counts(g, p) = points with ground truth g predicted as p. Matrices built
/// on disjoint shards merge additively.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(Index num_classes);

  Index numClasses() const { return counts_.rows(); }
  std::int64_t at(Index gt, Index pred) const { return counts_(gt, pred); }
  const Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>& counts()
      const {
    return counts_;
  }
  std::int64_t total() const { return counts_.sum(); }

  void accumulate(Index gt, Index pred);
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);

 private:
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts_;
};

/// Per-class intersection over union. Classes with an empty union (never in
/// ground truth or predictions) are NaN and excluded from the mean.
struct IouResult {
  Eigen::VectorXd per_class;
  double miou = 0.0;
};

/// Throws StateError when every class has an empty union.
IouResult iou(const ConfusionMatrix& cm);

struct ThroughputRecord {
  std::int64_t scans = 0;
  std::int64_t points = 0;
  double wall_time = 0.0;  // seconds
  double fps = 0.0;        // scans per second
};

/// wall_time must be > 0.
ThroughputRecord measureFps(std::int64_t scan_count, std::int64_t point_count,
                            double wall_time);

}  // namespace hdseg

#endif  // HDSEG_METRICS_HPP
