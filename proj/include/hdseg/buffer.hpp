#ifndef HDSEG_BUFFER_HPP
#define HDSEG_BUFFER_HPP

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "hdseg/types.hpp"

namespace hdseg {

class ClassModel;
class Encoder;
struct LabeledFeatureSet;

/// Buffer sizing and the seed for the random half.
struct BufferConfig {
  double ratio_percent = 5.0;  // k, in (0, 100]
  std::uint64_t seed = 1;
};

/// One epoch's retraining subset. Both halves are kept sorted ascending and
/// are disjoint by construction.
struct BufferSelection {
  std::vector<Index> hard_indices;
  std::vector<Index> random_indices;

  std::size_t totalSize() const {
    return hard_indices.size() + random_indices.size();
  }
  bool contains(Index i) const;
  /// Both halves merged, ascending.
  std::vector<Index> unionAscending() const;
};

/// Per-point classification losses persisted across retraining epochs.
/// Entries outside the active buffer keep their last evaluated value.
class LossStore {
 public:
  explicit LossStore(Index num_points);

  Index size() const { return losses_.size(); }
  bool initialized() const { return initialized_; }
  double loss(Index i) const { return losses_[i]; }
  const Eigen::VectorXd& losses() const { return losses_; }

  /// Evaluates the current model's point loss for every labeled point.
  /// Ignore-sentinel points keep loss 0. Throws ContractError when the store
  /// and dataset sizes disagree.
  void initialize(const ClassModel& model, const LabeledFeatureSet& data,
                  const Encoder& encoder, int threads = 1);

  /// Installs externally computed losses for every point (the fused
  /// evaluate-and-update pass uses this). All values must be finite and >= 0.
  void assignAll(Eigen::VectorXd losses);

  /// Overwrites losses at buffer indices only; any index outside the
  /// selection is a contract violation.
  void recordLosses(const BufferSelection& selection,
                    const std::vector<std::pair<Index, double>>& new_losses);

 private:
  Eigen::VectorXd losses_;
  bool initialized_ = false;
};

/// Buffer selection over candidate points [begin, end) of the store:
///  - hard half: the floor(N * 0.5k / 100) candidates with the highest loss,
///    ties broken by ascending index;
///  - random half: as many again, drawn uniformly without replacement from
///    the remaining candidates, seeded by (cfg.seed, epoch, begin).
/// At k = 100 the random half absorbs the whole remainder so the selection
/// covers every candidate even when N is odd.
BufferSelection selectRange(const LossStore& store, const BufferConfig& cfg,
                            int epoch, Index begin, Index end);

/// Selection over the entire store (epoch scope).
BufferSelection select(const LossStore& store, const BufferConfig& cfg,
                       int epoch);

/// Debug dump: "point_index,loss" rows.
void dumpLossesCsv(const LossStore& store, std::ostream& os);

}  // namespace hdseg

#endif  // HDSEG_BUFFER_HPP
