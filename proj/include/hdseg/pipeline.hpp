#ifndef HDSEG_PIPELINE_HPP
#define HDSEG_PIPELINE_HPP

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "hdseg/buffer.hpp"
#include "hdseg/class_model.hpp"
#include "hdseg/data.hpp"
#include "hdseg/encoder.hpp"
#include "hdseg/types.hpp"

namespace hdseg {

struct EncoderParams {
  Index feature_dim = 128;
  Index hd_dim = 10000;
  std::uint64_t seed = 1;
  double epsilon = 1e-12;
};

/// Candidate pool for buffer selection: the whole stream per epoch, or each
/// batch of scans on its own.
enum class BufferScope { kEpoch, kBatch };

struct StageConfig {
  Index num_classes = 6;
  EncoderParams encoder;
  int batch_size = 6;       // scans per batch
  int retrain_epochs = 10;  // e; epoch 0 is always the initial full pass
  std::optional<BufferConfig> buffer;  // nullopt = full-data retraining
  BufferScope buffer_scope = BufferScope::kEpoch;
  bool cache_hypervectors = false;
  int threads = 0;  // 0 = hardware parallelism
};

struct EpochRecord {
  int epoch = 0;
  double miou = 0.0;
  Eigen::VectorXd per_class_iou;  // NaN = class undefined on the eval split
  std::int64_t points_processed = 0;
  double wall_time = 0.0;  // training portion only, seconds
};

struct AdaptationReport {
  std::vector<EpochRecord> epoch_records;  // in epoch order, starting at 0
  ClassModel* final_model = nullptr;       // the adapted model passed in
  double throughput_fps = 0.0;  // stream scans presented per second of training
  std::int64_t scans_processed = 0;
};

/// Stage 1: builds the encoder, bundles every labeled point into its class,
/// then runs `retrain_epochs` full-data perceptron passes in stream order.
std::pair<Encoder, ClassModel> pretrain(const StageConfig& cfg,
                                        const LabeledFeatureSet& data);

/// Stages 2: epoch 0 is a full pass (encode once, update, initialize losses);
/// epochs 1..e retrain on the selected buffer, refreshing buffered losses.
/// Per-epoch quality is measured on eval_set after each epoch; evaluation
/// time is excluded from wall_time and throughput.
AdaptationReport adapt(const StageConfig& cfg, const Encoder& encoder,
                       ClassModel& model, const LabeledFeatureSet& stream,
                       const LabeledFeatureSet& eval_set);

/// Predicted class per point; ignore-labeled points still get a prediction.
std::vector<std::int32_t> predict(const Encoder& encoder,
                                  const ClassModel& model,
                                  const LabeledFeatureSet& data,
                                  int threads = 0);

/// Stage 3: confusion over every labeled test point. The model is untouched.
EpochRecord evaluate(const Encoder& encoder, const ClassModel& model,
                     const LabeledFeatureSet& test, int threads = 0);

}  // namespace hdseg

#endif  // HDSEG_PIPELINE_HPP
