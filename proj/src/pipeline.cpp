#include "hdseg/pipeline.hpp"

#include <chrono>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hdseg/errors.hpp"
#include "hdseg/metrics.hpp"
#include "hdseg/parallel.hpp"

namespace hdseg {

namespace {

constexpr Index kEncodeBlock = 512;

using Clock = std::chrono::steady_clock;

double secondsSince(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void checkLabels(const LabeledFeatureSet& data, Index num_classes,
                 const char* op) {
  for (std::int32_t y : data.labels) {
    if (y != kIgnoreLabel && (y < 0 || y >= num_classes)) {
      throw ContractError(std::string(op) + ": label " + std::to_string(y) +
                          " out of range for " + std::to_string(num_classes) +
                          " classes");
    }
  }
}

void checkEncoderDims(const Encoder& encoder, const LabeledFeatureSet& data,
                      const char* op) {
  if (encoder.featureDim() != data.featureDim()) {
    throw ContractError(std::string(op) + ": encoder expects feature_dim " +
                        std::to_string(encoder.featureDim()) + ", data has " +
                        std::to_string(data.featureDim()));
  }
}

void checkModelDims(const Encoder& encoder, const ClassModel& model,
                    const char* op) {
  if (model.hdDim() != encoder.hdDim()) {
    throw ContractError(std::string(op) + ": model hd_dim " +
                        std::to_string(model.hdDim()) +
                        " does not match encoder hd_dim " +
                        std::to_string(encoder.hdDim()));
  }
}

/// Full pass in stream order: encode block-wise (parallel), then classify and
/// perceptron-update each labeled point sequentially. Optionally writes the
/// loss observed at visit time and fills the hypervector cache.
Index fullPass(const Encoder& encoder, ClassModel& model,
               const LabeledFeatureSet& data, int threads,
               Eigen::VectorXd* losses_out, SignMatrix* cache) {
  const Index n = data.numPoints();
  SignMatrix block;
  Prediction pred;
  Index visited = 0;
  for (Index b = 0; b < n; b += kEncodeBlock) {
    const Index rows = std::min(kEncodeBlock, n - b);
    encoder.encodeBatchInto(data.features.middleRows(b, rows), block, threads);
    if (cache) cache->middleRows(b, rows) = block;
    for (Index r = 0; r < rows; ++r) {
      const Index i = b + r;
      const std::int32_t y = data.labels[static_cast<std::size_t>(i)];
      if (y == kIgnoreLabel) continue;
      const auto hv = block.row(r).transpose();
      model.classifyInto(hv, pred);
      if (losses_out) (*losses_out)[i] = ClassModel::lossFrom(pred, y);
      if (pred.label != y) model.applyMisclassification(hv, y, pred.label);
      ++visited;
    }
  }
  return visited;
}

/// One buffered retraining pass: visits the selection in stream order,
/// batches of `cfg.batch_size` scans at a time, records the loss observed at
/// each visit and updates the model on misclassification. Returns the
/// selection size (the points processed this epoch).
Index bufferPass(const Encoder& encoder, ClassModel& model,
                 const LabeledFeatureSet& stream, const BufferSelection& sel,
                 LossStore& store, const StageConfig& cfg, int threads,
                 const SignMatrix* cache) {
  const std::vector<Index> indices = sel.unionAscending();
  std::vector<std::pair<Index, double>> new_losses;
  new_losses.reserve(indices.size());

  RowMatrixXf gather;
  SignMatrix block;
  Prediction pred;
  std::size_t pos = 0;
  const Index scans = stream.numScans();
  for (Index first_scan = 0; first_scan < scans;
       first_scan += cfg.batch_size) {
    const Index last_scan = std::min<Index>(scans, first_scan + cfg.batch_size) - 1;
    const Index hi = stream.scanEnd(last_scan);
    std::size_t batch_end = pos;
    while (batch_end < indices.size() && indices[batch_end] < hi) ++batch_end;

    for (std::size_t s = pos; s < batch_end; s += kEncodeBlock) {
      const Index m = std::min<Index>(kEncodeBlock,
                                      static_cast<Index>(batch_end - s));
      const std::span<const Index> ids(indices.data() + s,
                                       static_cast<std::size_t>(m));
      if (!cache) {
        gather.resize(m, stream.featureDim());
        for (Index r = 0; r < m; ++r) {
          gather.row(r) = stream.features.row(ids[static_cast<std::size_t>(r)]);
        }
        encoder.encodeBatchInto(gather, block, threads);
      }
      for (Index r = 0; r < m; ++r) {
        const Index i = ids[static_cast<std::size_t>(r)];
        const std::int32_t y = stream.labels[static_cast<std::size_t>(i)];
        if (y == kIgnoreLabel) continue;
        const auto hv =
            cache ? cache->row(i).transpose() : block.row(r).transpose();
        model.classifyInto(hv, pred);
        new_losses.emplace_back(i, ClassModel::lossFrom(pred, y));
        if (pred.label != y) model.applyMisclassification(hv, y, pred.label);
      }
    }
    pos = batch_end;
  }
  store.recordLosses(sel, new_losses);
  return static_cast<Index>(indices.size());
}

}  // namespace

std::pair<Encoder, ClassModel> pretrain(const StageConfig& cfg,
                                        const LabeledFeatureSet& data) {
  data.validate();
  if (data.numPoints() == 0) {
    throw ConfigError("pretrain: dataset is empty");
  }
  if (cfg.num_classes < 1) throw ConfigError("pretrain: num_classes must be >= 1");
  checkLabels(data, cfg.num_classes, "pretrain");

  Encoder encoder(cfg.encoder.feature_dim, cfg.encoder.hd_dim, cfg.encoder.seed,
                  cfg.encoder.epsilon);
  checkEncoderDims(encoder, data, "pretrain");
  ClassModel model(cfg.num_classes, encoder.hdDim());
  const int threads = resolveThreads(cfg.threads);

  // Single bundling pass builds the initial class hypervectors.
  const Index n = data.numPoints();
  SignMatrix block;
  for (Index b = 0; b < n; b += kEncodeBlock) {
    const Index rows = std::min(kEncodeBlock, n - b);
    encoder.encodeBatchInto(data.features.middleRows(b, rows), block, threads);
    for (Index r = 0; r < rows; ++r) {
      const std::int32_t y = data.labels[static_cast<std::size_t>(b + r)];
      if (y == kIgnoreLabel) continue;
      model.bundle(block.row(r).transpose(), y);
    }
  }
  if (!model.trained()) {
    throw ConfigError("pretrain: dataset has no labeled points");
  }

  for (int epoch = 1; epoch <= cfg.retrain_epochs; ++epoch) {
    fullPass(encoder, model, data, threads, nullptr, nullptr);
  }
  return {std::move(encoder), std::move(model)};
}

AdaptationReport adapt(const StageConfig& cfg, const Encoder& encoder,
                       ClassModel& model, const LabeledFeatureSet& stream,
                       const LabeledFeatureSet& eval_set) {
  stream.validate();
  eval_set.validate();
  if (stream.numPoints() == 0) throw ConfigError("adapt: stream is empty");
  if (eval_set.numPoints() == 0) {
    throw ConfigError("adapt: evaluation split is empty");
  }
  if (cfg.batch_size < 1) throw ConfigError("adapt: batch_size must be >= 1");
  if (cfg.retrain_epochs < 0) {
    throw ConfigError("adapt: retrain_epochs must be >= 0");
  }
  checkEncoderDims(encoder, stream, "adapt");
  checkEncoderDims(encoder, eval_set, "adapt");
  checkModelDims(encoder, model, "adapt");
  checkLabels(stream, model.numClasses(), "adapt");
  checkLabels(eval_set, model.numClasses(), "adapt");

  const int threads = resolveThreads(cfg.threads);
  const Index n = stream.numPoints();

  AdaptationReport report;
  report.final_model = &model;
  LossStore store(n);
  SignMatrix cache;
  if (cfg.cache_hypervectors) cache.resize(n, encoder.hdDim());
  double train_seconds = 0.0;

  // Epoch 0: full-data pass, losses observed at visit time.
  {
    const auto t0 = Clock::now();
    Eigen::VectorXd losses = Eigen::VectorXd::Zero(n);
    const Index visited =
        fullPass(encoder, model, stream, threads, &losses,
                 cfg.cache_hypervectors ? &cache : nullptr);
    store.assignAll(std::move(losses));
    const double dt = secondsSince(t0);
    train_seconds += dt;

    EpochRecord rec = evaluate(encoder, model, eval_set, threads);
    rec.epoch = 0;
    rec.points_processed = visited;
    rec.wall_time = dt;
    report.epoch_records.push_back(std::move(rec));
  }

  for (int epoch = 1; epoch <= cfg.retrain_epochs; ++epoch) {
    const auto t0 = Clock::now();
    Index processed = 0;
    if (!cfg.buffer) {
      processed = fullPass(encoder, model, stream, threads, nullptr, nullptr);
    } else if (cfg.buffer_scope == BufferScope::kEpoch) {
      const BufferSelection sel = select(store, *cfg.buffer, epoch);
      processed = bufferPass(encoder, model, stream, sel, store, cfg, threads,
                             cfg.cache_hypervectors ? &cache : nullptr);
    } else {
      const Index scans = stream.numScans();
      for (Index first_scan = 0; first_scan < scans;
           first_scan += cfg.batch_size) {
        const Index last_scan =
            std::min<Index>(scans, first_scan + cfg.batch_size) - 1;
        const BufferSelection sel =
            selectRange(store, *cfg.buffer, epoch, stream.scanBegin(first_scan),
                        stream.scanEnd(last_scan));
        processed += bufferPass(encoder, model, stream, sel, store, cfg,
                                threads,
                                cfg.cache_hypervectors ? &cache : nullptr);
      }
    }
    const double dt = secondsSince(t0);
    train_seconds += dt;

    EpochRecord rec = evaluate(encoder, model, eval_set, threads);
    rec.epoch = epoch;
    rec.points_processed = processed;
    rec.wall_time = dt;
    report.epoch_records.push_back(std::move(rec));
  }

  report.scans_processed =
      stream.numScans() * static_cast<std::int64_t>(1 + cfg.retrain_epochs);
  report.throughput_fps =
      train_seconds > 0.0
          ? static_cast<double>(report.scans_processed) / train_seconds
          : 0.0;
  return report;
}

std::vector<std::int32_t> predict(const Encoder& encoder,
                                  const ClassModel& model,
                                  const LabeledFeatureSet& data, int threads) {
  data.validate();
  checkEncoderDims(encoder, data, "predict");
  checkModelDims(encoder, model, "predict");
  const Index n = data.numPoints();
  std::vector<std::int32_t> out(static_cast<std::size_t>(n), 0);
  parallelFor(n, threads, [&](Index begin, Index end) {
    SignMatrix block;
    Prediction pred;
    for (Index b = begin; b < end; b += kEncodeBlock) {
      const Index rows = std::min(kEncodeBlock, end - b);
      encoder.encodeBatchInto(data.features.middleRows(b, rows), block, 1);
      for (Index r = 0; r < rows; ++r) {
        model.classifyInto(block.row(r).transpose(), pred);
        out[static_cast<std::size_t>(b + r)] =
            static_cast<std::int32_t>(pred.label);
      }
    }
  });
  return out;
}

EpochRecord evaluate(const Encoder& encoder, const ClassModel& model,
                     const LabeledFeatureSet& test, int threads) {
  test.validate();
  if (test.numPoints() == 0) throw ConfigError("evaluate: test set is empty");
  checkEncoderDims(encoder, test, "evaluate");
  checkModelDims(encoder, model, "evaluate");
  checkLabels(test, model.numClasses(), "evaluate");

  const auto t0 = Clock::now();
  const std::vector<std::int32_t> predicted =
      predict(encoder, model, test, threads);
  ConfusionMatrix cm(model.numClasses());
  for (Index i = 0; i < test.numPoints(); ++i) {
    const std::int32_t y = test.labels[static_cast<std::size_t>(i)];
    if (y == kIgnoreLabel) continue;
    cm.accumulate(y, predicted[static_cast<std::size_t>(i)]);
  }
  const IouResult r = iou(cm);

  EpochRecord rec;
  rec.epoch = 0;
  rec.miou = r.miou;
  rec.per_class_iou = r.per_class;
  rec.points_processed = cm.total();
  rec.wall_time = secondsSince(t0);
  return rec;
}

}  // namespace hdseg
