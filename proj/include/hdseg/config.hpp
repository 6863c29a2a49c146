#ifndef HDSEG_CONFIG_HPP
#define HDSEG_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <string>

#include "hdseg/pipeline.hpp"
#include "hdseg/types.hpp"

namespace hdseg {

/// Flat key-value run configuration. Defaults follow the reference
/// hyperparameters (feature_dim 128, hd_dim 10000, batch of 6 scans, 10
/// retraining epochs, 5% buffer); the shipped synthetic benchmark config
/// overrides them to desk scale.
struct RunConfig {
  // encoder / model
  Index feature_dim = 128;
  Index hd_dim = 10000;
  std::uint64_t seed = 1;
  double epsilon = 1e-12;
  Index num_classes = 6;

  // adaptation
  int batch_size = 6;
  int retrain_epochs = 10;
  std::string buffer_mode = "select";  // "select" | "full"
  double buffer_ratio_percent = 5.0;
  std::uint64_t buffer_seed = 1;
  std::string buffer_scope = "epoch";  // "epoch" | "batch"
  bool cache_hypervectors = false;
  int threads = 0;

  // data locations; empty paths fall back to <out>/data/<stage>
  std::string pretrain_data;
  std::string adapt_data;
  std::string test_data;
  std::string class_remap;   // raw->contiguous map for KITTI ingestion
  std::string encoder_path;  // default <out>/encoder.henc
  std::string model_path;    // default <out>/adapted.hseg or pretrained.hseg

  // synthetic benchmark generation
  int synth_points_per_scan = 2000;
  int synth_scans_pretrain = 20;
  int synth_scans_adapt = 20;
  int synth_scans_test = 20;
  double synth_class_scale = 1.0;
  double synth_mean_separation = 4.0;
  double synth_drift_magnitude = 2.0;

  /// Validates cross-field constraints (modes, ranges).
  void validate() const;

  StageConfig stageConfig() const;
  SyntheticDriftSpec syntheticSpec() const;
};

/// Parses "key = value" lines; '#' starts a comment. Unknown keys are
/// configuration errors.
RunConfig parseConfig(const std::string& text);
RunConfig loadConfig(const std::filesystem::path& path);

/// Applies one KEY=VALUE override; command-line overrides run after the file
/// and therefore win.
void applyOverride(RunConfig& cfg, const std::string& key,
                   const std::string& value);

}  // namespace hdseg

#endif  // HDSEG_CONFIG_HPP
