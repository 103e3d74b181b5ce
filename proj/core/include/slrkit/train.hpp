#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "slrkit/dataset.hpp"
#include "slrkit/model.hpp"
#include "slrkit/optimizer.hpp"

namespace slrkit {

/// Run-level training knobs. The seed is mandatory in config files (a run is
/// never implicitly random); l1_lambda < 0 defers to the model config.
struct TrainRunConfig {
  nn::AdamConfig optimizer;
  size_t batch_size = 8;
  size_t max_epochs = 300;
  size_t patience = 10;
  uint64_t seed = 0;
  double l1_lambda = -1.0;
  std::filesystem::path checkpoint_path;  // best-epoch weights; empty = keep in memory only
  std::filesystem::path trace_path;       // per-epoch metrics TSV; empty = don't write

  void validate() const;
};

TrainRunConfig load_train_config(const std::filesystem::path& path);
void save_train_config(const TrainRunConfig& config, const std::filesystem::path& path);

struct EpochMetrics {
  size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_accuracy = 0.0;
};

struct TrainResult {
  std::vector<EpochMetrics> trace;
  double best_val_accuracy = 0.0;
  size_t best_epoch = 0;
  size_t epochs_run = 0;
};

/// Early-stopped mini-batch training: shuffled batches, cross-entropy plus
/// an L1 penalty on the pose-embedding input layer, Adam updates, validation
/// accuracy monitored with the given patience. On return the model holds the
/// best-epoch weights. Throws DivergenceError on a non-finite loss.
TrainResult train(PtnModel& model, const ExampleSet& data, const TrainRunConfig& config);

void write_trace(const std::vector<EpochMetrics>& trace, const std::filesystem::path& path);

struct PerClassAccuracy {
  size_t class_id = 0;
  size_t support = 0;
  size_t correct = 0;
  double accuracy = 0.0;  // 0 when support is 0
};

struct EvalResult {
  size_t total = 0;
  size_t correct = 0;
  double accuracy = 0.0;
  std::vector<PerClassAccuracy> per_class;  // one row per class id
};

/// Builds the accuracy table from prediction/label pairs.
EvalResult tabulate_predictions(std::span<const size_t> predictions,
                                std::span<const size_t> labels, size_t classes);

/// Deterministic eval-mode top-1 accuracy with a per-class breakdown.
EvalResult evaluate(const PtnModel& model, std::span<const Example> examples);

}  // namespace slrkit
