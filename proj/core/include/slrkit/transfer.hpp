#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "slrkit/checkpoint.hpp"
#include "slrkit/model.hpp"
#include "slrkit/train.hpp"

namespace slrkit {

/// What a transfer stage is allowed to update. Stages are ordered: each kind
/// strictly contains the previous one's trainable set.
enum class TransferStageKind { classifier_only, classifier_and_sequence, all };

std::string to_string(TransferStageKind kind);

struct TransferStage {
  TransferStageKind kind = TransferStageKind::classifier_only;
  size_t max_epochs = 300;
  size_t patience = 10;
};

/// An ordered unfreezing plan. The first stage always trains the classifier
/// alone; every later stage must strictly widen the trainable set. A stage
/// begins only after the previous one converged (hit its early stop).
struct TransferSchedule {
  std::vector<TransferStage> stages;

  void validate() const;  // throws ScheduleError

  static TransferSchedule classifier_only(size_t max_epochs = 300, size_t patience = 10);
  static TransferSchedule classifier_then_sequence(size_t max_epochs = 300, size_t patience = 10);
  static TransferSchedule classifier_then_all(size_t max_epochs = 300, size_t patience = 10);
  /// Lookup by schedule name (the three presets above).
  static TransferSchedule preset(const std::string& name, size_t max_epochs = 300,
                                 size_t patience = 10);
};

/// True when a parameter with this name is trainable under the stage kind.
bool stage_trains(TransferStageKind kind, const std::string& param_name);

/// Sets each parameter's trainable flag per the stage kind. Frozen parameters
/// stay bit-identical through any number of optimizer steps.
void apply_transfer_stage(PtnModel& model, TransferStageKind kind);

/// Copies source weights into the model by name. Every non-classifier
/// parameter must match in name and shape (mismatches collected into one
/// TransferError); classifier weights transfer only when shapes agree, and
/// stay freshly initialized otherwise (a new target vocabulary).
void load_for_transfer(PtnModel& model, const std::vector<CheckpointEntry>& source);
void load_for_transfer(PtnModel& model, const std::filesystem::path& checkpoint_path);

struct TransferResult {
  std::vector<TrainResult> stages;
  double final_val_accuracy = 0.0;
};

/// Runs the schedule stage by stage on a model that already holds transferred
/// weights. Optimizer state is reset at every stage boundary; stage seeds are
/// derived from base_config.seed. Checkpoint/trace paths in base_config apply
/// to the final stage's result (per-stage traces get a ".stageN" suffix).
TransferResult run_transfer(PtnModel& model, const ExampleSet& data,
                            const TransferSchedule& schedule, const TrainRunConfig& base_config);

}  // namespace slrkit
