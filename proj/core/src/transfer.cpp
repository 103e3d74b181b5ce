#include "slrkit/transfer.hpp"

#include <map>

#include "slrkit/errors.hpp"

namespace slrkit {

std::string to_string(TransferStageKind kind) {
  switch (kind) {
    case TransferStageKind::classifier_only: return "classifier_only";
    case TransferStageKind::classifier_and_sequence: return "classifier_and_sequence";
    case TransferStageKind::all: return "all";
  }
  return "?";
}

namespace {

int stage_rank(TransferStageKind kind) { return static_cast<int>(kind); }

bool is_classifier(const std::string& name) { return name.rfind("classifier.", 0) == 0; }
bool is_sequence(const std::string& name) { return name.rfind("seq_embed.", 0) == 0; }

}  // namespace

void TransferSchedule::validate() const {
  if (stages.empty()) throw ScheduleError("transfer schedule has no stages");
  if (stages.front().kind != TransferStageKind::classifier_only)
    throw ScheduleError("stage 1 must train the classifier only, got " +
                        to_string(stages.front().kind));
  for (size_t i = 1; i < stages.size(); ++i) {
    if (stage_rank(stages[i].kind) <= stage_rank(stages[i - 1].kind))
      throw ScheduleError("stage " + std::to_string(i + 1) + " (" + to_string(stages[i].kind) +
                          ") does not widen the trainable set of stage " + std::to_string(i) +
                          " (" + to_string(stages[i - 1].kind) + ")");
  }
  for (const auto& s : stages) {
    if (s.patience < 1) throw ScheduleError("stage patience must be >= 1");
    if (s.max_epochs < 1) throw ScheduleError("stage max_epochs must be >= 1");
  }
}

TransferSchedule TransferSchedule::classifier_only(size_t max_epochs, size_t patience) {
  return {{{TransferStageKind::classifier_only, max_epochs, patience}}};
}

TransferSchedule TransferSchedule::classifier_then_sequence(size_t max_epochs, size_t patience) {
  return {{{TransferStageKind::classifier_only, max_epochs, patience},
           {TransferStageKind::classifier_and_sequence, max_epochs, patience}}};
}

TransferSchedule TransferSchedule::classifier_then_all(size_t max_epochs, size_t patience) {
  return {{{TransferStageKind::classifier_only, max_epochs, patience},
           {TransferStageKind::all, max_epochs, patience}}};
}

TransferSchedule TransferSchedule::preset(const std::string& name, size_t max_epochs,
                                          size_t patience) {
  if (name == "classifier_only") return classifier_only(max_epochs, patience);
  if (name == "classifier_then_sequence") return classifier_then_sequence(max_epochs, patience);
  if (name == "classifier_then_all") return classifier_then_all(max_epochs, patience);
  throw ScheduleError("unknown transfer schedule '" + name +
                      "' (expected classifier_only, classifier_then_sequence, or "
                      "classifier_then_all)");
}

bool stage_trains(TransferStageKind kind, const std::string& param_name) {
  switch (kind) {
    case TransferStageKind::classifier_only: return is_classifier(param_name);
    case TransferStageKind::classifier_and_sequence:
      return is_classifier(param_name) || is_sequence(param_name);
    case TransferStageKind::all: return true;
  }
  return false;
}

void apply_transfer_stage(PtnModel& model, TransferStageKind kind) {
  for (nn::Param* p : model.params()) p->trainable = stage_trains(kind, p->name);
}

void load_for_transfer(PtnModel& model, const std::vector<CheckpointEntry>& source) {
  std::vector<std::string> offenders;
  std::map<std::string, const CheckpointEntry*> lookup;
  for (const auto& e : source) lookup[e.name] = &e;

  for (const auto& e : source) {
    if (!model.find(e.name) && !is_classifier(e.name))
      offenders.push_back(e.name + " (in checkpoint, not in model)");
  }
  for (const nn::Param* p : model.params()) {
    if (is_classifier(p->name)) continue;
    const auto it = lookup.find(p->name);
    if (it == lookup.end()) {
      offenders.push_back(p->name + " (in model, not in checkpoint)");
    } else if (!it->second->value.same_shape(p->value)) {
      offenders.push_back(p->name + " (shape " + it->second->value.shape_string() +
                          " in checkpoint vs " + p->value.shape_string() + " in model)");
    }
  }
  if (!offenders.empty()) {
    std::string msg = "cannot transfer, " + std::to_string(offenders.size()) +
                      " non-classifier parameter(s) do not align:";
    for (const auto& o : offenders) msg += "\n  " + o;
    throw TransferError(msg);
  }

  for (const nn::Param* p : model.params()) {
    const auto it = lookup.find(p->name);
    if (it == lookup.end()) continue;  // fresh classifier for a new vocabulary
    if (is_classifier(p->name) && !it->second->value.same_shape(p->value)) continue;
    model.set_param(p->name, it->second->value);
  }
}

void load_for_transfer(PtnModel& model, const std::filesystem::path& checkpoint_path) {
  load_for_transfer(model, load_checkpoint(checkpoint_path));
}

TransferResult run_transfer(PtnModel& model, const ExampleSet& data,
                            const TransferSchedule& schedule, const TrainRunConfig& base_config) {
  schedule.validate();
  base_config.validate();
  TransferResult result;
  for (size_t i = 0; i < schedule.stages.size(); ++i) {
    const TransferStage& stage = schedule.stages[i];
    apply_transfer_stage(model, stage.kind);
    TrainRunConfig cfg = base_config;
    cfg.seed = Rng::derive(base_config.seed, 0x78666572ULL, i);  // "xfer" stream
    cfg.max_epochs = stage.max_epochs;
    cfg.patience = stage.patience;
    cfg.checkpoint_path.clear();
    cfg.trace_path.clear();
    if (!base_config.trace_path.empty()) {
      std::filesystem::path p = base_config.trace_path;
      const std::string ext = p.extension().string();
      p.replace_extension();
      cfg.trace_path = p.string() + ".stage" + std::to_string(i + 1) + ext;
    }
    result.stages.push_back(train(model, data, cfg));  // fresh optimizer state per stage
    result.final_val_accuracy = result.stages.back().best_val_accuracy;
  }
  if (!base_config.checkpoint_path.empty()) save_checkpoint(model, base_config.checkpoint_path);
  return result;
}

}  // namespace slrkit
