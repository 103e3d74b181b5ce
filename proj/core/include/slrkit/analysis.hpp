#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "slrkit/dataset.hpp"
#include "slrkit/model.hpp"
#include "slrkit/sequence.hpp"
#include "slrkit/train.hpp"

namespace slrkit {

/// Fraction of missing observations per group over a dataset. For per-group
/// layouts this counts frames with the group absent; for per-keypoint layouts
/// it counts absent (frame, keypoint) slots within the group.
struct MissingStats {
  double body = 0.0;
  double left_hand = 0.0;
  double right_hand = 0.0;
  size_t frames_total = 0;

  double group(GroupName g) const;
};

MissingStats missing_stats(std::span<const KeypointSequence> dataset,
                           const SkeletonLayout& layout);

/// Confidence distribution of present observations, body vs hands.
/// edges has bins+1 entries; value v lands in bin floor(v*bins), clamped so
/// that v=1 falls in the last bin.
struct ConfidenceHistogram {
  std::vector<double> edges;
  std::vector<size_t> body_counts;
  std::vector<size_t> hand_counts;

  size_t bins() const { return body_counts.size(); }
  size_t total() const;
};

ConfidenceHistogram confidence_histogram(std::span<const KeypointSequence> dataset,
                                         const SkeletonLayout& layout, size_t bins = 50);

struct ClipTiming {
  size_t frames = 0;
  double seconds = 0.0;
  double fps = 0.0;
};

struct BenchmarkReport {
  std::vector<ClipTiming> clips;
  size_t total_frames = 0;
  double total_seconds = 0.0;
  /// total frames / total seconds — deliberately not the mean of per-clip FPS
  double aggregate_fps = 0.0;
};

/// Times `processor` over each clip in turn (strictly serial, one clip at a
/// time, as at inference). The clock is injectable: it returns seconds and is
/// sampled immediately before and after each clip.
BenchmarkReport benchmark_runtime(const std::function<void(const KeypointSequence&)>& processor,
                                  std::span<const KeypointSequence> clips,
                                  const std::function<double()>& clock);

// ---------------------------------------------------------------------------
// ablation driver
// ---------------------------------------------------------------------------

struct AblationConfig {
  std::string name;
  PipelineConfig pipeline;
};

struct AblationRow {
  std::string name;
  PipelineConfig pipeline;
  double val_accuracy = 0.0;
};

/// "impute" is meaningless for layouts whose ingest never yields absences;
/// such configs must not silently train (reported as not applicable).
bool pipeline_applicable(const PipelineConfig& config, const SkeletonLayout& layout);

/// Trains one model per pipeline config on identical seeds and reports
/// validation accuracy per config. model_template's input_dims is adjusted to
/// each pipeline's output width. Inapplicable configs throw ContractError.
std::vector<AblationRow> ablation_run(const std::vector<AnnotationRecord>& corpus_records,
                                      const std::vector<KeypointSequence>& corpus_sequences,
                                      const DatasetSplit& split, const SkeletonLayout& layout,
                                      std::span<const AblationConfig> configs,
                                      const ModelConfig& model_template,
                                      const TrainRunConfig& run_config);

}  // namespace slrkit
