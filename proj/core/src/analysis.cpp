#include "slrkit/analysis.hpp"

#include <array>
#include <cmath>

#include "slrkit/errors.hpp"

namespace slrkit {

double MissingStats::group(GroupName g) const {
  switch (g) {
    case GroupName::body: return body;
    case GroupName::left_hand: return left_hand;
    case GroupName::right_hand: return right_hand;
  }
  return 0.0;
}

MissingStats missing_stats(std::span<const KeypointSequence> dataset,
                           const SkeletonLayout& layout) {
  MissingStats stats;
  std::array<size_t, 3> missing{0, 0, 0};
  std::array<size_t, 3> total{0, 0, 0};
  for (const auto& seq : dataset) {
    stats.frames_total += seq.frames;
    for (size_t gi = 0; gi < layout.groups.size(); ++gi) {
      const GroupRange& g = layout.groups[gi];
      for (size_t t = 0; t < seq.frames; ++t) {
        if (layout.missing_granularity == MissingGranularity::per_group) {
          ++total[gi];
          if (!seq.group_present(t, g)) ++missing[gi];
        } else {
          for (size_t k = g.begin; k < g.end; ++k) {
            ++total[gi];
            if (!seq.is_present(t, k)) ++missing[gi];
          }
        }
      }
    }
  }
  auto frac = [&](size_t gi) {
    return total[gi] == 0 ? 0.0
                          : static_cast<double>(missing[gi]) / static_cast<double>(total[gi]);
  };
  for (size_t gi = 0; gi < layout.groups.size(); ++gi) {
    switch (layout.groups[gi].name) {
      case GroupName::body: stats.body = frac(gi); break;
      case GroupName::left_hand: stats.left_hand = frac(gi); break;
      case GroupName::right_hand: stats.right_hand = frac(gi); break;
    }
  }
  return stats;
}

size_t ConfidenceHistogram::total() const {
  size_t n = 0;
  for (size_t c : body_counts) n += c;
  for (size_t c : hand_counts) n += c;
  return n;
}

ConfidenceHistogram confidence_histogram(std::span<const KeypointSequence> dataset,
                                         const SkeletonLayout& layout, size_t bins) {
  if (bins == 0) throw ContractError("histogram needs at least one bin");
  ConfidenceHistogram h;
  h.edges.resize(bins + 1);
  for (size_t i = 0; i <= bins; ++i)
    h.edges[i] = static_cast<double>(i) / static_cast<double>(bins);
  h.body_counts.assign(bins, 0);
  h.hand_counts.assign(bins, 0);

  for (const auto& seq : dataset) {
    if (!seq.has_confidence())
      throw ContractError("sequence lacks a confidence channel; histogram undefined");
    for (size_t t = 0; t < seq.frames; ++t) {
      for (size_t k = 0; k < seq.keypoints; ++k) {
        if (!seq.is_present(t, k)) continue;  // only present observations count
        const double v = seq.confidence_at(t, k);
        size_t bin = static_cast<size_t>(v * static_cast<double>(bins));
        if (bin >= bins) bin = bins - 1;
        if (layout.group_of(k) == GroupName::body)
          ++h.body_counts[bin];
        else
          ++h.hand_counts[bin];
      }
    }
  }
  return h;
}

BenchmarkReport benchmark_runtime(const std::function<void(const KeypointSequence&)>& processor,
                                  std::span<const KeypointSequence> clips,
                                  const std::function<double()>& clock) {
  if (clips.empty()) throw ContractError("benchmark needs at least one clip");
  BenchmarkReport report;
  for (const auto& clip : clips) {
    const double t0 = clock();
    processor(clip);
    const double t1 = clock();
    ClipTiming timing;
    timing.frames = clip.frames;
    timing.seconds = t1 - t0;
    timing.fps = static_cast<double>(timing.frames) / timing.seconds;
    report.total_frames += timing.frames;
    report.total_seconds += timing.seconds;
    report.clips.push_back(timing);
  }
  report.aggregate_fps =
      static_cast<double>(report.total_frames) / report.total_seconds;
  return report;
}

// ---------------------------------------------------------------------------
// ablation driver
// ---------------------------------------------------------------------------

bool pipeline_applicable(const PipelineConfig& config, const SkeletonLayout& layout) {
  // mmpose ingestion marks every keypoint present, so there is nothing to
  // impute: an impute toggle on that layout is N/A rather than a no-op row
  if (config.impute && layout.family == EstimatorFamily::mmpose) return false;
  if (config.output_dims == OutputDims::drop_depth && layout.dims != 3) return false;
  return true;
}

std::vector<AblationRow> ablation_run(const std::vector<AnnotationRecord>& corpus_records,
                                      const std::vector<KeypointSequence>& corpus_sequences,
                                      const DatasetSplit& split, const SkeletonLayout& layout,
                                      std::span<const AblationConfig> configs,
                                      const ModelConfig& model_template,
                                      const TrainRunConfig& run_config) {
  std::vector<AblationRow> rows;
  for (const AblationConfig& c : configs) {
    if (!pipeline_applicable(c.pipeline, layout))
      throw ContractError("pipeline config '" + c.name + "' is N/A for layout '" + layout.id() +
                          "'");
    ExampleSet data =
        assemble_examples(split, corpus_records, corpus_sequences, layout, c.pipeline);
    ModelConfig mc = model_template;
    mc.family = layout.family;
    mc.input_dims = c.pipeline.output_dims == OutputDims::drop_depth ? 2 : layout.dims;
    mc.classes = split.classes.size();
    PtnModel model(mc, run_config.seed);  // identical seeds across configs
    TrainRunConfig cfg = run_config;
    cfg.checkpoint_path.clear();
    cfg.trace_path.clear();
    const TrainResult r = train(model, data, cfg);
    rows.push_back({c.name, c.pipeline, r.best_val_accuracy});
  }
  return rows;
}

}  // namespace slrkit
