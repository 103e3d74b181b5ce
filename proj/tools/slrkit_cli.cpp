// slrkit command-line tool: synthetic corpus generation, keypoint
// post-processing, dataset splitting, training, transfer, evaluation, and
// the analysis commands (missing stats, confidence histograms, runtime
// benchmarks, pipeline ablations).

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slrkit/analysis.hpp"
#include "slrkit/checkpoint.hpp"
#include "slrkit/dataset.hpp"
#include "slrkit/errors.hpp"
#include "slrkit/model.hpp"
#include "slrkit/postproc.hpp"
#include "slrkit/sequence_io.hpp"
#include "slrkit/synthetic.hpp"
#include "slrkit/train.hpp"
#include "slrkit/transfer.hpp"

namespace fs = std::filesystem;
using namespace slrkit;

namespace {

struct Corpus {
  std::vector<AnnotationRecord> records;
  std::vector<KeypointSequence> sequences;
};

Corpus load_corpus(const fs::path& dir) {
  Corpus corpus;
  corpus.records = read_manifest(dir / "manifest.tsv");
  corpus.sequences.reserve(corpus.records.size());
  for (const auto& r : corpus.records) corpus.sequences.push_back(read_sequence(dir / r.file));
  return corpus;
}

EstimatorFamily parse_family(const std::string& id) {
  const auto family = family_from_string(id);
  if (!family) {
    throw std::runtime_error("unknown layout '" + id + "' (expected openpose, mmpose, or mediapipe)");
  }
  return *family;
}

const SkeletonLayout& resolve_layout(const std::string& flag, const Corpus& corpus) {
  if (!flag.empty()) return layout_for(parse_family(flag));
  if (corpus.sequences.empty()) throw ContractError("empty corpus and no --layout given");
  const SkeletonLayout* layout = find_layout(corpus.sequences.front().layout_id);
  if (!layout) {
    throw IoError("unknown layout '" + corpus.sequences.front().layout_id + "', pass --layout");
  }
  return *layout;
}

struct PipelineFlags {
  bool no_impute = false;
  bool no_normalize = false;
  bool drop_depth = false;

  void attach(CLI::App* cmd) {
    cmd->add_flag("--no-impute", no_impute, "skip gap imputation");
    cmd->add_flag("--no-normalize", no_normalize, "skip chest/wrist normalization");
    cmd->add_flag("--drop-depth", drop_depth, "drop the depth coordinate (3D layouts)");
  }

  PipelineConfig config() const {
    PipelineConfig p;
    p.impute = !no_impute;
    p.normalize = !no_normalize;
    p.output_dims = drop_depth ? OutputDims::drop_depth : OutputDims::keep;
    return p;
  }
};

// Data flags shared by train / transfer / eval / ablate.
struct DataFlags {
  std::string corpus_dir;
  std::string split_path;
  std::string layout_flag;
  PipelineFlags pipeline;

  void attach(CLI::App* cmd) {
    cmd->add_option("--corpus", corpus_dir, "corpus directory (manifest.tsv + sequences)")
        ->required();
    cmd->add_option("--split", split_path, "split file from `slrkit split`")->required();
    cmd->add_option("--layout", layout_flag, "layout id (default: inferred from the corpus)");
    pipeline.attach(cmd);
  }
};

struct LoadedData {
  Corpus corpus;
  DatasetSplit split;
  const SkeletonLayout* layout = nullptr;
  ExampleSet examples;
};

LoadedData load_data(const DataFlags& flags) {
  LoadedData data;
  data.corpus = load_corpus(flags.corpus_dir);
  data.split = load_split(flags.split_path);
  data.layout = &resolve_layout(flags.layout_flag, data.corpus);
  data.examples = assemble_examples(data.split, data.corpus.records, data.corpus.sequences,
                                    *data.layout, flags.pipeline.config());
  return data;
}

ModelConfig resolve_model_config(const std::string& path, const SkeletonLayout& layout,
                                 const PipelineConfig& pipeline, size_t classes) {
  ModelConfig mc;
  if (!path.empty()) mc = load_model_config(path);
  mc.family = layout.family;
  mc.input_dims = pipeline.output_dims == OutputDims::drop_depth ? 2 : layout.dims;
  mc.classes = classes;
  mc.validate();
  return mc;
}

void print_trace(const std::vector<EpochMetrics>& trace) {
  std::printf("epoch\ttrain_loss\ttrain_accuracy\tval_accuracy\n");
  for (const auto& m : trace) {
    std::printf("%zu\t%s\t%s\t%s\n", m.epoch, format_double(m.train_loss).c_str(),
                format_double(m.train_accuracy).c_str(),
                format_double(m.val_accuracy).c_str());
  }
}

void print_eval(const EvalResult& result, const DatasetSplit& split) {
  std::printf("examples\t%zu\ncorrect\t%zu\naccuracy\t%s\n", result.total, result.correct,
              format_double(result.accuracy).c_str());
  std::printf("class\tlabel\tsupport\tcorrect\taccuracy\n");
  for (const auto& row : result.per_class) {
    const std::string& label =
        row.class_id < split.classes.size() ? split.classes[row.class_id] : "?";
    std::printf("%zu\t%s\t%zu\t%zu\t%s\n", row.class_id, label.c_str(), row.support,
                row.correct, format_double(row.accuracy).c_str());
  }
}

std::ofstream open_plot(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open plot file '" + path + "'");
  return out;
}

// ---------------------------------------------------------------------------
// subcommands
// ---------------------------------------------------------------------------

int cmd_synth(const SyntheticCorpusConfig& cfg, double missing, const std::string& out_dir) {
  SyntheticCorpusConfig config = cfg;
  if (missing > 0.0) config.set_missing_fraction(missing);
  config.validate();
  const SyntheticCorpus corpus = gen_synthetic(config);

  fs::create_directories(out_dir);
  for (size_t i = 0; i < corpus.records.size(); ++i) {
    write_sequence(corpus.sequences[i], fs::path(out_dir) / corpus.records[i].file);
  }
  write_manifest(corpus.records, fs::path(out_dir) / "manifest.tsv");

  std::printf("wrote %zu sequences to %s\n", corpus.records.size(), out_dir.c_str());
  std::printf("family\t%s\nclasses\t%zu\nsigners\t%zu\nexpected_missing\t%s\n",
              to_string(config.family).c_str(), config.classes, config.signers,
              format_double(config.expected_missing_fraction()).c_str());
  return 0;
}

int cmd_postprocess(const std::string& layout_id, const PipelineFlags& pipeline, bool ingest,
                    const std::string& in, const std::string& out) {
  KeypointSequence seq = read_sequence(in);
  const SkeletonLayout* found = layout_id.empty() ? find_layout(seq.layout_id) : nullptr;
  if (layout_id.empty() && !found) {
    throw IoError(in + ": unknown layout '" + seq.layout_id + "', pass --layout");
  }
  const SkeletonLayout& layout = found ? *found : layout_for(parse_family(layout_id));
  if (ingest) apply_ingest_rules(seq, layout);
  write_sequence(postprocess(seq, layout, pipeline.config()), out);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int cmd_split(const std::string& corpus_dir, std::vector<double> ratios, uint64_t seed,
              size_t min_count, bool keep_absent, const std::string& out) {
  auto records = read_manifest(fs::path(corpus_dir) / "manifest.tsv");
  const size_t before = records.size();
  records = filter_min_occurrences(records, min_count);
  if (records.size() != before) {
    std::printf("filtered %zu records below min-count %zu\n", before - records.size(),
                min_count);
  }

  DatasetSplit split =
      stratified_group_split(records, {ratios[0], ratios[1], ratios[2]}, seed);
  if (!keep_absent) split = drop_absent_classes(split);

  const ValidationReport report = validate_split(split);
  for (const auto& finding : report.findings) {
    std::printf("%s: %s\n", finding.severity == Severity::error ? "error" : "warning",
                finding.message.c_str());
  }

  save_split(split, out);
  std::printf("classes\t%zu\n", split.classes.size());
  for (size_t i = 0; i < 3; ++i) {
    std::printf("%s\t%zu\n", DatasetSplit::kSubsetNames[i], split.subset(i).size());
  }
  std::printf("wrote %s\n", out.c_str());
  return report.ok() ? 0 : 1;
}

TrainRunConfig resolve_run_config(const std::string& train_config_path,
                                  std::optional<uint64_t> seed, const std::string& checkpoint,
                                  const std::string& trace) {
  if (train_config_path.empty() && !seed) {
    throw std::runtime_error("a run is never implicitly random: pass --seed or --config");
  }
  TrainRunConfig rc;
  if (!train_config_path.empty()) rc = load_train_config(train_config_path);
  if (seed) rc.seed = *seed;
  rc.checkpoint_path = checkpoint;
  rc.trace_path = trace;
  rc.validate();
  return rc;
}

int cmd_train(const DataFlags& data_flags, const std::string& model_config_path,
              const std::string& train_config_path, std::optional<uint64_t> seed,
              const std::string& checkpoint, const std::string& trace,
              const std::string& model_config_out) {
  const LoadedData data = load_data(data_flags);
  const ModelConfig mc =
      resolve_model_config(model_config_path, *data.layout, data_flags.pipeline.config(),
                           data.examples.class_count);

  const TrainRunConfig rc = resolve_run_config(train_config_path, seed, checkpoint, trace);

  PtnModel model(mc, rc.seed);
  const TrainResult result = train(model, data.examples, rc);

  print_trace(result.trace);
  std::printf("best_epoch\t%zu\nbest_val_accuracy\t%s\nepochs_run\t%zu\n", result.best_epoch,
              format_double(result.best_val_accuracy).c_str(), result.epochs_run);
  if (!model_config_out.empty()) save_model_config(mc, model_config_out);
  return 0;
}

int cmd_transfer(const DataFlags& data_flags, const std::string& source,
                 const std::string& schedule_name, size_t stage_epochs, size_t stage_patience,
                 const std::string& model_config_path, const std::string& train_config_path,
                 std::optional<uint64_t> seed, const std::string& checkpoint,
                 const std::string& trace) {
  const LoadedData data = load_data(data_flags);
  const ModelConfig mc =
      resolve_model_config(model_config_path, *data.layout, data_flags.pipeline.config(),
                           data.examples.class_count);

  const TrainRunConfig rc = resolve_run_config(train_config_path, seed, checkpoint, trace);

  const TransferSchedule schedule =
      TransferSchedule::preset(schedule_name, stage_epochs, stage_patience);

  PtnModel model(mc, rc.seed);
  load_for_transfer(model, fs::path(source));
  const TransferResult result = run_transfer(model, data.examples, schedule, rc);

  for (size_t i = 0; i < result.stages.size(); ++i) {
    std::printf("stage %zu (%s): best_val_accuracy %s after %zu epochs\n", i + 1,
                to_string(schedule.stages[i].kind).c_str(),
                format_double(result.stages[i].best_val_accuracy).c_str(),
                result.stages[i].epochs_run);
  }
  std::printf("final_val_accuracy\t%s\n", format_double(result.final_val_accuracy).c_str());
  return 0;
}

int cmd_eval(const DataFlags& data_flags, const std::string& checkpoint,
             const std::string& model_config_path, const std::string& part) {
  const LoadedData data = load_data(data_flags);
  const ModelConfig mc =
      resolve_model_config(model_config_path, *data.layout, data_flags.pipeline.config(),
                           data.examples.class_count);

  PtnModel model(mc, 0);
  load_into_model(model, checkpoint);

  std::span<const Example> examples;
  if (part == "train") {
    examples = data.examples.train;
  } else if (part == "validation") {
    examples = data.examples.validation;
  } else if (part == "test") {
    examples = data.examples.test;
  } else {
    throw ContractError("unknown split part '" + part + "'");
  }
  print_eval(evaluate(model, examples), data.split);
  return 0;
}

int cmd_stats(const std::string& corpus_dir, const std::string& layout_flag,
              const std::string& plot) {
  const Corpus corpus = load_corpus(corpus_dir);
  const SkeletonLayout& layout = resolve_layout(layout_flag, corpus);
  const MissingStats stats = missing_stats(corpus.sequences, layout);

  std::printf("frames_total\t%zu\n", stats.frames_total);
  std::printf("missing body\t%s\n", format_double(stats.body).c_str());
  std::printf("missing left_hand\t%s\n", format_double(stats.left_hand).c_str());
  std::printf("missing right_hand\t%s\n", format_double(stats.right_hand).c_str());

  if (!plot.empty()) {
    auto out = open_plot(plot);
    out << "# missing fraction per keypoint group\n# group\tfraction\n";
    out << "body\t" << format_double(stats.body) << "\n";
    out << "left_hand\t" << format_double(stats.left_hand) << "\n";
    out << "right_hand\t" << format_double(stats.right_hand) << "\n";
  }
  return 0;
}

int cmd_hist(const std::string& corpus_dir, const std::string& layout_flag, size_t bins,
             const std::string& plot) {
  const Corpus corpus = load_corpus(corpus_dir);
  const SkeletonLayout& layout = resolve_layout(layout_flag, corpus);
  const ConfidenceHistogram hist = confidence_histogram(corpus.sequences, layout, bins);

  std::printf("bins\t%zu\nobservations\t%zu\n", hist.bins(), hist.total());
  std::printf("zero_bin body\t%zu\nzero_bin hands\t%zu\n", hist.body_counts.front(),
              hist.hand_counts.front());

  if (!plot.empty()) {
    auto out = open_plot(plot);
    out << "# confidence histogram of present observations\n"
        << "# bin_low\tbin_high\tbody\thands\n";
    for (size_t b = 0; b < hist.bins(); ++b) {
      out << format_double(hist.edges[b]) << "\t" << format_double(hist.edges[b + 1]) << "\t"
          << hist.body_counts[b] << "\t" << hist.hand_counts[b] << "\n";
    }
  }
  return 0;
}

int cmd_bench(const std::string& corpus_dir, const std::string& layout_flag,
              const PipelineFlags& pipeline, const std::string& plot) {
  const Corpus corpus = load_corpus(corpus_dir);
  const SkeletonLayout& layout = resolve_layout(layout_flag, corpus);
  const PipelineConfig config = pipeline.config();

  const auto t0 = std::chrono::steady_clock::now();
  const BenchmarkReport report = benchmark_runtime(
      [&](const KeypointSequence& seq) { postprocess(seq, layout, config); }, corpus.sequences,
      [t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      });

  std::printf("clips\t%zu\ntotal_frames\t%zu\ntotal_seconds\t%s\naggregate_fps\t%s\n",
              report.clips.size(), report.total_frames,
              format_double(report.total_seconds).c_str(),
              format_double(report.aggregate_fps).c_str());
  std::printf(
      "note: aggregate is total frames / total seconds, not the mean of per-clip rates.\n"
      "note: for scale, published end-to-end estimator rates on reference hardware are\n"
      "      4.8 FPS (mediapipe), 1.1 FPS (openpose), 1.3 FPS (mmpose); this command\n"
      "      times only the post-processing stage on this machine.\n");

  if (!plot.empty()) {
    auto out = open_plot(plot);
    out << "# per-clip post-processing rate\n# clip\tframes\tseconds\tfps\n";
    for (size_t i = 0; i < report.clips.size(); ++i) {
      const auto& c = report.clips[i];
      out << i << "\t" << c.frames << "\t" << format_double(c.seconds) << "\t"
          << format_double(c.fps) << "\n";
    }
  }
  return 0;
}

int cmd_ablate(const DataFlags& data_flags, const std::string& model_config_path,
               size_t epochs, size_t patience, size_t batch, double lr, uint64_t seed,
               const std::string& plot) {
  const Corpus corpus = load_corpus(data_flags.corpus_dir);
  const DatasetSplit split = load_split(data_flags.split_path);
  const SkeletonLayout& layout = resolve_layout(data_flags.layout_flag, corpus);
  const bool drop_depth = data_flags.pipeline.drop_depth;

  std::vector<AblationConfig> all;
  for (const bool impute : {true, false}) {
    for (const bool normalize : {true, false}) {
      AblationConfig c;
      c.name = std::string(impute ? "impute" : "raw") + "+" +
               (normalize ? "normalize" : "unnormalized");
      c.pipeline.impute = impute;
      c.pipeline.normalize = normalize;
      c.pipeline.output_dims = drop_depth ? OutputDims::drop_depth : OutputDims::keep;
      all.push_back(std::move(c));
    }
  }
  std::vector<AblationConfig> runnable;
  std::vector<std::string> skipped;
  for (auto& c : all) {
    if (pipeline_applicable(c.pipeline, layout)) {
      runnable.push_back(c);
    } else {
      skipped.push_back(c.name);
    }
  }

  ModelConfig mc;
  if (!model_config_path.empty()) {
    mc = load_model_config(model_config_path);
  } else {
    mc.d_embed = 32;
    mc.block_widths = {32, 32, 32, 32};
    mc.layers = 2;
    mc.heads = 4;
    mc.ff_ratio = 2;
    mc.dropout_p = 0.0;
    mc.l1_lambda = 0.0;
  }
  mc.family = layout.family;

  TrainRunConfig rc;
  rc.optimizer.lr = lr;
  rc.batch_size = batch;
  rc.max_epochs = epochs;
  rc.patience = patience;
  rc.seed = seed;

  const auto rows =
      ablation_run(corpus.records, corpus.sequences, split, layout, runnable, mc, rc);
  std::printf("config\tval_accuracy\n");
  for (const auto& row : rows) {
    std::printf("%s\t%s\n", row.name.c_str(), format_double(row.val_accuracy).c_str());
  }
  for (const auto& name : skipped) std::printf("%s\tN/A\n", name.c_str());

  if (!plot.empty()) {
    auto out = open_plot(plot);
    out << "# validation accuracy per post-processing config\n# config\tval_accuracy\n";
    for (const auto& row : rows) {
      out << row.name << "\t" << format_double(row.val_accuracy) << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"keypoint post-processing, training, and analysis toolkit"};
  app.require_subcommand(1);

  // synth
  SyntheticCorpusConfig synth_cfg;
  std::string synth_out, synth_family = "mediapipe";
  double synth_missing = 0.0;
  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--out", synth_out, "output corpus directory")->required();
  synth->add_option("--family", synth_family, "layout family (default mediapipe)");
  synth->add_option("--signers", synth_cfg.signers, "signer count");
  synth->add_option("--classes", synth_cfg.classes, "class count");
  synth->add_option("--per-class", synth_cfg.sequences_per_class,
                    "sequences per signer per class");
  synth->add_option("--min-frames", synth_cfg.min_frames, "minimum frames per sequence");
  synth->add_option("--max-frames", synth_cfg.max_frames, "maximum frames per sequence");
  synth->add_option("--missing", synth_missing,
                    "target expected missing fraction (sets the gap start probability)");
  synth->add_option("--gap-prob", synth_cfg.gap_probability, "gap start probability");
  synth->add_option("--gap-len", synth_cfg.mean_gap_length, "mean gap length in frames");
  synth->add_option("--translation-jitter", synth_cfg.translation_jitter,
                    "per-signer translation bound");
  synth->add_option("--scale-jitter", synth_cfg.scale_jitter, "per-signer scale spread");
  synth->add_option("--noise", synth_cfg.noise_std, "coordinate noise std");
  synth->add_option("--class-offset", synth_cfg.class_offset, "class template offset");
  synth->add_option("--label-prefix", synth_cfg.label_prefix, "gloss label prefix");
  synth->add_option("--seed", synth_cfg.seed, "corpus seed")->required();

  // postprocess
  std::string pp_layout, pp_in, pp_out;
  PipelineFlags pp_pipeline;
  bool pp_ingest = false;
  auto* pp = app.add_subcommand("postprocess", "impute/normalize one sequence file");
  pp->add_option("--layout", pp_layout, "layout id (default: from the file)");
  pp->add_option("--in", pp_in, "input sequence file")->required();
  pp->add_option("--out", pp_out, "output sequence file")->required();
  pp->add_flag("--ingest", pp_ingest, "apply estimator ingest rules first");
  pp_pipeline.attach(pp);

  // split
  std::string split_corpus, split_out;
  std::vector<double> split_ratios = {0.6, 0.2, 0.2};
  uint64_t split_seed = 0;
  size_t split_min_count = 1;
  bool split_keep_absent = false;
  auto* split = app.add_subcommand("split", "signer-disjoint stratified split");
  split->add_option("--corpus", split_corpus, "corpus directory")->required();
  split->add_option("--ratios", split_ratios, "train/val/test ratios")->expected(3);
  split->add_option("--seed", split_seed, "split seed")->required();
  split->add_option("--min-count", split_min_count, "minimum examples per label");
  split->add_flag("--keep-absent", split_keep_absent,
                  "keep classes missing from some subset");
  split->add_option("--out", split_out, "output split file")->required();

  // train
  DataFlags train_data;
  std::string train_model_cfg, train_run_cfg, train_ckpt, train_trace, train_save_mc;
  std::optional<uint64_t> train_seed;
  auto* tr = app.add_subcommand("train", "train a model on a split");
  train_data.attach(tr);
  tr->add_option("--model-config", train_model_cfg, "model architecture file");
  tr->add_option("--config", train_run_cfg, "training run config file");
  tr->add_option("--seed", train_seed, "override the run seed");
  tr->add_option("--checkpoint", train_ckpt, "where to write best-epoch weights");
  tr->add_option("--trace", train_trace, "where to write the per-epoch metric trace");
  tr->add_option("--save-model-config", train_save_mc,
                 "write the resolved model config (for eval/transfer)");

  // transfer
  DataFlags xfer_data;
  std::string xfer_source, xfer_schedule = "classifier_then_all";
  std::string xfer_model_cfg, xfer_run_cfg, xfer_ckpt, xfer_trace;
  size_t xfer_epochs = 300, xfer_patience = 10;
  std::optional<uint64_t> xfer_seed;
  auto* xf = app.add_subcommand("transfer", "staged fine-tune from a source checkpoint");
  xfer_data.attach(xf);
  xf->add_option("--source", xfer_source, "source checkpoint")->required();
  xf->add_option("--schedule", xfer_schedule,
                 "classifier_only | classifier_then_sequence | classifier_then_all");
  xf->add_option("--stage-epochs", xfer_epochs, "max epochs per stage");
  xf->add_option("--stage-patience", xfer_patience, "early-stop patience per stage");
  xf->add_option("--model-config", xfer_model_cfg, "model architecture file");
  xf->add_option("--config", xfer_run_cfg, "training run config file");
  xf->add_option("--seed", xfer_seed, "override the run seed");
  xf->add_option("--checkpoint", xfer_ckpt, "where to write final weights");
  xf->add_option("--trace", xfer_trace, "where to write per-stage metric traces");

  // eval
  DataFlags eval_data;
  std::string eval_ckpt, eval_model_cfg, eval_part = "test";
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a split part");
  eval_data.attach(ev);
  ev->add_option("--checkpoint", eval_ckpt, "checkpoint to evaluate")->required();
  ev->add_option("--model-config", eval_model_cfg, "model architecture file");
  ev->add_option("--part", eval_part, "train | validation | test (default test)");

  // stats
  std::string stats_corpus, stats_layout, stats_plot;
  auto* st = app.add_subcommand("stats", "missing-keypoint statistics per group");
  st->add_option("--corpus", stats_corpus, "corpus directory")->required();
  st->add_option("--layout", stats_layout, "layout id (default: inferred)");
  st->add_option("--plot", stats_plot, "write plot data (group, fraction)");

  // hist
  std::string hist_corpus, hist_layout, hist_plot;
  size_t hist_bins = 50;
  auto* hi = app.add_subcommand("hist", "confidence histogram, body vs hands");
  hi->add_option("--corpus", hist_corpus, "corpus directory")->required();
  hi->add_option("--layout", hist_layout, "layout id (default: inferred)");
  hi->add_option("--bins", hist_bins, "bin count on [0,1] (default 50)");
  hi->add_option("--plot", hist_plot, "write plot data (bin edges + counts)");

  // bench
  std::string bench_corpus, bench_layout, bench_plot;
  PipelineFlags bench_pipeline;
  auto* be = app.add_subcommand("bench", "time the post-processing pipeline per clip");
  be->add_option("--corpus", bench_corpus, "corpus directory")->required();
  be->add_option("--layout", bench_layout, "layout id (default: inferred)");
  be->add_option("--plot", bench_plot, "write plot data (per-clip fps)");
  bench_pipeline.attach(be);

  // ablate
  DataFlags abl_data;
  std::string abl_model_cfg, abl_plot;
  size_t abl_epochs = 30, abl_patience = 6, abl_batch = 8;
  double abl_lr = 1e-3;
  uint64_t abl_seed = 1;
  auto* ab = app.add_subcommand("ablate", "train the impute/normalize grid on one split");
  abl_data.attach(ab);
  ab->add_option("--model-config", abl_model_cfg, "model architecture file");
  ab->add_option("--epochs", abl_epochs, "max epochs per config");
  ab->add_option("--patience", abl_patience, "early-stop patience");
  ab->add_option("--batch", abl_batch, "batch size");
  ab->add_option("--lr", abl_lr, "learning rate");
  ab->add_option("--seed", abl_seed, "shared model/run seed");
  ab->add_option("--plot", abl_plot, "write plot data (config, accuracy)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) {
      synth_cfg.family = parse_family(synth_family);
      return cmd_synth(synth_cfg, synth_missing, synth_out);
    }
    if (pp->parsed()) return cmd_postprocess(pp_layout, pp_pipeline, pp_ingest, pp_in, pp_out);
    if (split->parsed()) {
      return cmd_split(split_corpus, split_ratios, split_seed, split_min_count,
                       split_keep_absent, split_out);
    }
    if (tr->parsed()) {
      return cmd_train(train_data, train_model_cfg, train_run_cfg, train_seed, train_ckpt,
                       train_trace, train_save_mc);
    }
    if (xf->parsed()) {
      return cmd_transfer(xfer_data, xfer_source, xfer_schedule, xfer_epochs, xfer_patience,
                          xfer_model_cfg, xfer_run_cfg, xfer_seed, xfer_ckpt, xfer_trace);
    }
    if (ev->parsed()) return cmd_eval(eval_data, eval_ckpt, eval_model_cfg, eval_part);
    if (st->parsed()) return cmd_stats(stats_corpus, stats_layout, stats_plot);
    if (hi->parsed()) return cmd_hist(hist_corpus, hist_layout, hist_bins, hist_plot);
    if (be->parsed()) return cmd_bench(bench_corpus, bench_layout, bench_pipeline, bench_plot);
    if (ab->parsed()) {
      return cmd_ablate(abl_data, abl_model_cfg, abl_epochs, abl_patience, abl_batch, abl_lr,
                        abl_seed, abl_plot);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
