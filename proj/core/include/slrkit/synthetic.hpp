#pragma once

#include <string>
#include <vector>

#include "slrkit/layout.hpp"
#include "slrkit/sequence.hpp"

namespace slrkit {

/// Controls for the synthetic corpus generator. Classes are parametric wrist
/// trajectories (ellipse / lissajous / pendulum families with per-class
/// frequency, phase, and center); signers render them with a persistent
/// translation/scale style; gaps follow a start-probability + geometric-
/// length model applied per missing-granularity track.
struct SyntheticCorpusConfig {
  EstimatorFamily family = EstimatorFamily::mediapipe;
  size_t signers = 30;
  size_t classes = 10;
  size_t sequences_per_class = 1;  // per signer, per class
  size_t min_frames = 16;
  size_t max_frames = 24;
  /// Chance that a gap starts at a frame (evaluated outside gaps).
  double gap_probability = 0.0;
  /// Mean of the geometric gap-length distribution, in frames (>= 1).
  double mean_gap_length = 3.0;
  /// Per-signer translation offset bound (image units) and scale spread
  /// (scale drawn from [1 - scale_jitter, 1 + scale_jitter]).
  double translation_jitter = 0.05;
  double scale_jitter = 0.10;
  /// i.i.d. coordinate noise added to every rendered position.
  double noise_std = 0.004;
  /// Shifts the class template family; disjoint offsets give corpora with
  /// unrelated motion vocabularies (transfer experiments).
  size_t class_offset = 0;
  std::string label_prefix = "SIGN";
  uint64_t seed = 1;

  void validate() const;
  /// Stationary expected missing fraction of the gap model:
  /// p*m / (1 - p + p*m)  for gap start probability p and mean length m.
  double expected_missing_fraction() const;
  /// Sets gap_probability so that expected_missing_fraction() == target,
  /// keeping mean_gap_length.
  void set_missing_fraction(double target);
};

struct SyntheticCorpus {
  std::vector<AnnotationRecord> records;
  std::vector<KeypointSequence> sequences;  // aligned with records
};

/// Deterministic given config (per-sequence substreams keyed on signer,
/// class, and repetition). Sequences carry labels, signer ids, and — for
/// confidence-reporting estimator families — a confidence channel.
SyntheticCorpus gen_synthetic(const SyntheticCorpusConfig& config);

}  // namespace slrkit
