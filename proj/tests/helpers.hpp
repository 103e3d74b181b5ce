#pragma once

#include <cmath>
#include <vector>

#include "slrkit/rng.hpp"
#include "slrkit/sequence.hpp"

namespace slrkit::testing {

/// A fully-present random sequence with coordinates in plausible image range.
inline KeypointSequence random_sequence(const SkeletonLayout& layout, size_t frames, Rng& rng,
                                        bool with_confidence = false) {
  KeypointSequence seq = KeypointSequence::zeros(layout, frames, with_confidence);
  for (double& c : seq.coords) c = rng.uniform(0.05, 0.95);
  if (with_confidence) {
    for (double& c : seq.confidence) c = rng.uniform();
  }
  return seq;
}

/// Knocks out presence by granularity: whole groups for per_group layouts,
/// individual keypoints otherwise.
inline void knock_out(KeypointSequence& seq, const SkeletonLayout& layout, Rng& rng,
                      double miss_prob) {
  for (size_t t = 0; t < seq.frames; ++t) {
    if (layout.missing_granularity == MissingGranularity::per_group) {
      for (const auto& g : layout.groups) {
        if (rng.uniform() < miss_prob) {
          for (size_t k = g.begin; k < g.end; ++k) seq.set_present(t, k, false);
        }
      }
    } else {
      for (size_t k = 0; k < seq.keypoints; ++k) {
        if (rng.uniform() < miss_prob) seq.set_present(t, k, false);
      }
    }
  }
  for (size_t t = 0; t < seq.frames; ++t) {
    for (size_t k = 0; k < seq.keypoints; ++k) {
      if (seq.is_present(t, k)) continue;
      for (size_t d = 0; d < seq.dims; ++d) seq.at(t, k, d) = 0.0;
    }
  }
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace slrkit::testing
