#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slrkit/layout.hpp"

namespace slrkit {

/// Per-frame keypoint coordinates with a presence mask and optional
/// per-keypoint confidences. Coordinates at absent positions are undefined
/// and must never enter downstream math; by convention writers store 0 there.
/// Immutable by convention once handed to the pipeline.
struct KeypointSequence {
  std::string layout_id;
  size_t frames = 0;     // T
  size_t keypoints = 0;  // K
  size_t dims = 0;       // D; may be 2 for a depth-dropped 3D layout
  std::vector<double> coords;      // T*K*D row-major
  std::vector<uint8_t> present;    // T*K, 0/1
  std::vector<double> confidence;  // empty, or T*K in [0,1]
  std::optional<std::string> label;
  std::optional<std::string> signer_id;

  static KeypointSequence zeros(const SkeletonLayout& layout, size_t frames,
                                bool with_confidence = false);
  /// Same shape as `layout` but with an overridden coordinate dimension
  /// (e.g. 2 for depth-dropped mediapipe).
  static KeypointSequence zeros(const SkeletonLayout& layout, size_t frames, size_t dims,
                                bool with_confidence);

  double& at(size_t t, size_t k, size_t d) { return coords[(t * keypoints + k) * dims + d]; }
  double at(size_t t, size_t k, size_t d) const { return coords[(t * keypoints + k) * dims + d]; }
  bool is_present(size_t t, size_t k) const { return present[t * keypoints + k] != 0; }
  void set_present(size_t t, size_t k, bool p) { present[t * keypoints + k] = p ? 1 : 0; }
  bool has_confidence() const { return !confidence.empty(); }
  /// Confidence of an absent keypoint is 0 by definition.
  double confidence_at(size_t t, size_t k) const {
    if (!is_present(t, k)) return 0.0;
    return has_confidence() ? confidence[t * keypoints + k] : 1.0;
  }

  bool group_present(size_t t, const GroupRange& g) const;
  bool all_present() const;

  /// Writes the frame as a flat K*D vector into `out`, substituting 0 for
  /// absent coordinates (the raw-mode model input convention).
  void flatten_frame(size_t t, std::vector<double>& out) const;
  size_t flat_width() const { return keypoints * dims; }
};

/// Semantic equality: coordinates and confidences compared only where
/// present; undefined slots are ignored.
bool operator==(const KeypointSequence& a, const KeypointSequence& b);

enum class Severity { error, warning };

struct ValidationFinding {
  Severity severity;
  std::string message;
};

struct ValidationReport {
  std::vector<ValidationFinding> findings;
  bool ok() const {
    for (const auto& f : findings) {
      if (f.severity == Severity::error) return false;
    }
    return true;
  }
  bool empty() const { return findings.empty(); }
};

/// Structural checks: shape agreement with the layout, finite coordinates at
/// present positions, well-formed confidences, and all-or-nothing group
/// presence for per-group layouts.
ValidationReport validate_sequence(const KeypointSequence& seq, const SkeletonLayout& layout);

/// One labelled example: a sequence reference plus gloss label and signer.
struct AnnotationRecord {
  std::string file;  // sequence reference (path relative to the corpus root)
  std::string gloss_label;
  std::string signer_id;
};

bool operator==(const AnnotationRecord& a, const AnnotationRecord& b);

}  // namespace slrkit
