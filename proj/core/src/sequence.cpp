#include "slrkit/sequence.hpp"

#include <cmath>

#include "slrkit/errors.hpp"

namespace slrkit {

KeypointSequence KeypointSequence::zeros(const SkeletonLayout& layout, size_t frames,
                                         bool with_confidence) {
  return zeros(layout, frames, layout.dims, with_confidence);
}

KeypointSequence KeypointSequence::zeros(const SkeletonLayout& layout, size_t frames, size_t dims,
                                         bool with_confidence) {
  if (frames == 0) throw ContractError("sequence must have at least one frame");
  KeypointSequence s;
  s.layout_id = layout.id();
  s.frames = frames;
  s.keypoints = layout.keypoint_count;
  s.dims = dims;
  s.coords.assign(frames * s.keypoints * dims, 0.0);
  s.present.assign(frames * s.keypoints, 1);
  if (with_confidence) s.confidence.assign(frames * s.keypoints, 1.0);
  return s;
}

bool KeypointSequence::group_present(size_t t, const GroupRange& g) const {
  for (size_t k = g.begin; k < g.end; ++k) {
    if (!is_present(t, k)) return false;
  }
  return true;
}

bool KeypointSequence::all_present() const {
  for (uint8_t p : present) {
    if (!p) return false;
  }
  return true;
}

void KeypointSequence::flatten_frame(size_t t, std::vector<double>& out) const {
  out.assign(keypoints * dims, 0.0);
  for (size_t k = 0; k < keypoints; ++k) {
    if (!is_present(t, k)) continue;
    for (size_t d = 0; d < dims; ++d) out[k * dims + d] = at(t, k, d);
  }
}

bool operator==(const KeypointSequence& a, const KeypointSequence& b) {
  if (a.layout_id != b.layout_id || a.frames != b.frames || a.keypoints != b.keypoints ||
      a.dims != b.dims || a.label != b.label || a.signer_id != b.signer_id ||
      a.has_confidence() != b.has_confidence() || a.present != b.present) {
    return false;
  }
  for (size_t t = 0; t < a.frames; ++t) {
    for (size_t k = 0; k < a.keypoints; ++k) {
      if (!a.is_present(t, k)) continue;
      for (size_t d = 0; d < a.dims; ++d) {
        if (a.at(t, k, d) != b.at(t, k, d)) return false;
      }
      if (a.has_confidence() && a.confidence_at(t, k) != b.confidence_at(t, k)) return false;
    }
  }
  return true;
}

bool operator==(const AnnotationRecord& a, const AnnotationRecord& b) {
  return a.file == b.file && a.gloss_label == b.gloss_label && a.signer_id == b.signer_id;
}

ValidationReport validate_sequence(const KeypointSequence& seq, const SkeletonLayout& layout) {
  ValidationReport report;
  auto error = [&](const std::string& m) { report.findings.push_back({Severity::error, m}); };

  if (seq.layout_id != layout.id()) {
    error("layout_id '" + seq.layout_id + "' does not match layout '" + layout.id() + "'");
  }
  if (seq.frames < 1) {
    error("sequence has no frames");
    return report;
  }
  if (seq.keypoints != layout.keypoint_count) {
    error("keypoint count " + std::to_string(seq.keypoints) + " != layout " +
          std::to_string(layout.keypoint_count));
  }
  const bool dims_ok = seq.dims == layout.dims || (layout.dims == 3 && seq.dims == 2);
  if (!dims_ok) {
    error("dims " + std::to_string(seq.dims) + " invalid for layout '" + layout.id() + "'");
  }
  if (seq.coords.size() != seq.frames * seq.keypoints * seq.dims) {
    error("coords array has wrong size");
    return report;
  }
  if (seq.present.size() != seq.frames * seq.keypoints) {
    error("presence mask has wrong size");
    return report;
  }
  if (seq.has_confidence() && seq.confidence.size() != seq.frames * seq.keypoints) {
    error("confidence array has wrong size");
    return report;
  }

  for (size_t t = 0; t < seq.frames; ++t) {
    for (size_t k = 0; k < seq.keypoints; ++k) {
      if (!seq.is_present(t, k)) continue;
      for (size_t d = 0; d < seq.dims; ++d) {
        if (!std::isfinite(seq.at(t, k, d))) {
          error("non-finite coordinate at frame " + std::to_string(t) + " keypoint " +
                std::to_string(k));
          d = seq.dims;  // one finding per keypoint is enough
        }
      }
      if (seq.has_confidence()) {
        const double c = seq.confidence[t * seq.keypoints + k];
        if (!(c >= 0.0 && c <= 1.0)) {
          error("confidence out of [0,1] at frame " + std::to_string(t) + " keypoint " +
                std::to_string(k));
        }
      }
    }
  }

  if (layout.missing_granularity == MissingGranularity::per_group &&
      seq.keypoints == layout.keypoint_count) {
    for (size_t t = 0; t < seq.frames; ++t) {
      for (const auto& g : layout.groups) {
        size_t present_count = 0;
        for (size_t k = g.begin; k < g.end; ++k) present_count += seq.is_present(t, k) ? 1 : 0;
        if (present_count != 0 && present_count != g.size()) {
          error("partial group presence: frame " + std::to_string(t) + " group '" +
                to_string(g.name) + "' has " + std::to_string(present_count) + "/" +
                std::to_string(g.size()) + " keypoints");
        }
      }
    }
  }
  return report;
}

}  // namespace slrkit
