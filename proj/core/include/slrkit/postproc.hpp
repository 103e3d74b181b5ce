#pragma once

#include <span>
#include <vector>

#include "slrkit/sequence.hpp"

namespace slrkit {

enum class OutputDims { keep, drop_depth };

/// Ablation switches for the post-processing pipeline. Order of application
/// is fixed: impute -> normalize -> drop_depth.
struct PipelineConfig {
  bool impute = true;
  bool normalize = true;
  OutputDims output_dims = OutputDims::keep;
};

/// Fills a single keypoint track (T frames of `dims` coordinates).
/// Interior gaps are linearly interpolated between the nearest present
/// frames on a uniform frame-index timeline; leading/trailing gaps copy the
/// first/last present frame; an all-missing track becomes zeros.
/// Present frames are returned unmodified.
std::vector<double> impute_track(std::span<const double> values, size_t dims,
                                 std::span<const uint8_t> present);

/// Applies impute_track per keypoint (per_keypoint granularity) or jointly
/// per group with group presence = all keypoints present (per_group).
/// The result is present everywhere.
KeypointSequence impute_sequence(const KeypointSequence& seq, const SkeletonLayout& layout);

/// Normalizes one fully-defined frame (flat K*D, layout order): body
/// keypoints are centered on the chest and scaled by the shoulder distance;
/// each hand is centered on its wrist and scaled by the wrist-to-middle-
/// knuckle distance. Throws DegenerateFrameError when a reference segment
/// has near-zero length.
std::vector<double> normalize_frame(std::span<const double> frame, const SkeletonLayout& layout,
                                    size_t dims);

/// Stateful per-sequence normalizer. Carries each group's last usable
/// (center, scale) forward so that a single degenerate or anchor-less frame
/// falls back to the nearest preceding frame instead of failing. Only fully
/// anchor-less sequences raise DegenerateFrameError.
class FrameNormalizer {
 public:
  FrameNormalizer(const SkeletonLayout& layout, size_t dims);

  /// Normalizes the present keypoints of `frame` in place. An empty mask
  /// means fully present. `frame_index` is used in error reports.
  void normalize(std::span<double> frame, std::span<const uint8_t> mask, size_t frame_index);

 private:
  struct GroupState {
    bool has = false;
    std::vector<double> center;
    double denom = 1.0;
  };
  const SkeletonLayout& layout_;
  size_t dims_;
  std::vector<GroupState> state_;  // one per layout group
};

/// Full pipeline: impute (optional) -> per-frame normalize (optional) ->
/// depth drop (optional, 3D layouts only). Confidences and metadata are
/// carried through unchanged.
KeypointSequence postprocess(const KeypointSequence& seq, const SkeletonLayout& layout,
                             const PipelineConfig& config);

}  // namespace slrkit
