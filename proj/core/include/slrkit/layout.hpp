#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace slrkit {

enum class EstimatorFamily { openpose, mmpose, mediapipe };
enum class GroupName { body, left_hand, right_hand };
enum class MissingGranularity { per_keypoint, per_group };

std::string to_string(EstimatorFamily family);
std::string to_string(GroupName group);
std::optional<EstimatorFamily> family_from_string(const std::string& id);

/// Half-open keypoint index range [begin, end).
struct GroupRange {
  GroupName name;
  size_t begin = 0;
  size_t end = 0;
  size_t size() const { return end - begin; }
  bool contains(size_t k) const { return k >= begin && k < end; }
};

/// Reference landmarks used by normalization. Indices are absolute keypoint
/// indices into the layout. chest is absent for layouts without an explicit
/// chest keypoint; the chest anchor is then the midpoint of the shoulders.
struct LayoutAnchors {
  std::optional<size_t> chest;
  size_t left_shoulder = 0;
  size_t right_shoulder = 0;
  size_t left_wrist = 0;
  size_t right_wrist = 0;
  size_t left_middle_knuckle = 0;
  size_t right_middle_knuckle = 0;
};

/// Fixed per-estimator keypoint index map (upper body + both hands, face mesh
/// excluded). Immutable after construction; safe to share across threads.
struct SkeletonLayout {
  EstimatorFamily family;
  size_t keypoint_count = 0;
  size_t dims = 0;  // 2 or 3
  std::vector<GroupRange> groups;
  LayoutAnchors anchors;
  MissingGranularity missing_granularity = MissingGranularity::per_keypoint;
  std::vector<std::string> keypoint_names;  // size == keypoint_count

  std::string id() const { return to_string(family); }
  const GroupRange& group(GroupName name) const;
  GroupName group_of(size_t keypoint) const;
};

/// Returns the fixed layout for a pose-estimator family. Total over the enum;
/// the returned reference is to a process-wide immutable singleton.
const SkeletonLayout& layout_for(EstimatorFamily family);

/// Layout lookup by id string ("openpose" | "mmpose" | "mediapipe").
const SkeletonLayout* find_layout(const std::string& id);

}  // namespace slrkit
