#include "slrkit/layout.hpp"

#include "slrkit/errors.hpp"

namespace slrkit {

namespace {

const std::array<const char*, 21> kHandNames = {
    "wrist",      "thumb_cmc",  "thumb_mcp",  "thumb_ip",   "thumb_tip",
    "index_mcp",  "index_pip",  "index_dip",  "index_tip",  "middle_mcp",
    "middle_pip", "middle_dip", "middle_tip", "ring_mcp",   "ring_pip",
    "ring_dip",   "ring_tip",   "pinky_mcp",  "pinky_pip",  "pinky_dip",
    "pinky_tip",
};

constexpr size_t kHandWrist = 0;
constexpr size_t kHandMiddleKnuckle = 9;  // middle_mcp

void append_hand_names(std::vector<std::string>& names, const char* side) {
  for (const char* n : kHandNames) names.push_back(std::string(side) + "_hand_" + n);
}

SkeletonLayout make_openpose() {
  // BODY_25 upper-body subset in original order, then the two hand models.
  SkeletonLayout l;
  l.family = EstimatorFamily::openpose;
  l.dims = 2;
  l.missing_granularity = MissingGranularity::per_keypoint;
  l.keypoint_names = {
      "nose",      "neck",       "right_shoulder", "right_elbow", "right_wrist",
      "left_shoulder", "left_elbow", "left_wrist", "right_eye",   "left_eye",
      "right_ear", "left_ear",
  };
  const size_t body = l.keypoint_names.size();  // 12
  append_hand_names(l.keypoint_names, "left");
  append_hand_names(l.keypoint_names, "right");
  l.keypoint_count = l.keypoint_names.size();  // 54
  l.groups = {
      {GroupName::body, 0, body},
      {GroupName::left_hand, body, body + 21},
      {GroupName::right_hand, body + 21, body + 42},
  };
  l.anchors.chest = std::nullopt;  // midpoint of shoulders
  l.anchors.left_shoulder = 5;
  l.anchors.right_shoulder = 2;
  l.anchors.left_wrist = body + kHandWrist;
  l.anchors.right_wrist = body + 21 + kHandWrist;
  l.anchors.left_middle_knuckle = body + kHandMiddleKnuckle;
  l.anchors.right_middle_knuckle = body + 21 + kHandMiddleKnuckle;
  return l;
}

SkeletonLayout make_mmpose() {
  // COCO whole-body upper-body subset (11 body keypoints), then hands.
  SkeletonLayout l;
  l.family = EstimatorFamily::mmpose;
  l.dims = 2;
  l.missing_granularity = MissingGranularity::per_keypoint;
  l.keypoint_names = {
      "nose",          "left_eye",      "right_eye",  "left_ear",   "right_ear",
      "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
      "left_wrist",    "right_wrist",
  };
  const size_t body = l.keypoint_names.size();  // 11
  append_hand_names(l.keypoint_names, "left");
  append_hand_names(l.keypoint_names, "right");
  l.keypoint_count = l.keypoint_names.size();  // 53
  l.groups = {
      {GroupName::body, 0, body},
      {GroupName::left_hand, body, body + 21},
      {GroupName::right_hand, body + 21, body + 42},
  };
  l.anchors.chest = std::nullopt;
  l.anchors.left_shoulder = 5;
  l.anchors.right_shoulder = 6;
  l.anchors.left_wrist = body + kHandWrist;
  l.anchors.right_wrist = body + 21 + kHandWrist;
  l.anchors.left_middle_knuckle = body + kHandMiddleKnuckle;
  l.anchors.right_middle_knuckle = body + 21 + kHandMiddleKnuckle;
  return l;
}

SkeletonLayout make_mediapipe() {
  // Holistic pose upper-body subset (33 minus the 8 leg landmarks), then hands.
  SkeletonLayout l;
  l.family = EstimatorFamily::mediapipe;
  l.dims = 3;
  l.missing_granularity = MissingGranularity::per_group;
  l.keypoint_names = {
      "nose",           "left_eye_inner", "left_eye",      "left_eye_outer",
      "right_eye_inner", "right_eye",     "right_eye_outer", "left_ear",
      "right_ear",      "mouth_left",     "mouth_right",   "left_shoulder",
      "right_shoulder", "left_elbow",     "right_elbow",   "left_wrist",
      "right_wrist",    "left_pinky",     "right_pinky",   "left_index",
      "right_index",    "left_thumb",     "right_thumb",   "left_hip",
      "right_hip",
  };
  const size_t body = l.keypoint_names.size();  // 25
  append_hand_names(l.keypoint_names, "left");
  append_hand_names(l.keypoint_names, "right");
  l.keypoint_count = l.keypoint_names.size();  // 67
  l.groups = {
      {GroupName::body, 0, body},
      {GroupName::left_hand, body, body + 21},
      {GroupName::right_hand, body + 21, body + 42},
  };
  l.anchors.chest = std::nullopt;
  l.anchors.left_shoulder = 11;
  l.anchors.right_shoulder = 12;
  l.anchors.left_wrist = body + kHandWrist;
  l.anchors.right_wrist = body + 21 + kHandWrist;
  l.anchors.left_middle_knuckle = body + kHandMiddleKnuckle;
  l.anchors.right_middle_knuckle = body + 21 + kHandMiddleKnuckle;
  return l;
}

}  // namespace

std::string to_string(EstimatorFamily family) {
  switch (family) {
    case EstimatorFamily::openpose: return "openpose";
    case EstimatorFamily::mmpose: return "mmpose";
    case EstimatorFamily::mediapipe: return "mediapipe";
  }
  return "?";
}

std::string to_string(GroupName group) {
  switch (group) {
    case GroupName::body: return "body";
    case GroupName::left_hand: return "left_hand";
    case GroupName::right_hand: return "right_hand";
  }
  return "?";
}

std::optional<EstimatorFamily> family_from_string(const std::string& id) {
  if (id == "openpose") return EstimatorFamily::openpose;
  if (id == "mmpose") return EstimatorFamily::mmpose;
  if (id == "mediapipe") return EstimatorFamily::mediapipe;
  return std::nullopt;
}

const GroupRange& SkeletonLayout::group(GroupName name) const {
  for (const auto& g : groups) {
    if (g.name == name) return g;
  }
  throw ContractError("layout has no group " + to_string(name));
}

GroupName SkeletonLayout::group_of(size_t keypoint) const {
  for (const auto& g : groups) {
    if (g.contains(keypoint)) return g.name;
  }
  throw ContractError("keypoint index " + std::to_string(keypoint) + " out of range");
}

const SkeletonLayout& layout_for(EstimatorFamily family) {
  static const SkeletonLayout openpose = make_openpose();
  static const SkeletonLayout mmpose = make_mmpose();
  static const SkeletonLayout mediapipe = make_mediapipe();
  switch (family) {
    case EstimatorFamily::openpose: return openpose;
    case EstimatorFamily::mmpose: return mmpose;
    case EstimatorFamily::mediapipe: return mediapipe;
  }
  throw ContractError("unknown estimator family");
}

const SkeletonLayout* find_layout(const std::string& id) {
  const auto family = family_from_string(id);
  if (!family) return nullptr;
  return &layout_for(*family);
}

}  // namespace slrkit
