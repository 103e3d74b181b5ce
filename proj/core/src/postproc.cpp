#include "slrkit/postproc.hpp"

#include <cmath>

#include "slrkit/errors.hpp"

namespace slrkit {

namespace {

constexpr double kDegenerateEps = 1e-6;

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    s += diff * diff;
  }
  return std::sqrt(s);
}

}  // namespace

std::vector<double> impute_track(std::span<const double> values, size_t dims,
                                 std::span<const uint8_t> present) {
  const size_t frames = present.size();
  if (frames < 1) throw ContractError("impute_track: empty track");
  if (values.size() != frames * dims) throw ContractError("impute_track: shape mismatch");

  std::vector<double> out(values.begin(), values.end());
  std::vector<size_t> hits;
  for (size_t t = 0; t < frames; ++t) {
    if (present[t]) hits.push_back(t);
  }
  if (hits.empty()) {
    std::fill(out.begin(), out.end(), 0.0);
    return out;
  }

  // leading gap: copy first present frame
  for (size_t t = 0; t < hits.front(); ++t) {
    for (size_t d = 0; d < dims; ++d) out[t * dims + d] = values[hits.front() * dims + d];
  }
  // trailing gap: copy last present frame
  for (size_t t = hits.back() + 1; t < frames; ++t) {
    for (size_t d = 0; d < dims; ++d) out[t * dims + d] = values[hits.back() * dims + d];
  }
  // interior gaps: line between the bracketing present frames
  for (size_t h = 0; h + 1 < hits.size(); ++h) {
    const size_t p = hits[h];
    const size_t n = hits[h + 1];
    for (size_t t = p + 1; t < n; ++t) {
      const double alpha = static_cast<double>(t - p) / static_cast<double>(n - p);
      for (size_t d = 0; d < dims; ++d) {
        const double vp = values[p * dims + d];
        const double vn = values[n * dims + d];
        out[t * dims + d] = vp + (vn - vp) * alpha;
      }
    }
  }
  return out;
}

KeypointSequence impute_sequence(const KeypointSequence& seq, const SkeletonLayout& layout) {
  KeypointSequence out = seq;
  const size_t dims = seq.dims;

  std::vector<double> track(seq.frames * dims);
  std::vector<uint8_t> mask(seq.frames);

  auto impute_keypoint = [&](size_t k, const std::vector<uint8_t>& m) {
    for (size_t t = 0; t < seq.frames; ++t) {
      for (size_t d = 0; d < dims; ++d) track[t * dims + d] = seq.at(t, k, d);
    }
    const auto filled = impute_track(track, dims, m);
    for (size_t t = 0; t < seq.frames; ++t) {
      for (size_t d = 0; d < dims; ++d) out.at(t, k, d) = filled[t * dims + d];
    }
  };

  if (layout.missing_granularity == MissingGranularity::per_keypoint) {
    for (size_t k = 0; k < seq.keypoints; ++k) {
      bool any_missing = false;
      for (size_t t = 0; t < seq.frames; ++t) {
        mask[t] = seq.is_present(t, k) ? 1 : 0;
        any_missing = any_missing || !mask[t];
      }
      if (any_missing) impute_keypoint(k, mask);
    }
  } else {
    for (const auto& g : layout.groups) {
      bool any_missing = false;
      for (size_t t = 0; t < seq.frames; ++t) {
        mask[t] = seq.group_present(t, g) ? 1 : 0;
        any_missing = any_missing || !mask[t];
      }
      if (!any_missing) continue;
      for (size_t k = g.begin; k < g.end; ++k) impute_keypoint(k, mask);
    }
  }
  std::fill(out.present.begin(), out.present.end(), 1);
  return out;
}

FrameNormalizer::FrameNormalizer(const SkeletonLayout& layout, size_t dims)
    : layout_(layout), dims_(dims), state_(layout.groups.size()) {
  if (dims == 0 || dims > layout.dims) throw ContractError("FrameNormalizer: bad dims");
}

void FrameNormalizer::normalize(std::span<double> frame, std::span<const uint8_t> mask,
                                size_t frame_index) {
  if (frame.size() != layout_.keypoint_count * dims_) {
    throw ContractError("normalize: frame size mismatch");
  }
  auto present = [&](size_t k) { return mask.empty() || mask[k] != 0; };
  auto point = [&](size_t k) { return frame.subspan(k * dims_, dims_); };

  // Resolve each group's (center, denom) from anchor positions before any
  // coordinate is overwritten.
  struct Plan {
    bool apply = false;
    std::vector<double> center;
    double denom = 1.0;
  };
  std::vector<Plan> plans(layout_.groups.size());

  for (size_t gi = 0; gi < layout_.groups.size(); ++gi) {
    const auto& g = layout_.groups[gi];
    auto& st = state_[gi];
    auto& plan = plans[gi];

    size_t center_a = 0, center_b = 0, scale_a = 0, scale_b = 0;
    bool midpoint_center = false;
    if (g.name == GroupName::body) {
      scale_a = layout_.anchors.left_shoulder;
      scale_b = layout_.anchors.right_shoulder;
      if (layout_.anchors.chest) {
        center_a = center_b = *layout_.anchors.chest;
      } else {
        center_a = scale_a;
        center_b = scale_b;
        midpoint_center = true;
      }
    } else if (g.name == GroupName::left_hand) {
      center_a = center_b = layout_.anchors.left_wrist;
      scale_a = layout_.anchors.left_wrist;
      scale_b = layout_.anchors.left_middle_knuckle;
    } else {
      center_a = center_b = layout_.anchors.right_wrist;
      scale_a = layout_.anchors.right_wrist;
      scale_b = layout_.anchors.right_middle_knuckle;
    }

    const bool anchors_ok =
        present(center_a) && present(center_b) && present(scale_a) && present(scale_b);
    if (anchors_ok) {
      plan.center.resize(dims_);
      for (size_t d = 0; d < dims_; ++d) {
        plan.center[d] = midpoint_center ? 0.5 * (point(center_a)[d] + point(center_b)[d])
                                         : point(center_a)[d];
      }
      const double denom = distance(point(scale_a), point(scale_b));
      if (denom >= kDegenerateEps) {
        plan.denom = denom;
      } else if (st.has) {
        plan.denom = st.denom;  // nearest preceding frame's scale
      } else {
        throw DegenerateFrameError(to_string(g.name), frame_index);
      }
      plan.apply = true;
      st.has = true;
      st.center = plan.center;
      st.denom = plan.denom;
    } else if (st.has) {
      plan.center = st.center;
      plan.denom = st.denom;
      plan.apply = true;
    }
    // anchors absent and no history: leave the group untouched this frame
  }

  for (size_t gi = 0; gi < layout_.groups.size(); ++gi) {
    if (!plans[gi].apply) continue;
    const auto& g = layout_.groups[gi];
    const auto& plan = plans[gi];
    const double inv = 1.0 / plan.denom;
    for (size_t k = g.begin; k < g.end; ++k) {
      if (!present(k)) continue;
      auto p = point(k);
      for (size_t d = 0; d < dims_; ++d) p[d] = (p[d] - plan.center[d]) * inv;
    }
  }
}

std::vector<double> normalize_frame(std::span<const double> frame, const SkeletonLayout& layout,
                                    size_t dims) {
  std::vector<double> out(frame.begin(), frame.end());
  FrameNormalizer norm(layout, dims);
  norm.normalize(out, {}, 0);
  return out;
}

KeypointSequence postprocess(const KeypointSequence& seq, const SkeletonLayout& layout,
                             const PipelineConfig& config) {
  if (seq.keypoints != layout.keypoint_count) {
    throw ContractError("postprocess: sequence does not match layout");
  }
  KeypointSequence out = config.impute ? impute_sequence(seq, layout) : seq;

  if (config.normalize) {
    FrameNormalizer norm(layout, out.dims);
    std::vector<double> frame(out.keypoints * out.dims);
    std::vector<uint8_t> mask(out.keypoints);
    for (size_t t = 0; t < out.frames; ++t) {
      bool all = true;
      for (size_t k = 0; k < out.keypoints; ++k) {
        mask[k] = out.is_present(t, k) ? 1 : 0;
        all = all && mask[k];
        for (size_t d = 0; d < out.dims; ++d) frame[k * out.dims + d] = out.at(t, k, d);
      }
      norm.normalize(frame, all ? std::span<const uint8_t>{} : std::span<const uint8_t>(mask), t);
      for (size_t k = 0; k < out.keypoints; ++k) {
        if (!mask[k]) continue;
        for (size_t d = 0; d < out.dims; ++d) out.at(t, k, d) = frame[k * out.dims + d];
      }
    }
  }

  if (config.output_dims == OutputDims::drop_depth) {
    if (layout.dims != 3) throw ContractError("drop_depth requires a 3D layout");
    if (out.dims != 3) throw ContractError("drop_depth: sequence is not 3D");
    KeypointSequence flat = out;
    flat.dims = 2;
    flat.coords.assign(out.frames * out.keypoints * 2, 0.0);
    for (size_t t = 0; t < out.frames; ++t) {
      for (size_t k = 0; k < out.keypoints; ++k) {
        flat.coords[(t * out.keypoints + k) * 2 + 0] = out.at(t, k, 0);
        flat.coords[(t * out.keypoints + k) * 2 + 1] = out.at(t, k, 1);
      }
    }
    return flat;
  }
  return out;
}

}  // namespace slrkit
