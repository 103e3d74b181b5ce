#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "slrkit/errors.hpp"
#include "slrkit/postproc.hpp"
#include "slrkit/rng.hpp"

using namespace slrkit;

namespace {

/// Independent imputation oracle. Written against the filling rules alone:
/// for each absent frame, scan outward for the nearest present frames on
/// each side and evaluate the two-point line as the convex combination
/// v_prev*(1-alpha) + v_next*alpha (the implementation uses the point-slope
/// form, so agreement is not shared-code agreement). One-sided gaps copy the
/// nearest present value; fully absent tracks become zeros.
std::vector<double> oracle_impute(const std::vector<double>& values, size_t dims,
                                  const std::vector<uint8_t>& present) {
  const size_t frames = present.size();
  std::vector<double> out(values);
  for (size_t t = 0; t < frames; ++t) {
    if (present[t]) continue;
    ptrdiff_t prev = -1, next = -1;
    for (ptrdiff_t i = static_cast<ptrdiff_t>(t) - 1; i >= 0; --i) {
      if (present[i]) {
        prev = i;
        break;
      }
    }
    for (size_t i = t + 1; i < frames; ++i) {
      if (present[i]) {
        next = static_cast<ptrdiff_t>(i);
        break;
      }
    }
    for (size_t d = 0; d < dims; ++d) {
      double v = 0.0;
      if (prev >= 0 && next >= 0) {
        const double alpha = static_cast<double>(t - prev) / static_cast<double>(next - prev);
        v = values[prev * dims + d] * (1.0 - alpha) + values[next * dims + d] * alpha;
      } else if (prev >= 0) {
        v = values[prev * dims + d];
      } else if (next >= 0) {
        v = values[next * dims + d];
      }
      out[t * dims + d] = v;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("imputation matches the independent line-equation oracle on random tracks") {
  Rng rng(20240817);
  double worst = 0.0;
  for (int iter = 0; iter < 2000; ++iter) {
    const size_t frames = 1 + rng.below(30);
    const size_t dims = 1 + rng.below(3);
    std::vector<double> values(frames * dims);
    for (double& v : values) v = rng.uniform(-5.0, 5.0);
    std::vector<uint8_t> present(frames);
    for (auto& p : present) p = rng.uniform() < 0.6 ? 1 : 0;

    const auto got = impute_track(values, dims, present);
    const auto want = oracle_impute(values, dims, present);
    worst = std::max(worst, testing::max_abs_diff(got, want));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("imputation handles the three gap mechanisms") {
  SUBCASE("interior gap: straight line between neighbors") {
    // track 0, _, _, 9 -> 0, 3, 6, 9
    std::vector<double> v = {0, 0, 0, 9};
    std::vector<uint8_t> m = {1, 0, 0, 1};
    const auto got = impute_track(v, 1, m);
    CHECK(got[0] == 0.0);
    CHECK(got[1] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(got[2] == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(got[3] == 9.0);
  }
  SUBCASE("leading and trailing gaps copy the nearest present frame") {
    std::vector<double> v = {0, 0, 5, 7, 0, 0};
    std::vector<uint8_t> m = {0, 0, 1, 1, 0, 0};
    const auto got = impute_track(v, 1, m);
    CHECK(got == std::vector<double>{5, 5, 5, 7, 7, 7});
  }
  SUBCASE("fully absent track becomes zeros") {
    std::vector<double> v = {1, 2, 3, 4};
    std::vector<uint8_t> m = {0, 0, 0, 0};
    const auto got = impute_track(v, 1, m);
    CHECK(got == std::vector<double>{0, 0, 0, 0});
  }
  SUBCASE("present frames are never modified") {
    Rng rng(5);
    std::vector<double> v(24);
    for (double& x : v) x = rng.normal();
    std::vector<uint8_t> m = {1, 0, 1, 0, 1, 1, 0, 1, 0, 1, 1, 0};
    const auto got = impute_track(v, 2, m);
    for (size_t t = 0; t < m.size(); ++t) {
      if (!m[t]) continue;
      CHECK(got[t * 2] == v[t * 2]);
      CHECK(got[t * 2 + 1] == v[t * 2 + 1]);
    }
  }
}

TEST_CASE("impute_sequence leaves no absences and respects granularity") {
  Rng rng(31);
  SUBCASE("per-keypoint: each track filled independently") {
    const auto& layout = layout_for(EstimatorFamily::openpose);
    KeypointSequence seq = testing::random_sequence(layout, 8, rng);
    testing::knock_out(seq, layout, rng, 0.3);
    const KeypointSequence filled = impute_sequence(seq, layout);
    CHECK(filled.all_present());
    // present values survive untouched
    for (size_t t = 0; t < seq.frames; ++t) {
      for (size_t k = 0; k < seq.keypoints; ++k) {
        if (!seq.is_present(t, k)) continue;
        CHECK(filled.at(t, k, 0) == seq.at(t, k, 0));
        CHECK(filled.at(t, k, 1) == seq.at(t, k, 1));
      }
    }
  }
  SUBCASE("per-group: a frame with a partially tracked group imputes as absent") {
    const auto& layout = layout_for(EstimatorFamily::mediapipe);
    KeypointSequence seq = testing::random_sequence(layout, 5, rng);
    const auto& g = layout.group(GroupName::right_hand);
    // group fully absent at frame 2
    for (size_t k = g.begin; k < g.end; ++k) seq.set_present(2, k, false);
    const KeypointSequence filled = impute_sequence(seq, layout);
    CHECK(filled.all_present());
    // frame 2 of the hand is the midpoint of frames 1 and 3
    for (size_t k = g.begin; k < g.end; ++k) {
      for (size_t d = 0; d < 3; ++d) {
        const double mid = 0.5 * (seq.at(1, k, d) + seq.at(3, k, d));
        CHECK(filled.at(2, k, d) == doctest::Approx(mid).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("normalization is invariant to global scale and translation") {
  Rng rng(47);
  for (auto family :
       {EstimatorFamily::openpose, EstimatorFamily::mmpose, EstimatorFamily::mediapipe}) {
    const auto& layout = layout_for(family);
    const size_t dims = layout.dims;
    double worst = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      std::vector<double> frame(layout.keypoint_count * dims);
      for (double& v : frame) v = rng.uniform(-1.0, 1.0);
      const double s = rng.uniform(0.1, 10.0);
      std::vector<double> t(dims);
      for (double& v : t) v = rng.uniform(-100.0, 100.0);

      std::vector<double> transformed(frame.size());
      for (size_t i = 0; i < frame.size(); ++i) transformed[i] = s * frame[i] + t[i % dims];

      const auto a = normalize_frame(frame, layout, dims);
      const auto b = normalize_frame(transformed, layout, dims);
      worst = std::max(worst, testing::max_abs_diff(a, b));
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("normalization centers and scales against the documented anchors") {
  const auto& layout = layout_for(EstimatorFamily::mmpose);
  Rng rng(7);
  std::vector<double> frame(layout.keypoint_count * 2);
  for (double& v : frame) v = rng.uniform(0.0, 1.0);
  const auto out = normalize_frame(frame, layout, 2);

  const size_t ls = layout.anchors.left_shoulder, rs = layout.anchors.right_shoulder;
  const double cx = 0.5 * (frame[ls * 2] + frame[rs * 2]);
  const double cy = 0.5 * (frame[ls * 2 + 1] + frame[rs * 2 + 1]);
  const double shoulder_dist = std::hypot(frame[ls * 2] - frame[rs * 2],
                                          frame[ls * 2 + 1] - frame[rs * 2 + 1]);
  // spot-check the nose
  CHECK(out[0] == doctest::Approx((frame[0] - cx) / shoulder_dist).epsilon(1e-12));
  CHECK(out[1] == doctest::Approx((frame[1] - cy) / shoulder_dist).epsilon(1e-12));

  // the shoulder midpoint maps to the origin
  CHECK(0.5 * (out[ls * 2] + out[rs * 2]) == doctest::Approx(0.0).epsilon(1e-12));
  // wrist of each hand maps to that hand's origin
  CHECK(out[layout.anchors.left_wrist * 2] == 0.0);
  CHECK(out[layout.anchors.left_wrist * 2 + 1] == 0.0);
  // the middle knuckle sits at distance 1 from the wrist
  const size_t wk = layout.anchors.right_wrist, mk = layout.anchors.right_middle_knuckle;
  const double knuckle_dist =
      std::hypot(out[mk * 2] - out[wk * 2], out[mk * 2 + 1] - out[wk * 2 + 1]);
  CHECK(knuckle_dist == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("degenerate reference segments fall back to the preceding frame") {
  const auto& layout = layout_for(EstimatorFamily::mmpose);
  Rng rng(13);
  KeypointSequence seq = testing::random_sequence(layout, 3, rng);
  // frame 1: collapse the left hand onto a single point
  const auto& g = layout.group(GroupName::left_hand);
  for (size_t k = g.begin; k < g.end; ++k) {
    seq.at(1, k, 0) = 0.5;
    seq.at(1, k, 1) = 0.5;
  }
  PipelineConfig cfg;
  cfg.impute = false;
  const KeypointSequence out = postprocess(seq, layout, cfg);  // must not throw
  // frame 0's scale was reused: the collapsed hand is centered on its wrist
  CHECK(out.at(1, g.begin, 0) == 0.0);
  CHECK(out.at(1, g.begin, 1) == 0.0);

  // with no preceding usable frame the error is reported with context
  KeypointSequence bad = testing::random_sequence(layout, 2, rng);
  for (size_t k = g.begin; k < g.end; ++k) {
    bad.at(0, k, 0) = 0.25;
    bad.at(0, k, 1) = 0.25;
  }
  try {
    postprocess(bad, layout, cfg);
    FAIL("expected DegenerateFrameError");
  } catch (const DegenerateFrameError& e) {
    CHECK(e.group() == "left_hand");
    CHECK(e.frame_index() == 0);
  }
}

TEST_CASE("pipeline order: impute feeds normalize, depth drop comes last") {
  const auto& layout = layout_for(EstimatorFamily::mediapipe);
  Rng rng(61);
  KeypointSequence seq = testing::random_sequence(layout, 6, rng);
  testing::knock_out(seq, layout, rng, 0.25);

  PipelineConfig full;
  full.output_dims = OutputDims::drop_depth;
  const KeypointSequence out = postprocess(seq, layout, full);
  CHECK(out.dims == 2);
  CHECK(out.all_present());
  CHECK(out.frames == seq.frames);

  // equivalent to composing the steps by hand
  KeypointSequence manual = impute_sequence(seq, layout);
  PipelineConfig norm_only;
  norm_only.impute = false;
  norm_only.output_dims = OutputDims::drop_depth;
  const KeypointSequence composed = postprocess(manual, layout, norm_only);
  CHECK(testing::max_abs_diff(out.coords, composed.coords) == 0.0);
}

TEST_CASE("drop_depth on a 2D layout is a contract violation") {
  const auto& layout = layout_for(EstimatorFamily::openpose);
  Rng rng(3);
  KeypointSequence seq = testing::random_sequence(layout, 2, rng);
  PipelineConfig cfg;
  cfg.output_dims = OutputDims::drop_depth;
  CHECK_THROWS_AS(postprocess(seq, layout, cfg), ContractError);
}

TEST_CASE("normalize without impute touches only present keypoints") {
  const auto& layout = layout_for(EstimatorFamily::openpose);
  Rng rng(17);
  KeypointSequence seq = testing::random_sequence(layout, 4, rng);
  seq.set_present(2, 20, false);
  seq.at(2, 20, 0) = 0.0;
  seq.at(2, 20, 1) = 0.0;
  PipelineConfig cfg;
  cfg.impute = false;
  const KeypointSequence out = postprocess(seq, layout, cfg);
  CHECK(!out.is_present(2, 20));
  CHECK(out.at(2, 20, 0) == 0.0);  // absent slot left as stored
  // neighbors were normalized
  CHECK(out.at(2, 21, 0) != seq.at(2, 21, 0));
}

TEST_CASE("imputation then stats: no absences remain") {
  // the composition invariant that makes downstream raw-mode zeros impossible
  const auto& layout = layout_for(EstimatorFamily::mediapipe);
  Rng rng(23);
  for (int i = 0; i < 10; ++i) {
    KeypointSequence seq = testing::random_sequence(layout, 5, rng);
    testing::knock_out(seq, layout, rng, 0.4);
    CHECK(impute_sequence(seq, layout).all_present());
  }
}
