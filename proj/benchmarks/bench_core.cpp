#include <benchmark/benchmark.h>

#include "slrkit/model.hpp"
#include "slrkit/postproc.hpp"
#include "slrkit/rng.hpp"

using namespace slrkit;

namespace {

KeypointSequence sample_sequence(size_t frames, double missing) {
  const auto& layout = layout_for(EstimatorFamily::mediapipe);
  KeypointSequence seq = KeypointSequence::zeros(layout, frames);
  Rng rng(99);
  for (double& c : seq.coords) c = rng.uniform(0.05, 0.95);
  if (missing > 0.0) {
    for (size_t t = 0; t < frames; ++t) {
      for (const auto& group : layout.groups) {
        if (rng.uniform() < missing) {
          for (size_t k = group.begin; k < group.end; ++k) seq.set_present(t, k, false);
        }
      }
    }
    // keep at least the first frame usable for every group
    for (size_t k = 0; k < seq.keypoints; ++k) seq.set_present(0, k, true);
  }
  return seq;
}

void bm_impute(benchmark::State& state) {
  const auto& layout = layout_for(EstimatorFamily::mediapipe);
  const KeypointSequence seq = sample_sequence(64, 0.15);
  for (auto _ : state) {
    benchmark::DoNotOptimize(impute_sequence(seq, layout));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 64);
}
BENCHMARK(bm_impute)->Unit(benchmark::kMicrosecond);

void bm_normalize(benchmark::State& state) {
  const auto& layout = layout_for(EstimatorFamily::mediapipe);
  const KeypointSequence seq = sample_sequence(64, 0.0);
  PipelineConfig config;
  config.impute = false;
  for (auto _ : state) {
    benchmark::DoNotOptimize(postprocess(seq, layout, config));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 64);
}
BENCHMARK(bm_normalize)->Unit(benchmark::kMicrosecond);

void bm_full_pipeline(benchmark::State& state) {
  const auto& layout = layout_for(EstimatorFamily::mediapipe);
  const KeypointSequence seq = sample_sequence(64, 0.15);
  PipelineConfig config;
  config.output_dims = OutputDims::drop_depth;
  for (auto _ : state) {
    benchmark::DoNotOptimize(postprocess(seq, layout, config));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 64);
}
BENCHMARK(bm_full_pipeline)->Unit(benchmark::kMicrosecond);

void bm_pose_embed(benchmark::State& state) {
  ModelConfig mc;  // default widths: 3*67 -> 128
  mc.input_dims = 3;
  mc.classes = 10;
  const PtnModel model(mc, 7);
  Rng rng(8);
  nn::Tensor frames({32, mc.input_width()});
  for (size_t i = 0; i < frames.size(); ++i) frames[i] = rng.normal();
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.pose_embed(frames, nn::Mode::eval));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 32);
}
BENCHMARK(bm_pose_embed)->Unit(benchmark::kMicrosecond);

void bm_transformer_layer(benchmark::State& state) {
  const size_t t = 33, d = 128, hidden = 512;
  Rng rng(9);
  auto rand = [&](std::vector<size_t> shape) {
    nn::Tensor x(std::move(shape));
    for (size_t i = 0; i < x.size(); ++i) x[i] = rng.normal() * 0.05;
    return x;
  };
  nn::TransformerLayerParams p;
  p.attn.heads = 8;
  p.attn.wq = rand({d, d});
  p.attn.bq = rand({d});
  p.attn.wk = rand({d, d});
  p.attn.bk = rand({d});
  p.attn.wv = rand({d, d});
  p.attn.bv = rand({d});
  p.attn.wo = rand({d, d});
  p.attn.bo = rand({d});
  p.norm1_gain = nn::Tensor({d}, std::vector<double>(d, 1.0));
  p.norm1_bias = nn::Tensor({d});
  p.norm2_gain = nn::Tensor({d}, std::vector<double>(d, 1.0));
  p.norm2_bias = nn::Tensor({d});
  p.ff.w1 = rand({d, hidden});
  p.ff.b1 = rand({hidden});
  p.ff.w2 = rand({hidden, d});
  p.ff.b2 = rand({d});
  const nn::Tensor x = rand({t, d});
  for (auto _ : state) {
    benchmark::DoNotOptimize(nn::transformer_layer(x, p, {}));
  }
}
BENCHMARK(bm_transformer_layer)->Unit(benchmark::kMicrosecond);

void bm_ptn_forward(benchmark::State& state) {
  ModelConfig mc;  // full default architecture
  mc.input_dims = 3;
  mc.classes = 10;
  const PtnModel model(mc, 7);
  const auto& layout = layout_for(EstimatorFamily::mediapipe);
  const KeypointSequence seq = postprocess(sample_sequence(32, 0.0), layout, PipelineConfig{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward_sequence(seq, nn::Mode::eval));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 32);
}
BENCHMARK(bm_ptn_forward)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
