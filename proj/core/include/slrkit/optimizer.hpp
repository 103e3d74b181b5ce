#pragma once

#include <vector>

#include "slrkit/tensor.hpp"

namespace slrkit::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Bias-corrected first/second moment state, aligned index-for-index with the
/// parameter list handed to optimizer_step.
struct AdamState {
  std::vector<Tensor> m;
  std::vector<Tensor> v;
  size_t step = 0;

  void reset() {
    m.clear();
    v.clear();
    step = 0;
  }
};

/// One adaptive-moment update from each param's gradient accumulator.
/// Non-trainable params are left bit-identical (their moments are not
/// advanced either). Deterministic given state.
void optimizer_step(std::vector<Param*>& params, AdamState& state, const AdamConfig& cfg);

}  // namespace slrkit::nn
