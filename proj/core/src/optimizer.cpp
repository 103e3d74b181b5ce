#include "slrkit/optimizer.hpp"

#include <cmath>

#include "slrkit/errors.hpp"

namespace slrkit::nn {

void optimizer_step(std::vector<Param*>& params, AdamState& state, const AdamConfig& cfg) {
  if (state.m.empty()) {
    state.m.reserve(params.size());
    state.v.reserve(params.size());
    for (const Param* p : params) {
      state.m.push_back(Tensor::zeros(p->value.shape()));
      state.v.push_back(Tensor::zeros(p->value.shape()));
    }
  }
  if (state.m.size() != params.size()) {
    throw ContractError("optimizer_step: state does not match param list");
  }
  state.step += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));

  for (size_t i = 0; i < params.size(); ++i) {
    Param& p = *params[i];
    if (!p.trainable) continue;
    if (!p.grad.same_shape(p.value)) {
      throw ContractError("optimizer_step: gradient shape mismatch for " + p.name);
    }
    Tensor& m = state.m[i];
    Tensor& v = state.v[i];
    for (size_t j = 0; j < p.value.size(); ++j) {
      const double g = p.grad[j];
      m[j] = cfg.beta1 * m[j] + (1.0 - cfg.beta1) * g;
      v[j] = cfg.beta2 * v[j] + (1.0 - cfg.beta2) * g * g;
      const double mhat = m[j] / bc1;
      const double vhat = v[j] / bc2;
      p.value[j] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
  }
}

}  // namespace slrkit::nn
