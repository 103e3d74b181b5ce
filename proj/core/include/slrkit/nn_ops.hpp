#pragma once

#include <cstdint>
#include <vector>

#include "slrkit/rng.hpp"
#include "slrkit/tensor.hpp"

namespace slrkit::nn {

enum class Mode { train, eval };

// ---------------------------------------------------------------------------
// matrix helpers (row-major)
// ---------------------------------------------------------------------------

/// C = A[n,k] * B[k,m]
Tensor matmul(const Tensor& a, const Tensor& b);
/// C = A^T[k,n]^T... i.e. C[k_cols] = A[n,k]^T * B[n,m] -> [k,m]
Tensor matmul_tn(const Tensor& a, const Tensor& b);
/// C = A[n,k] * B[m,k]^T -> [n,m]
Tensor matmul_nt(const Tensor& a, const Tensor& b);

// ---------------------------------------------------------------------------
// linear:  y = x W + b
// ---------------------------------------------------------------------------

/// x: [N, d_in], W: [d_in, d_out], b: [d_out] -> [N, d_out]
Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b);

struct LinearGrads {
  Tensor dx, dw, db;
};
LinearGrads linear_backward(const Tensor& x, const Tensor& w, const Tensor& dy);

// ---------------------------------------------------------------------------
// layer normalization (per row, population variance)
// ---------------------------------------------------------------------------

struct LayerNormCache {
  Tensor xhat;                  // [N, d]
  std::vector<double> inv_std;  // per row: 1/sqrt(var + eps)
};

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps = 1e-5,
                  LayerNormCache* cache = nullptr);

struct LayerNormGrads {
  Tensor dx, dgain, dbias;
};
LayerNormGrads layer_norm_backward(const Tensor& dy, const Tensor& gain,
                                   const LayerNormCache& cache);

// ---------------------------------------------------------------------------
// activations
// ---------------------------------------------------------------------------

Tensor relu(const Tensor& x);
Tensor relu_backward(const Tensor& x, const Tensor& dy);

Tensor tanh(const Tensor& x);
/// dy * (1 - y^2), with y = tanh(x)
Tensor tanh_backward(const Tensor& y, const Tensor& dy);

/// Inverted dropout: train mode zeroes each element with probability p and
/// scales survivors by 1/(1-p); eval mode is the identity. The keep mask is
/// written to `mask_out` when given (needed for the backward pass).
Tensor dropout(const Tensor& x, double p, Mode mode, Rng& rng,
               std::vector<uint8_t>* mask_out = nullptr);
Tensor dropout_backward(const Tensor& dy, double p, const std::vector<uint8_t>& mask);

// ---------------------------------------------------------------------------
// loss & regularization
// ---------------------------------------------------------------------------

struct CrossEntropyResult {
  double loss = 0.0;
  Tensor grad_logits;
  size_t argmax = 0;
};
/// loss = -log softmax(logits)[label], max-subtraction stabilized.
CrossEntropyResult softmax_cross_entropy(const Tensor& logits, size_t label);

struct L1Result {
  double penalty = 0.0;
  Tensor subgradient;  // lambda * sign(w), sign(0) = 0
};
L1Result l1_penalty(const Tensor& w, double lambda);

/// Row-wise softmax with additive masking: masked columns (key_mask[j]==0)
/// get weight exactly 0. Pass an empty mask for no masking.
void softmax_rows_masked(Tensor& scores, const std::vector<uint8_t>& key_mask);

}  // namespace slrkit::nn
