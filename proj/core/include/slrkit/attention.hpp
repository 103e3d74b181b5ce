#pragma once

#include <cstdint>
#include <vector>

#include "slrkit/nn_ops.hpp"
#include "slrkit/tensor.hpp"

namespace slrkit::nn {

/// Projection weights for one multi-head self-attention block over
/// [T, d_model] rows. d_model must be divisible by heads.
struct AttentionParams {
  size_t heads = 1;
  Tensor wq, bq, wk, bk, wv, bv, wo, bo;
};

struct AttentionCache {
  Tensor x, q, k, v;
  Tensor weights;  // [heads, T, T], exactly 0 on masked keys
  Tensor context;  // [T, d_model] concatenated heads, pre output-projection
};

/// Scaled dot-product self-attention. key_mask[j] == 0 masks position j as a
/// key everywhere (zero attention weight); an empty mask means all real.
/// Requires at least one unmasked position.
Tensor multi_head_attention(const Tensor& x, const AttentionParams& p,
                            const std::vector<uint8_t>& key_mask,
                            AttentionCache* cache = nullptr);

struct AttentionGrads {
  Tensor dx;
  AttentionParams d;  // gradient tensors, same shapes as the params
};
AttentionGrads multi_head_attention_backward(const Tensor& dy, const AttentionParams& p,
                                             const AttentionCache& cache);

// ---------------------------------------------------------------------------
// transformer layer: attention + position-wise feed-forward, each with a
// residual connection and layer normalization
// ---------------------------------------------------------------------------

struct FeedForwardParams {
  Tensor w1, b1, w2, b2;  // d -> hidden -> d
};

struct TransformerLayerParams {
  AttentionParams attn;
  Tensor norm1_gain, norm1_bias;
  Tensor norm2_gain, norm2_bias;
  FeedForwardParams ff;
};

struct TransformerLayerCache {
  Tensor x;
  AttentionCache attn;
  Tensor attn_out, res1, normed1;
  LayerNormCache ln1;
  Tensor ff_pre, ff_hidden, ff_out, res2;
  LayerNormCache ln2;
};

/// post-norm (pre_norm=false): y = LN2(h + FF(h)), h = LN1(x + Attn(x))
/// pre-norm  (pre_norm=true):  y = h + FF(LN2(h)), h = x + Attn(LN1(x))
Tensor transformer_layer(const Tensor& x, const TransformerLayerParams& p,
                         const std::vector<uint8_t>& key_mask, bool pre_norm = false,
                         TransformerLayerCache* cache = nullptr);

struct TransformerLayerGrads {
  Tensor dx;
  TransformerLayerParams d;
};
TransformerLayerGrads transformer_layer_backward(const Tensor& dy,
                                                 const TransformerLayerParams& p,
                                                 const TransformerLayerCache& cache,
                                                 bool pre_norm = false);

}  // namespace slrkit::nn
