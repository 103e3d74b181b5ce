#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slrkit/attention.hpp"
#include "slrkit/layout.hpp"
#include "slrkit/nn_ops.hpp"
#include "slrkit/rng.hpp"
#include "slrkit/sequence.hpp"
#include "slrkit/tensor.hpp"

namespace slrkit {

/// Architecture of the pose transformer network.
struct ModelConfig {
  EstimatorFamily family = EstimatorFamily::mediapipe;
  size_t input_dims = 2;  // coordinate dims fed to the model (2 after depth drop)
  size_t d_embed = 128;
  std::array<size_t, 4> block_widths = {128, 128, 128, 128};
  size_t layers = 4;
  size_t heads = 8;
  size_t ff_ratio = 4;
  double dropout_p = 0.125;
  double l1_lambda = 0.002;
  bool positional_encoding = false;
  bool pre_norm = false;
  size_t classes = 2;
  /// When set, overrides keypoint_count*input_dims (detached toy models).
  std::optional<size_t> input_width_override;

  size_t input_width() const;
  void validate() const;
};

ModelConfig load_model_config(const std::filesystem::path& path);
void save_model_config(const ModelConfig& config, const std::filesystem::path& path);

struct ParamCountRow {
  std::string name;
  std::string shape;
  size_t count = 0;
  bool trainable = true;
};

struct ParamCountTable {
  std::vector<ParamCountRow> rows;
  size_t total = 0;
  size_t trainable_total = 0;
};

/// Forward intermediates for one sequence, consumed by backward().
struct PtnCache {
  nn::Tensor input;  // [T, d_input]
  struct BlockCache {
    nn::Tensor in, z, normed, activated;
    nn::LayerNormCache ln;
    std::vector<uint8_t> drop_mask;
  };
  std::array<BlockCache, 4> blocks;
  nn::Tensor embed;            // [T, d_embed] after residual (+ positional enc)
  nn::Tensor z0;               // [T+1, d_embed] with CLS at row 0
  std::vector<uint8_t> mask;   // length T+1
  std::vector<nn::TransformerLayerCache> layers;
  nn::Tensor rep;              // [1, d_embed] CLS output
  nn::Tensor logits;           // [C]
};

/// The pose transformer network: a four-block dense pose embedding with a
/// linear residual from the raw frame, a learned CLS vector, a stack of
/// masked self-attention transformer layers, and a linear classifier on the
/// CLS output.
class PtnModel {
 public:
  PtnModel(ModelConfig config, uint64_t seed);

  const ModelConfig& config() const { return config_; }

  /// Per-frame pose embedding: frames [N, d_input] -> [N, d_embed].
  /// rng is required in train mode (dropout); unused in eval mode.
  nn::Tensor pose_embed(const nn::Tensor& frames, nn::Mode mode, Rng* rng = nullptr,
                        PtnCache* cache = nullptr) const;

  /// Full forward over a frame matrix [T, d_input]. frame_mask marks real
  /// frames (empty = all real); the CLS position is always unmasked.
  nn::Tensor forward(const nn::Tensor& frames, const std::vector<uint8_t>& frame_mask,
                     nn::Mode mode, Rng* rng = nullptr, PtnCache* cache = nullptr) const;

  /// Forward over a keypoint sequence. Requires full presence unless
  /// allow_partial (raw/ablation mode); absent slots then read as zeros.
  nn::Tensor forward_sequence(const KeypointSequence& seq, nn::Mode mode, Rng* rng = nullptr,
                              PtnCache* cache = nullptr, bool allow_partial = false) const;

  /// Accumulates gradients of all params from dlogits. Add regularizer
  /// subgradients separately (the training loop owns the L1 term).
  void backward(const PtnCache& cache, const nn::Tensor& dlogits);

  std::vector<nn::Param*> params();
  std::vector<const nn::Param*> params() const;
  nn::Param* find(const std::string& name);
  const nn::Param* find(const std::string& name) const;
  /// The L1-regularized tensor: block-1 linear weights of the pose embedding.
  nn::Param& input_layer_weights();

  void zero_grads();
  ParamCountTable count_params() const;

  /// Copies values from another list of tensors by name (exact match).
  void set_param(const std::string& name, const nn::Tensor& value);

 private:
  struct Indices;
  void build_params(uint64_t seed);
  nn::Param& p(size_t i) { return params_[i]; }
  const nn::Param& p(size_t i) const { return params_[i]; }

  ModelConfig config_;
  std::vector<nn::Param> params_;
  std::map<std::string, size_t> index_;
  // param index layout (fixed construction order)
  struct Block {
    size_t w, b, gain, bias;
  };
  std::array<Block, 4> blocks_{};
  size_t residual_w_ = 0;
  size_t cls_ = 0;
  struct LayerIdx {
    size_t wq, bq, wk, bk, wv, bv, wo, bo;
    size_t n1g, n1b, n2g, n2b;
    size_t ffw1, ffb1, ffw2, ffb2;
  };
  std::vector<LayerIdx> layer_idx_;
  size_t cls_w_ = 0, cls_b_ = 0;

  nn::AttentionParams attn_view(size_t layer) const;
  nn::TransformerLayerParams layer_view(size_t layer) const;
};

/// Sinusoidal positional encoding row for position t.
void add_positional_encoding(nn::Tensor& embed);

}  // namespace slrkit
