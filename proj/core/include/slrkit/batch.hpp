#pragma once

#include <span>
#include <vector>

#include "slrkit/dataset.hpp"
#include "slrkit/tensor.hpp"

namespace slrkit {

/// One mini-batch, zero-padded to the longest sequence. masks[i][t] is 1 at
/// real frames and 0 at padding; padded frames are all-zero rows.
struct PaddedBatch {
  std::vector<nn::Tensor> frames;           // each [max_frames, K*D]
  std::vector<std::vector<uint8_t>> masks;  // each of length max_frames
  std::vector<size_t> labels;
  size_t max_frames = 0;
};

PaddedBatch pad_and_mask(std::span<const Example* const> batch);
PaddedBatch pad_and_mask(std::span<const Example> batch);

}  // namespace slrkit
