#include "slrkit/batch.hpp"

#include <algorithm>

#include "slrkit/errors.hpp"

namespace slrkit {

PaddedBatch pad_and_mask(std::span<const Example* const> batch) {
  if (batch.empty()) throw ContractError("pad_and_mask on an empty batch");
  const size_t width = batch.front()->seq.flat_width();
  PaddedBatch out;
  for (const Example* e : batch) {
    if (e->seq.flat_width() != width)
      throw ContractError("mixed frame widths in one batch");
    out.max_frames = std::max(out.max_frames, e->seq.frames);
  }
  out.frames.reserve(batch.size());
  out.masks.reserve(batch.size());
  out.labels.reserve(batch.size());
  std::vector<double> flat;
  for (const Example* e : batch) {
    nn::Tensor padded = nn::Tensor::zeros({out.max_frames, width});
    std::vector<uint8_t> mask(out.max_frames, 0);
    for (size_t t = 0; t < e->seq.frames; ++t) {
      e->seq.flatten_frame(t, flat);
      std::copy(flat.begin(), flat.end(), padded.row_span(t).begin());
      mask[t] = 1;
    }
    out.frames.push_back(std::move(padded));
    out.masks.push_back(std::move(mask));
    out.labels.push_back(e->label);
  }
  return out;
}

PaddedBatch pad_and_mask(std::span<const Example> batch) {
  std::vector<const Example*> ptrs;
  ptrs.reserve(batch.size());
  for (const Example& e : batch) ptrs.push_back(&e);
  return pad_and_mask(std::span<const Example* const>(ptrs));
}

}  // namespace slrkit
