#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "slrkit/model.hpp"
#include "slrkit/tensor.hpp"

namespace slrkit {

/// One named tensor from a checkpoint file, in file order.
struct CheckpointEntry {
  std::string name;
  nn::Tensor value;
};

/// Binary named-tensor archive. Writing the same parameters twice produces
/// byte-identical files (fixed entry order, raw IEEE-754 payload).
void save_checkpoint(const std::vector<const nn::Param*>& params,
                     const std::filesystem::path& path);
void save_checkpoint(const PtnModel& model, const std::filesystem::path& path);

std::vector<CheckpointEntry> load_checkpoint(const std::filesystem::path& path);

/// Strict restore: the checkpoint and the model must carry exactly the same
/// parameter names, each with matching shape.
void load_into_model(PtnModel& model, const std::filesystem::path& path);

}  // namespace slrkit
