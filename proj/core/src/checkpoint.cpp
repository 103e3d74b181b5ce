#include "slrkit/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <set>

#include "slrkit/errors.hpp"

namespace slrkit {

namespace {

constexpr char kMagic[] = "SLRCKPT1\n";
constexpr size_t kMagicLen = sizeof(kMagic) - 1;

void write_u32(std::ostream& out, uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void write_u64(std::ostream& out, uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

uint32_t read_u32(std::istream& in, const std::string& path) {
  unsigned char b[4];
  if (!in.read(reinterpret_cast<char*>(b), 4)) throw IoError("truncated checkpoint: " + path);
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b[i]) << (8 * i);
  return v;
}

uint64_t read_u64(std::istream& in, const std::string& path) {
  unsigned char b[8];
  if (!in.read(reinterpret_cast<char*>(b), 8)) throw IoError("truncated checkpoint: " + path);
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void save_checkpoint(const std::vector<const nn::Param*>& params,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path.string());
  out.write(kMagic, static_cast<std::streamsize>(kMagicLen));
  write_u64(out, params.size());
  for (const nn::Param* p : params) {
    write_u32(out, static_cast<uint32_t>(p->name.size()));
    out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
    write_u32(out, static_cast<uint32_t>(p->value.rank()));
    for (size_t d : p->value.shape()) write_u64(out, d);
    for (double v : p->value.values()) {
      uint64_t bits;
      std::memcpy(&bits, &v, 8);
      write_u64(out, bits);
    }
  }
  if (!out) throw IoError("write failed: " + path.string());
}

void save_checkpoint(const PtnModel& model, const std::filesystem::path& path) {
  save_checkpoint(model.params(), path);
}

std::vector<CheckpointEntry> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path.string());
  char magic[kMagicLen];
  if (!in.read(magic, static_cast<std::streamsize>(kMagicLen)) ||
      std::memcmp(magic, kMagic, kMagicLen) != 0)
    throw IoError("not a checkpoint file: " + path.string());

  const uint64_t count = read_u64(in, path.string());
  std::vector<CheckpointEntry> entries;
  entries.reserve(count);
  for (uint64_t i = 0; i < count; ++i) {
    const uint32_t name_len = read_u32(in, path.string());
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw IoError("truncated checkpoint: " + path.string());
    const uint32_t rank = read_u32(in, path.string());
    std::vector<size_t> shape(rank);
    size_t total = 1;
    for (uint32_t r = 0; r < rank; ++r) {
      shape[r] = static_cast<size_t>(read_u64(in, path.string()));
      total *= shape[r];
    }
    std::vector<double> values(total);
    for (size_t k = 0; k < total; ++k) {
      const uint64_t bits = read_u64(in, path.string());
      std::memcpy(&values[k], &bits, 8);
    }
    entries.push_back({std::move(name), nn::Tensor(std::move(shape), std::move(values))});
  }
  return entries;
}

void load_into_model(PtnModel& model, const std::filesystem::path& path) {
  const auto entries = load_checkpoint(path);
  std::set<std::string> seen;
  for (const auto& e : entries) {
    if (!model.find(e.name))
      throw ContractError("checkpoint parameter not in model: " + e.name);
    model.set_param(e.name, e.value);
    seen.insert(e.name);
  }
  for (const nn::Param* p : model.params())
    if (!seen.count(p->name))
      throw ContractError("model parameter missing from checkpoint: " + p->name);
}

}  // namespace slrkit
