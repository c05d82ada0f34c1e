#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "treetag/model.hpp"

namespace treetag {

// On-disk model: dims, seed, tag inventory and every parameter tensor.
//
// Layout (all integers and doubles little-endian):
//   "TTAGCKPT" | u32 version | i32 L | i32 h | i32 |Y| | u64 seed
//   u32 n_tags   { u32 len | bytes }*
//   u32 n_tensor { u32 len | name | u64 rows | u64 cols | f64[rows*cols] }*
// Tensor payloads are column-major, matching Eigen storage.
struct Checkpoint {
  static constexpr std::uint32_t kVersion = 1;

  ModelDims dims;
  std::uint64_t seed = 0;
  std::vector<std::string> tags;
  ModelParams params;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
Checkpoint read_checkpoint(std::istream& in);

// Writes to a sibling temp file, then renames, so readers never see a
// partially written checkpoint.
void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace treetag
