#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "acpc/tensor.hpp"

namespace acpc {

// Binary parameter container, bit-exact by construction:
//   magic "ACPC", format version u32, tensor count u32, then per tensor:
//   name length u16 + UTF-8 name, rank u8, dims as u32s, values as 64-bit
//   little-endian floats in canonical order.
inline constexpr std::uint32_t checkpoint_version = 1;

enum class CheckpointError {
  missing_file,
  bad_magic,
  version_mismatch,
  structure_mismatch,
  truncated,
};

class CheckpointIoError : public std::runtime_error {
 public:
  CheckpointIoError(CheckpointError code, const std::string& what)
      : std::runtime_error(what), code(code) {}
  CheckpointError code;
};

void write_checkpoint(const std::string& path, const ParamSet& params);

// Throws CheckpointIoError (missing_file / bad_magic / version_mismatch /
// truncated) on malformed input.
ParamSet read_checkpoint(const std::string& path);

}  // namespace acpc
