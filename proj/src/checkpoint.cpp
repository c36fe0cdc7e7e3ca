#include "acpc/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>

namespace acpc {

namespace {

constexpr char magic[4] = {'A', 'C', 'P', 'C'};

void put_u16(std::ostream& out, std::uint16_t v) {
  char b[2] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff)};
  out.write(b, 2);
}

void put_u32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void put_f64(std::ostream& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
  out.write(b, 8);
}

[[noreturn]] void fail(CheckpointError code, const std::string& what) {
  throw CheckpointIoError(code, what);
}

std::uint64_t get_bytes(std::istream& in, int count, const std::string& path) {
  std::uint64_t v = 0;
  for (int i = 0; i < count; ++i) {
    const int c = in.get();
    if (c == std::istream::traits_type::eof()) {
      fail(CheckpointError::truncated, path + ": unexpected end of file");
    }
    v |= static_cast<std::uint64_t>(static_cast<unsigned char>(c)) << (8 * i);
  }
  return v;
}

}  // namespace

void write_checkpoint(const std::string& path, const ParamSet& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(CheckpointError::missing_file, path + ": cannot open for writing");
  out.write(magic, 4);
  put_u32(out, checkpoint_version);
  put_u32(out, static_cast<std::uint32_t>(params.tensors.size()));
  for (const auto& t : params.tensors) {
    put_u16(out, static_cast<std::uint16_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    out.put(static_cast<char>(t.shape.size()));
    for (std::size_t dim : t.shape) put_u32(out, static_cast<std::uint32_t>(dim));
    for (double v : t.data) put_f64(out, v);
  }
  if (!out) fail(CheckpointError::missing_file, path + ": write failed");
}

ParamSet read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(CheckpointError::missing_file, path + ": cannot open");
  char got_magic[4];
  in.read(got_magic, 4);
  if (in.gcount() != 4 || got_magic[0] != 'A' || got_magic[1] != 'C' ||
      got_magic[2] != 'P' || got_magic[3] != 'C') {
    fail(CheckpointError::bad_magic, path + ": not an ACPC checkpoint");
  }
  const auto version = static_cast<std::uint32_t>(get_bytes(in, 4, path));
  if (version != checkpoint_version) {
    fail(CheckpointError::version_mismatch,
         path + ": unsupported checkpoint version " + std::to_string(version));
  }
  const auto count = static_cast<std::uint32_t>(get_bytes(in, 4, path));
  ParamSet params;
  params.tensors.reserve(count);
  for (std::uint32_t ti = 0; ti < count; ++ti) {
    Tensor t;
    const auto name_len = static_cast<std::uint16_t>(get_bytes(in, 2, path));
    t.name.resize(name_len);
    in.read(t.name.data(), name_len);
    if (in.gcount() != name_len) {
      fail(CheckpointError::truncated, path + ": unexpected end of file");
    }
    const auto rank = static_cast<std::uint8_t>(get_bytes(in, 1, path));
    std::size_t total = 1;
    t.shape.resize(rank);
    for (std::uint8_t r = 0; r < rank; ++r) {
      t.shape[r] = static_cast<std::size_t>(get_bytes(in, 4, path));
      total *= t.shape[r];
    }
    t.data.resize(total);
    for (std::size_t i = 0; i < total; ++i) {
      t.data[i] = std::bit_cast<double>(get_bytes(in, 8, path));
    }
    params.tensors.push_back(std::move(t));
  }
  return params;
}

}  // namespace acpc
