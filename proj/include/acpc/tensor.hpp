#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace acpc {

// Named 64-bit-float tensor of rank 1 or 2. Rank-2 tensors are stored
// row-major as [fan_in][fan_out]: data[i * fan_out + j] addresses (i, j).
struct Tensor {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> data;

  std::size_t size() const { return data.size(); }
};

// All trainable tensors in canonical order: policy layers first, then value
// layers; within a layer weight before bias, input side to output side.
// The order is fixed so flattened parameter vectors compare bitwise.
struct ParamSet {
  std::vector<Tensor> tensors;

  std::size_t total_size() const;
  bool same_layout(const ParamSet& other) const;
};

ParamSet zeros_like(const ParamSet& p);
void fill_zero(ParamSet& p);
bool all_finite(const ParamSet& p);

}  // namespace acpc
