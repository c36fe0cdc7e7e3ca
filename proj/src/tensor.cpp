#include "acpc/tensor.hpp"

#include <algorithm>
#include <cmath>

namespace acpc {

std::size_t ParamSet::total_size() const {
  std::size_t n = 0;
  for (const auto& t : tensors) n += t.size();
  return n;
}

bool ParamSet::same_layout(const ParamSet& other) const {
  if (tensors.size() != other.tensors.size()) return false;
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (tensors[i].name != other.tensors[i].name) return false;
    if (tensors[i].shape != other.tensors[i].shape) return false;
  }
  return true;
}

ParamSet zeros_like(const ParamSet& p) {
  ParamSet out;
  out.tensors.reserve(p.tensors.size());
  for (const auto& t : p.tensors) {
    out.tensors.push_back({t.name, t.shape, std::vector<double>(t.size(), 0.0)});
  }
  return out;
}

void fill_zero(ParamSet& p) {
  for (auto& t : p.tensors) std::fill(t.data.begin(), t.data.end(), 0.0);
}

bool all_finite(const ParamSet& p) {
  for (const auto& t : p.tensors) {
    for (double v : t.data) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

}  // namespace acpc
