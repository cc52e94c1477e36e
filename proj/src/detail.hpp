#pragma once

#include "isolump/types.hpp"

#include <vector>

namespace isolump::detail {

/// Calls f(multi) for every multi-index in [0, dims) in lexicographic order
/// (last direction fastest).
template <class F>
void for_each_multi(const std::vector<Index>& dims, F&& f) {
  for (Index v : dims) {
    if (v <= 0) return;
  }
  std::vector<Index> m(dims.size(), 0);
  while (true) {
    f(m);
    std::size_t l = dims.size();
    while (l > 0) {
      --l;
      if (++m[l] < dims[l]) break;
      m[l] = 0;
      if (l == 0) return;
    }
    if (dims.empty()) return;
  }
}

}  // namespace isolump::detail
