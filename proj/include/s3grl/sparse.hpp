// Copyright 2026 The s3grl Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "s3grl/common.hpp"

namespace s3grl {

/// Square real matrix in compressed-row form with sorted column indices.
template <typename T>
struct CsrMatrix {
  std::size_t rows = 0;
  std::vector<std::size_t> offsets{0};
  std::vector<NodeId> columns;
  std::vector<T> values;

  std::size_t nnz() const noexcept { return columns.size(); }

  std::span<const NodeId> row_columns(std::size_t r) const {
    return {columns.data() + offsets[r], offsets[r + 1] - offsets[r]};
  }
  std::span<const T> row_values(std::size_t r) const {
    return {values.data() + offsets[r], offsets[r + 1] - offsets[r]};
  }

  /// Entry lookup by binary search; zero when absent.
  T at(std::size_t r, std::size_t c) const {
    const auto cols = row_columns(r);
    const auto it = std::lower_bound(cols.begin(), cols.end(), static_cast<NodeId>(c));
    if (it == cols.end() || *it != c) return T{0};
    return row_values(r)[static_cast<std::size_t>(it - cols.begin())];
  }

  /// out = x^T * M for a dense row vector x (the row-vector SpMV used by the
  /// diffusion precompute).
  void left_multiply(std::span<const T> x, std::span<T> out) const {
    std::fill(out.begin(), out.end(), T{0});
    for (std::size_t r = 0; r < rows; ++r) {
      const T xr = x[r];
      if (xr == T{0}) continue;
      for (std::size_t k = offsets[r]; k < offsets[r + 1]; ++k) out[columns[k]] += xr * values[k];
    }
  }
};

}  // namespace s3grl
