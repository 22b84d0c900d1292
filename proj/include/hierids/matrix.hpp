/*
 * Copyright 2026 The HierIDS Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <vector>

#include "hierids/errors.hpp"

namespace hierids {

// Dense row-major matrix. Feature matrices use float storage (every feature
// lives in [0, 1] after scaling, binary CAN features are exact); probability
// outputs use double.
template <typename T>
class BasicMatrix {
 public:
  BasicMatrix() = default;
  BasicMatrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  BasicMatrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw DimensionError("matrix data size does not match shape");
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0; }

  T operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }

  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }

  const std::vector<T>& data() const { return data_; }
  std::vector<T>& data() { return data_; }

  // New matrix holding the given rows (in order).
  BasicMatrix select_rows(std::span<const std::size_t> rows) const;
  // New matrix holding the given columns (in order).
  BasicMatrix select_cols(std::span<const std::size_t> cols) const;

  bool operator==(const BasicMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

template <typename T>
BasicMatrix<T> BasicMatrix<T>::select_rows(std::span<const std::size_t> rows) const {
  BasicMatrix out(rows.size(), cols_);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

template <typename T>
BasicMatrix<T> BasicMatrix<T>::select_cols(std::span<const std::size_t> cols) const {
  for (std::size_t c : cols) {
    if (c >= cols_) throw DimensionError("column index out of range");
  }
  BasicMatrix out(rows_, cols.size());
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(r, j) = (*this)(r, cols[j]);
  }
  return out;
}

using Matrix = BasicMatrix<float>;
using ProbMatrix = BasicMatrix<double>;

}  // namespace hierids
