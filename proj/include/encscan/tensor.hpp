/*
 * Copyright 2026 The encscan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace encscan {

using Shape = std::vector<std::size_t>;

/// (height, width, channels) of a single image.
using Shape3 = std::array<std::size_t, 3>;

inline std::string shape_str(const Shape& s) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < s.size(); ++i) os << (i ? "," : "") << s[i];
  os << ")";
  return os.str();
}

/// Dense row-major n-d array. Images are stored NHWC (or HWC for a single
/// image); embeddings as (N, dim). Hot paths work on data() directly.
template <typename T>
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape)
      : shape_(std::move(shape)), data_(numel(shape_), T{0}) {}
  Tensor(Shape shape, T fill)
      : shape_(std::move(shape)), data_(numel(shape_), fill) {}

  static std::size_t numel(const Shape& s) {
    return std::accumulate(s.begin(), s.end(), std::size_t{1},
                           std::multiplies<>());
  }

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t dim(std::size_t i) const { return shape_.at(i); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& operator()(std::size_t i, std::size_t j) {
    return data_[i * shape_[1] + j];
  }
  const T& operator()(std::size_t i, std::size_t j) const {
    return data_[i * shape_[1] + j];
  }
  T& operator()(std::size_t i, std::size_t j, std::size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  T& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
  }
  const T& operator()(std::size_t i, std::size_t j, std::size_t k,
                      std::size_t l) const {
    return data_[((i * shape_[1] + j) * shape_[2] + k) * shape_[3] + l];
  }

  void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

  /// Reinterpret the shape; element count must be preserved.
  Tensor reshaped(Shape s) const {
    if (numel(s) != size())
      throw std::invalid_argument("reshape " + shape_str(shape_) + " -> " +
                                  shape_str(s) + ": element count differs");
    Tensor out = *this;
    out.shape_ = std::move(s);
    return out;
  }

  T sum() const {
    T acc{0};
    for (const T& v : data_) acc += v;
    return acc;
  }

  T abs_sum() const {
    T acc{0};
    for (const T& v : data_) acc += std::abs(v);
    return acc;
  }

  bool has_nan() const {
    for (const T& v : data_)
      if (!std::isfinite(v)) return true;
    return false;
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

  bool operator==(const Tensor& o) const {
    return shape_ == o.shape_ && data_ == o.data_;
  }

 private:
  Shape shape_;
  std::vector<T> data_;
};

template <typename T>
void check_batch_shape(const Tensor<T>& batch, const Shape3& img) {
  if (batch.rank() != 4 || batch.dim(1) != img[0] || batch.dim(2) != img[1] ||
      batch.dim(3) != img[2])
    throw std::invalid_argument("batch shape " + shape_str(batch.shape()) +
                                " does not match image shape (" +
                                std::to_string(img[0]) + "," +
                                std::to_string(img[1]) + "," +
                                std::to_string(img[2]) + ")");
}

}  // namespace encscan
