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

#include <cmath>
#include <vector>

#include "encscan/tensor.hpp"

namespace encscan::nn {

/// Adam with bias correction. Parameters are borrowed; gradients are passed
/// per step in the same order.
template <typename T>
class Adam {
 public:
  explicit Adam(std::vector<Tensor<T>*> params, T lr, T beta1 = T{0.9},
                T beta2 = T{0.999}, T eps = T{1e-8})
      : params_(std::move(params)), lr_(lr), b1_(beta1), b2_(beta2), eps_(eps) {
    for (Tensor<T>* p : params_) {
      m_.emplace_back(p->shape());
      v_.emplace_back(p->shape());
    }
  }

  void set_lr(T lr) { lr_ = lr; }

  void step(const std::vector<Tensor<T>>& grads) {
    if (grads.size() != params_.size())
      throw std::invalid_argument("adam: gradient count mismatch");
    ++t_;
    const T bc1 = T{1} - std::pow(b1_, static_cast<T>(t_));
    const T bc2 = T{1} - std::pow(b2_, static_cast<T>(t_));
    for (std::size_t i = 0; i < params_.size(); ++i) {
      Tensor<T>& p = *params_[i];
      const Tensor<T>& g = grads[i];
      Tensor<T>& m = m_[i];
      Tensor<T>& v = v_[i];
      for (std::size_t j = 0; j < p.size(); ++j) {
        m[j] = b1_ * m[j] + (T{1} - b1_) * g[j];
        v[j] = b2_ * v[j] + (T{1} - b2_) * g[j] * g[j];
        const T mh = m[j] / bc1;
        const T vh = v[j] / bc2;
        p[j] -= lr_ * mh / (std::sqrt(vh) + eps_);
      }
    }
  }

 private:
  std::vector<Tensor<T>*> params_;
  std::vector<Tensor<T>> m_, v_;
  T lr_, b1_, b2_, eps_;
  long t_ = 0;
};

}  // namespace encscan::nn
