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

#include <Eigen/Dense>
#include <cstring>
#include <memory>
#include <string>

#include "encscan/rng.hpp"
#include "encscan/tensor.hpp"

namespace encscan::nn {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;

/// Per-layer forward stash consumed by backward(). `in` holds the layer input
/// where backward needs it; `aux` holds layer-specific intermediates (the
/// unrolled patch matrix for convolutions).
template <typename T>
struct LayerCache {
  Shape in_shape;
  Tensor<T> in;
  Tensor<T> aux;
};

/// Patch matrix for NHWC convolution: row p = ((n*Ho + oy)*Wo + ox) holds the
/// receptive field of output position p, ordered (ky, kx, c). Out-of-bounds
/// taps are zero.
template <typename T>
void im2col_nhwc(const T* x, std::size_t n_imgs, std::size_t h, std::size_t w,
                 std::size_t c, std::size_t k, std::size_t stride,
                 std::size_t pad, std::size_t ho, std::size_t wo, T* col) {
  const std::size_t row_len = k * k * c;
  for (std::size_t n = 0; n < n_imgs; ++n) {
    const T* xn = x + n * h * w * c;
    for (std::size_t oy = 0; oy < ho; ++oy) {
      for (std::size_t ox = 0; ox < wo; ++ox) {
        T* row = col + ((n * ho + oy) * wo + ox) * row_len;
        for (std::size_t ky = 0; ky < k; ++ky) {
          const long iy = static_cast<long>(oy * stride + ky) - static_cast<long>(pad);
          for (std::size_t kx = 0; kx < k; ++kx) {
            const long ix = static_cast<long>(ox * stride + kx) - static_cast<long>(pad);
            T* dst = row + (ky * k + kx) * c;
            if (iy >= 0 && iy < static_cast<long>(h) && ix >= 0 &&
                ix < static_cast<long>(w)) {
              std::memcpy(dst, xn + (static_cast<std::size_t>(iy) * w +
                                     static_cast<std::size_t>(ix)) * c,
                          c * sizeof(T));
            } else {
              std::memset(dst, 0, c * sizeof(T));
            }
          }
        }
      }
    }
  }
}

/// Adjoint of im2col_nhwc: scatter-add patch-matrix gradients back onto the
/// input image gradient.
template <typename T>
void col2im_add_nhwc(const T* col, std::size_t n_imgs, std::size_t h,
                     std::size_t w, std::size_t c, std::size_t k,
                     std::size_t stride, std::size_t pad, std::size_t ho,
                     std::size_t wo, T* dx) {
  const std::size_t row_len = k * k * c;
  for (std::size_t n = 0; n < n_imgs; ++n) {
    T* dxn = dx + n * h * w * c;
    for (std::size_t oy = 0; oy < ho; ++oy) {
      for (std::size_t ox = 0; ox < wo; ++ox) {
        const T* row = col + ((n * ho + oy) * wo + ox) * row_len;
        for (std::size_t ky = 0; ky < k; ++ky) {
          const long iy = static_cast<long>(oy * stride + ky) - static_cast<long>(pad);
          if (iy < 0 || iy >= static_cast<long>(h)) continue;
          for (std::size_t kx = 0; kx < k; ++kx) {
            const long ix = static_cast<long>(ox * stride + kx) - static_cast<long>(pad);
            if (ix < 0 || ix >= static_cast<long>(w)) continue;
            const T* src = row + (ky * k + kx) * c;
            T* dst = dxn + (static_cast<std::size_t>(iy) * w +
                            static_cast<std::size_t>(ix)) * c;
            for (std::size_t ch = 0; ch < c; ++ch) dst[ch] += src[ch];
          }
        }
      }
    }
  }
}

template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  virtual std::string kind() const = 0;
  virtual Shape3 output_shape(const Shape3& in) const = 0;
  /// Forward for a batch (N,H,W,C) or (N,features). Stashes what backward
  /// needs into `cache` when non-null; with a null cache the call is pure.
  virtual Tensor<T> forward(const Tensor<T>& x, LayerCache<T>* cache) const = 0;
  /// Backward. Writes this layer's parameter gradients (params() order) into
  /// `param_grads` when non-null and returns the input gradient.
  virtual Tensor<T> backward(const LayerCache<T>& cache, const Tensor<T>& dy,
                             Tensor<T>* param_grads) const = 0;
  virtual std::size_t num_params() const { return 0; }
  virtual std::vector<Tensor<T>*> params() { return {}; }
  virtual std::vector<const Tensor<T>*> params() const { return {}; }
  virtual void init(Rng&) {}
  virtual std::unique_ptr<Layer<T>> clone() const = 0;
};

template <typename T>
class Conv2d final : public Layer<T> {
 public:
  Conv2d(std::size_t in_c, std::size_t out_c, std::size_t k = 3,
         std::size_t stride = 1, std::size_t pad = 1)
      : in_c_(in_c), out_c_(out_c), k_(k), stride_(stride), pad_(pad),
        w_({k * k * in_c, out_c}), b_({out_c}) {}

  std::string kind() const override { return "conv"; }

  std::size_t out_channels() const { return out_c_; }

  Shape3 output_shape(const Shape3& in) const override {
    if (in[2] != in_c_)
      throw std::invalid_argument("conv expects " + std::to_string(in_c_) +
                                  " input channels, got " + std::to_string(in[2]));
    const std::size_t ho = (in[0] + 2 * pad_ - k_) / stride_ + 1;
    const std::size_t wo = (in[1] + 2 * pad_ - k_) / stride_ + 1;
    return {ho, wo, out_c_};
  }

  void init(Rng& rng) override {
    const double stddev = std::sqrt(2.0 / static_cast<double>(k_ * k_ * in_c_));
    for (auto& v : w_) v = static_cast<T>(rng.normal(0.0, stddev));
    b_.fill(T{0});
  }

  Tensor<T> forward(const Tensor<T>& x, LayerCache<T>* cache) const override {
    const std::size_t n = x.dim(0), h = x.dim(1), w = x.dim(2), c = x.dim(3);
    const Shape3 os = output_shape({h, w, c});
    const std::size_t p = n * os[0] * os[1], r = k_ * k_ * in_c_;
    Tensor<T> col({p, r});
    im2col_nhwc(x.data(), n, h, w, c, k_, stride_, pad_, os[0], os[1], col.data());
    Tensor<T> y({n, os[0], os[1], out_c_});
    MatMap<T> ym(y.data(), p, out_c_);
    ym.noalias() = ConstMatMap<T>(col.data(), p, r) * ConstMatMap<T>(w_.data(), r, out_c_);
    ym.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(b_.data(), out_c_);
    if (cache) {
      cache->in_shape = x.shape();
      cache->aux = std::move(col);
    }
    return y;
  }

  Tensor<T> backward(const LayerCache<T>& cache, const Tensor<T>& dy,
                     Tensor<T>* param_grads) const override {
    const std::size_t n = cache.in_shape[0], h = cache.in_shape[1],
                      w = cache.in_shape[2], c = cache.in_shape[3];
    const Shape3 os = output_shape({h, w, c});
    const std::size_t p = n * os[0] * os[1], r = k_ * k_ * in_c_;
    ConstMatMap<T> dym(dy.data(), p, out_c_);
    if (param_grads) {
      Tensor<T>& dw = param_grads[0];
      Tensor<T>& db = param_grads[1];
      dw = Tensor<T>(w_.shape());
      db = Tensor<T>(b_.shape());
      MatMap<T>(dw.data(), r, out_c_).noalias() =
          ConstMatMap<T>(cache.aux.data(), p, r).transpose() * dym;
      Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(db.data(), out_c_) =
          dym.colwise().sum();
    }
    Tensor<T> dcol({p, r});
    MatMap<T>(dcol.data(), p, r).noalias() =
        dym * ConstMatMap<T>(w_.data(), r, out_c_).transpose();
    Tensor<T> dx({n, h, w, c});
    col2im_add_nhwc(dcol.data(), n, h, w, c, k_, stride_, pad_, os[0], os[1],
                    dx.data());
    return dx;
  }

  std::size_t num_params() const override { return 2; }
  std::vector<Tensor<T>*> params() override { return {&w_, &b_}; }
  std::vector<const Tensor<T>*> params() const override { return {&w_, &b_}; }

  std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<Conv2d>(*this);
  }

 private:
  std::size_t in_c_, out_c_, k_, stride_, pad_;
  Tensor<T> w_;  // (k*k*in_c, out_c), rows ordered (ky, kx, c)
  Tensor<T> b_;  // (out_c)
};

template <typename T>
class Relu final : public Layer<T> {
 public:
  std::string kind() const override { return "relu"; }
  Shape3 output_shape(const Shape3& in) const override { return in; }

  Tensor<T> forward(const Tensor<T>& x, LayerCache<T>* cache) const override {
    Tensor<T> y = x;
    for (auto& v : y) v = v > T{0} ? v : T{0};
    if (cache) {
      cache->in_shape = x.shape();
      cache->in = x;
    }
    return y;
  }

  Tensor<T> backward(const LayerCache<T>& cache, const Tensor<T>& dy,
                     Tensor<T>*) const override {
    Tensor<T> dx = dy;
    const T* x = cache.in.data();
    for (std::size_t i = 0; i < dx.size(); ++i)
      if (x[i] <= T{0}) dx[i] = T{0};
    return dx;
  }

  std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<Relu>(*this);
  }
};

/// 2x2 average pooling, stride 2. Spatial dims must be even.
template <typename T>
class AvgPool2 final : public Layer<T> {
 public:
  std::string kind() const override { return "avgpool"; }

  Shape3 output_shape(const Shape3& in) const override {
    if (in[0] % 2 || in[1] % 2)
      throw std::invalid_argument("avgpool requires even spatial dims");
    return {in[0] / 2, in[1] / 2, in[2]};
  }

  Tensor<T> forward(const Tensor<T>& x, LayerCache<T>* cache) const override {
    const std::size_t n = x.dim(0), h = x.dim(1), w = x.dim(2), c = x.dim(3);
    Tensor<T> y({n, h / 2, w / 2, c});
    const T* xd = x.data();
    T* yd = y.data();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t oy = 0; oy < h / 2; ++oy)
        for (std::size_t ox = 0; ox < w / 2; ++ox) {
          const T* a = xd + ((i * h + 2 * oy) * w + 2 * ox) * c;
          const T* b = a + c;            // right neighbour
          const T* d = a + w * c;        // below
          const T* e = d + c;
          T* o = yd + ((i * (h / 2) + oy) * (w / 2) + ox) * c;
          for (std::size_t ch = 0; ch < c; ++ch)
            o[ch] = (a[ch] + b[ch] + d[ch] + e[ch]) * T{0.25};
        }
    if (cache) cache->in_shape = x.shape();
    return y;
  }

  Tensor<T> backward(const LayerCache<T>& cache, const Tensor<T>& dy,
                     Tensor<T>*) const override {
    const std::size_t n = cache.in_shape[0], h = cache.in_shape[1],
                      w = cache.in_shape[2], c = cache.in_shape[3];
    Tensor<T> dx({n, h, w, c});
    const T* dyd = dy.data();
    T* dxd = dx.data();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t oy = 0; oy < h / 2; ++oy)
        for (std::size_t ox = 0; ox < w / 2; ++ox) {
          const T* g = dyd + ((i * (h / 2) + oy) * (w / 2) + ox) * c;
          T* a = dxd + ((i * h + 2 * oy) * w + 2 * ox) * c;
          T* b = a + c;
          T* d = a + w * c;
          T* e = d + c;
          for (std::size_t ch = 0; ch < c; ++ch) {
            const T v = g[ch] * T{0.25};
            a[ch] += v; b[ch] += v; d[ch] += v; e[ch] += v;
          }
        }
    return dx;
  }

  std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<AvgPool2>(*this);
  }
};

/// (N,H,W,C) -> (N,C) spatial mean.
template <typename T>
class GlobalAvgPool final : public Layer<T> {
 public:
  std::string kind() const override { return "gap"; }
  Shape3 output_shape(const Shape3& in) const override { return {1, 1, in[2]}; }

  Tensor<T> forward(const Tensor<T>& x, LayerCache<T>* cache) const override {
    const std::size_t n = x.dim(0), h = x.dim(1), w = x.dim(2), c = x.dim(3);
    Tensor<T> y({n, c});
    const T inv = T{1} / static_cast<T>(h * w);
    for (std::size_t i = 0; i < n; ++i) {
      const T* xi = x.data() + i * h * w * c;
      T* yi = y.data() + i * c;
      for (std::size_t p = 0; p < h * w; ++p)
        for (std::size_t ch = 0; ch < c; ++ch) yi[ch] += xi[p * c + ch];
      for (std::size_t ch = 0; ch < c; ++ch) yi[ch] *= inv;
    }
    if (cache) cache->in_shape = x.shape();
    return y;
  }

  Tensor<T> backward(const LayerCache<T>& cache, const Tensor<T>& dy,
                     Tensor<T>*) const override {
    const std::size_t n = cache.in_shape[0], h = cache.in_shape[1],
                      w = cache.in_shape[2], c = cache.in_shape[3];
    Tensor<T> dx({n, h, w, c});
    const T inv = T{1} / static_cast<T>(h * w);
    for (std::size_t i = 0; i < n; ++i) {
      const T* gi = dy.data() + i * c;
      T* di = dx.data() + i * h * w * c;
      for (std::size_t p = 0; p < h * w; ++p)
        for (std::size_t ch = 0; ch < c; ++ch) di[p * c + ch] = gi[ch] * inv;
    }
    return dx;
  }

  std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<GlobalAvgPool>(*this);
  }
};

/// Fully connected layer over the flattened trailing dims.
template <typename T>
class Dense final : public Layer<T> {
 public:
  Dense(std::size_t in_dim, std::size_t out_dim)
      : in_dim_(in_dim), out_dim_(out_dim), w_({in_dim, out_dim}), b_({out_dim}) {}

  std::string kind() const override { return "dense"; }

  Shape3 output_shape(const Shape3& in) const override {
    if (in[0] * in[1] * in[2] != in_dim_)
      throw std::invalid_argument("dense expects " + std::to_string(in_dim_) +
                                  " inputs");
    return {1, 1, out_dim_};
  }

  void init(Rng& rng) override {
    const double stddev = std::sqrt(2.0 / static_cast<double>(in_dim_));
    for (auto& v : w_) v = static_cast<T>(rng.normal(0.0, stddev));
    b_.fill(T{0});
  }

  Tensor<T> forward(const Tensor<T>& x, LayerCache<T>* cache) const override {
    const std::size_t n = x.dim(0);
    Tensor<T> y({n, out_dim_});
    MatMap<T> ym(y.data(), n, out_dim_);
    ym.noalias() = ConstMatMap<T>(x.data(), n, in_dim_) *
                   ConstMatMap<T>(w_.data(), in_dim_, out_dim_);
    ym.rowwise() += Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>>(b_.data(), out_dim_);
    if (cache) {
      cache->in_shape = x.shape();
      cache->in = x;
    }
    return y;
  }

  Tensor<T> backward(const LayerCache<T>& cache, const Tensor<T>& dy,
                     Tensor<T>* param_grads) const override {
    const std::size_t n = cache.in_shape[0];
    ConstMatMap<T> dym(dy.data(), n, out_dim_);
    if (param_grads) {
      Tensor<T>& dw = param_grads[0];
      Tensor<T>& db = param_grads[1];
      dw = Tensor<T>(w_.shape());
      db = Tensor<T>(b_.shape());
      MatMap<T>(dw.data(), in_dim_, out_dim_).noalias() =
          ConstMatMap<T>(cache.in.data(), n, in_dim_).transpose() * dym;
      Eigen::Map<Eigen::Matrix<T, 1, Eigen::Dynamic>>(db.data(), out_dim_) =
          dym.colwise().sum();
    }
    Tensor<T> dx(cache.in.shape());
    MatMap<T>(dx.data(), n, in_dim_).noalias() =
        dym * ConstMatMap<T>(w_.data(), in_dim_, out_dim_).transpose();
    return dx;
  }

  std::size_t num_params() const override { return 2; }
  std::vector<Tensor<T>*> params() override { return {&w_, &b_}; }
  std::vector<const Tensor<T>*> params() const override { return {&w_, &b_}; }

  std::unique_ptr<Layer<T>> clone() const override {
    return std::make_unique<Dense>(*this);
  }

 private:
  std::size_t in_dim_, out_dim_;
  Tensor<T> w_;  // (in_dim, out_dim)
  Tensor<T> b_;
};

}  // namespace encscan::nn
