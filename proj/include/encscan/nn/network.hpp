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

#include <memory>
#include <string>
#include <vector>

#include "encscan/nn/layers.hpp"

namespace encscan::nn {

/// One entry of a serializable architecture description.
struct LayerSpec {
  std::string kind;  // conv | relu | avgpool | gap | dense
  int units = 0;     // output channels (conv) or output dim (dense)
  int kernel = 3;
  int stride = 1;
  int pad = 1;

  bool operator==(const LayerSpec&) const = default;
};

/// Architecture is data: networks are built from this spec and the spec is
/// persisted in checkpoints, so larger architectures can be plugged in
/// without code changes.
struct ArchSpec {
  Shape3 input_shape{32, 32, 3};
  int embedding_dim = 128;
  std::vector<LayerSpec> layers;

  bool operator==(const ArchSpec&) const = default;

  /// Default small encoder: `channels.size()` conv blocks with 2x2 average
  /// pooling between them, global average pooling, and a linear projection
  /// to `embedding_dim`.
  static ArchSpec small_conv(Shape3 in, int embedding_dim = 128,
                             std::vector<int> channels = {12, 24, 48, 96}) {
    ArchSpec a;
    a.input_shape = in;
    a.embedding_dim = embedding_dim;
    for (std::size_t i = 0; i < channels.size(); ++i) {
      a.layers.push_back({"conv", channels[i], 3, 1, 1});
      a.layers.push_back({"relu"});
      if (i + 1 < channels.size()) a.layers.push_back({"avgpool"});
    }
    a.layers.push_back({"gap"});
    a.layers.push_back({"dense", embedding_dim});
    return a;
  }
};

template <typename T>
struct FwdState {
  std::vector<LayerCache<T>> caches;
};

/// Sequential feed-forward network mapping image batches (N,H,W,C) to
/// embeddings (N,D). Forward/backward are const; training state lives in the
/// caller-owned FwdState, so concurrent forwards on one network are safe.
template <typename T>
class Network {
 public:
  Network() = default;

  Network(const ArchSpec& arch, std::uint64_t init_seed) : arch_(arch) {
    Shape3 cur = arch.input_shape;
    for (const LayerSpec& ls : arch.layers) {
      if (ls.kind == "conv") {
        layers_.push_back(std::make_unique<Conv2d<T>>(
            cur[2], ls.units, ls.kernel, ls.stride, ls.pad));
      } else if (ls.kind == "relu") {
        layers_.push_back(std::make_unique<Relu<T>>());
      } else if (ls.kind == "avgpool") {
        layers_.push_back(std::make_unique<AvgPool2<T>>());
      } else if (ls.kind == "gap") {
        layers_.push_back(std::make_unique<GlobalAvgPool<T>>());
      } else if (ls.kind == "dense") {
        layers_.push_back(std::make_unique<Dense<T>>(cur[0] * cur[1] * cur[2],
                                                     ls.units));
      } else {
        throw std::invalid_argument("unknown layer kind: " + ls.kind);
      }
      cur = layers_.back()->output_shape(cur);
    }
    if (static_cast<int>(cur[0] * cur[1] * cur[2]) != arch.embedding_dim)
      throw std::invalid_argument(
          "architecture output dim " + std::to_string(cur[0] * cur[1] * cur[2]) +
          " does not match embedding_dim " + std::to_string(arch.embedding_dim));
    Rng rng(init_seed);
    for (auto& l : layers_) l->init(rng);
  }

  Network(const Network& o) : arch_(o.arch_) {
    layers_.reserve(o.layers_.size());
    for (const auto& l : o.layers_) layers_.push_back(l->clone());
  }
  Network& operator=(const Network& o) {
    if (this != &o) { Network tmp(o); *this = std::move(tmp); }
    return *this;
  }
  Network(Network&&) = default;
  Network& operator=(Network&&) = default;

  const ArchSpec& arch() const { return arch_; }
  std::size_t num_layers() const { return layers_.size(); }

  /// Embeddings for a batch. Pass a FwdState to enable backward().
  Tensor<T> forward(const Tensor<T>& x, FwdState<T>* st = nullptr) const {
    check_batch_shape(x, arch_.input_shape);
    if (st) st->caches.assign(layers_.size(), {});
    Tensor<T> cur = x;
    for (std::size_t i = 0; i < layers_.size(); ++i)
      cur = layers_[i]->forward(cur, st ? &st->caches[i] : nullptr);
    return cur;
  }

  /// Backpropagate d_embedding. Fills `param_grads` (aligned with params())
  /// when non-null; returns the gradient with respect to the input batch.
  Tensor<T> backward(const FwdState<T>& st, const Tensor<T>& d_emb,
                     std::vector<Tensor<T>>* param_grads = nullptr) const {
    if (st.caches.size() != layers_.size())
      throw std::logic_error("backward without matching forward state");
    std::vector<std::size_t> offsets(layers_.size());
    std::size_t np = 0;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      offsets[i] = np;
      np += layers_[i]->num_params();
    }
    if (param_grads) param_grads->assign(np, Tensor<T>{});
    Tensor<T> grad = d_emb;
    for (std::size_t i = layers_.size(); i-- > 0;) {
      Tensor<T>* pg =
          (param_grads && layers_[i]->num_params())
              ? param_grads->data() + offsets[i]
              : nullptr;
      grad = layers_[i]->backward(st.caches[i], grad, pg);
    }
    return grad;
  }

  std::vector<Tensor<T>*> params() {
    std::vector<Tensor<T>*> out;
    for (auto& l : layers_)
      for (Tensor<T>* p : l->params()) out.push_back(p);
    return out;
  }
  std::vector<const Tensor<T>*> params() const {
    std::vector<const Tensor<T>*> out;
    for (const auto& l : layers_)
      for (const Tensor<T>* p : l->params()) out.push_back(p);
    return out;
  }

  /// Stable names for checkpointing: "<index>.<kind>.<w|b>".
  std::vector<std::string> param_names() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < layers_.size(); ++i) {
      const std::size_t n = layers_[i]->num_params();
      if (n >= 1) out.push_back(std::to_string(i) + "." + layers_[i]->kind() + ".w");
      if (n >= 2) out.push_back(std::to_string(i) + "." + layers_[i]->kind() + ".b");
    }
    return out;
  }

 private:
  ArchSpec arch_;
  std::vector<std::unique_ptr<Layer<T>>> layers_;
};

}  // namespace encscan::nn
