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

#include <string>
#include <vector>

#include "encscan/rng.hpp"
#include "encscan/tensor.hpp"

namespace encscan::data {

/// Unlabeled image collection used for pretraining and trigger inversion.
/// Immutable after construction; safe to share across concurrent scans.
template <typename T>
struct ShadowDataset {
  Tensor<T> images;        // (M, H, W, C), values in [0,1]
  std::string source_tag;  // "pretraining-subset" | "external"

  ShadowDataset() = default;
  ShadowDataset(Tensor<T> imgs, std::string tag)
      : images(std::move(imgs)), source_tag(std::move(tag)) {
    if (images.rank() != 4)
      throw std::invalid_argument("shadow dataset expects a (M,H,W,C) tensor");
    if (size() < 2)
      throw std::invalid_argument(
          "shadow dataset needs at least 2 images, got " +
          std::to_string(size()));
  }

  std::size_t size() const { return images.dim(0); }

  Shape3 image_shape() const {
    return {images.dim(1), images.dim(2), images.dim(3)};
  }

  std::size_t image_numel() const {
    return images.dim(1) * images.dim(2) * images.dim(3);
  }

  /// Copy of image i as (H,W,C).
  Tensor<T> image(std::size_t i) const {
    Tensor<T> out({images.dim(1), images.dim(2), images.dim(3)});
    std::copy(images.data() + i * image_numel(),
              images.data() + (i + 1) * image_numel(), out.data());
    return out;
  }

  /// Batch (k,H,W,C) gathered by index.
  Tensor<T> gather(const std::vector<std::size_t>& idx) const {
    Tensor<T> out({idx.size(), images.dim(1), images.dim(2), images.dim(3)});
    const std::size_t n = image_numel();
    for (std::size_t j = 0; j < idx.size(); ++j)
      std::copy(images.data() + idx[j] * n, images.data() + (idx[j] + 1) * n,
                out.data() + j * n);
    return out;
  }

  /// m distinct images sampled without replacement.
  ShadowDataset subsample(std::size_t m, std::uint64_t seed) const {
    if (m < 2)
      throw std::invalid_argument("subsample needs m >= 2, got " +
                                  std::to_string(m));
    if (m > size())
      throw std::invalid_argument("subsample larger than dataset");
    Rng rng(seed);
    return ShadowDataset(gather(rng.sample_without_replacement(size(), m)),
                         source_tag);
  }
};

/// Labeled images for linear-probe training and attack evaluation.
template <typename T>
struct LabeledDataset {
  Tensor<T> images;  // (M, H, W, C)
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const { return labels.size(); }
};

/// Without-replacement batch iterator: shuffles index order every epoch and
/// hands out consecutive chunks. Batches smaller than 2 are never produced;
/// a trailing 1-element chunk is merged into the previous batch.
class EpochSampler {
 public:
  EpochSampler(std::size_t dataset_size, std::size_t batch, std::uint64_t seed)
      : m_(dataset_size), batch_(std::min(batch, dataset_size)), rng_(seed) {
    if (dataset_size < 2)
      throw std::invalid_argument("sampler needs at least 2 items");
    order_.resize(m_);
    std::iota(order_.begin(), order_.end(), 0);
    reshuffle();
  }

  std::vector<std::size_t> next() {
    if (pos_ >= m_) {
      reshuffle();
    }
    std::size_t take = std::min(batch_, m_ - pos_);
    if (m_ - pos_ - take == 1) ++take;  // absorb the orphan element
    std::vector<std::size_t> out(order_.begin() + pos_,
                                 order_.begin() + pos_ + take);
    pos_ += take;
    return out;
  }

 private:
  void reshuffle() {
    rng_.shuffle(order_.begin(), order_.end());
    pos_ = 0;
  }

  std::size_t m_, batch_, pos_ = 0;
  Rng rng_;
  std::vector<std::size_t> order_;
};

}  // namespace encscan::data
