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
#include <string>
#include <utility>

#include "encscan/rng.hpp"
#include "encscan/tensor.hpp"

namespace encscan::data {

/// Ground-truth attack trigger: a rectangular patch with a solid color or a
/// seeded random texture. Rendered as a hard keep-mask (0 inside the patch,
/// 1 elsewhere) plus a pattern image.
struct PatchTrigger {
  enum class Position { kLowerRight, kCenter, kUpperLeft, kExplicit };
  enum class Fill { kSolid, kRandomTexture };

  std::size_t height = 10;
  std::size_t width = 10;
  Position position = Position::kLowerRight;
  std::size_t row = 0, col = 0;  // used when position == kExplicit
  Fill fill = Fill::kSolid;
  std::array<double, 3> color{1.0, 1.0, 1.0};
  std::uint64_t texture_seed = 0;

  static PatchTrigger solid(std::size_t h, std::size_t w,
                            std::array<double, 3> rgb,
                            Position pos = Position::kLowerRight) {
    PatchTrigger t;
    t.height = h;
    t.width = w;
    t.color = rgb;
    t.position = pos;
    return t;
  }

  static PatchTrigger random_texture(std::size_t h, std::size_t w,
                                     std::uint64_t seed,
                                     Position pos = Position::kLowerRight) {
    PatchTrigger t;
    t.height = h;
    t.width = w;
    t.fill = Fill::kRandomTexture;
    t.texture_seed = seed;
    t.position = pos;
    return t;
  }

  /// Top-left corner of the patch inside an (H,W) image.
  std::pair<std::size_t, std::size_t> anchor(std::size_t img_h,
                                             std::size_t img_w) const {
    switch (position) {
      case Position::kLowerRight: return {img_h - height, img_w - width};
      case Position::kCenter: return {(img_h - height) / 2, (img_w - width) / 2};
      case Position::kUpperLeft: return {0, 0};
      case Position::kExplicit: return {row, col};
    }
    return {0, 0};
  }

  double coverage(Shape3 img) const {
    return static_cast<double>(height * width) /
           static_cast<double>(img[0] * img[1]);
  }
};

inline PatchTrigger::Position trigger_position_from_string(const std::string& s) {
  if (s == "lower-right") return PatchTrigger::Position::kLowerRight;
  if (s == "center") return PatchTrigger::Position::kCenter;
  if (s == "upper-left") return PatchTrigger::Position::kUpperLeft;
  throw std::invalid_argument("unknown trigger position: " + s);
}

/// Renders the trigger against an image shape. Returns (mask, pattern):
/// mask (H,W) is 0 inside the patch rectangle and 1 elsewhere; pattern
/// (H,W,C) holds fill values inside the rectangle and 0 elsewhere.
/// A 0x0 trigger renders the all-ones mask, so stamping is the identity.
template <typename T>
std::pair<Tensor<T>, Tensor<T>> render_trigger(const PatchTrigger& spec,
                                               Shape3 shape) {
  const std::size_t h = shape[0], w = shape[1], c = shape[2];
  if (spec.height > h || spec.width > w)
    throw std::invalid_argument("trigger larger than image");
  const bool empty = spec.height == 0 || spec.width == 0;
  std::size_t r0 = 0, c0 = 0;
  if (!empty) {
    std::tie(r0, c0) = spec.anchor(h, w);
    if (r0 + spec.height > h || c0 + spec.width > w)
      throw std::invalid_argument("trigger rectangle out of image bounds");
  }
  if (spec.fill == PatchTrigger::Fill::kSolid)
    for (double v : spec.color)
      if (v < 0.0 || v > 1.0)
        throw std::invalid_argument("solid fill components must be in [0,1]");

  Tensor<T> mask({h, w}, T{1});
  Tensor<T> pattern({h, w, c});
  if (empty) return {std::move(mask), std::move(pattern)};

  Rng tex_rng(spec.texture_seed);
  for (std::size_t y = r0; y < r0 + spec.height; ++y) {
    for (std::size_t x = c0; x < c0 + spec.width; ++x) {
      mask(y, x) = T{0};
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double v = spec.fill == PatchTrigger::Fill::kSolid
                             ? spec.color[ch % 3]
                             : tex_rng.uniform(0.0, 1.0);
        pattern(y, x, ch) = static_cast<T>(v);
      }
    }
  }
  return {std::move(mask), std::move(pattern)};
}

}  // namespace encscan::data
