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
#include <string>

#include "encscan/data/dataset.hpp"
#include "encscan/rng.hpp"
#include "encscan/tensor.hpp"

namespace encscan::data {

/// Two disjoint procedural image families. Images carry structured content
/// (gradient backgrounds plus one of six shape classes) so contrastive
/// pretraining learns nontrivial features; pure noise would not. Families A
/// and B use different backgrounds and different shape vocabularies so B can
/// serve as an external shadow set that is disjoint from A pretraining.
enum class SynthFamily { kGeometric, kAlternate };

inline SynthFamily synth_family_from_string(const std::string& s) {
  if (s == "geometric" || s == "A" || s == "a") return SynthFamily::kGeometric;
  if (s == "alternate" || s == "B" || s == "b") return SynthFamily::kAlternate;
  throw std::invalid_argument("unknown synthetic family: " + s);
}

inline constexpr int kSynthNumClasses = 6;

namespace detail {

struct Rgb {
  double r, g, b;
};

inline double luminance(const Rgb& c) {
  return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b;
}

inline Rgb random_color(Rng& rng) {
  return {rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95),
          rng.uniform(0.05, 0.95)};
}

/// Writes one synthetic image into `out` (H*W*C floats) and returns its
/// shape-class label in [0, kSynthNumClasses).
template <typename T>
int render_synth_image(T* out, const Shape3& shape, SynthFamily family,
                       Rng& rng) {
  const std::size_t h = shape[0], w = shape[1], c = shape[2];
  const int label = static_cast<int>(rng.index(kSynthNumClasses));

  const Rgb bg0 = random_color(rng);
  const Rgb bg1 = random_color(rng);
  Rgb fg = random_color(rng);
  // Keep the shape visible against the background.
  if (std::abs(luminance(fg) - 0.5 * (luminance(bg0) + luminance(bg1))) < 0.25)
    fg = {1.0 - fg.r, 1.0 - fg.g, 1.0 - fg.b};

  const double theta = rng.uniform(0.0, 2.0 * M_PI);
  const double gx = std::cos(theta), gy = std::sin(theta);
  const double bg_cx = rng.uniform(0.2, 0.8), bg_cy = rng.uniform(0.2, 0.8);

  const double cx = rng.uniform(0.3, 0.7) * static_cast<double>(w);
  const double cy = rng.uniform(0.3, 0.7) * static_cast<double>(h);
  const double r = rng.uniform(0.14, 0.26) * static_cast<double>(std::min(h, w));
  const int period = 3 + static_cast<int>(rng.index(4));
  const int phase = static_cast<int>(rng.index(static_cast<std::size_t>(period) * 2));
  const double bar = std::max(1.5, r * 0.35);

  const double noise_sd = 0.02;

  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const double u = static_cast<double>(x) / static_cast<double>(w - 1);
      const double v = static_cast<double>(y) / static_cast<double>(h - 1);
      double t;
      if (family == SynthFamily::kGeometric) {
        t = 0.5 * (gx * (2 * u - 1) + gy * (2 * v - 1)) + 0.5;
      } else {
        const double du = u - bg_cx, dv = v - bg_cy;
        t = std::sqrt(du * du + dv * dv) / 0.9;
      }
      t = std::clamp(t, 0.0, 1.0);
      Rgb px = {bg0.r + t * (bg1.r - bg0.r), bg0.g + t * (bg1.g - bg0.g),
                bg0.b + t * (bg1.b - bg0.b)};

      const double dx = static_cast<double>(x) - cx;
      const double dy = static_cast<double>(y) - cy;
      bool inside = false;
      if (family == SynthFamily::kGeometric) {
        switch (label) {
          case 0:  // disc
            inside = dx * dx + dy * dy <= r * r;
            break;
          case 1:  // square
            inside = std::abs(dx) <= r && std::abs(dy) <= r;
            break;
          case 2:  // triangle (apex up)
            inside = dy >= -r && dy <= r && std::abs(dx) <= (dy + r) * 0.6;
            break;
          case 3:  // horizontal stripes
            inside = ((static_cast<int>(y) + phase) / period) % 2 == 0;
            break;
          case 4:  // vertical stripes
            inside = ((static_cast<int>(x) + phase) / period) % 2 == 0;
            break;
          default:  // checkerboard
            inside = ((static_cast<int>(x) / period) +
                      (static_cast<int>(y) / period)) % 2 == 0;
            break;
        }
      } else {
        switch (label) {
          case 0: {  // ring
            const double d2 = dx * dx + dy * dy;
            inside = d2 <= r * r && d2 >= (r - bar) * (r - bar);
            break;
          }
          case 1:  // cross
            inside = (std::abs(dx) <= bar && std::abs(dy) <= r) ||
                     (std::abs(dy) <= bar && std::abs(dx) <= r);
            break;
          case 2:  // diamond
            inside = std::abs(dx) + std::abs(dy) <= r;
            break;
          case 3:  // diagonal stripes
            inside = ((static_cast<int>(x + y) + phase) / period) % 2 == 0;
            break;
          case 4: {  // dot grid
            const int p2 = 2 * period;
            const double mx = static_cast<double>((static_cast<int>(x) + phase) % p2) - p2 / 2.0;
            const double my = static_cast<double>((static_cast<int>(y) + phase) % p2) - p2 / 2.0;
            inside = mx * mx + my * my <= (0.35 * p2) * (0.35 * p2);
            break;
          }
          default:  // L corner
            inside = (std::abs(dx) <= r && std::abs(dy) <= r) &&
                     !(dx > -r + bar && dy < r - bar);
            break;
        }
      }
      if (inside) px = fg;

      const std::array<double, 3> rgb{px.r, px.g, px.b};
      T* dst = out + (y * w + x) * c;
      for (std::size_t ch = 0; ch < c; ++ch) {
        double val = rgb[ch % 3] + rng.normal(0.0, noise_sd);
        dst[ch] = static_cast<T>(std::clamp(val, 0.0, 1.0));
      }
    }
  }
  return label;
}

}  // namespace detail

/// Deterministic labeled synthetic dataset. Image i depends only on
/// (seed, i, family), never on generation order.
template <typename T>
LabeledDataset<T> synth_labeled_dataset(std::uint64_t seed, std::size_t count,
                                        Shape3 shape,
                                        SynthFamily family = SynthFamily::kGeometric) {
  if (count < 2)
    throw std::invalid_argument("synthetic dataset needs count >= 2, got " +
                                std::to_string(count));
  LabeledDataset<T> out;
  out.images = Tensor<T>({count, shape[0], shape[1], shape[2]});
  out.labels.resize(count);
  out.num_classes = kSynthNumClasses;
  const std::size_t stride = shape[0] * shape[1] * shape[2];
  const std::uint64_t family_tag = family == SynthFamily::kGeometric ? 0 : 1;
  for (std::size_t i = 0; i < count; ++i) {
    Rng rng(mix_seed(seed ^ (family_tag << 60), i));
    out.labels[i] = detail::render_synth_image(out.images.data() + i * stride,
                                               shape, family, rng);
  }
  return out;
}

/// Unlabeled variant for pretraining / shadow use.
template <typename T>
ShadowDataset<T> synth_dataset(std::uint64_t seed, std::size_t count,
                               Shape3 shape,
                               SynthFamily family = SynthFamily::kGeometric,
                               std::string source_tag = "pretraining-subset") {
  LabeledDataset<T> labeled = synth_labeled_dataset<T>(seed, count, shape, family);
  return ShadowDataset<T>(std::move(labeled.images), std::move(source_tag));
}

}  // namespace encscan::data
