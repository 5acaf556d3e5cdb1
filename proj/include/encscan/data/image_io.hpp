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

#include <algorithm>
#include <filesystem>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#include <string>
#include <vector>

#include "encscan/data/dataset.hpp"
#include "encscan/tensor.hpp"

namespace encscan::data {

/// Bilinear resample of an (H,W,C) float image to (out_h, out_w).
template <typename T>
Tensor<T> resample_bilinear(const Tensor<T>& img, std::size_t out_h,
                            std::size_t out_w) {
  const std::size_t h = img.dim(0), w = img.dim(1), c = img.dim(2);
  Tensor<T> out({out_h, out_w, c});
  const double sy = static_cast<double>(h) / static_cast<double>(out_h);
  const double sx = static_cast<double>(w) / static_cast<double>(out_w);
  for (std::size_t oy = 0; oy < out_h; ++oy) {
    const double fy = (oy + 0.5) * sy - 0.5;
    const std::size_t y0 = static_cast<std::size_t>(std::clamp(std::floor(fy), 0.0, double(h - 1)));
    const std::size_t y1 = std::min(y0 + 1, h - 1);
    const double wy = std::clamp(fy - static_cast<double>(y0), 0.0, 1.0);
    for (std::size_t ox = 0; ox < out_w; ++ox) {
      const double fx = (ox + 0.5) * sx - 0.5;
      const std::size_t x0 = static_cast<std::size_t>(std::clamp(std::floor(fx), 0.0, double(w - 1)));
      const std::size_t x1 = std::min(x0 + 1, w - 1);
      const double wx = std::clamp(fx - static_cast<double>(x0), 0.0, 1.0);
      for (std::size_t ch = 0; ch < c; ++ch) {
        const double top = (1 - wx) * img(y0, x0, ch) + wx * img(y0, x1, ch);
        const double bot = (1 - wx) * img(y1, x0, ch) + wx * img(y1, x1, ch);
        out(oy, ox, ch) = static_cast<T>((1 - wy) * top + wy * bot);
      }
    }
  }
  return out;
}

/// Crop [r0, r0+ch_h) x [c0, c0+ch_w) from an (H,W,C) image.
template <typename T>
Tensor<T> crop(const Tensor<T>& img, std::size_t r0, std::size_t c0,
               std::size_t crop_h, std::size_t crop_w) {
  const std::size_t c = img.dim(2);
  Tensor<T> out({crop_h, crop_w, c});
  for (std::size_t y = 0; y < crop_h; ++y)
    std::copy(&img(r0 + y, c0, 0), &img(r0 + y, c0, 0) + crop_w * c,
              &out(y, 0, 0));
  return out;
}

template <typename T>
void hflip_inplace(Tensor<T>& img) {
  const std::size_t h = img.dim(0), w = img.dim(1), c = img.dim(2);
  for (std::size_t y = 0; y < h; ++y)
    for (std::size_t x = 0; x < w / 2; ++x)
      for (std::size_t ch = 0; ch < c; ++ch)
        std::swap(img(y, x, ch), img(y, w - 1 - x, ch));
}

/// Decode one image file to an (H,W,C) tensor in [0,1], RGB channel order,
/// resized to the target shape.
template <typename T>
Tensor<T> load_image_file(const std::filesystem::path& path, Shape3 target) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty())
    throw std::runtime_error("cannot decode image file: " + path.string());
  Tensor<T> img({static_cast<std::size_t>(bgr.rows),
                 static_cast<std::size_t>(bgr.cols), target[2]});
  for (int y = 0; y < bgr.rows; ++y) {
    const cv::Vec3b* row = bgr.ptr<cv::Vec3b>(y);
    for (int x = 0; x < bgr.cols; ++x) {
      // BGR -> RGB
      const std::array<double, 3> rgb{row[x][2] / 255.0, row[x][1] / 255.0,
                                      row[x][0] / 255.0};
      for (std::size_t ch = 0; ch < target[2]; ++ch)
        img(static_cast<std::size_t>(y), static_cast<std::size_t>(x), ch) =
            static_cast<T>(target[2] == 1
                               ? (rgb[0] + rgb[1] + rgb[2]) / 3.0
                               : rgb[ch % 3]);
    }
  }
  if (img.dim(0) != target[0] || img.dim(1) != target[1])
    img = resample_bilinear(img, target[0], target[1]);
  return img;
}

/// Loads every decodable raster file in a directory, deterministically
/// ordered by filename, resized to `target` and scaled to [0,1].
template <typename T>
ShadowDataset<T> load_image_dir(const std::filesystem::path& dir, Shape3 target,
                                std::string source_tag = "external") {
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error("not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty())
    throw std::runtime_error("no images in directory: " + dir.string());

  Tensor<T> images({files.size(), target[0], target[1], target[2]});
  const std::size_t stride = target[0] * target[1] * target[2];
  for (std::size_t i = 0; i < files.size(); ++i) {
    Tensor<T> img = load_image_file<T>(files[i], target);
    std::copy(img.data(), img.data() + stride, images.data() + i * stride);
  }
  return ShadowDataset<T>(std::move(images), std::move(source_tag));
}

/// 8-bit grayscale PNG from an (H,W) tensor in [0,1].
template <typename T>
void save_gray_image(const std::filesystem::path& path, const Tensor<T>& img) {
  cv::Mat m(static_cast<int>(img.dim(0)), static_cast<int>(img.dim(1)), CV_8UC1);
  for (std::size_t y = 0; y < img.dim(0); ++y)
    for (std::size_t x = 0; x < img.dim(1); ++x)
      m.at<std::uint8_t>(static_cast<int>(y), static_cast<int>(x)) =
          static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(
              static_cast<double>(img(y, x)), 0.0, 1.0)));
  if (!cv::imwrite(path.string(), m))
    throw std::runtime_error("cannot write image: " + path.string());
}

/// 8-bit color PNG from an (H,W,C) tensor in [0,1].
template <typename T>
void save_color_image(const std::filesystem::path& path, const Tensor<T>& img) {
  const std::size_t c = img.dim(2);
  cv::Mat m(static_cast<int>(img.dim(0)), static_cast<int>(img.dim(1)), CV_8UC3);
  for (std::size_t y = 0; y < img.dim(0); ++y) {
    cv::Vec3b* row = m.ptr<cv::Vec3b>(static_cast<int>(y));
    for (std::size_t x = 0; x < img.dim(1); ++x) {
      auto q = [&](std::size_t ch) {
        return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(
            static_cast<double>(img(y, x, ch % c)), 0.0, 1.0)));
      };
      row[x] = cv::Vec3b(q(2), q(1), q(0));  // RGB -> BGR
    }
  }
  if (!cv::imwrite(path.string(), m))
    throw std::runtime_error("cannot write image: " + path.string());
}

}  // namespace encscan::data
