#include <catch2/catch_amalgamated.hpp>
#include <filesystem>
#include <fstream>
#include <set>

#include "encscan/data/dataset.hpp"
#include "encscan/data/image_io.hpp"
#include "encscan/data/synthetic.hpp"
#include "encscan/data/trigger.hpp"

using namespace encscan;
using namespace encscan::data;

namespace fs = std::filesystem;

namespace {
fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("encscan_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}
}  // namespace

TEST_CASE("synthetic dataset is deterministic per seed") {
  auto a = synth_dataset<float>(7, 100, {32, 32, 3});
  auto b = synth_dataset<float>(7, 100, {32, 32, 3});
  auto c = synth_dataset<float>(8, 100, {32, 32, 3});
  CHECK(a.images == b.images);
  CHECK_FALSE(a.images == c.images);
  CHECK(a.size() == 100);
}

TEST_CASE("synthetic dataset pixel statistics") {
  auto d = synth_dataset<float>(3, 200, {32, 32, 3});
  double mean = 0;
  float lo = 1, hi = 0;
  for (float v : d.images) {
    mean += v;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  mean /= static_cast<double>(d.images.size());
  CHECK(mean > 0.2);
  CHECK(mean < 0.8);
  CHECK(lo >= 0.0f);
  CHECK(hi <= 1.0f);
}

TEST_CASE("synthetic dataset rejects degenerate counts") {
  CHECK_THROWS_AS(synth_dataset<float>(1, 1, {32, 32, 3}), std::invalid_argument);
  CHECK_THROWS_AS(synth_dataset<float>(1, 0, {32, 32, 3}), std::invalid_argument);
}

TEST_CASE("synthetic families differ and labels cover all classes") {
  auto a = synth_labeled_dataset<float>(5, 300, {32, 32, 3}, SynthFamily::kGeometric);
  auto b = synth_labeled_dataset<float>(5, 300, {32, 32, 3}, SynthFamily::kAlternate);
  CHECK_FALSE(a.images == b.images);
  std::set<int> seen_a(a.labels.begin(), a.labels.end());
  CHECK(seen_a.size() == static_cast<std::size_t>(kSynthNumClasses));
  for (int l : a.labels) {
    CHECK(l >= 0);
    CHECK(l < kSynthNumClasses);
  }
}

TEST_CASE("trigger render: white 10x10 lower-right on 32x32") {
  auto [mask, pattern] =
      render_trigger<float>(PatchTrigger::solid(10, 10, {1, 1, 1}), {32, 32, 3});
  REQUIRE(mask.shape() == Shape({32, 32}));
  REQUIRE(pattern.shape() == Shape({32, 32, 3}));
  std::size_t zeros = 0;
  for (float v : mask) {
    CHECK((v == 0.0f || v == 1.0f));
    if (v == 0.0f) ++zeros;
  }
  CHECK(zeros == 100);
  // patch occupies rows/cols [22,32): all ones in the pattern there
  for (std::size_t y = 22; y < 32; ++y)
    for (std::size_t x = 22; x < 32; ++x)
      for (std::size_t ch = 0; ch < 3; ++ch)
        CHECK(pattern(y, x, ch) == 1.0f);
  CHECK(pattern(0, 0, 0) == 0.0f);
}

TEST_CASE("trigger render: positions, empty, texture, bounds") {
  SECTION("0x0 trigger keeps everything") {
    auto [mask, pattern] = render_trigger<float>(PatchTrigger::solid(0, 0, {1, 1, 1}),
                                                 {16, 16, 3});
    for (float v : mask) CHECK(v == 1.0f);
    (void)pattern;
  }
  SECTION("seeded texture is reproducible") {
    auto t = PatchTrigger::random_texture(6, 6, 99);
    auto [m1, p1] = render_trigger<float>(t, {32, 32, 3});
    auto [m2, p2] = render_trigger<float>(t, {32, 32, 3});
    CHECK(p1 == p2);
    t.texture_seed = 100;
    auto [m3, p3] = render_trigger<float>(t, {32, 32, 3});
    CHECK_FALSE(p1 == p3);
  }
  SECTION("mask-zero count equals patch area for all positions") {
    for (auto pos : {PatchTrigger::Position::kLowerRight,
                     PatchTrigger::Position::kCenter,
                     PatchTrigger::Position::kUpperLeft}) {
      auto [mask, pattern] =
          render_trigger<float>(PatchTrigger::solid(5, 7, {0, 1, 0}, pos), {32, 32, 3});
      std::size_t zeros = 0;
      for (float v : mask)
        if (v == 0.0f) ++zeros;
      CHECK(zeros == 35);
      (void)pattern;
    }
  }
  SECTION("oversized and out-of-bounds triggers are rejected") {
    CHECK_THROWS_AS(render_trigger<float>(PatchTrigger::solid(33, 10, {1, 1, 1}),
                                          {32, 32, 3}),
                    std::invalid_argument);
    PatchTrigger t = PatchTrigger::solid(10, 10, {1, 1, 1});
    t.position = PatchTrigger::Position::kExplicit;
    t.row = 25;
    t.col = 0;
    CHECK_THROWS_AS(render_trigger<float>(t, {32, 32, 3}), std::invalid_argument);
  }
  SECTION("fill components outside [0,1] are rejected") {
    CHECK_THROWS_AS(render_trigger<float>(PatchTrigger::solid(4, 4, {1.5, 0, 0}),
                                          {32, 32, 3}),
                    std::invalid_argument);
  }
}

TEST_CASE("image directory round trip") {
  fs::path dir = temp_dir("imgdir");
  auto src = synth_dataset<float>(21, 12, {32, 32, 3});
  for (std::size_t i = 0; i < src.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "img_%03zu.png", i);
    save_color_image(dir / name, src.image(i));
  }
  auto loaded = load_image_dir<float>(dir, {32, 32, 3});
  REQUIRE(loaded.size() == 12);
  // 8-bit quantization only
  for (std::size_t i = 0; i < loaded.images.size(); ++i)
    CHECK(std::abs(loaded.images[i] - src.images[i]) < 1.0f / 255.0f + 1e-6f);

  SECTION("resizing to a different target shape") {
    auto small = load_image_dir<float>(dir, {16, 16, 3});
    CHECK(small.image_shape() == Shape3{16, 16, 3});
    for (float v : small.images) {
      CHECK(v >= 0.0f);
      CHECK(v <= 1.0f);
    }
  }
}

TEST_CASE("image directory error paths") {
  fs::path dir = temp_dir("imgdir_bad");
  CHECK_THROWS_WITH(load_image_dir<float>(dir, {32, 32, 3}),
                    Catch::Matchers::ContainsSubstring("no images"));
  std::ofstream(dir / "broken.png") << "this is not an image";
  CHECK_THROWS_WITH(load_image_dir<float>(dir, {32, 32, 3}),
                    Catch::Matchers::ContainsSubstring("broken.png"));
  CHECK_THROWS(load_image_dir<float>(dir / "missing", {32, 32, 3}));
}

TEST_CASE("shadow subsample draws distinct images without replacement") {
  auto d = synth_dataset<float>(2, 50, {8, 8, 3});
  auto s = d.subsample(20, 123);
  CHECK(s.size() == 20);
  std::size_t n = s.image_numel();
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j)
      CHECK_FALSE(std::equal(s.images.data() + i * n, s.images.data() + (i + 1) * n,
                             s.images.data() + j * n));
  CHECK_THROWS_AS(d.subsample(1, 5), std::invalid_argument);
  CHECK_THROWS_AS(d.subsample(51, 5), std::invalid_argument);
}

TEST_CASE("epoch sampler covers the dataset without replacement per epoch") {
  EpochSampler sampler(10, 4, 77);
  std::multiset<std::size_t> seen;
  std::size_t drawn = 0;
  while (drawn < 10) {
    auto batch = sampler.next();
    CHECK(batch.size() >= 2);
    drawn += batch.size();
    seen.insert(batch.begin(), batch.end());
  }
  CHECK(drawn == 10);
  for (std::size_t i = 0; i < 10; ++i) CHECK(seen.count(i) == 1);
}
