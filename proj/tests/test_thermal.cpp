#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <random>
#include <set>

#include "doctest.h"
#include "wildnet/error.hpp"
#include "wildnet/thermal.hpp"

using namespace wildnet;

namespace {

ThermalFrame make_frame(int w, int h, const std::vector<std::uint16_t>& px) {
  ThermalFrame f;
  f.width = w;
  f.height = h;
  f.pixels = px;
  return f;
}

// independent nearest-neighbor index oracle (float center mapping)
int nn_oracle(int dst, int src_size, int dst_size) {
  const double pos = (dst + 0.5) * static_cast<double>(src_size) / dst_size;
  int idx = static_cast<int>(pos);  // floor for non-negative
  if (idx > src_size - 1) idx = src_size - 1;
  return idx;
}

}  // namespace

TEST_CASE("normalize: constant frame maps to all zeros") {
  const auto g = normalize_frame(make_frame(4, 2, std::vector<std::uint16_t>(8, 5000)));
  CHECK(g.width == 4);
  CHECK(g.height == 2);
  for (const auto v : g.pixels) CHECK(v == 0);
}

TEST_CASE("normalize: endpoints of the stretch") {
  const auto g = normalize_frame(make_frame(2, 1, {0, 65535}));
  CHECK(g.pixels == std::vector<std::uint8_t>{0, 255});
}

TEST_CASE("normalize: round-half-up at the midpoint") {
  // 255*1000/2000 = 127.5 -> 128
  const auto g = normalize_frame(make_frame(3, 1, {1000, 2000, 3000}));
  CHECK(g.pixels == std::vector<std::uint8_t>{0, 128, 255});
}

TEST_CASE("normalize: empty pixel buffer is an invalid frame") {
  ThermalFrame f;
  f.width = 4;
  f.height = 4;
  CHECK_THROWS_AS(normalize_frame(f), FrameError);
  f.pixels.assign(3, 0);  // size mismatch
  CHECK_THROWS_AS(normalize_frame(f), FrameError);
  f.width = 0;
  CHECK_THROWS_AS(normalize_frame(f), FrameError);
}

TEST_CASE("normalize: non-constant output always spans 0 and 255") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 16);
    const int h = 1 + static_cast<int>(rng() % 16);
    std::vector<std::uint16_t> px(static_cast<std::size_t>(w) * h);
    for (auto& v : px) v = static_cast<std::uint16_t>(rng());
    if (std::set<std::uint16_t>(px.begin(), px.end()).size() < 2) continue;
    const auto g = normalize_frame(make_frame(w, h, px));
    const auto [lo, hi] = std::minmax_element(g.pixels.begin(), g.pixels.end());
    CHECK(*lo == 0);
    CHECK(*hi == 255);
  }
}

TEST_CASE("normalize: invariant under affine input transforms") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<std::uint16_t> px(24);
    for (auto& v : px) v = static_cast<std::uint16_t>(rng() % 500);
    const std::uint16_t a = static_cast<std::uint16_t>(1 + rng() % 100);
    const std::uint16_t b = static_cast<std::uint16_t>(rng() % 1000);
    std::vector<std::uint16_t> scaled(px.size());
    for (std::size_t i = 0; i < px.size(); ++i)
      scaled[i] = static_cast<std::uint16_t>(a * px[i] + b);  // stays within 16 bits
    const auto g1 = normalize_frame(make_frame(6, 4, px));
    const auto g2 = normalize_frame(make_frame(6, 4, scaled));
    CHECK(g1.pixels == g2.pixels);
  }
}

TEST_CASE("resize: 256x256 input is returned bitwise identical") {
  GrayFrame f{256, 256, std::vector<std::uint8_t>(256 * 256)};
  std::mt19937 rng(3);
  for (auto& v : f.pixels) v = static_cast<std::uint8_t>(rng());
  const auto out = resize_to_model_input(f);
  CHECK(out == f);
}

TEST_CASE("resize: 2x2 checkerboard becomes four uniform quadrants") {
  const GrayFrame f{2, 2, {0, 255, 255, 0}};
  const auto out = resize_to_model_input(f);
  REQUIRE(out.width == 256);
  REQUIRE(out.height == 256);
  for (int y = 0; y < 256; ++y) {
    for (int x = 0; x < 256; ++x) {
      const std::uint8_t expected = ((x < 128) == (y < 128)) ? 0 : 255;
      REQUIRE(out.pixels[static_cast<std::size_t>(y) * 256 + x] == expected);
    }
  }
}

TEST_CASE("resize: constant 256x192 stays constant") {
  const GrayFrame f{256, 192, std::vector<std::uint8_t>(256 * 192, 7)};
  const auto out = resize_to_model_input(f);
  CHECK(out.width == 256);
  CHECK(out.height == 256);
  for (const auto v : out.pixels) REQUIRE(v == 7);
}

TEST_CASE("resize: agrees with the index-mapping oracle and invents no values") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 300);
    const int h = 1 + static_cast<int>(rng() % 300);
    GrayFrame f{w, h, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h)};
    for (auto& v : f.pixels) v = static_cast<std::uint8_t>(rng());
    const auto out = resize_to_model_input(f);
    const std::set<std::uint8_t> src_values(f.pixels.begin(), f.pixels.end());
    for (int y = 0; y < 256; y += 17) {
      for (int x = 0; x < 256; x += 13) {
        const int sx = nn_oracle(x, w, 256);
        const int sy = nn_oracle(y, h, 256);
        REQUIRE(out.pixels[static_cast<std::size_t>(y) * 256 + x] ==
                f.pixels[static_cast<std::size_t>(sy) * w + sx]);
      }
    }
    for (const auto v : out.pixels) REQUIRE(src_values.count(v) == 1);
  }
}

TEST_CASE("heatmap: exact at all five control points") {
  CHECK(heatmap_color(0) == Rgb{0, 0, 0});
  CHECK(heatmap_color(64) == Rgb{0, 0, 255});
  CHECK(heatmap_color(128) == Rgb{255, 0, 255});
  CHECK(heatmap_color(192) == Rgb{255, 128, 0});
  CHECK(heatmap_color(255) == Rgb{255, 255, 255});
}

TEST_CASE("heatmap: midpoint of the blue-magenta segment") {
  // halfway between (0,0,255) and (255,0,255): red 127.5 rounds up
  CHECK(heatmap_color(96) == Rgb{128, 0, 255});
}

TEST_CASE("heatmap: channels are monotone within each segment") {
  constexpr int stops[5] = {0, 64, 128, 192, 255};
  for (int seg = 0; seg < 4; ++seg) {
    Rgb prev = heatmap_color(static_cast<std::uint8_t>(stops[seg]));
    const Rgb last = heatmap_color(static_cast<std::uint8_t>(stops[seg + 1]));
    const bool r_up = last.r >= prev.r;
    const bool g_up = last.g >= prev.g;
    const bool b_up = last.b >= prev.b;
    for (int g = stops[seg] + 1; g <= stops[seg + 1]; ++g) {
      const Rgb cur = heatmap_color(static_cast<std::uint8_t>(g));
      REQUIRE((r_up ? cur.r >= prev.r : cur.r <= prev.r));
      REQUIRE((g_up ? cur.g >= prev.g : cur.g <= prev.g));
      REQUIRE((b_up ? cur.b >= prev.b : cur.b <= prev.b));
      prev = cur;
    }
  }
}

TEST_CASE("render_heatmap maps every pixel through the palette") {
  GrayFrame f{3, 1, {0, 96, 255}};
  const auto hm = render_heatmap(f);
  CHECK(hm.pixels[0] == Rgb{0, 0, 0});
  CHECK(hm.pixels[1] == Rgb{128, 0, 255});
  CHECK(hm.pixels[2] == Rgb{255, 255, 255});
}

TEST_CASE("raw raster files round-trip and reject truncation") {
  const auto path = std::filesystem::temp_directory_path() / "wildnet_raster_test.raw";
  ThermalFrame f = make_frame(5, 3, {});
  f.pixels.resize(15);
  for (std::size_t i = 0; i < f.pixels.size(); ++i)
    f.pixels[i] = static_cast<std::uint16_t>(1000 + 321 * i);
  write_thermal_raw(path, f);
  const auto back = read_thermal_raw(path);
  CHECK(back.width == f.width);
  CHECK(back.height == f.height);
  CHECK(back.pixels == f.pixels);

  // chop the last byte off
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 1);
  CHECK_THROWS_AS(read_thermal_raw(path), ParseError);
  std::filesystem::remove(path);
}
