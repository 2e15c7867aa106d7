#include "wildnet/thermal.hpp"

#include <algorithm>
#include <array>
#include <cstring>
#include <fstream>

#include "wildnet/error.hpp"

namespace wildnet {

void validate(const ThermalFrame& frame) {
  if (frame.width <= 0 || frame.height <= 0)
    throw FrameError("invalid frame: non-positive dimensions " +
                     std::to_string(frame.width) + "x" + std::to_string(frame.height));
  if (frame.pixels.empty())
    throw FrameError("invalid frame: empty pixel buffer");
  const std::size_t expected =
      static_cast<std::size_t>(frame.width) * static_cast<std::size_t>(frame.height);
  if (frame.pixels.size() != expected)
    throw FrameError("invalid frame: pixel buffer size " + std::to_string(frame.pixels.size()) +
                     " does not match " + std::to_string(frame.width) + "x" +
                     std::to_string(frame.height));
}

void validate(const GrayFrame& frame) {
  if (frame.width <= 0 || frame.height <= 0)
    throw FrameError("invalid frame: non-positive dimensions " +
                     std::to_string(frame.width) + "x" + std::to_string(frame.height));
  if (frame.pixels.empty())
    throw FrameError("invalid frame: empty pixel buffer");
  const std::size_t expected =
      static_cast<std::size_t>(frame.width) * static_cast<std::size_t>(frame.height);
  if (frame.pixels.size() != expected)
    throw FrameError("invalid frame: pixel buffer size " + std::to_string(frame.pixels.size()) +
                     " does not match " + std::to_string(frame.width) + "x" +
                     std::to_string(frame.height));
}

GrayFrame normalize_frame(const ThermalFrame& frame) {
  validate(frame);
  GrayFrame out{frame.width, frame.height,
                std::vector<std::uint8_t>(frame.pixels.size(), 0)};
  const auto [lo_it, hi_it] = std::minmax_element(frame.pixels.begin(), frame.pixels.end());
  const std::uint32_t lo = *lo_it;
  const std::uint32_t hi = *hi_it;
  if (hi == lo) return out;  // constant frame -> all zeros

  // round-half-up of 255*(v-lo)/range, exactly: floor((2*num + range) / (2*range))
  const std::uint64_t range = hi - lo;
  for (std::size_t i = 0; i < frame.pixels.size(); ++i) {
    const std::uint64_t num = 255ull * (frame.pixels[i] - lo);
    out.pixels[i] = static_cast<std::uint8_t>((2 * num + range) / (2 * range));
  }
  return out;
}

namespace {

inline int nearest_source_index(int dst, int src_size, int dst_size) {
  const auto src = static_cast<int>(
      (static_cast<std::int64_t>(2 * dst + 1) * src_size) / (2 * dst_size));
  return std::min(src, src_size - 1);
}

}  // namespace

GrayFrame resize_to_model_input(const GrayFrame& frame) {
  validate(frame);
  if (frame.width == kModelInputSize && frame.height == kModelInputSize)
    return frame;

  GrayFrame out{kModelInputSize, kModelInputSize,
                std::vector<std::uint8_t>(
                    static_cast<std::size_t>(kModelInputSize) * kModelInputSize)};
  for (int y = 0; y < kModelInputSize; ++y) {
    const int sy = nearest_source_index(y, frame.height, kModelInputSize);
    const std::uint8_t* src_row = frame.pixels.data() +
                                  static_cast<std::size_t>(sy) * frame.width;
    std::uint8_t* dst_row =
        out.pixels.data() + static_cast<std::size_t>(y) * kModelInputSize;
    for (int x = 0; x < kModelInputSize; ++x)
      dst_row[x] = src_row[nearest_source_index(x, frame.width, kModelInputSize)];
  }
  return out;
}

namespace {

constexpr std::array<int, 5> kStops = {0, 64, 128, 192, 255};
constexpr std::array<std::array<int, 3>, 5> kStopColors = {{
    {0, 0, 0},        // black
    {0, 0, 255},      // blue
    {255, 0, 255},    // magenta
    {255, 128, 0},    // orange
    {255, 255, 255},  // white
}};

// Weighted average (c_lo*(hi-g) + c_hi*(g-lo)) / (hi-lo), round half up.
// Numerator is never negative, so plain integer math is exact.
inline std::uint8_t lerp_channel(int c_lo, int c_hi, int g, int lo, int hi) {
  const int den = hi - lo;
  const int num = c_lo * (hi - g) + c_hi * (g - lo);
  return static_cast<std::uint8_t>((2 * num + den) / (2 * den));
}

}  // namespace

Rgb heatmap_color(std::uint8_t gray) {
  const int g = gray;
  std::size_t seg = kStops.size() - 2;
  for (std::size_t i = 0; i + 1 < kStops.size(); ++i) {
    if (g <= kStops[i + 1]) {
      seg = i;
      break;
    }
  }
  const int lo = kStops[seg];
  const int hi = kStops[seg + 1];
  const auto& c_lo = kStopColors[seg];
  const auto& c_hi = kStopColors[seg + 1];
  return Rgb{lerp_channel(c_lo[0], c_hi[0], g, lo, hi),
             lerp_channel(c_lo[1], c_hi[1], g, lo, hi),
             lerp_channel(c_lo[2], c_hi[2], g, lo, hi)};
}

HeatmapFrame render_heatmap(const GrayFrame& frame) {
  validate(frame);
  HeatmapFrame out{frame.width, frame.height, std::vector<Rgb>(frame.pixels.size())};
  for (std::size_t i = 0; i < frame.pixels.size(); ++i)
    out.pixels[i] = heatmap_color(frame.pixels[i]);
  return out;
}

ThermalFrame read_thermal_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open raster file: " + path.string());

  std::array<std::uint8_t, 8> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  if (in.gcount() != static_cast<std::streamsize>(header.size()))
    throw ParseError(path.string() + ": truncated raster header");

  const auto u32le = [](const std::uint8_t* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
  };
  const std::uint32_t w = u32le(header.data());
  const std::uint32_t h = u32le(header.data() + 4);
  if (w == 0 || h == 0 || static_cast<std::uint64_t>(w) * h > (64u << 20))
    throw ParseError(path.string() + ": implausible raster dimensions " +
                     std::to_string(w) + "x" + std::to_string(h));

  ThermalFrame frame;
  frame.width = static_cast<int>(w);
  frame.height = static_cast<int>(h);
  frame.pixels.resize(static_cast<std::size_t>(w) * h);
  std::vector<std::uint8_t> raw(frame.pixels.size() * 2);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    throw ParseError(path.string() + ": truncated raster payload, expected " +
                     std::to_string(raw.size()) + " bytes");
  for (std::size_t i = 0; i < frame.pixels.size(); ++i)
    frame.pixels[i] = static_cast<std::uint16_t>(raw[2 * i] |
                                                 (static_cast<std::uint16_t>(raw[2 * i + 1]) << 8));
  return frame;
}

void write_thermal_raw(const std::filesystem::path& path, const ThermalFrame& frame) {
  validate(frame);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ParseError("cannot open raster file for writing: " + path.string());
  const auto put_u32le = [&out](std::uint32_t v) {
    const std::array<char, 4> b = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                   static_cast<char>((v >> 16) & 0xFF),
                                   static_cast<char>((v >> 24) & 0xFF)};
    out.write(b.data(), b.size());
  };
  put_u32le(static_cast<std::uint32_t>(frame.width));
  put_u32le(static_cast<std::uint32_t>(frame.height));
  for (const std::uint16_t v : frame.pixels) {
    const std::array<char, 2> b = {static_cast<char>(v & 0xFF),
                                   static_cast<char>((v >> 8) & 0xFF)};
    out.write(b.data(), b.size());
  }
  if (!out) throw ParseError("write failed: " + path.string());
}

}  // namespace wildnet
