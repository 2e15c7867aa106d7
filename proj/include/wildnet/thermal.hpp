#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace wildnet {

// Side length of the detector's input raster.
inline constexpr int kModelInputSize = 256;

// Raw radiometric frame as it comes off the sensor: row-major 16-bit
// counts, unitless. t_ms is milliseconds since the scenario epoch and
// must be non-decreasing across a stream.
struct ThermalFrame {
  std::int64_t frame_id = 0;
  std::int64_t t_ms = 0;
  int width = 256;
  int height = 192;
  std::vector<std::uint16_t> pixels;
};

struct GrayFrame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  bool operator==(const GrayFrame&) const = default;
};

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb&) const = default;
};

struct HeatmapFrame {
  int width = 0;
  int height = 0;
  std::vector<Rgb> pixels;
};

// Throw FrameError if dimensions are non-positive or the pixel buffer
// does not match width*height (an empty buffer is the common failure).
void validate(const ThermalFrame& frame);
void validate(const GrayFrame& frame);

// Per-frame min-max stretch to 8 bits: g = round(255*(v-min)/(max-min)),
// round half up, computed in exact integer arithmetic. A constant frame
// maps to all zeros.
GrayFrame normalize_frame(const ThermalFrame& frame);

// Nearest-neighbor stretch to 256x256 (no aspect preservation). Source
// index per axis is floor((2*dst+1)*src_size / (2*dst_size)); identity on
// an input that is already 256x256.
GrayFrame resize_to_model_input(const GrayFrame& frame);

// False-color map for a single gray level. Piecewise linear through the
// control points 0, 64, 128, 192, 255 -> black, blue, magenta, orange,
// white; channels interpolated with round-half-up.
Rgb heatmap_color(std::uint8_t gray);

HeatmapFrame render_heatmap(const GrayFrame& frame);

// Raw raster fixture files: 8-byte header (width u32 LE, height u32 LE)
// followed by width*height little-endian u16 samples.
ThermalFrame read_thermal_raw(const std::filesystem::path& path);
void write_thermal_raw(const std::filesystem::path& path, const ThermalFrame& frame);

}  // namespace wildnet
