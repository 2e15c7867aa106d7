#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wildnet {

// MSB-first bit packing. Signed values go out as two's complement in
// their declared width.
class BitWriter {
 public:
  void put_bits(std::uint64_t value, int width);
  void put_signed(std::int64_t value, int width);

  std::size_t bit_count() const { return bit_count_; }

  // Zero-pads to a byte boundary and returns the buffer.
  std::vector<std::uint8_t> finish() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bit_count_ = 0;
};

// MSB-first bit reading over a borrowed buffer. Reading past the end
// throws CodecError(truncation) with expected/actual bit counts.
class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t get_bits(int width);
  std::int64_t get_signed(int width);

  std::size_t bit_pos() const { return bit_pos_; }
  std::size_t bits_total() const { return bytes_.size() * 8; }
  std::size_t bits_remaining() const { return bits_total() - bit_pos_; }

  // True when every bit from the cursor to the end of the buffer is 0.
  bool remaining_bits_zero() const;

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t bit_pos_ = 0;
};

}  // namespace wildnet
