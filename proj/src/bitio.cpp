#include "wildnet/bitio.hpp"

#include <cassert>
#include <string>

#include "wildnet/error.hpp"

namespace wildnet {

void BitWriter::put_bits(std::uint64_t value, int width) {
  assert(width > 0 && width <= 64);
  if (width < 64) value &= (std::uint64_t{1} << width) - 1;
  for (int i = width - 1; i >= 0; --i) {
    const std::size_t bit_in_byte = bit_count_ & 7;
    if (bit_in_byte == 0) bytes_.push_back(0);
    bytes_.back() |= static_cast<std::uint8_t>(((value >> i) & 1) << (7 - bit_in_byte));
    ++bit_count_;
  }
}

void BitWriter::put_signed(std::int64_t value, int width) {
  put_bits(static_cast<std::uint64_t>(value), width);
}

std::uint64_t BitReader::get_bits(int width) {
  assert(width > 0 && width <= 64);
  if (bits_remaining() < static_cast<std::size_t>(width))
    throw CodecError(CodecErrorKind::truncation,
                     "truncated buffer: need " + std::to_string(width) +
                         " bits at offset " + std::to_string(bit_pos_) + ", only " +
                         std::to_string(bits_remaining()) + " of " +
                         std::to_string(bits_total()) + " remain");
  std::uint64_t out = 0;
  for (int i = 0; i < width; ++i) {
    const std::size_t byte = bit_pos_ >> 3;
    const std::size_t bit_in_byte = bit_pos_ & 7;
    out = (out << 1) | ((bytes_[byte] >> (7 - bit_in_byte)) & 1);
    ++bit_pos_;
  }
  return out;
}

std::int64_t BitReader::get_signed(int width) {
  std::uint64_t u = get_bits(width);
  if (width < 64 && (u >> (width - 1)) != 0)
    u |= ~((std::uint64_t{1} << width) - 1);  // sign-extend
  return static_cast<std::int64_t>(u);
}

bool BitReader::remaining_bits_zero() const {
  for (std::size_t pos = bit_pos_; pos < bits_total(); ++pos) {
    if ((bytes_[pos >> 3] >> (7 - (pos & 7))) & 1) return false;
  }
  return true;
}

}  // namespace wildnet
