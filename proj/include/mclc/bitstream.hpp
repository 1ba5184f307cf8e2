#pragma once

#include <cstdint>
#include <vector>

#include "mclc/common.hpp"

namespace mclc {

/// A bit sequence packed MSB-first within bytes.
struct Bitstream {
  std::vector<std::uint8_t> bytes;
  std::uint64_t bit_count = 0;

  void push_bit(int bit) {
    const std::size_t byte = static_cast<std::size_t>(bit_count >> 3);
    if (byte == bytes.size()) bytes.push_back(0);
    if (bit) bytes[byte] |= static_cast<std::uint8_t>(0x80u >> (bit_count & 7));
    ++bit_count;
  }

  void push_bits(std::uint64_t value, unsigned width) {
    for (unsigned j = width; j-- > 0;)
      push_bit(static_cast<int>((value >> j) & 1u));
  }

  int bit(std::uint64_t idx) const {
    return (bytes[static_cast<std::size_t>(idx >> 3)] >> (7 - (idx & 7))) & 1;
  }

  bool operator==(const Bitstream& other) const {
    return bit_count == other.bit_count && bytes == other.bytes;
  }
};

/// Sequential reader over a Bitstream. Reads past the end return zero bits
/// and are tallied, so a decoder can distinguish its bounded lookahead from a
/// genuinely truncated stream.
class BitReader {
 public:
  explicit BitReader(const Bitstream& bits) : bits_(&bits) {}

  int read_bit() {
    if (pos_ < bits_->bit_count) return bits_->bit(pos_++);
    ++virtual_bits_;
    return 0;
  }

  std::uint64_t read_bits(unsigned width) {
    std::uint64_t v = 0;
    for (unsigned j = 0; j < width; ++j) v = (v << 1) | static_cast<unsigned>(read_bit());
    return v;
  }

  std::uint64_t position() const { return pos_; }
  std::uint64_t virtual_bits() const { return virtual_bits_; }

 private:
  const Bitstream* bits_;
  std::uint64_t pos_ = 0;
  std::uint64_t virtual_bits_ = 0;
};

}  // namespace mclc
