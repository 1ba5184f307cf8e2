#pragma once

#include <cstdint>

#include "mclc/bitstream.hpp"

namespace mclc {

// Witten-Neal-Cleary style arithmetic coder on 62-bit registers with
// underflow (follow-bit) handling. Termination costs two bits plus pending
// follows; the decoder is allowed exactly kRegisterBits - 2 zero bits of
// lookahead past the stream end, so truncation is always detected.
//
// Frequencies are integers summing to `total`, total <= kMaxTotal.

inline constexpr unsigned kArithRegisterBits = 62;
inline constexpr std::uint32_t kMaxArithTotal = 1u << 24;

class ArithmeticEncoder {
 public:
  explicit ArithmeticEncoder(Bitstream& out) : out_(&out) {}

  void encode(std::uint32_t cum, std::uint32_t freq, std::uint32_t total);

  /// Flushes the disambiguation bits. Call exactly once.
  void finish();

 private:
  void emit(int bit) {
    out_->push_bit(bit);
    for (; pending_ > 0; --pending_) out_->push_bit(!bit);
  }

  Bitstream* out_;
  std::uint64_t low_ = 0;
  std::uint64_t high_ = (1ull << kArithRegisterBits) - 1;
  std::uint64_t pending_ = 0;
};

class ArithmeticDecoder {
 public:
  explicit ArithmeticDecoder(BitReader& in);

  /// Slot of the next symbol within [0, total).
  std::uint32_t decode_target(std::uint32_t total);

  /// Consumes the symbol occupying [cum, cum+freq) that decode_target hit.
  void consume(std::uint32_t cum, std::uint32_t freq, std::uint32_t total);

 private:
  int checked_bit();

  BitReader* in_;
  std::uint64_t low_ = 0;
  std::uint64_t high_ = (1ull << kArithRegisterBits) - 1;
  std::uint64_t value_ = 0;
};

}  // namespace mclc
