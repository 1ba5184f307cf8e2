#include "mclc/arith.hpp"

namespace mclc {

namespace {

using u128 = unsigned __int128;

constexpr std::uint64_t kFull = 1ull << kArithRegisterBits;
constexpr std::uint64_t kHalf = kFull >> 1;
constexpr std::uint64_t kQuarter = kFull >> 2;

}  // namespace

void ArithmeticEncoder::encode(std::uint32_t cum, std::uint32_t freq,
                               std::uint32_t total) {
  const u128 range = static_cast<u128>(high_ - low_) + 1;
  high_ = low_ + static_cast<std::uint64_t>(range * (cum + freq) / total) - 1;
  low_ = low_ + static_cast<std::uint64_t>(range * cum / total);
  for (;;) {
    if (high_ < kHalf) {
      emit(0);
    } else if (low_ >= kHalf) {
      emit(1);
      low_ -= kHalf;
      high_ -= kHalf;
    } else if (low_ >= kQuarter && high_ < kHalf + kQuarter) {
      ++pending_;
      low_ -= kQuarter;
      high_ -= kQuarter;
    } else {
      break;
    }
    low_ <<= 1;
    high_ = (high_ << 1) | 1;
  }
}

void ArithmeticEncoder::finish() {
  ++pending_;
  emit(low_ < kQuarter ? 0 : 1);
}

ArithmeticDecoder::ArithmeticDecoder(BitReader& in) : in_(&in) {
  for (unsigned j = 0; j < kArithRegisterBits; ++j)
    value_ = (value_ << 1) | static_cast<unsigned>(checked_bit());
}

int ArithmeticDecoder::checked_bit() {
  const int b = in_->read_bit();
  if (in_->virtual_bits() > kArithRegisterBits - 2)
    throw DecodeError("arithmetic decoder ran past end of stream");
  return b;
}

std::uint32_t ArithmeticDecoder::decode_target(std::uint32_t total) {
  const u128 range = static_cast<u128>(high_ - low_) + 1;
  const u128 off = static_cast<u128>(value_ - low_) + 1;
  std::uint64_t t = static_cast<std::uint64_t>((off * total - 1) / range);
  if (t >= total) t = total - 1;
  return static_cast<std::uint32_t>(t);
}

void ArithmeticDecoder::consume(std::uint32_t cum, std::uint32_t freq,
                                std::uint32_t total) {
  const u128 range = static_cast<u128>(high_ - low_) + 1;
  high_ = low_ + static_cast<std::uint64_t>(range * (cum + freq) / total) - 1;
  low_ = low_ + static_cast<std::uint64_t>(range * cum / total);
  for (;;) {
    if (high_ < kHalf) {
      // nothing
    } else if (low_ >= kHalf) {
      low_ -= kHalf;
      high_ -= kHalf;
      value_ -= kHalf;
    } else if (low_ >= kQuarter && high_ < kHalf + kQuarter) {
      low_ -= kQuarter;
      high_ -= kQuarter;
      value_ -= kQuarter;
    } else {
      break;
    }
    low_ <<= 1;
    high_ = (high_ << 1) | 1;
    value_ = (value_ << 1) | static_cast<unsigned>(checked_bit());
  }
}

}  // namespace mclc
