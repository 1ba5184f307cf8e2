#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mclc/adaptive.hpp"
#include "mclc/annealer.hpp"
#include "mclc/bitstream.hpp"
#include "mclc/common.hpp"
#include "mclc/ctw.hpp"
#include "mclc/sources.hpp"

namespace mclc {

inline constexpr std::uint8_t kAlgorithmFixed = 1;
inline constexpr std::uint8_t kAlgorithmAdaptive = 2;
inline constexpr std::uint16_t kFormatVersion = 1;

/// Fixed container header. Byte layout in FORMAT.md; little-endian integers.
struct StreamHeader {
  std::uint16_t version = kFormatVersion;
  std::uint8_t algorithm = kAlgorithmAdaptive;
  std::uint64_t n = 0;
  std::uint16_t k = 0;
  std::uint32_t m = 0;           // |Z| or grid size
  std::uint32_t effective = 0;   // |Z_e|; 0 for fixed-grid streams
  std::uint16_t level_bits = 0;  // b; 0 for fixed-grid streams
  std::uint32_t gamma = 0;
  std::uint16_t ctw_depth = 0;
  std::uint64_t payload_bits = 0;
};

struct EncodedStream {
  StreamHeader header;
  std::vector<std::int64_t> level_indices;  // occupied symbols ascending
  Bitstream payload;

  std::vector<std::uint8_t> serialize() const;
  static EncodedStream parse(std::span<const std::uint8_t> bytes);

  /// Bits charged to the rate besides the CTW payload: the |Z_e|*b level
  /// indices plus the ceil(log2(M+1))-bit cardinality description.
  std::uint64_t level_description_bits() const;
  std::uint64_t gross_bits() const;
};

/// One operating point: net rate in bits/symbol, MSE, and SNR relative to
/// the source's empirical variance.
struct RDPoint {
  double rate = 0.0;
  double distortion = 0.0;
  double snr_db = 0.0;
};

RDPoint make_rd_point(double net_rate, double mse, double source_variance);

struct CodecConfig {
  std::uint8_t algorithm = kAlgorithmAdaptive;
  double beta = -1.0;
  double c = 1.0;
  std::uint32_t r = 50;
  std::optional<std::uint32_t> k;          // default round(log_M(n)/2)
  std::uint64_t seed = 0;
  std::uint32_t alphabet = 0;              // adaptive |Z|; 0 = 2 ceil(log2 n)^2+1
  double mu = 4.0;
  bool alphabet_penalty = false;
  std::optional<std::uint32_t> ctw_depth;  // default = k

  std::uint32_t resolved_alphabet(std::uint64_t n) const;
  std::uint32_t resolved_k(std::uint64_t n, std::uint32_t m) const;
};

/// k defaulting rule: round((1/2) log_M n), clamped to [0, 16] and below n.
std::uint32_t default_context_depth(std::uint64_t n, std::uint32_t m);

struct EncodeResult {
  EncodedStream stream;
  RDPoint rd;                  // rd.rate is the net rate
  double gross_rate = 0.0;     // all container bits / n
  double final_energy = 0.0;   // annealer objective at its final state
  std::vector<double> reconstruction;
};

/// Runs the selected annealer, CTW-codes the outcome, and packs the
/// container. rd/reconstruction describe the encoder's own decoded output.
EncodeResult encode_stream(const SignalBuffer& x, const CodecConfig& cfg);

/// Packs an already-annealed adaptive sequence (bench warm-start path).
EncodeResult pack_adaptive(const SignalBuffer& x, std::span<const Symbol> z,
                           const AdaptiveCodebook& book, std::uint32_t m,
                           std::uint32_t k, std::uint32_t ctw_depth);

EncodeResult pack_fixed(const SignalBuffer& x, std::span<const Symbol> z,
                        const ReproductionGrid& grid, std::uint32_t k,
                        std::uint32_t ctw_depth);

/// Reconstruction y^n from a parsed stream.
std::vector<double> decode_stream(const EncodedStream& stream);
std::vector<double> decode_stream_bytes(std::span<const std::uint8_t> bytes);

/// The decoded symbol sequence (for tests and rate audits).
std::vector<Symbol> decode_symbols(const EncodedStream& stream);

}  // namespace mclc
