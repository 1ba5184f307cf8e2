#include "mclc/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "mclc/grid.hpp"

namespace mclc {

namespace {

constexpr char kMagic[4] = {'M', 'C', 'L', 'C'};

void put_bytes(std::vector<std::uint8_t>& out, std::uint64_t v, unsigned width) {
  for (unsigned j = 0; j < width; ++j)
    out.push_back(static_cast<std::uint8_t>((v >> (8 * j)) & 0xffu));
}

class ByteCursor {
 public:
  explicit ByteCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t take(unsigned width) {
    if (pos_ + width > bytes_.size())
      throw DecodeError("stream header truncated");
    std::uint64_t v = 0;
    for (unsigned j = 0; j < width; ++j)
      v |= static_cast<std::uint64_t>(bytes_[pos_ + j]) << (8 * j);
    pos_ += width;
    return v;
  }

  std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint64_t cardinality_bits(std::uint32_t m) {
  return static_cast<std::uint64_t>(std::bit_width(static_cast<std::uint64_t>(m)));
}

}  // namespace

std::uint64_t EncodedStream::level_description_bits() const {
  if (header.algorithm != kAlgorithmAdaptive) return 0;
  return static_cast<std::uint64_t>(header.effective) * header.level_bits +
         cardinality_bits(header.m);
}

std::uint64_t EncodedStream::gross_bits() const {
  return 8 * serialize().size();
}

std::vector<std::uint8_t> EncodedStream::serialize() const {
  std::vector<std::uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_bytes(out, header.version, 2);
  put_bytes(out, header.algorithm, 1);
  put_bytes(out, header.n, 8);
  put_bytes(out, header.k, 2);
  put_bytes(out, header.m, 4);
  put_bytes(out, header.effective, 4);
  put_bytes(out, header.level_bits, 2);
  put_bytes(out, header.gamma, 4);
  put_bytes(out, header.ctw_depth, 2);
  put_bytes(out, header.payload_bits, 8);

  if (header.algorithm == kAlgorithmAdaptive) {
    const LevelQuantizer q =
        LevelQuantizer::from_bits(header.level_bits, header.gamma, 1.0);
    Bitstream levels;
    for (std::int64_t m : level_indices)
      levels.push_bits(q.pack_index(m), header.level_bits);
    out.insert(out.end(), levels.bytes.begin(), levels.bytes.end());
  }
  out.insert(out.end(), payload.bytes.begin(), payload.bytes.end());
  return out;
}

EncodedStream EncodedStream::parse(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw FormatError("bad magic: not an mclc stream");
  ByteCursor cur(bytes.subspan(4));
  EncodedStream s;
  s.header.version = static_cast<std::uint16_t>(cur.take(2));
  if (s.header.version != kFormatVersion)
    throw FormatError("unsupported format version " +
                      std::to_string(s.header.version));
  s.header.algorithm = static_cast<std::uint8_t>(cur.take(1));
  if (s.header.algorithm != kAlgorithmFixed &&
      s.header.algorithm != kAlgorithmAdaptive)
    throw FormatError("unknown algorithm id " +
                      std::to_string(s.header.algorithm));
  s.header.n = cur.take(8);
  s.header.k = static_cast<std::uint16_t>(cur.take(2));
  s.header.m = static_cast<std::uint32_t>(cur.take(4));
  s.header.effective = static_cast<std::uint32_t>(cur.take(4));
  s.header.level_bits = static_cast<std::uint16_t>(cur.take(2));
  s.header.gamma = static_cast<std::uint32_t>(cur.take(4));
  s.header.ctw_depth = static_cast<std::uint16_t>(cur.take(2));
  s.header.payload_bits = cur.take(8);

  if (s.header.effective > s.header.m)
    throw DecodeError("header inconsistency: |Z_e| > M");

  std::span<const std::uint8_t> rest = cur.rest();
  if (s.header.algorithm == kAlgorithmAdaptive) {
    if (s.header.effective == 0 && s.header.n > 0)
      throw DecodeError("adaptive stream with empty effective alphabet");
    const std::uint64_t level_bit_count =
        static_cast<std::uint64_t>(s.header.effective) * s.header.level_bits;
    const std::size_t level_bytes =
        static_cast<std::size_t>((level_bit_count + 7) / 8);
    if (rest.size() < level_bytes)
      throw DecodeError("stream truncated inside level payload");
    Bitstream levels;
    levels.bytes.assign(rest.begin(), rest.begin() + level_bytes);
    levels.bit_count = 8 * level_bytes;
    BitReader reader(levels);
    const LevelQuantizer q =
        LevelQuantizer::from_bits(s.header.level_bits, s.header.gamma, 1.0);
    for (std::uint32_t j = 0; j < s.header.effective; ++j)
      s.level_indices.push_back(
          q.unpack_index(reader.read_bits(s.header.level_bits)));
    rest = rest.subspan(level_bytes);
  }

  const std::size_t payload_bytes =
      static_cast<std::size_t>((s.header.payload_bits + 7) / 8);
  if (rest.size() < payload_bytes)
    throw DecodeError("stream truncated inside CTW payload");
  s.payload.bytes.assign(rest.begin(), rest.begin() + payload_bytes);
  s.payload.bit_count = s.header.payload_bits;
  return s;
}

RDPoint make_rd_point(double net_rate, double mse, double source_variance) {
  RDPoint p;
  p.rate = net_rate;
  p.distortion = mse;
  p.snr_db = mse > 0.0
                 ? 10.0 * std::log10(source_variance / mse)
                 : std::numeric_limits<double>::infinity();
  return p;
}

std::uint32_t default_context_depth(std::uint64_t n, std::uint32_t m) {
  if (m < 2 || n < 2) return 0;
  const double k =
      0.5 * std::log2(static_cast<double>(n)) / std::log2(static_cast<double>(m));
  const std::uint32_t rounded = static_cast<std::uint32_t>(std::llround(k));
  const std::uint32_t cap =
      n > 1 ? std::min<std::uint64_t>(16, n - 1) : 0;
  return std::min(rounded, cap);
}

std::uint32_t CodecConfig::resolved_alphabet(std::uint64_t n) const {
  return alphabet != 0 ? alphabet : default_alphabet_size(n);
}

std::uint32_t CodecConfig::resolved_k(std::uint64_t n, std::uint32_t m) const {
  if (k) {
    if (*k >= n) throw ParameterError("k: context depth must satisfy k < n");
    return *k;
  }
  return default_context_depth(n, m);
}

namespace {

EncodeResult finish_result(EncodedStream stream, const SignalBuffer& x,
                           std::vector<double> reconstruction) {
  EncodeResult result;
  const double n = static_cast<double>(x.size());
  const double net_bits = static_cast<double>(stream.payload.bit_count) +
                          static_cast<double>(stream.level_description_bits());
  result.rd = make_rd_point(net_bits / n,
                            distortion(x.samples, reconstruction),
                            x.empirical_variance);
  result.gross_rate = static_cast<double>(stream.gross_bits()) / n;
  result.reconstruction = std::move(reconstruction);
  result.stream = std::move(stream);
  return result;
}

}  // namespace

EncodeResult pack_adaptive(const SignalBuffer& x, std::span<const Symbol> z,
                           const AdaptiveCodebook& book, std::uint32_t m,
                           std::uint32_t k, std::uint32_t ctw_depth) {
  EncodedStream stream;
  stream.header.algorithm = kAlgorithmAdaptive;
  stream.header.n = x.size();
  stream.header.k = static_cast<std::uint16_t>(k);
  stream.header.m = m;
  stream.header.effective = static_cast<std::uint32_t>(book.effective.size());
  stream.header.level_bits = static_cast<std::uint16_t>(book.quantizer.bits);
  stream.header.gamma = book.quantizer.gamma;
  stream.header.ctw_depth = static_cast<std::uint16_t>(ctw_depth);
  stream.level_indices = book.level_index;
  stream.payload = ctw_encode(z, ctw_depth, m);
  stream.header.payload_bits = stream.payload.bit_count;

  std::vector<double> level_of(m, 0.0);
  for (std::size_t j = 0; j < book.effective.size(); ++j)
    level_of[book.effective[j]] = book.levels[j];
  std::vector<double> y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) y[i] = level_of[z[i]];
  return finish_result(std::move(stream), x, std::move(y));
}

EncodeResult pack_fixed(const SignalBuffer& x, std::span<const Symbol> z,
                        const ReproductionGrid& grid, std::uint32_t k,
                        std::uint32_t ctw_depth) {
  EncodedStream stream;
  stream.header.algorithm = kAlgorithmFixed;
  stream.header.n = x.size();
  stream.header.k = static_cast<std::uint16_t>(k);
  stream.header.m = static_cast<std::uint32_t>(grid.size());
  stream.header.effective = 0;
  stream.header.level_bits = 0;
  stream.header.gamma = grid.gamma;
  stream.header.ctw_depth = static_cast<std::uint16_t>(ctw_depth);
  stream.payload = ctw_encode(z, ctw_depth, stream.header.m);
  stream.header.payload_bits = stream.payload.bit_count;

  std::vector<double> y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) y[i] = grid.levels[z[i]];
  return finish_result(std::move(stream), x, std::move(y));
}

EncodeResult encode_stream(const SignalBuffer& x, const CodecConfig& cfg) {
  if (x.size() == 0) throw ParameterError("x: empty input");
  if (cfg.algorithm == kAlgorithmFixed) {
    const ReproductionGrid grid = build_grid(x.size());
    const std::uint32_t m = static_cast<std::uint32_t>(grid.size());
    const std::uint32_t k = cfg.resolved_k(x.size(), m);
    AnnealConfig anneal{cfg.beta, cfg.c, cfg.r, k, cfg.seed};
    std::vector<Symbol> z = run_algorithm1(x, grid, anneal);
    const std::uint32_t depth = cfg.ctw_depth.value_or(k);
    EncodeResult result = pack_fixed(x, z, grid, k, depth);
    result.final_energy = energy(x, z, grid.levels, k, cfg.beta);
    return result;
  }
  if (cfg.algorithm != kAlgorithmAdaptive)
    throw ParameterError("algorithm: must be 1 (fixed) or 2 (adaptive)");

  const std::uint32_t m = cfg.resolved_alphabet(x.size());
  const std::uint32_t k = cfg.resolved_k(x.size(), m);
  AdaptiveConfig acfg;
  acfg.anneal = AnnealConfig{cfg.beta, cfg.c, cfg.r, k, cfg.seed};
  acfg.mu = cfg.mu;
  acfg.alphabet_penalty = cfg.alphabet_penalty;
  AdaptiveResult run = run_algorithm2(x, m, acfg);
  const std::uint32_t depth = cfg.ctw_depth.value_or(k);
  EncodeResult result = pack_adaptive(x, run.z, run.codebook, m, k, depth);
  result.final_energy = run.final_energy;
  return result;
}

std::vector<Symbol> decode_symbols(const EncodedStream& stream) {
  return ctw_decode(stream.payload, stream.header.n, stream.header.ctw_depth,
                    stream.header.m);
}

std::vector<double> decode_stream(const EncodedStream& stream) {
  const StreamHeader& h = stream.header;
  std::vector<Symbol> z = decode_symbols(stream);

  std::vector<double> y(z.size());
  if (h.algorithm == kAlgorithmFixed) {
    if (h.m != 2ull * h.gamma * h.gamma + 1)
      throw DecodeError("header inconsistency: grid size does not match gamma");
    const std::int64_t g = h.gamma;
    const std::int64_t g2 = g * g;
    for (std::size_t i = 0; i < z.size(); ++i)
      y[i] = static_cast<double>(static_cast<std::int64_t>(z[i]) - g2) /
             static_cast<double>(g);
    return y;
  }

  // Adaptive: the occupied symbols (in ascending order) map 1:1 onto the
  // transmitted level list.
  std::vector<std::uint8_t> seen(h.m, 0);
  for (Symbol s : z) seen[s] = 1;
  std::vector<std::int64_t> sym_to_slot(h.m, -1);
  std::uint32_t occupied = 0;
  for (std::uint32_t a = 0; a < h.m; ++a)
    if (seen[a]) sym_to_slot[a] = occupied++;
  if (occupied != h.effective)
    throw DecodeError("header/payload inconsistency: |Z_e| mismatch");

  const LevelQuantizer q = LevelQuantizer::from_bits(h.level_bits, h.gamma, 1.0);
  for (std::size_t i = 0; i < z.size(); ++i)
    y[i] = q.level_of_index(stream.level_indices[static_cast<std::size_t>(
        sym_to_slot[z[i]])]);
  return y;
}

std::vector<double> decode_stream_bytes(std::span<const std::uint8_t> bytes) {
  return decode_stream(EncodedStream::parse(bytes));
}

}  // namespace mclc
