#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mclc/arith.hpp"
#include "mclc/bitstream.hpp"
#include "mclc/common.hpp"

namespace mclc {

/// Context tree weighting over an M-ary alphabet, depth D.
///
/// Per node, the sequence seen in that context is scored by an M-ary KT
/// estimator, P_e updating by (count_a + 1/2) / (total + M/2). Internal nodes
/// weight P_w = 1/2 P_e + 1/2 prod_children P_w; depth-D nodes use P_w = P_e.
/// Contexts before position 0 are padded with symbol 0. All probabilities are
/// kept in log2 domain.
class CtwModel {
 public:
  CtwModel(std::uint32_t depth, std::uint32_t m);

  std::uint32_t depth() const { return depth_; }
  std::uint32_t alphabet_size() const { return m_; }

  /// Conditional pmf of the next symbol under the root-weighted mixture,
  /// given everything fed so far. out must have M entries; sums to 1.
  void conditional(std::span<double> out) const;

  /// Advances the model by one symbol.
  void update(Symbol a);

  /// log2 of the weighted probability of everything fed so far (<= 0).
  double root_log2_prob() const { return nodes_[0].log_pw; }

  std::size_t node_count() const { return nodes_.size(); }

 private:
  struct Node {
    std::vector<std::pair<Symbol, std::uint32_t>> counts;    // sorted by symbol
    std::vector<std::pair<Symbol, std::uint32_t>> children;  // sorted by symbol
    double log_pe = 0.0;
    double log_pw = 0.0;
    double child_prod = 0.0;  // sum of children's log_pw
    std::uint32_t total = 0;
  };

  std::uint32_t count_of(const Node& node, Symbol a) const;
  std::uint32_t& count_slot(Node& node, Symbol a);
  double log2_kt(const Node& node, Symbol a) const;

  /// Node indices along the current context path, root first; -1 where the
  /// node does not exist.
  void walk_lookup(std::int64_t* path) const;
  /// Same, creating missing nodes.
  void walk_create(std::int64_t* path);

  Symbol context_symbol(std::uint32_t back) const {
    return back < history_.size() ? history_[history_.size() - 1 - back] : 0;
  }

  std::uint32_t depth_;
  std::uint32_t m_;
  std::vector<Node> nodes_;
  std::vector<Symbol> history_;
};

/// Codes z with CTW + arithmetic coding. Throws ParameterError for symbols
/// outside [0, M).
Bitstream ctw_encode(std::span<const Symbol> z, std::uint32_t depth,
                     std::uint32_t m);

/// Exact inverse of ctw_encode given matching (n, depth, M). Throws
/// DecodeError on truncated input.
std::vector<Symbol> ctw_decode(const Bitstream& bits, std::uint64_t n,
                               std::uint32_t depth, std::uint32_t m);

/// -log2 of the root weighted probability of z: the model's ideal codelength
/// in bits. The coded length exceeds this by at most small termination and
/// pmf-quantization slack (bounded by 32 bits at these scales).
double ctw_ideal_codelength(std::span<const Symbol> z, std::uint32_t depth,
                            std::uint32_t m);

/// Turns a pmf into integer frequencies summing to kMaxArithTotal, every
/// symbol nonzero. Deterministic, shared by encoder and decoder.
void quantize_pmf(std::span<const double> pmf, std::span<std::uint32_t> freq);

}  // namespace mclc
