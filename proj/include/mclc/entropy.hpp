#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <unordered_map>
#include <vector>

#include "mclc/common.hpp"

namespace mclc {

struct EntropyValue {
  double bits_per_symbol = 0.0;
};

/// Empirical context counts of a symbol sequence at depth k over alphabet
/// size M, with the derived k-depth conditional empirical entropy.
///
/// A "row" is one context u^k; the table caches, per row, the total count and
/// the sum of m*log2(m) terms so that single-substitution entropy deltas touch
/// only the O(k) rows whose counts change. Positions with incomplete left
/// context (the first k) contribute no counts.
///
/// Storage is a dense array when M^(k+1) is small and a hash map otherwise.
/// Single-writer; distinct tables are independent.
class ContextCountTable {
 public:
  ContextCountTable(std::span<const Symbol> z, std::uint32_t k, std::uint32_t m);

  std::uint32_t context_depth() const { return k_; }
  std::uint32_t alphabet_size() const { return m_; }
  std::uint64_t sequence_length() const { return n_; }
  std::uint64_t total_count() const { return n_ - k_; }

  /// n * H_k in bits.
  double nh() const { return nh_; }

  EntropyValue conditional_entropy() const {
    return EntropyValue{n_ ? nh_ / static_cast<double>(n_) : 0.0};
  }

  /// H_k(z with z[i] := b) - H_k(z), without mutating. i is 0-based.
  double delta_entropy(std::span<const Symbol> z, std::size_t i, Symbol b) const;

  /// n * delta_entropy.
  double delta_nh(std::span<const Symbol> z, std::size_t i, Symbol b) const;

  /// delta_nh for every candidate symbol at once; out has M entries and
  /// out[z[i]] == 0. Amortizes the per-position context packing.
  void delta_nh_all(std::span<const Symbol> z, std::size_t i,
                    std::span<double> out) const;

  /// Applies z[i] := b to both the table and the sequence.
  void apply_substitution(std::span<Symbol> z, std::size_t i, Symbol b);

  /// Recomputes the per-row caches and nh from the integer counts, clearing
  /// accumulated floating-point drift. Counts themselves are always exact.
  void rebuild_caches();

  /// Count for (context, symbol); ctx must have exactly k entries.
  std::uint64_t count_at(std::span<const Symbol> ctx, Symbol a) const;

  /// All nonempty rows, keyed by context tuple. For tests and debugging.
  std::map<std::vector<Symbol>, std::vector<std::uint64_t>> rows() const;

 private:
  struct SparseRow {
    std::vector<std::uint32_t> counts;
    std::uint32_t total = 0;
    double sum_mlogm = 0.0;
  };

  struct Windows {
    std::uint64_t self_row = 0;
    bool has_self = false;
    int count = 0;
    std::uint64_t row[24];
    Symbol sym[24];
    std::uint64_t weight[24];  // M^(p-i-1)
  };

  double xlogx(std::uint64_t v) const {
    return v < xlog_.size() ? xlog_[v] : slow_xlogx(v);
  }
  static double slow_xlogx(std::uint64_t v);

  std::uint64_t pack_context(std::span<const Symbol> z, std::size_t pos) const;
  void gather_windows(std::span<const Symbol> z, std::size_t i, Windows& w) const;
  double eval_delta(const Windows& w, Symbol a, Symbol b) const;
  void apply_delta(const Windows& w, Symbol a, Symbol b);

  std::uint32_t row_count(std::uint64_t row, Symbol a) const;
  void row_stats(std::uint64_t row, std::uint32_t& total, double& sum) const;
  void bump(std::uint64_t row, Symbol a, int delta);

  std::uint32_t k_;
  std::uint32_t m_;
  std::uint64_t n_;
  bool dense_;
  std::vector<std::uint64_t> pow_;  // M^0 .. M^k

  // dense storage
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint32_t> totals_;
  std::vector<double> sums_;

  // sparse storage
  std::unordered_map<std::uint64_t, SparseRow> sparse_;

  std::vector<double> xlog_;
  double nh_ = 0.0;
};

/// Convenience: H_k of a sequence built from scratch.
EntropyValue conditional_entropy(std::span<const Symbol> z, std::uint32_t k,
                                 std::uint32_t m);

}  // namespace mclc
