#include "mclc/entropy.hpp"

#include <algorithm>
#include <cmath>

namespace mclc {

namespace {

constexpr std::uint64_t kDenseCellLimit = 1ull << 22;
constexpr std::uint64_t kXlogTableLimit = 1ull << 22;
constexpr std::uint32_t kMaxDepth = 23;

}  // namespace

double ContextCountTable::slow_xlogx(std::uint64_t v) {
  return v ? static_cast<double>(v) * std::log2(static_cast<double>(v)) : 0.0;
}

ContextCountTable::ContextCountTable(std::span<const Symbol> z, std::uint32_t k,
                                     std::uint32_t m)
    : k_(k), m_(m), n_(z.size()) {
  if (m_ < 1) throw ParameterError("M: alphabet size must be >= 1");
  if (k_ >= n_) throw ParameterError("k: context depth must satisfy k < n");
  if (k_ > kMaxDepth) throw ParameterError("k: context depth too large");

  pow_.resize(k_ + 1);
  pow_[0] = 1;
  for (std::uint32_t j = 1; j <= k_; ++j) {
    if (pow_[j - 1] > (~0ull) / m_)
      throw ParameterError("k: context space M^k does not fit in 64 bits");
    pow_[j] = pow_[j - 1] * m_;
  }

  std::uint64_t cells = pow_[k_];
  dense_ = cells <= kDenseCellLimit / m_;
  if (dense_) {
    counts_.assign(cells * m_, 0);
    totals_.assign(cells, 0);
    sums_.assign(cells, 0.0);
  }

  const std::uint64_t table_n = std::min<std::uint64_t>(n_, kXlogTableLimit);
  xlog_.resize(table_n + 1);
  xlog_[0] = 0.0;
  for (std::uint64_t v = 1; v <= table_n; ++v)
    xlog_[v] = static_cast<double>(v) * std::log2(static_cast<double>(v));

  for (std::size_t p = k_; p < n_; ++p) {
    if (z[p] >= m_) throw ParameterError("z: symbol out of range");
    bump(pack_context(z, p), z[p], +1);
  }
  for (std::size_t p = 0; p < std::min<std::size_t>(k_, n_); ++p)
    if (z[p] >= m_) throw ParameterError("z: symbol out of range");
  rebuild_caches();
}

std::uint64_t ContextCountTable::pack_context(std::span<const Symbol> z,
                                              std::size_t pos) const {
  // Context of position pos is z[pos-k .. pos-1]; most recent symbol is the
  // least significant digit.
  std::uint64_t ctx = 0;
  for (std::uint32_t j = 1; j <= k_; ++j)
    ctx += static_cast<std::uint64_t>(z[pos - j]) * pow_[j - 1];
  return ctx;
}

std::uint32_t ContextCountTable::row_count(std::uint64_t row, Symbol a) const {
  if (dense_) return counts_[row * m_ + a];
  auto it = sparse_.find(row);
  if (it == sparse_.end()) return 0;
  return it->second.counts[a];
}

void ContextCountTable::row_stats(std::uint64_t row, std::uint32_t& total,
                                  double& sum) const {
  if (dense_) {
    total = totals_[row];
    sum = sums_[row];
    return;
  }
  auto it = sparse_.find(row);
  if (it == sparse_.end()) {
    total = 0;
    sum = 0.0;
  } else {
    total = it->second.total;
    sum = it->second.sum_mlogm;
  }
}

void ContextCountTable::bump(std::uint64_t row, Symbol a, int delta) {
  if (dense_) {
    std::uint32_t& c = counts_[row * m_ + a];
    const std::uint32_t before = c;
    c = static_cast<std::uint32_t>(static_cast<std::int64_t>(c) + delta);
    sums_[row] += xlogx(c) - xlogx(before);
    totals_[row] = static_cast<std::uint32_t>(
        static_cast<std::int64_t>(totals_[row]) + delta);
    return;
  }
  auto it = sparse_.find(row);
  if (it == sparse_.end()) {
    it = sparse_.emplace(row, SparseRow{}).first;
    it->second.counts.assign(m_, 0);
  }
  SparseRow& r = it->second;
  std::uint32_t& c = r.counts[a];
  const std::uint32_t before = c;
  c = static_cast<std::uint32_t>(static_cast<std::int64_t>(c) + delta);
  r.sum_mlogm += xlogx(c) - xlogx(before);
  r.total = static_cast<std::uint32_t>(static_cast<std::int64_t>(r.total) + delta);
  if (r.total == 0) sparse_.erase(it);
}

void ContextCountTable::rebuild_caches() {
  double nh = 0.0;
  if (dense_) {
    const std::uint64_t rows = pow_[k_];
    for (std::uint64_t r = 0; r < rows; ++r) {
      std::uint32_t total = 0;
      double sum = 0.0;
      for (std::uint32_t a = 0; a < m_; ++a) {
        const std::uint32_t c = counts_[r * m_ + a];
        total += c;
        sum += xlogx(c);
      }
      totals_[r] = total;
      sums_[r] = sum;
      nh += xlogx(total) - sum;
    }
  } else {
    for (auto& [row, r] : sparse_) {
      std::uint32_t total = 0;
      double sum = 0.0;
      for (std::uint32_t a = 0; a < m_; ++a) {
        total += r.counts[a];
        sum += xlogx(r.counts[a]);
      }
      r.total = total;
      r.sum_mlogm = sum;
      nh += xlogx(total) - sum;
    }
  }
  nh_ = std::max(0.0, nh);
}

void ContextCountTable::gather_windows(std::span<const Symbol> z, std::size_t i,
                                       Windows& w) const {
  w.has_self = i >= k_;
  if (w.has_self) w.self_row = pack_context(z, i);
  w.count = 0;
  const std::size_t last = std::min<std::size_t>(n_ - 1, i + k_);
  for (std::size_t p = i + 1; p <= last; ++p) {
    if (p < k_) continue;
    const int idx = w.count++;
    w.row[idx] = pack_context(z, p);
    w.sym[idx] = z[p];
    w.weight[idx] = pow_[p - i - 1];
  }
}

double ContextCountTable::eval_delta(const Windows& w, Symbol a, Symbol b) const {
  if (a == b) return 0.0;

  // Assemble the (row, symbol, +-1) edits this substitution causes.
  struct Upd {
    std::uint64_t row;
    Symbol sym;
    int delta;
  };
  Upd upd[2 * (kMaxDepth + 1)];
  int ne = 0;
  if (w.has_self) {
    upd[ne++] = {w.self_row, a, -1};
    upd[ne++] = {w.self_row, b, +1};
  }
  const std::int64_t shift = static_cast<std::int64_t>(b) - static_cast<std::int64_t>(a);
  for (int j = 0; j < w.count; ++j) {
    const std::uint64_t nrow = static_cast<std::uint64_t>(
        static_cast<std::int64_t>(w.row[j]) + shift * static_cast<std::int64_t>(w.weight[j]));
    upd[ne++] = {w.row[j], w.sym[j], -1};
    upd[ne++] = {nrow, w.sym[j], +1};
  }

  // Group edits by row, then by symbol within the row, and re-derive each
  // affected row's entropy contribution C = T*log2(T) - sum_a m*log2(m).
  double dc = 0.0;
  for (int ei = 0; ei < ne; ++ei) {
    bool seen = false;
    for (int ej = 0; ej < ei; ++ej)
      if (upd[ej].row == upd[ei].row) {
        seen = true;
        break;
      }
    if (seen) continue;
    const std::uint64_t row = upd[ei].row;
    std::uint32_t total;
    double sum;
    row_stats(row, total, sum);
    std::int64_t dt = 0;
    double ds = 0.0;
    for (int ej = ei; ej < ne; ++ej) {
      if (upd[ej].row != row) continue;
      bool sym_seen = false;
      for (int ek = ei; ek < ej; ++ek)
        if (upd[ek].row == row && upd[ek].sym == upd[ej].sym) {
          sym_seen = true;
          break;
        }
      if (sym_seen) continue;
      int net = 0;
      for (int ek = ej; ek < ne; ++ek)
        if (upd[ek].row == row && upd[ek].sym == upd[ej].sym) net += upd[ek].delta;
      if (net == 0) continue;
      const std::uint32_t mold = row_count(row, upd[ej].sym);
      const std::uint64_t mnew =
          static_cast<std::uint64_t>(static_cast<std::int64_t>(mold) + net);
      ds += xlogx(mnew) - xlogx(mold);
      dt += net;
    }
    const std::uint64_t tnew =
        static_cast<std::uint64_t>(static_cast<std::int64_t>(total) + dt);
    dc += (xlogx(tnew) - (sum + ds)) - (xlogx(total) - sum);
  }
  return dc;
}

double ContextCountTable::delta_nh(std::span<const Symbol> z, std::size_t i,
                                   Symbol b) const {
  if (i >= n_) throw ParameterError("i: position out of range");
  if (b >= m_) throw ParameterError("b: symbol out of range");
  Windows w;
  gather_windows(z, i, w);
  return eval_delta(w, z[i], b);
}

double ContextCountTable::delta_entropy(std::span<const Symbol> z, std::size_t i,
                                        Symbol b) const {
  return delta_nh(z, i, b) / static_cast<double>(n_);
}

void ContextCountTable::delta_nh_all(std::span<const Symbol> z, std::size_t i,
                                     std::span<double> out) const {
  if (i >= n_) throw ParameterError("i: position out of range");
  Windows w;
  gather_windows(z, i, w);
  const Symbol a = z[i];
  for (Symbol b = 0; b < m_; ++b) out[b] = (b == a) ? 0.0 : eval_delta(w, a, b);
}

void ContextCountTable::apply_delta(const Windows& w, Symbol a, Symbol b) {
  if (w.has_self) {
    bump(w.self_row, a, -1);
    bump(w.self_row, b, +1);
  }
  const std::int64_t shift = static_cast<std::int64_t>(b) - static_cast<std::int64_t>(a);
  for (int j = 0; j < w.count; ++j) {
    const std::uint64_t nrow = static_cast<std::uint64_t>(
        static_cast<std::int64_t>(w.row[j]) + shift * static_cast<std::int64_t>(w.weight[j]));
    bump(w.row[j], w.sym[j], -1);
    bump(nrow, w.sym[j], +1);
  }
}

void ContextCountTable::apply_substitution(std::span<Symbol> z, std::size_t i,
                                           Symbol b) {
  if (i >= n_) throw ParameterError("i: position out of range");
  if (b >= m_) throw ParameterError("b: symbol out of range");
  const Symbol a = z[i];
  if (a == b) return;
  Windows w;
  gather_windows(z, i, w);
  nh_ += eval_delta(w, a, b);
  apply_delta(w, a, b);
  z[i] = b;
}

std::uint64_t ContextCountTable::count_at(std::span<const Symbol> ctx,
                                          Symbol a) const {
  if (ctx.size() != k_) throw ParameterError("ctx: wrong context length");
  std::uint64_t row = 0;
  for (std::uint32_t j = 0; j < k_; ++j)
    row += static_cast<std::uint64_t>(ctx[k_ - 1 - j]) * pow_[j];
  return row_count(row, a);
}

std::map<std::vector<Symbol>, std::vector<std::uint64_t>>
ContextCountTable::rows() const {
  std::map<std::vector<Symbol>, std::vector<std::uint64_t>> result;
  auto unpack = [&](std::uint64_t row) {
    std::vector<Symbol> ctx(k_);
    for (std::uint32_t j = 0; j < k_; ++j) {
      ctx[k_ - 1 - j] = static_cast<Symbol>(row % m_);
      row /= m_;
    }
    return ctx;
  };
  auto add_row = [&](std::uint64_t row, auto&& get) {
    std::vector<std::uint64_t> counts(m_);
    std::uint64_t total = 0;
    for (std::uint32_t a = 0; a < m_; ++a) {
      counts[a] = get(a);
      total += counts[a];
    }
    if (total > 0) result.emplace(unpack(row), std::move(counts));
  };
  if (dense_) {
    for (std::uint64_t r = 0; r < pow_[k_]; ++r)
      add_row(r, [&](std::uint32_t a) { return counts_[r * m_ + a]; });
  } else {
    for (const auto& [row, data] : sparse_)
      add_row(row, [&](std::uint32_t a) { return data.counts[a]; });
  }
  return result;
}

EntropyValue conditional_entropy(std::span<const Symbol> z, std::uint32_t k,
                                 std::uint32_t m) {
  return ContextCountTable(z, k, m).conditional_entropy();
}

}  // namespace mclc
