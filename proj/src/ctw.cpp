#include "mclc/ctw.hpp"

#include <algorithm>
#include <cmath>

namespace mclc {

namespace {

constexpr double kInvLn2 = 1.4426950408889634074;

// log2(2^x + 2^y), stable.
double log2_add(double x, double y) {
  if (x < y) std::swap(x, y);
  const double d = y - x;
  if (d < -60.0) return x;
  return x + std::log1p(std::exp2(d)) * kInvLn2;
}

}  // namespace

CtwModel::CtwModel(std::uint32_t depth, std::uint32_t m) : depth_(depth), m_(m) {
  if (m_ < 1) throw ParameterError("M: alphabet size must be >= 1");
  if (m_ > (1u << 20)) throw ParameterError("M: alphabet size too large");
  if (depth_ > 48) throw ParameterError("D: context tree depth too large");
  nodes_.emplace_back();  // root
}

std::uint32_t CtwModel::count_of(const Node& node, Symbol a) const {
  const auto it = std::lower_bound(
      node.counts.begin(), node.counts.end(), a,
      [](const auto& e, Symbol s) { return e.first < s; });
  if (it == node.counts.end() || it->first != a) return 0;
  return it->second;
}

std::uint32_t& CtwModel::count_slot(Node& node, Symbol a) {
  auto it = std::lower_bound(node.counts.begin(), node.counts.end(), a,
                             [](const auto& e, Symbol s) { return e.first < s; });
  if (it == node.counts.end() || it->first != a)
    it = node.counts.insert(it, {a, 0});
  return it->second;
}

double CtwModel::log2_kt(const Node& node, Symbol a) const {
  const double num = static_cast<double>(count_of(node, a)) + 0.5;
  const double den = static_cast<double>(node.total) + 0.5 * m_;
  return std::log2(num / den);
}

void CtwModel::walk_lookup(std::int64_t* path) const {
  path[0] = 0;
  for (std::uint32_t d = 1; d <= depth_; ++d) {
    if (path[d - 1] < 0) {
      path[d] = -1;
      continue;
    }
    const Node& parent = nodes_[static_cast<std::size_t>(path[d - 1])];
    const Symbol c = context_symbol(d - 1);
    const auto it = std::lower_bound(
        parent.children.begin(), parent.children.end(), c,
        [](const auto& e, Symbol s) { return e.first < s; });
    path[d] = (it != parent.children.end() && it->first == c)
                  ? static_cast<std::int64_t>(it->second)
                  : -1;
  }
}

void CtwModel::walk_create(std::int64_t* path) {
  path[0] = 0;
  for (std::uint32_t d = 1; d <= depth_; ++d) {
    const Symbol c = context_symbol(d - 1);
    const std::size_t parent_idx = static_cast<std::size_t>(path[d - 1]);
    const auto& children = nodes_[parent_idx].children;
    const auto it =
        std::lower_bound(children.begin(), children.end(), c,
                         [](const auto& e, Symbol s) { return e.first < s; });
    if (it != children.end() && it->first == c) {
      path[d] = it->second;
      continue;
    }
    const std::size_t pos = static_cast<std::size_t>(it - children.begin());
    const std::uint32_t idx = static_cast<std::uint32_t>(nodes_.size());
    // A fresh node has log_pw = 0 (probability one), so the parent's child
    // product is unchanged by registering it.
    nodes_.emplace_back();
    auto& ch = nodes_[parent_idx].children;
    ch.insert(ch.begin() + static_cast<std::ptrdiff_t>(pos), {c, idx});
    path[d] = idx;
  }
}

void CtwModel::conditional(std::span<double> out) const {
  std::int64_t path[64];
  walk_lookup(path);

  const double root_lpw = nodes_[0].log_pw;
  double sum = 0.0;
  for (Symbol b = 0; b < m_; ++b) {
    double child_delta = 0.0;
    double lpw_child = 0.0;
    for (std::int32_t d = static_cast<std::int32_t>(depth_); d >= 0; --d) {
      const Node* nd =
          path[d] >= 0 ? &nodes_[static_cast<std::size_t>(path[d])] : nullptr;
      const double lpe = nd ? nd->log_pe : 0.0;
      const double cp = (nd ? nd->child_prod : 0.0) + child_delta;
      const double kt =
          nd ? log2_kt(*nd, b) : std::log2(0.5 / (0.5 * m_));
      const double lpe_new = lpe + kt;
      const double lpw_new =
          (d == static_cast<std::int32_t>(depth_)) ? lpe_new
                                                   : -1.0 + log2_add(lpe_new, cp);
      child_delta = lpw_new - (nd ? nd->log_pw : 0.0);
      lpw_child = lpw_new;
    }
    out[b] = std::exp2(lpw_child - root_lpw);
    sum += out[b];
  }
  for (Symbol b = 0; b < m_; ++b) out[b] /= sum;
}

void CtwModel::update(Symbol a) {
  if (a >= m_) throw ParameterError("symbol out of range");
  std::int64_t path[64];
  walk_create(path);

  double child_delta = 0.0;
  for (std::int32_t d = static_cast<std::int32_t>(depth_); d >= 0; --d) {
    Node& nd = nodes_[static_cast<std::size_t>(path[d])];
    nd.child_prod += child_delta;
    nd.log_pe += log2_kt(nd, a);
    ++count_slot(nd, a);
    ++nd.total;
    const double old_lpw = nd.log_pw;
    nd.log_pw = (d == static_cast<std::int32_t>(depth_))
                    ? nd.log_pe
                    : -1.0 + log2_add(nd.log_pe, nd.child_prod);
    child_delta = nd.log_pw - old_lpw;
  }
  history_.push_back(a);
}

Bitstream ctw_encode(std::span<const Symbol> z, std::uint32_t depth,
                     std::uint32_t m) {
  for (Symbol s : z)
    if (s >= m) throw ParameterError("symbol out of range");
  Bitstream bits;
  if (z.empty()) return bits;
  CtwModel model(depth, m);
  ArithmeticEncoder enc(bits);
  std::vector<double> pmf(m);
  std::vector<std::uint32_t> freq(m);
  for (Symbol s : z) {
    model.conditional(pmf);
    quantize_pmf(pmf, freq);
    std::uint32_t cum = 0;
    for (Symbol b = 0; b < s; ++b) cum += freq[b];
    enc.encode(cum, freq[s], kMaxArithTotal);
    model.update(s);
  }
  enc.finish();
  return bits;
}

std::vector<Symbol> ctw_decode(const Bitstream& bits, std::uint64_t n,
                               std::uint32_t depth, std::uint32_t m) {
  std::vector<Symbol> z;
  if (n == 0) return z;
  z.reserve(n);
  CtwModel model(depth, m);
  BitReader reader(bits);
  ArithmeticDecoder dec(reader);
  std::vector<double> pmf(m);
  std::vector<std::uint32_t> freq(m);
  for (std::uint64_t i = 0; i < n; ++i) {
    model.conditional(pmf);
    quantize_pmf(pmf, freq);
    const std::uint32_t target = dec.decode_target(kMaxArithTotal);
    std::uint32_t cum = 0;
    Symbol s = 0;
    while (s + 1 < m && cum + freq[s] <= target) cum += freq[s], ++s;
    dec.consume(cum, freq[s], kMaxArithTotal);
    model.update(s);
    z.push_back(s);
  }
  return z;
}

double ctw_ideal_codelength(std::span<const Symbol> z, std::uint32_t depth,
                            std::uint32_t m) {
  CtwModel model(depth, m);
  for (Symbol s : z) model.update(s);
  return -model.root_log2_prob();
}

void quantize_pmf(std::span<const double> pmf, std::span<std::uint32_t> freq) {
  const std::size_t m = pmf.size();
  const double scale = static_cast<double>(kMaxArithTotal - m);
  std::int64_t sum = 0;
  std::size_t imax = 0;
  for (std::size_t a = 0; a < m; ++a) {
    double p = pmf[a];
    if (!(p > 0.0)) p = 0.0;
    const std::int64_t f =
        std::max<std::int64_t>(1, std::llround(p * scale));
    freq[a] = static_cast<std::uint32_t>(f);
    sum += f;
    if (freq[a] > freq[imax]) imax = a;
  }
  std::int64_t diff = static_cast<std::int64_t>(kMaxArithTotal) - sum;
  while (diff != 0) {
    if (diff > 0) {
      freq[imax] = static_cast<std::uint32_t>(freq[imax] + diff);
      diff = 0;
    } else {
      const std::int64_t take =
          std::min<std::int64_t>(-diff, static_cast<std::int64_t>(freq[imax]) - 1);
      freq[imax] = static_cast<std::uint32_t>(freq[imax] - take);
      diff += take;
      if (diff != 0) {
        // current max exhausted; find the next largest entry
        std::size_t next = 0;
        for (std::size_t a = 0; a < m; ++a)
          if (freq[a] > freq[next]) next = a;
        if (freq[next] <= 1) throw ParameterError("pmf quantization failed");
        imax = next;
      }
    }
  }
}

}  // namespace mclc
