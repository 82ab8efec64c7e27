#include "dlq/gf2.h"

#include <bit>
#include <stdexcept>

namespace dlq {

BitRow::BitRow(std::size_t bits) : bits_(bits), words_((bits + 63) / 64, 0) {}

void BitRow::xor_with(const BitRow& other) noexcept {
  for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= other.words_[w];
}

bool BitRow::any() const noexcept {
  for (auto w : words_) {
    if (w) return true;
  }
  return false;
}

std::size_t BitRow::weight() const noexcept {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

std::size_t BitRow::overlap(const BitRow& other) const noexcept {
  std::size_t total = 0;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    total += static_cast<std::size_t>(std::popcount(words_[w] & other.words_[w]));
  }
  return total;
}

std::size_t BitRow::dot(const BitRow& other) const noexcept { return overlap(other) & 1U; }

void RowSpace::reduce(BitRow& row) const {
  for (std::size_t k = 0; k < basis_.size(); ++k) {
    if (row.get(pivots_[k])) row.xor_with(basis_[k]);
  }
}

bool RowSpace::insert(BitRow row) {
  if (row.size() != bits_) throw std::invalid_argument("Row width does not match the row space");
  reduce(row);
  for (std::size_t i = 0; i < bits_; ++i) {
    if (!row.get(i)) continue;
    // Keep the basis fully reduced so membership needs one pass.
    for (auto& b : basis_) {
      if (b.get(i)) b.xor_with(row);
    }
    basis_.push_back(std::move(row));
    pivots_.push_back(i);
    return true;
  }
  return false;
}

bool RowSpace::contains(BitRow row) const {
  reduce(row);
  return !row.any();
}

std::size_t gf2_rank(const std::vector<BitRow>& rows) {
  if (rows.empty()) return 0;
  RowSpace space(rows.front().size());
  for (const auto& r : rows) space.insert(r);
  return space.rank();
}

std::vector<BitRow> gf2_kernel(const std::vector<BitRow>& rows, std::size_t bits) {
  std::vector<BitRow> m = rows;
  std::vector<std::size_t> pivot_cols;
  std::size_t r = 0;
  for (std::size_t c = 0; c < bits && r < m.size(); ++c) {
    std::size_t p = r;
    while (p < m.size() && !m[p].get(c)) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[r]);
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (i != r && m[i].get(c)) m[i].xor_with(m[r]);
    }
    pivot_cols.push_back(c);
    ++r;
  }
  std::vector<bool> is_pivot(bits, false);
  for (auto c : pivot_cols) is_pivot[c] = true;
  std::vector<BitRow> basis;
  for (std::size_t f = 0; f < bits; ++f) {
    if (is_pivot[f]) continue;
    BitRow v(bits);
    v.set(f);
    for (std::size_t k = 0; k < pivot_cols.size(); ++k) {
      if (m[k].get(f)) v.set(pivot_cols[k]);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

}  // namespace dlq
