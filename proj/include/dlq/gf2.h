#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dlq {

// Dense GF(2) row vector packed into 64-bit words.
class BitRow {
 public:
  BitRow() = default;
  explicit BitRow(std::size_t bits);

  std::size_t size() const noexcept { return bits_; }
  bool get(std::size_t i) const noexcept { return (words_[i >> 6] >> (i & 63)) & 1ULL; }
  void set(std::size_t i) noexcept { words_[i >> 6] |= 1ULL << (i & 63); }
  void flip(std::size_t i) noexcept { words_[i >> 6] ^= 1ULL << (i & 63); }
  void xor_with(const BitRow& other) noexcept;
  bool any() const noexcept;
  std::size_t weight() const noexcept;
  std::size_t dot(const BitRow& other) const noexcept;  // parity of overlap
  std::size_t overlap(const BitRow& other) const noexcept;
  bool operator==(const BitRow& other) const noexcept { return words_ == other.words_; }

 private:
  std::size_t bits_ = 0;
  std::vector<std::uint64_t> words_;
};

// Row-echelon basis supporting rank queries and span membership.
class RowSpace {
 public:
  explicit RowSpace(std::size_t bits) : bits_(bits) {}

  // Returns true when the row was independent of the current basis.
  bool insert(BitRow row);
  bool contains(BitRow row) const;
  std::size_t rank() const noexcept { return basis_.size(); }

 private:
  void reduce(BitRow& row) const;

  std::size_t bits_;
  std::vector<BitRow> basis_;
  std::vector<std::size_t> pivots_;
};

std::size_t gf2_rank(const std::vector<BitRow>& rows);

// Basis of {x : r.x = 0 for every row r}.
std::vector<BitRow> gf2_kernel(const std::vector<BitRow>& rows, std::size_t bits);

}  // namespace dlq
