#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pdc/tensor.hpp"

namespace pdc {

inline constexpr int kMaxCodeLength = 64;

/// Canonical prefix code described by one length per symbol (0 = unused).
/// Codes of equal length are consecutive integers in symbol order, and
/// shorter codes precede longer ones.
class HuffmanTable {
 public:
  HuffmanTable() = default;
  /// Throws Coding when lengths exceed 64, violate the Kraft inequality, or
  /// leave every symbol unused.
  static HuffmanTable from_lengths(std::vector<std::uint8_t> lengths);

  std::size_t alphabet_size() const noexcept { return lengths_.size(); }
  const std::vector<std::uint8_t>& lengths() const noexcept { return lengths_; }
  int length(std::uint32_t symbol) const { return lengths_.at(symbol); }
  std::uint64_t code(std::uint32_t symbol) const { return codes_.at(symbol); }
  bool covers(std::uint32_t symbol) const noexcept { return symbol < lengths_.size() && lengths_[symbol] != 0; }
  int max_length() const noexcept { return max_length_; }

  /// Sum of 2^-len over used symbols.
  double kraft_sum() const;

  /// Decodes one symbol from a bit source returning -1 on exhaustion.
  template <typename NextBit>
  std::int64_t decode_one(NextBit&& next_bit) const;

  friend bool operator==(const HuffmanTable& a, const HuffmanTable& b) { return a.lengths_ == b.lengths_; }

 private:
  std::vector<std::uint8_t> lengths_;
  std::vector<std::uint64_t> codes_;
  int max_length_ = 0;
  // Per code length L: first canonical code, its offset into sorted_, count.
  std::vector<std::uint64_t> first_code_;
  std::vector<std::uint32_t> first_index_;
  std::vector<std::uint32_t> count_;
  std::vector<std::uint32_t> sorted_;
};

/// Optimal code lengths for `freqs`, canonicalized. Merge ties are broken by
/// (frequency, node id) with leaves numbered by symbol and internal nodes
/// after all leaves. A lone used symbol gets length 1.
HuffmanTable huffman_build(std::span<const std::uint64_t> freqs);

/// Total coded bits of a histogram under a table.
std::uint64_t coded_bits(std::span<const std::uint64_t> freqs, const HuffmanTable& table);

struct BitBuffer {
  std::vector<std::uint8_t> bytes;  // MSB-first, zero padded to a byte
  std::uint64_t bit_count = 0;      // before padding
};

BitBuffer huffman_encode(std::span<const std::uint32_t> symbols, const HuffmanTable& table);
BitBuffer huffman_encode(const IndexMap& indices, const HuffmanTable& table);

/// Decodes exactly n_symbols; trailing pad bits are ignored. Throws
/// Truncation when the bits run out first and Corruption on a bit pattern
/// that is not a code word. `bits_used`, when given, receives the number of
/// bits consumed.
IndexVector huffman_decode(std::span<const std::uint8_t> bits, const HuffmanTable& table,
                           std::uint64_t n_symbols, std::uint64_t* bits_used = nullptr);

template <typename NextBit>
std::int64_t HuffmanTable::decode_one(NextBit&& next_bit) const {
  std::uint64_t code = 0;
  for (int len = 1; len <= max_length_; ++len) {
    const int bit = next_bit();
    if (bit < 0) return -1;
    code = (code << 1) | static_cast<std::uint64_t>(bit);
    const auto l = static_cast<std::size_t>(len);
    if (count_[l] != 0 && code - first_code_[l] < count_[l]) {
      return sorted_[first_index_[l] + static_cast<std::uint32_t>(code - first_code_[l])];
    }
  }
  return -2;
}

}  // namespace pdc
