#include "pdc/huffman.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <tuple>

namespace pdc {

namespace {
__extension__ using Kraft = unsigned __int128;
}  // namespace

HuffmanTable HuffmanTable::from_lengths(std::vector<std::uint8_t> lengths) {
  HuffmanTable t;
  t.lengths_ = std::move(lengths);
  Kraft kraft = 0;
  for (const std::uint8_t len : t.lengths_) {
    require(len <= kMaxCodeLength, ErrorCode::Coding, "code length above 64");
    if (len == 0) continue;
    kraft += Kraft{1} << (kMaxCodeLength - len);
    t.max_length_ = std::max<int>(t.max_length_, len);
  }
  require(t.max_length_ > 0, ErrorCode::Coding, "code table has no used symbols");
  require(kraft <= (Kraft{1} << kMaxCodeLength), ErrorCode::Coding,
          "code lengths violate the Kraft inequality");

  const auto n = static_cast<std::uint32_t>(t.lengths_.size());
  for (std::uint32_t s = 0; s < n; ++s) {
    if (t.lengths_[s] != 0) t.sorted_.push_back(s);
  }
  std::stable_sort(t.sorted_.begin(), t.sorted_.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return t.lengths_[a] < t.lengths_[b]; });

  const auto levels = static_cast<std::size_t>(t.max_length_) + 1;
  t.first_code_.assign(levels, 0);
  t.first_index_.assign(levels, 0);
  t.count_.assign(levels, 0);
  t.codes_.assign(n, 0);
  std::uint64_t code = 0;
  int prev_len = 0;
  for (std::size_t i = 0; i < t.sorted_.size(); ++i) {
    const std::uint32_t s = t.sorted_[i];
    const int len = t.lengths_[s];
    if (len != prev_len) {
      code = prev_len == 0 ? 0 : code << (len - prev_len);
      t.first_code_[static_cast<std::size_t>(len)] = code;
      t.first_index_[static_cast<std::size_t>(len)] = static_cast<std::uint32_t>(i);
      prev_len = len;
    }
    t.codes_[s] = code++;
    ++t.count_[static_cast<std::size_t>(len)];
  }
  return t;
}

double HuffmanTable::kraft_sum() const {
  double s = 0.0;
  for (const std::uint8_t len : lengths_) {
    if (len != 0) s += std::ldexp(1.0, -static_cast<int>(len));
  }
  return s;
}

HuffmanTable huffman_build(std::span<const std::uint64_t> freqs) {
  const std::size_t n = freqs.size();
  std::vector<std::uint8_t> lengths(n, 0);
  // (weight, id); ids < n are leaves.
  using Node = std::tuple<std::uint64_t, std::size_t>;
  std::priority_queue<Node, std::vector<Node>, std::greater<>> heap;
  std::vector<std::size_t> parent;
  parent.reserve(2 * n);
  for (std::size_t s = 0; s < n; ++s) {
    parent.push_back(s);
    if (freqs[s] > 0) heap.emplace(freqs[s], s);
  }
  require(!heap.empty(), ErrorCode::InvalidInput, "histogram has no nonzero frequency");
  if (heap.size() == 1) {
    lengths[std::get<1>(heap.top())] = 1;
    return HuffmanTable::from_lengths(std::move(lengths));
  }
  while (heap.size() > 1) {
    const auto [wa, a] = heap.top();
    heap.pop();
    const auto [wb, b] = heap.top();
    heap.pop();
    const std::size_t id = parent.size();
    parent.push_back(id);
    parent[a] = id;
    parent[b] = id;
    heap.emplace(wa + wb, id);
  }
  const std::size_t root = std::get<1>(heap.top());
  std::vector<int> depth(parent.size(), 0);
  for (std::size_t id = parent.size(); id-- > 0;) {
    if (id != root) depth[id] = depth[parent[id]] + 1;
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (freqs[s] == 0) continue;
    require(depth[s] <= kMaxCodeLength, ErrorCode::Coding, "optimal code exceeds 64 bits");
    lengths[s] = static_cast<std::uint8_t>(depth[s]);
  }
  return HuffmanTable::from_lengths(std::move(lengths));
}

std::uint64_t coded_bits(std::span<const std::uint64_t> freqs, const HuffmanTable& table) {
  require(freqs.size() <= table.alphabet_size(), ErrorCode::Coding, "histogram larger than the table");
  std::uint64_t bits = 0;
  for (std::size_t s = 0; s < freqs.size(); ++s) {
    if (freqs[s] == 0) continue;
    require(table.covers(static_cast<std::uint32_t>(s)), ErrorCode::Coding, "symbol not covered by the table");
    bits += freqs[s] * static_cast<std::uint64_t>(table.length(static_cast<std::uint32_t>(s)));
  }
  return bits;
}

BitBuffer huffman_encode(std::span<const std::uint32_t> symbols, const HuffmanTable& table) {
  BitBuffer out;
  std::uint8_t acc = 0;
  int filled = 0;
  for (const std::uint32_t s : symbols) {
    require(table.covers(s), ErrorCode::Coding, "symbol " + std::to_string(s) + " not covered by the table");
    const int len = table.length(s);
    const std::uint64_t code = table.code(s);
    for (int b = len - 1; b >= 0; --b) {
      acc = static_cast<std::uint8_t>((acc << 1) | ((code >> b) & 1U));
      if (++filled == 8) {
        out.bytes.push_back(acc);
        acc = 0;
        filled = 0;
      }
    }
    out.bit_count += static_cast<std::uint64_t>(len);
  }
  if (filled > 0) out.bytes.push_back(static_cast<std::uint8_t>(acc << (8 - filled)));
  return out;
}

BitBuffer huffman_encode(const IndexMap& indices, const HuffmanTable& table) {
  return huffman_encode(std::span(indices.indices.data(), static_cast<std::size_t>(indices.indices.size())), table);
}

IndexVector huffman_decode(std::span<const std::uint8_t> bits, const HuffmanTable& table,
                           std::uint64_t n_symbols, std::uint64_t* bits_used) {
  require(table.max_length() > 0, ErrorCode::Coding, "empty code table");
  const std::uint64_t total_bits = static_cast<std::uint64_t>(bits.size()) * 8;
  std::uint64_t pos = 0;
  auto next_bit = [&]() -> int {
    if (pos >= total_bits) return -1;
    const int bit = (bits[pos >> 3] >> (7 - (pos & 7))) & 1;
    ++pos;
    return bit;
  };
  IndexVector out(static_cast<Index>(n_symbols));
  for (std::uint64_t i = 0; i < n_symbols; ++i) {
    const std::int64_t s = table.decode_one(next_bit);
    if (s == -1) fail(ErrorCode::Truncation, "bit stream ended after " + std::to_string(i) + " of " +
                                                 std::to_string(n_symbols) + " symbols");
    if (s == -2) fail(ErrorCode::Corruption, "invalid code word at bit " + std::to_string(pos));
    out(static_cast<Index>(i)) = static_cast<std::uint32_t>(s);
  }
  if (bits_used != nullptr) *bits_used = pos;
  return out;
}

}  // namespace pdc
