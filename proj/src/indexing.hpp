#pragma once

#include <cstdint>
#include <vector>

namespace fiberent {

// Dense lexicographic indexing of words over {0..n-1}. A length-(r+1) block
// splits as (context, symbol): block = context * n + symbol.

inline std::int64_t pow_int(int base, int exp) {
  std::int64_t v = 1;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

inline std::int64_t word_index(const std::vector<int>& symbols, int n) {
  std::int64_t idx = 0;
  for (int s : symbols) idx = idx * n + s;
  return idx;
}

inline std::vector<int> word_symbols(std::int64_t idx, int n, int len) {
  std::vector<int> out(len);
  for (int i = len - 1; i >= 0; --i) {
    out[i] = static_cast<int>(idx % n);
    idx /= n;
  }
  return out;
}

// Suffix of length r of the block (context, symbol), as a context index.
inline std::int64_t suffix_context(std::int64_t context, int symbol, int n, int r) {
  const std::int64_t drop = pow_int(n, r - 1);
  return (context % drop) * n + symbol;
}

// Block (alpha, context): prepend symbol alpha to context, drop nothing.
// Index of the length-(r+1) word alpha c_1 ... c_r.
inline std::int64_t prepend_block(int alpha, std::int64_t context, int n, int r) {
  return static_cast<std::int64_t>(alpha) * pow_int(n, r) + context;
}

}  // namespace fiberent
