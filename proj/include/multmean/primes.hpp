#pragma once

// Prime generation and factorization: segmented Eratosthenes for prime
// lists, a linear sieve for smallest-prime-factor tables, and SPF-driven
// factorization. Everything here is exact integer work.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace multmean {

struct PrimeList {
  uint64_t limit = 0;                // primes cover [2, limit]
  std::vector<uint64_t> primes;      // strictly increasing
};

namespace detail {

inline uint64_t isqrt_u64(uint64_t n) {
  if (n == 0) return 0;
  uint64_t r = static_cast<uint64_t>(std::sqrt(static_cast<double>(n)));
  while (r > 0 && r * r > n) --r;
  while ((r + 1) * (r + 1) <= n) ++r;
  return r;
}

// Plain odd-only sieve, fine for limits up to ~1e7 (used for base primes).
inline std::vector<uint64_t> small_primes(uint64_t limit) {
  std::vector<uint64_t> out;
  if (limit < 2) return out;
  out.push_back(2);
  if (limit < 3) return out;
  uint64_t half = (limit - 1) / 2;                 // index i <-> odd 2i+1, i >= 1
  std::vector<bool> comp(half + 1, false);
  for (uint64_t i = 1; (2 * i + 1) * (2 * i + 1) <= limit; ++i) {
    if (comp[i]) continue;
    uint64_t p = 2 * i + 1;
    for (uint64_t j = (p * p - 1) / 2; j <= half; j += p) comp[j] = true;
  }
  for (uint64_t i = 1; i <= half; ++i)
    if (!comp[i]) out.push_back(2 * i + 1);
  return out;
}

}  // namespace detail

// All primes <= limit. Segmented so the working set stays cache-sized;
// limit = 0 or 1 yields an empty list.
inline PrimeList sieve_primes(uint64_t limit) {
  PrimeList out;
  out.limit = limit;
  if (limit < 2) return out;
  if (limit <= 1u << 16) {
    out.primes = detail::small_primes(limit);
    return out;
  }

  uint64_t root = detail::isqrt_u64(limit);
  std::vector<uint64_t> base = detail::small_primes(root);

  // pi(x) < 1.26 x / ln x for x >= 17: reserve once, avoid regrowth.
  double dlim = static_cast<double>(limit);
  out.primes.reserve(static_cast<size_t>(1.26 * dlim / std::log(dlim)) + 16);
  for (uint64_t p : base) out.primes.push_back(p);

  const uint64_t seg = 1u << 18;
  std::vector<bool> comp(seg);
  for (uint64_t lo = root + 1; lo <= limit; lo += seg) {
    uint64_t hi = std::min(limit, lo + seg - 1);
    uint64_t len = hi - lo + 1;
    std::fill(comp.begin(), comp.begin() + len, false);
    for (uint64_t p : base) {
      if (p * p > hi) break;
      uint64_t start = ((lo + p - 1) / p) * p;
      if (start < p * p) start = p * p;
      for (uint64_t m = start; m <= hi; m += p) comp[m - lo] = true;
    }
    for (uint64_t i = 0; i < len; ++i)
      if (!comp[i]) out.primes.push_back(lo + i);
  }
  return out;
}

struct SpfTable {
  uint64_t limit = 0;
  std::vector<uint32_t> spf;   // spf[m] = smallest prime factor of m; spf[0] = spf[1] = 0
};

// Linear (Euler) sieve. 4 bytes per entry, so the practical ceiling is
// memory, not the uint32 cap checked here.
inline SpfTable spf_table(uint64_t limit) {
  if (limit < 2)
    throw std::invalid_argument("spf_table: limit must be at least 2");
  if (limit >= (uint64_t(1) << 32))
    throw std::length_error("spf_table: limit exceeds 32-bit entry range");

  SpfTable t;
  t.limit = limit;
  t.spf.assign(limit + 1, 0);
  std::vector<uint32_t> primes;
  primes.reserve(static_cast<size_t>(1.26 * static_cast<double>(limit) /
                                     std::log(static_cast<double>(limit + 1))) + 16);
  for (uint64_t m = 2; m <= limit; ++m) {
    if (t.spf[m] == 0) {
      t.spf[m] = static_cast<uint32_t>(m);
      primes.push_back(static_cast<uint32_t>(m));
    }
    for (uint32_t p : primes) {
      if (p > t.spf[m] || p * static_cast<uint64_t>(m) > limit) break;
      t.spf[p * m] = p;
    }
  }
  return t;
}

struct Factorization {
  uint64_t m = 1;
  std::vector<std::pair<uint64_t, uint32_t>> factors;  // (p, alpha), p ascending
};

inline Factorization factorize(uint64_t m, const SpfTable& table) {
  if (m < 1) throw std::invalid_argument("factorize: m must be positive");
  if (m > table.limit)
    throw std::out_of_range("factorize: m exceeds the table limit");
  Factorization f;
  f.m = m;
  while (m > 1) {
    uint64_t p = table.spf[m];
    uint32_t a = 0;
    do {
      m /= p;
      ++a;
    } while (m % p == 0);
    f.factors.emplace_back(p, a);
  }
  return f;
}

}  // namespace multmean
