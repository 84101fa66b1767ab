#pragma once

// Exact summatory evaluation S(x) = sum_{m<=x} g(m) by blocked
// factorization: each block [lo, hi] is stripped by the primes <= sqrt(n),
// whatever residual survives is itself a prime. Functions whose normalized
// values live in {-1, 0, 1} accumulate in int64 (exact); everything else
// goes through Neumaier-compensated doubles. Blocks are merged in ascending
// order, so S is bit-identical for any thread count.

#include "multmean/functions.hpp"
#include "multmean/mean_value.hpp"
#include "multmean/numeric.hpp"
#include "multmean/primes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace multmean {

struct SummatoryReport {
  uint64_t x = 0;
  double s = 0.0;                    // S(x); exact when s_exact is set
  std::optional<int64_t> s_exact;    // integer-valued specs only
  double ratio = 0.0;                // S(x) / x, with the spec bound applied
  double predicted_mean = 0.0;
  double residual = 0.0;             // ratio - predicted_mean
};

struct SummatoryOptions {
  uint64_t block_size = 1u << 20;
  int threads = 0;                   // 0 = hardware concurrency
};

namespace detail {

struct BlockAccum {
  // Partial sums: running S over this block alone, recorded at each
  // checkpoint that lands inside the block, plus the block total.
  std::vector<double> at_checkpoints;
  std::vector<int64_t> at_checkpoints_i;
  double total = 0.0;
  int64_t total_i = 0;
};

// Factor every m in [lo, hi] against the base primes and fold g on the fly.
template <bool kIntegerValued>
void summatory_block(const MultiplicativeSpec& spec,
                     const std::vector<uint64_t>& base_primes, uint64_t lo,
                     uint64_t hi, const std::vector<uint64_t>& checkpoints,
                     BlockAccum& out) {
  const size_t len = static_cast<size_t>(hi - lo + 1);
  std::vector<uint32_t> rem(len);
  for (size_t i = 0; i < len; ++i) rem[i] = static_cast<uint32_t>(lo + i);

  std::vector<double> val;
  std::vector<int8_t> vali;
  if constexpr (kIntegerValued) vali.assign(len, 1);
  else val.assign(len, 1.0);

  for (uint64_t p : base_primes) {
    if (p * p > hi) break;
    uint64_t start = ((lo + p - 1) / p) * p;
    for (uint64_t m = start; m <= hi; m += p) {
      size_t i = static_cast<size_t>(m - lo);
      uint32_t r = rem[i] / static_cast<uint32_t>(p);
      uint32_t a = 1;
      while (r % p == 0) {
        r /= static_cast<uint32_t>(p);
        ++a;
      }
      rem[i] = r;
      if constexpr (kIntegerValued) {
        if (vali[i] != 0) {
          double gv = spec.g(p, a);
          vali[i] = static_cast<int8_t>(vali[i] * static_cast<int8_t>(gv));
        }
      } else {
        val[i] *= spec.g(p, a);
      }
    }
  }
  for (size_t i = 0; i < len; ++i) {
    if (rem[i] > 1) {
      if constexpr (kIntegerValued) {
        if (vali[i] != 0)
          vali[i] = static_cast<int8_t>(vali[i] *
                                        static_cast<int8_t>(spec.g(rem[i], 1)));
      } else {
        val[i] *= spec.g(rem[i], 1);
      }
    }
  }
  // m = 1 carries g(1) = 1 and is already correct: rem stays 1, value 1.

  CompensatedSum acc;
  int64_t acc_i = 0;
  size_t ci = 0;
  while (ci < checkpoints.size() && checkpoints[ci] < lo) ++ci;
  for (size_t i = 0; i < len; ++i) {
    if constexpr (kIntegerValued) acc_i += vali[i];
    else acc.add(val[i]);
    while (ci < checkpoints.size() && checkpoints[ci] == lo + i) {
      if constexpr (kIntegerValued) out.at_checkpoints_i.push_back(acc_i);
      else out.at_checkpoints.push_back(acc.value());
      ++ci;
    }
  }
  if constexpr (kIntegerValued) out.total_i = acc_i;
  else out.total = acc.value();
}

}  // namespace detail

// S at each checkpoint. Checkpoints must be strictly increasing and end
// within [1, n]; n is capped at 1e9 (the residual factor must fit 32 bits
// and runtimes stay sane). Reported ratios carry the spec's bound C, i.e.
// ratio = C * S_normalized(x) / x, matching what mean_value reports.
inline std::vector<SummatoryReport> summatory(const MultiplicativeSpec& spec,
                                              uint64_t n,
                                              const std::vector<uint64_t>& checkpoints,
                                              const SummatoryOptions& opts = {}) {
  if (n < 1) throw std::invalid_argument("summatory: n must be >= 1");
  if (n > 1000000000ull)
    throw std::invalid_argument("summatory: n is capped at 1e9");
  if (checkpoints.empty())
    throw std::invalid_argument("summatory: need at least one checkpoint");
  for (size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > n)
      throw std::invalid_argument("summatory: checkpoints must lie in [1, n]");
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1])
      throw std::invalid_argument("summatory: checkpoints must be increasing");
  }
  if (opts.block_size < 1024)
    throw std::invalid_argument("summatory: block size too small");

  uint64_t top = checkpoints.back();
  PrimeList base = sieve_primes(detail::isqrt_u64(top));
  uint64_t nblocks = (top + opts.block_size - 1) / opts.block_size;
  std::vector<detail::BlockAccum> blocks(static_cast<size_t>(nblocks));

  detail::parallel_blocks(nblocks, opts.threads, [&](uint64_t b) {
    uint64_t lo = b * opts.block_size + 1;
    uint64_t hi = std::min(top, lo + opts.block_size - 1);
    if (spec.integer_valued)
      detail::summatory_block<true>(spec, base.primes, lo, hi, checkpoints,
                                    blocks[static_cast<size_t>(b)]);
    else
      detail::summatory_block<false>(spec, base.primes, lo, hi, checkpoints,
                                     blocks[static_cast<size_t>(b)]);
  });

  std::vector<SummatoryReport> out;
  out.reserve(checkpoints.size());
  CompensatedSum prefix;
  int64_t prefix_i = 0;
  size_t ci = 0;
  for (uint64_t b = 0; b < nblocks && ci < checkpoints.size(); ++b) {
    const auto& blk = blocks[static_cast<size_t>(b)];
    uint64_t lo = b * opts.block_size + 1;
    uint64_t hi = std::min(top, lo + opts.block_size - 1);
    size_t local = 0;
    while (ci < checkpoints.size() && checkpoints[ci] >= lo &&
           checkpoints[ci] <= hi) {
      SummatoryReport rep;
      rep.x = checkpoints[ci];
      if (spec.integer_valued) {
        int64_t s = prefix_i + blk.at_checkpoints_i[local];
        rep.s_exact = s;
        rep.s = static_cast<double>(s);
      } else {
        rep.s = prefix.value() + blk.at_checkpoints[local];
      }
      rep.ratio = spec.bound * rep.s / static_cast<double>(rep.x);
      out.push_back(rep);
      ++ci;
      ++local;
    }
    if (spec.integer_valued) prefix_i += blk.total_i;
    else prefix.add(blk.total);
  }
  return out;
}

// Count of squarefree m <= n and its complement, by sieving p^2 multiples.
struct SquarefreeCensus {
  uint64_t squarefree = 0;
  uint64_t not_squarefree = 0;
};

inline SquarefreeCensus squarefree_census(uint64_t n) {
  if (n < 1) throw std::invalid_argument("squarefree_census: n must be >= 1");
  PrimeList base = sieve_primes(detail::isqrt_u64(n));
  const uint64_t block = 1u << 22;
  uint64_t count = 0;
  std::vector<bool> marked;
  for (uint64_t lo = 1; lo <= n; lo += block) {
    uint64_t hi = std::min(n, lo + block - 1);
    size_t len = static_cast<size_t>(hi - lo + 1);
    marked.assign(len, false);
    for (uint64_t p : base.primes) {
      uint64_t p2 = p * p;
      if (p2 > hi) break;
      uint64_t start = ((lo + p2 - 1) / p2) * p2;
      for (uint64_t m = start; m <= hi; m += p2) marked[m - lo] = true;
    }
    for (size_t i = 0; i < len; ++i)
      if (!marked[i]) ++count;
  }
  return SquarefreeCensus{count, n - count};
}

// Empirical check S(x)/x against the predicted mean at each checkpoint.
inline std::vector<SummatoryReport> compare(const MultiplicativeSpec& spec,
                                            uint64_t n,
                                            const std::vector<uint64_t>& checkpoints,
                                            const MeanValueOptions& mv_opts = {},
                                            const SummatoryOptions& s_opts = {}) {
  std::vector<SummatoryReport> reports = summatory(spec, n, checkpoints, s_opts);
  MeanValueResult mv = mean_value(spec, mv_opts);
  for (auto& rep : reports) {
    rep.predicted_mean = mv.value;
    rep.residual = rep.ratio - mv.value;
  }
  return reports;
}

}  // namespace multmean
