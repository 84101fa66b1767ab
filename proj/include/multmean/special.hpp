#pragma once

// Real-argument zeta machinery: Euler-Maclaurin zeta(s), the prime zeta
// function P(s) via the Moebius / log-zeta identity
//   P(s) = sum_{n>=1} mu(n)/n * log zeta(n s),
// and its "tail" variant with all Euler factors p <= P0 stripped:
//   log zeta_{>P0}(m) = log zeta(m) + sum_{p<=P0} log(1 - p^-m).
// The n-sum is cut at n*s > 64, where log zeta(ns) < 2^-64 is below double
// resolution; the core computes zeta(s) - 1 so log1p keeps full relative
// precision at large arguments.

#include "multmean/numeric.hpp"
#include "multmean/primes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace multmean {

namespace detail {

// B_{2j} / (2j)! for the Euler-Maclaurin correction, j = 1..4.
inline constexpr std::array<double, 4> kBernoulliOverFact = {
    1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0};

// zeta(s) - 1 for s > 1: direct sum k^-s from k = 2 up to at most 1e4 terms,
// then tail corrections N^{1-s}/(s-1) - N^{-s}/2 + Bernoulli terms. The
// asymptotic series is cut at its smallest term (it eventually grows), and
// the direct sum exits early once terms stop mattering at ~1e-20 relative.
inline double zeta_minus_one(double s) {
  const uint64_t n_cap = 10000;
  CompensatedSum acc;
  uint64_t n = 1;                    // last k actually summed
  for (uint64_t k = 2; k <= n_cap; ++k) {
    double term = std::pow(static_cast<double>(k), -s);
    acc.add(term);
    n = k;
    if (term < 1e-20 * (1.0 + acc.value()) && k >= 16) break;
  }
  double nd = static_cast<double>(n);
  double npow = std::pow(nd, -s);    // N^{-s}
  acc.add(npow * nd / (s - 1.0));    // integral tail N^{1-s}/(s-1)
  acc.add(-0.5 * npow);

  // term_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * N^{-s-2j+1}
  double rising = s;                 // s(s+1)...(s+2j-2)
  double npow_odd = npow / nd;       // N^{-s-(2j-1)}
  double prev = std::numeric_limits<double>::infinity();
  for (size_t j = 0; j < kBernoulliOverFact.size(); ++j) {
    double term = kBernoulliOverFact[j] * rising * npow_odd;
    if (std::abs(term) >= prev) break;   // asymptotic series turned the corner
    acc.add(term);
    prev = std::abs(term);
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    npow_odd /= nd * nd;
  }
  return acc.value();
}

// mu(n) for the small n needed by the log-zeta sum (n <= 64).
inline int mobius_small(uint64_t n) {
  int m = 1;
  for (uint64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    n /= p;
    if (n % p == 0) return 0;
    m = -m;
  }
  if (n > 1) m = -m;
  return m;
}

inline void check_prime_zeta_domain(double s, const char* who) {
  if (!(s > 1.0 + 1e-6))
    throw std::domain_error(std::string(who) + ": requires s > 1 + 1e-6");
}

}  // namespace detail

// zeta(s), s > 1 (+1e-6 guard band). Relative error is a few 1e-16 for
// s >= 1.5 and degrades gracefully toward the pole.
inline double riemann_zeta(double s) {
  if (!(s > 1.0 + 1e-6))
    throw std::domain_error("riemann_zeta: requires s > 1 + 1e-6");
  return 1.0 + detail::zeta_minus_one(s);
}

inline double euler_gamma() { return std::numbers::egamma_v<double>; }

// P(s) = sum_p p^-s, absolute error well under 1e-12 on s in (1+1e-6, 64].
inline double prime_zeta(double s) {
  detail::check_prime_zeta_domain(s, "prime_zeta");
  CompensatedSum acc;
  for (uint64_t n = 1; static_cast<double>(n) * s <= 64.0; ++n) {
    int mu = detail::mobius_small(n);
    if (mu == 0) continue;
    double lz = std::log1p(detail::zeta_minus_one(static_cast<double>(n) * s));
    acc.add(mu * lz / static_cast<double>(n));
  }
  return acc.value();
}

namespace detail {

// log zeta_{>p0}(m) for every m in [2, 64] in one pass over the primes
// <= p0: deficits[m] = log zeta(m) + sum_{p<=p0} log(1 - p^-m). Primes up
// to 100 run the full exponent range: high-order series coefficients get
// multiplied by ~phi^k downstream, so small-prime powers may not be dropped
// early. For larger p the cutoff residue is harmless (p^-m < 1e-19 with
// p > 100 stays negligible under any amplification the library applies).
inline std::vector<double> log_zeta_above(const std::vector<uint64_t>& head_primes) {
  const int m_max = 64;
  std::vector<CompensatedSum> deficit(static_cast<size_t>(m_max) + 1);
  for (uint64_t p : head_primes) {
    double inv = 1.0 / static_cast<double>(p);
    double u = inv * inv;
    bool full_depth = (p <= 100);
    for (int m = 2; m <= m_max && (full_depth || u >= 1e-19); ++m, u *= inv) {
      if (u == 0.0) break;
      deficit[static_cast<size_t>(m)].add(std::log1p(-u));
    }
  }
  std::vector<double> out(static_cast<size_t>(m_max) + 1, 0.0);
  for (int m = 2; m <= m_max; ++m)
    out[static_cast<size_t>(m)] =
        std::log1p(zeta_minus_one(static_cast<double>(m))) +
        deficit[static_cast<size_t>(m)].value();
  return out;
}

}  // namespace detail

// P(s) restricted to primes > p0. p0 <= 1 degenerates to prime_zeta(s).
// Only integer multiples n*s <= 64 contribute, so s is effectively capped
// like prime_zeta; result clamped at 0 against rounding noise when the true
// tail is below ~1e-15.
inline double prime_zeta_tail(double s, uint64_t p0) {
  detail::check_prime_zeta_domain(s, "prime_zeta_tail");
  if (p0 <= 1) return prime_zeta(s);
  PrimeList head = sieve_primes(p0);
  CompensatedSum acc;
  for (uint64_t n = 1; static_cast<double>(n) * s <= 64.0; ++n) {
    int mu = detail::mobius_small(n);
    if (mu == 0) continue;
    double m = static_cast<double>(n) * s;
    double lz = std::log1p(detail::zeta_minus_one(m));
    CompensatedSum def;
    for (uint64_t p : head.primes) {
      double u = std::pow(static_cast<double>(p), -m);
      if (u < 1e-19 && p > 100) break;  // primes ascend; the rest matter even less
      if (u > 0.0) def.add(std::log1p(-u));
    }
    acc.add(mu * (lz + def.value()) / static_cast<double>(n));
  }
  return std::max(acc.value(), 0.0);
}

// P(k) for k = 2..k_max in one shot, optionally with the head primes <= p0
// removed. Sharing the prime pass makes this much cheaper than k_max - 1
// separate prime_zeta_tail calls when p0 is large.
struct PrimeZetaTable {
  int k_max = 0;
  uint64_t p0 = 0;                    // 0 or 1: plain P(k)
  std::vector<double> values;         // values[k], entries 0..k_max; [0],[1] unused
  std::vector<double> error_bounds;   // absolute, same indexing

  double at(int k) const {
    if (k < 2 || k > k_max)
      throw std::out_of_range("PrimeZetaTable::at: k outside [2, k_max]");
    return values[static_cast<size_t>(k)];
  }
};

inline PrimeZetaTable prime_zeta_table(int k_max, uint64_t p0 = 0) {
  if (k_max < 2 || k_max > 64)
    throw std::invalid_argument("prime_zeta_table: k_max must be in [2, 64]");
  PrimeZetaTable t;
  t.k_max = k_max;
  t.p0 = (p0 <= 1) ? 0 : p0;
  t.values.assign(static_cast<size_t>(k_max) + 1, 0.0);
  t.error_bounds.assign(static_cast<size_t>(k_max) + 1, 0.0);

  std::vector<double> lz(65, 0.0);
  size_t head_count = 0;
  if (t.p0 == 0) {
    for (int m = 2; m <= 64; ++m)
      lz[static_cast<size_t>(m)] =
          std::log1p(detail::zeta_minus_one(static_cast<double>(m)));
  } else {
    PrimeList head = sieve_primes(t.p0);
    head_count = head.primes.size();
    lz = detail::log_zeta_above(head.primes);
  }

  for (int k = 2; k <= k_max; ++k) {
    CompensatedSum acc;
    for (int n = 1; n * k <= 64; ++n) {
      int mu = detail::mobius_small(static_cast<uint64_t>(n));
      if (mu == 0) continue;
      acc.add(mu * lz[static_cast<size_t>(n * k)] / n);
    }
    double v = acc.value();
    if (t.p0 != 0 && v < 0.0) v = 0.0;
    t.values[static_cast<size_t>(k)] = v;
    // Error model: rounding scales with zeta(k)-1 (the largest intermediate,
    // also the cancellation ceiling when p0 strips nearly everything), the
    // head pass adds noise ~sqrt(pi(p0)) ulps, and dropped p>100 powers
    // contribute an absolute residue that dies off like 4^-k. Keeping the
    // bound k-decaying matters: consumers weight entry k by ~phi^k.
    double zk = detail::zeta_minus_one(static_cast<double>(k));
    double droppage = 5e-16 * std::pow(4.0, -std::max(0, k - 4));
    t.error_bounds[static_cast<size_t>(k)] =
        zk * (1e-14 + 1e-17 * std::sqrt(static_cast<double>(head_count))) +
        droppage;
  }
  return t;
}

}  // namespace multmean
