#pragma once

// Mean values of bounded multiplicative functions: the asymptotic density
//   lim S(n)/n = prod_p (1 - 1/p) sum_{alpha>=0} g(p^alpha) p^-alpha,
// which is 0 exactly when sum_p (1 - g(p))/p diverges. Routes:
//   - truncated Euler product over p <= prime_limit,
//   - series acceleration: exact head product for p <= P0 times
//     exp(-sum_{k>=2} b_k P(k, >P0)), with -log(1 - X) = sum b_k t^k
//     computed in exact rational arithmetic,
//   - a strongly-multiplicative shortcut using factors 1 - (1 - g(p))/p.
// The series route turns power-of-ten prime limits into spectral-factor
// convergence: each extra coefficient gains a factor ~P0 of accuracy.

#include "multmean/functions.hpp"
#include "multmean/numeric.hpp"
#include "multmean/primes.hpp"
#include "multmean/series.hpp"
#include "multmean/special.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace multmean {

// Series acceleration cannot be applied to this spec (no exact rule, a
// genuinely divergent linear term, or a local factor too close to 0).
struct AccelerationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A computation ran but failed its own consistency check (tail ratio test,
// cross-route disagreement). Results would be unreliable.
struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class MeanMethod { product, accelerated, strong, divergent_zero, indeterminate };

inline const char* to_string(MeanMethod m) {
  switch (m) {
    case MeanMethod::product: return "product";
    case MeanMethod::accelerated: return "accelerated";
    case MeanMethod::strong: return "strong";
    case MeanMethod::divergent_zero: return "divergent_zero";
    case MeanMethod::indeterminate: return "indeterminate";
  }
  return "?";
}

struct MeanValueResult {
  double value = 0.0;
  std::optional<double> c_constant;     // exponent of the accelerated tail
  MeanMethod method = MeanMethod::product;
  ConvergenceClass convergence_class = ConvergenceClass::indeterminate;
  std::optional<double> error_bound;    // absolute; nullopt = unknown
  uint64_t prime_limit = 0;             // 0 = route did not truncate a product
  int series_order = 0;                 // 0 = no series involved
  uint64_t hybrid_split = 0;            // P0; 1 = pure series, 0 = n/a
  double multiplier = 1.0;              // the spec's bound C, already applied
  std::string warning;                  // nonempty only for uncertified results
};

// One Euler factor (1 - 1/p) sum_{alpha} g(p^alpha) p^-alpha, computed in
// deficiency form 1 - (1-1/p) sum_{alpha>=1} (1 - g(p^alpha)) p^-alpha so
// that g == 1 contributes exactly 1.0. The alpha-sum stops once the
// geometric tail bound p^-alpha / (1 - 1/p) drops below eps.
inline double local_factor(const MultiplicativeSpec& spec, uint64_t p,
                           double eps = 1e-15) {
  if (p < 2) throw std::invalid_argument("local_factor: p must be a prime >= 2");
  if (!(eps > 0.0) || eps >= 0.5)
    throw std::invalid_argument("local_factor: eps must lie in (0, 0.5)");
  double t = 1.0 / static_cast<double>(p);
  double one_minus_t = 1.0 - t;
  double deficiency = 0.0;
  double pw = t;
  for (uint32_t a = 1; pw / one_minus_t >= eps; ++a) {
    deficiency += (1.0 - spec.g(p, a)) * pw;
    pw *= t;
  }
  double lf = 1.0 - one_minus_t * deficiency;
  return std::clamp(lf, -2.0, 2.0);
}

// Does sum_p (1 - g(p))/p converge? Declared classes win; exact series
// rules answer algebraically (X has a linear term iff divergent); otherwise
// a numeric heuristic compares the sum's growth on [1e3,1e4] and [1e4,1e5]
// against the log log x slope a genuinely divergent sum would track.
// Deliberately conservative: slow divergence lands on indeterminate rather
// than risking a wrong certified zero.
inline ConvergenceClass classify_convergence(const MultiplicativeSpec& spec,
                                             const PrimeList& primes) {
  if (spec.declared_class == DeclaredClass::convergent)
    return ConvergenceClass::convergent;
  if (spec.declared_class == DeclaredClass::divergent)
    return ConvergenceClass::divergent;
  if (spec.series_rule) {
    RationalSeries x = local_factor_to_X(*spec.series_rule, 2);
    return x.at(1) == 0 ? ConvergenceClass::convergent
                        : ConvergenceClass::divergent;
  }

  const uint64_t c1 = 1000, c2 = 10000, c3 = 100000;
  if (primes.limit < c3)
    throw std::invalid_argument(
        "classify_convergence: prime list must reach 1e5");
  CompensatedSum acc;
  double t1 = 0, t2 = 0;
  for (uint64_t p : primes.primes) {
    if (p > c3) break;
    acc.add((1.0 - spec.g(p, 1)) / static_cast<double>(p));
    if (p <= c1) t1 = acc.value();
    if (p <= c2) t2 = acc.value();
  }
  double t3 = acc.value();
  double d1 = t2 - t1;
  double d2 = t3 - t2;

  if (std::abs(d1) < 1e-3 && std::abs(d2) < 1e-4)
    return ConvergenceClass::convergent;

  double slope = (std::log(std::log(double(c3))) - std::log(std::log(double(c2)))) /
                 (std::log(std::log(double(c2))) - std::log(std::log(double(c1))));
  if (d1 > 0.01 && std::abs(d2 / (d1 * slope) - 1.0) <= 0.15)
    return ConvergenceClass::divergent;
  return ConvergenceClass::indeterminate;
}

namespace detail {

// Product of local factors over a prime list, chunked so the multiply tree
// is fixed: results are identical for every thread count.
inline double product_over_primes(const MultiplicativeSpec& spec,
                                  const std::vector<uint64_t>& primes,
                                  double eps, int threads) {
  const size_t chunk = 4096;
  size_t nchunks = (primes.size() + chunk - 1) / chunk;
  if (nchunks == 0) return 1.0;
  std::vector<double> partial(nchunks, 1.0);
  parallel_blocks(nchunks, threads, [&](uint64_t b) {
    size_t lo = static_cast<size_t>(b) * chunk;
    size_t hi = std::min(lo + chunk, primes.size());
    double prod = 1.0;
    for (size_t i = lo; i < hi; ++i) prod *= local_factor(spec, primes[i], eps);
    partial[static_cast<size_t>(b)] = prod;
  });
  double value = 1.0;
  for (double v : partial) value *= v;
  return value;
}

// sum_{k>=2} |b_k| * (P(k,>p0) + bound_k): the relative halo a truncated
// Euler product leaves behind, usable whenever the deficiency series has no
// linear term. Returns nullopt otherwise.
inline std::optional<double> series_tail_halo(const MultiplicativeSpec& spec,
                                              uint64_t p0, int order) {
  if (!spec.series_rule) return std::nullopt;
  RationalSeries x = local_factor_to_X(*spec.series_rule, order);
  if (x.at(1) != 0) return std::nullopt;
  RationalSeries b = series_neg_log(x, order);
  PrimeZetaTable table = prime_zeta_table(order, p0);
  CompensatedSum halo;
  for (int k = 2; k <= order; ++k) {
    double bk = std::abs(to_double(b.at(k)));
    if (bk == 0.0) continue;
    halo.add(bk * (table.values[static_cast<size_t>(k)] +
                   table.error_bounds[static_cast<size_t>(k)]));
  }
  return halo.value();
}

struct TailSum {
  double c = 0.0;          // sum_k b_k P(k, >p0)
  double tail_est = 0.0;   // geometric estimate of the neglected k > K part
  double table_noise = 0.0;
};

// Assembles the accelerated exponent and runs the ratio test on its own
// terms: the last nonzero |b_k P(k)| must shrink by at least x0.9 per
// order, otherwise the truncation cannot be trusted and we fail loudly.
inline TailSum accelerated_tail(const RationalSeries& b, const PrimeZetaTable& table,
                                int order) {
  TailSum out;
  CompensatedSum c_acc, noise;
  std::vector<std::pair<int, double>> magnitudes;
  for (int k = 2; k <= order; ++k) {
    double bk = to_double(b.at(k));
    if (bk == 0.0) continue;
    double zk = table.values[static_cast<size_t>(k)];
    double ek = table.error_bounds[static_cast<size_t>(k)];
    double term = bk * zk;
    c_acc.add(term);
    noise.add(std::abs(bk) * ek);
    // Entries below their own uncertainty are cancellation dust: their decay
    // tracks ulp(log zeta), not the prime tail, so they would poison the
    // slope estimate. They are already charged to table_noise above.
    if (term != 0.0 && std::abs(zk) > ek) magnitudes.emplace_back(k, std::abs(term));
  }
  out.c = c_acc.value();
  out.table_noise = noise.value();

  size_t n = magnitudes.size();
  if (n >= 3) {
    auto [ka, ta] = magnitudes[n - 3];
    auto [kb, tb] = magnitudes[n - 2];
    auto [kc, tc] = magnitudes[n - 1];
    double r1 = std::pow(tb / ta, 1.0 / static_cast<double>(kb - ka));
    double r2 = std::pow(tc / tb, 1.0 / static_cast<double>(kc - kb));
    double r = std::max(r1, r2);
    if (!(r < 0.9))
      throw NumericFailure(
          "accelerated series tail is not contracting (per-order ratio " +
          std::to_string(r) + " >= 0.9); increase the split P0 or the order");
    out.tail_est = tc * r / (1.0 - r);
  } else if (n > 0) {
    // Too few terms for a slope; charge the full last magnitude.
    out.tail_est = magnitudes.back().second;
  }
  return out;
}

inline void check_series_window(const RationalSeries& x, const std::vector<uint64_t>& primes,
                                uint64_t p0, const char* who) {
  for (uint64_t p : primes) {
    if (p > std::max<uint64_t>(p0, 7)) break;
    double xv = series_eval(x, 1.0 / static_cast<double>(p));
    if (!(std::abs(xv) <= 1.0 - 1e-6))
      throw AccelerationError(std::string(who) +
                              ": local factor within 1e-6 of vanishing at p=" +
                              std::to_string(p) + "; acceleration inapplicable");
  }
}

}  // namespace detail

// Truncated Euler product over p <= prime_limit. For convergent specs with
// an exact series rule the leftover halo sum_k |b_k| P(k, >limit) gives an
// honest absolute error bound; otherwise the bound is unknown.
inline MeanValueResult mean_value_product(const MultiplicativeSpec& spec,
                                          uint64_t prime_limit,
                                          double eps = 1e-15, int threads = 0) {
  if (prime_limit < 2)
    throw std::invalid_argument("mean_value_product: prime_limit must be >= 2");
  PrimeList pl = sieve_primes(prime_limit);
  size_t factor_count = pl.primes.size();
  double unit = detail::product_over_primes(spec, pl.primes, eps, threads);

  MeanValueResult r;
  r.method = MeanMethod::product;
  r.prime_limit = prime_limit;
  r.multiplier = spec.bound;
  r.value = spec.bound * unit;
  if (spec.declared_class != DeclaredClass::auto_detect || spec.series_rule) {
    r.convergence_class = classify_convergence(spec, pl);
  } else {
    PrimeList cls_primes = (pl.limit >= 100000) ? std::move(pl) : sieve_primes(100000);
    r.convergence_class = classify_convergence(spec, cls_primes);
  }
  if (auto halo = detail::series_tail_halo(spec, prime_limit, 40)) {
    // Each local factor is itself truncated at relative eps and the multiply
    // chain rounds once per factor; that dust is one-sided, so charge it.
    double factor_dust = static_cast<double>(factor_count) * (eps + 5e-16);
    r.error_bound = std::abs(r.value) * std::expm1(*halo + factor_dust);
  }
  return r;
}

// Hybrid series acceleration: exact local factors for p <= p0, then
// exp(-sum_{k=2}^{order} b_k P(k, >p0)). p0 = 1 is the pure series form.
inline MeanValueResult mean_value_accelerated(const MultiplicativeSpec& spec,
                                              uint64_t p0 = 101, int order = 40) {
  if (!spec.series_rule)
    throw AccelerationError(
        "mean_value_accelerated: spec has no exact series rule");
  if (p0 < 1)
    throw std::invalid_argument("mean_value_accelerated: p0 must be >= 1");
  if (order < 2 || order > 64)
    throw std::invalid_argument(
        "mean_value_accelerated: series order must lie in [2, 64]");

  RationalSeries x = local_factor_to_X(*spec.series_rule, order);
  if (x.at(1) != 0)
    throw AccelerationError(
        "mean_value_accelerated: deficiency series has a linear term "
        "(divergent family); acceleration inapplicable");

  PrimeList head = sieve_primes(std::max<uint64_t>(p0, 7));
  detail::check_series_window(x, head.primes, p0, "mean_value_accelerated");

  std::vector<uint64_t> head_primes;
  for (uint64_t p : head.primes)
    if (p <= p0) head_primes.push_back(p);
  double head_product = detail::product_over_primes(spec, head_primes, 1e-15, 1);

  RationalSeries b = series_neg_log(x, order);
  PrimeZetaTable table = prime_zeta_table(order, p0 <= 1 ? 0 : p0);
  detail::TailSum tail = detail::accelerated_tail(b, table, order);

  MeanValueResult r;
  r.method = MeanMethod::accelerated;
  r.convergence_class = ConvergenceClass::convergent;
  r.series_order = order;
  r.hybrid_split = p0;
  r.multiplier = spec.bound;
  r.c_constant = tail.c;
  double unit = head_product * std::exp(-tail.c);
  r.value = spec.bound * unit;
  if (std::abs(r.value) > spec.bound)
    r.value = (r.value > 0 ? spec.bound : -spec.bound);
  // Head factors are truncated at relative 1e-15 apiece, plus a rounding
  // per multiply; keep the charge above both.
  double head_noise = 1.5e-15 * static_cast<double>(head_primes.size() + 10);
  r.error_bound = std::abs(r.value) *
                  std::expm1(tail.tail_est + tail.table_noise + head_noise);
  return r;
}

// Strongly multiplicative shortcut: local factors collapse to
// 1 - (1 - g(p))/p, so the deficiency series is t(1 - poly1(t)).
inline MeanValueResult mean_value_strongly(const MultiplicativeSpec& spec,
                                           uint64_t p0 = 101, int order = 40) {
  if (!spec.strongly_multiplicative)
    throw AccelerationError(
        "mean_value_strongly: spec is not strongly multiplicative");
  if (!spec.series_rule)
    throw AccelerationError(
        "mean_value_strongly: spec has no exact polynomial for g(p)");
  if (p0 < 1)
    throw std::invalid_argument("mean_value_strongly: p0 must be >= 1");
  if (order < 2 || order > 64)
    throw std::invalid_argument(
        "mean_value_strongly: series order must lie in [2, 64]");

  const std::vector<Rational>& poly1 = spec.series_rule->polys.front();
  RationalSeries xs(order);
  // t * (1 - poly1(t)): shift the negated polynomial by one, add t.
  xs.set(1, Rational(1) - (poly1.empty() ? Rational(0) : poly1[0]));
  for (size_t i = 1; i < poly1.size(); ++i) {
    long long k = static_cast<long long>(i) + 1;
    if (k <= order) xs.set(static_cast<int>(k), -poly1[i]);
  }
  if (xs.at(1) != 0)
    throw AccelerationError(
        "mean_value_strongly: g(p) does not approach 1 (divergent family); "
        "acceleration inapplicable");

  PrimeList head = sieve_primes(std::max<uint64_t>(p0, 7));
  detail::check_series_window(xs, head.primes, p0, "mean_value_strongly");

  double head_product = 1.0;
  size_t head_count = 0;
  for (uint64_t p : head.primes) {
    if (p > p0) break;
    head_product *= 1.0 - (1.0 - spec.g(p, 1)) / static_cast<double>(p);
    ++head_count;
  }

  RationalSeries b = series_neg_log(xs, order);
  PrimeZetaTable table = prime_zeta_table(order, p0 <= 1 ? 0 : p0);
  detail::TailSum tail = detail::accelerated_tail(b, table, order);

  MeanValueResult r;
  r.method = MeanMethod::strong;
  r.convergence_class = ConvergenceClass::convergent;
  r.series_order = order;
  r.hybrid_split = p0;
  r.multiplier = spec.bound;
  r.c_constant = tail.c;
  r.value = spec.bound * head_product * std::exp(-tail.c);
  if (std::abs(r.value) > spec.bound)
    r.value = (r.value > 0 ? spec.bound : -spec.bound);
  // g(p) is an evaluated polynomial; allow a few roundings per factor.
  double head_noise = 1e-15 * static_cast<double>(head_count + 10);
  r.error_bound = std::abs(r.value) *
                  std::expm1(tail.tail_est + tail.table_noise + head_noise);
  return r;
}

enum class MethodChoice { automatic, product, accelerated, strong, paper_truncation };

struct MeanValueOptions {
  MethodChoice method = MethodChoice::automatic;
  uint64_t prime_limit = 1000000;
  int series_order = 40;
  uint64_t hybrid_split = 101;
  double eps = 1e-15;
  int threads = 0;        // 0 = hardware concurrency
};

// Dispatcher. Divergent specs report 0 exactly; convergent ones take the
// accelerated route when an exact series rule allows it, falling back to
// the truncated product; indeterminate ones report the truncated product
// with a warning so callers can choose to treat that as an error.
inline MeanValueResult mean_value(const MultiplicativeSpec& spec,
                                  const MeanValueOptions& opts = {}) {
  switch (opts.method) {
    case MethodChoice::product:
      return mean_value_product(spec, opts.prime_limit, opts.eps, opts.threads);
    case MethodChoice::accelerated:
      return mean_value_accelerated(spec, opts.hybrid_split, opts.series_order);
    case MethodChoice::strong:
      return mean_value_strongly(spec, opts.hybrid_split, opts.series_order);
    case MethodChoice::paper_truncation:
      return mean_value_accelerated(spec, 1, 5);
    case MethodChoice::automatic:
      break;
  }

  ConvergenceClass cls;
  if (spec.declared_class != DeclaredClass::auto_detect || spec.series_rule) {
    cls = classify_convergence(spec, PrimeList{});
  } else {
    cls = classify_convergence(spec, sieve_primes(100000));
  }

  if (cls == ConvergenceClass::divergent) {
    MeanValueResult r;
    r.value = 0.0;
    r.method = MeanMethod::divergent_zero;
    r.convergence_class = ConvergenceClass::divergent;
    r.error_bound = 0.0;
    r.multiplier = spec.bound;
    return r;
  }
  if (cls == ConvergenceClass::convergent) {
    if (spec.series_rule) {
      try {
        return mean_value_accelerated(spec, opts.hybrid_split, opts.series_order);
      } catch (const AccelerationError&) {
        return mean_value_product(spec, opts.prime_limit, opts.eps, opts.threads);
      }
    }
    return mean_value_product(spec, opts.prime_limit, opts.eps, opts.threads);
  }

  MeanValueResult r =
      mean_value_product(spec, opts.prime_limit, opts.eps, opts.threads);
  r.method = MeanMethod::indeterminate;
  r.convergence_class = ConvergenceClass::indeterminate;
  r.warning =
      "convergence could not be certified; reporting the truncated Euler "
      "product, which is not a proven limit";
  return r;
}

// Sanity anchor: prod_{p<=x} (1 - 1/p) against e^-gamma / log x. Returns
// (product, expected); they approach each other like 1/log(x)^2 relative.
// Partial-product diagnostic: prod_{p<=x} (1 - 1/p) * ln x drifts toward
// exp(-gamma) as x grows; the relative gap quantifies how far x has taken it.
struct MertensCheck {
  uint64_t x = 0;
  double product = 0.0;            // prod_{p<=x} (1 - 1/p)
  double product_times_log = 0.0;  // product * ln x
  double expected = 0.0;           // exp(-gamma)
  double relative_gap = 0.0;       // product_times_log / expected - 1
};

inline MertensCheck mertens_partial_product_check(uint64_t x) {
  if (x < 100)
    throw std::invalid_argument("mertens_partial_product_check: x must be >= 100");
  PrimeList pl = sieve_primes(x);
  CompensatedSum ls;
  for (uint64_t p : pl.primes) ls.add(std::log1p(-1.0 / static_cast<double>(p)));
  MertensCheck out;
  out.x = x;
  out.product = std::exp(ls.value());
  out.product_times_log = out.product * std::log(static_cast<double>(x));
  out.expected = std::exp(-euler_gamma());
  out.relative_gap = out.product_times_log / out.expected - 1.0;
  return out;
}

}  // namespace multmean
