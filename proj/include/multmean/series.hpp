#pragma once

// Truncated formal power series over the rationals in t = 1/p, and the
// alpha-indexed polynomial rules that describe a multiplicative function's
// prime-power values g(p^alpha) as polynomials in t.
//
// The central construction: for a rule g, the local Euler factor is
//   (1 - t) * sum_{alpha >= 0} g(p^alpha) t^alpha  =  1 - X(t),
// and local_factor_to_X produces X exactly, truncated at a chosen order.
// X having no linear term is precisely the convergent case.

#include "multmean/rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace multmean {

struct RationalSeries {
  int order = 0;                   // truncation order K (coefficients 0..K kept)
  std::vector<Rational> coeff;     // coeff[k] multiplies t^k

  RationalSeries() : coeff(1) {}
  explicit RationalSeries(int k) : order(k), coeff(static_cast<size_t>(k) + 1) {
    if (k < 0) throw std::invalid_argument("RationalSeries: negative order");
  }

  Rational at(int k) const {
    if (k < 0 || k > order) return Rational(0);
    return coeff[static_cast<size_t>(k)];
  }
  void set(int k, const Rational& v) {
    if (k < 0 || k > order)
      throw std::out_of_range("RationalSeries::set: index beyond order");
    coeff[static_cast<size_t>(k)] = v;
  }
  bool is_zero() const {
    for (const auto& c : coeff)
      if (c != 0) return false;
    return true;
  }
  // Lowest exponent with a nonzero coefficient, or -1 for the zero series.
  int min_exponent() const {
    for (int k = 0; k <= order; ++k)
      if (coeff[static_cast<size_t>(k)] != 0) return k;
    return -1;
  }
};

inline RationalSeries series_add(const RationalSeries& a, const RationalSeries& b) {
  RationalSeries r(std::min(a.order, b.order));
  for (int k = 0; k <= r.order; ++k) r.coeff[static_cast<size_t>(k)] = a.at(k) + b.at(k);
  return r;
}

inline RationalSeries series_scale(const RationalSeries& a, const Rational& c) {
  RationalSeries r(a.order);
  for (int k = 0; k <= r.order; ++k)
    r.coeff[static_cast<size_t>(k)] = a.coeff[static_cast<size_t>(k)] * c;
  return r;
}

// Truncated Cauchy product; the result order is the finer of the two
// operands' (coefficients beyond it would be incomplete anyway).
inline RationalSeries series_mul(const RationalSeries& a, const RationalSeries& b) {
  RationalSeries r(std::min(a.order, b.order));
  for (int i = 0; i <= a.order && i <= r.order; ++i) {
    const Rational& ai = a.coeff[static_cast<size_t>(i)];
    if (ai == 0) continue;
    for (int j = 0; j + i <= r.order && j <= b.order; ++j) {
      const Rational& bj = b.coeff[static_cast<size_t>(j)];
      if (bj == 0) continue;
      r.coeff[static_cast<size_t>(i + j)] += ai * bj;
    }
  }
  return r;
}

// -log(1 - x) = sum_{j>=1} x^j / j, truncated at order K. Requires x(0) = 0;
// the loop stops as soon as x^j can no longer reach degree K.
inline RationalSeries series_neg_log(const RationalSeries& x, int k_order) {
  if (x.at(0) != 0)
    throw std::invalid_argument("series_neg_log: constant term must vanish");
  RationalSeries r(k_order);
  int m = x.min_exponent();
  if (m < 0) return r;   // log(1 - 0) = 0

  RationalSeries trunc(k_order);
  for (int k = 0; k <= k_order; ++k) trunc.coeff[static_cast<size_t>(k)] = x.at(k);

  RationalSeries power = trunc;
  for (int j = 1; static_cast<long long>(j) * m <= k_order; ++j) {
    if (j > 1) power = series_mul(power, trunc);
    Rational inv_j(1, j);
    for (int k = 0; k <= k_order; ++k) {
      const Rational& c = power.coeff[static_cast<size_t>(k)];
      if (c != 0) r.coeff[static_cast<size_t>(k)] += c * inv_j;
    }
  }
  return r;
}

// Horner evaluation in double; |t| < 1 keeps truncation meaningful here.
inline double series_eval(const RationalSeries& a, double t) {
  if (!(std::abs(t) < 1.0))
    throw std::domain_error("series_eval: |t| must be < 1");
  double acc = 0.0;
  for (int k = a.order; k >= 0; --k)
    acc = acc * t + to_double(a.coeff[static_cast<size_t>(k)]);
  return acc;
}

// Exact evaluation, used by validators.
inline Rational series_eval_exact(const RationalSeries& a, const Rational& t) {
  Rational acc(0);
  for (int k = a.order; k >= 0; --k)
    acc = acc * t + a.coeff[static_cast<size_t>(k)];
  return acc;
}

// What g(p^alpha) does beyond the last explicitly listed exponent.
enum class AlphaDefault { repeat_last, zero, one, same_as_alpha1 };

inline const char* to_string(AlphaDefault d) {
  switch (d) {
    case AlphaDefault::repeat_last: return "repeat_last";
    case AlphaDefault::zero: return "zero";
    case AlphaDefault::one: return "one";
    case AlphaDefault::same_as_alpha1: return "same_as_alpha1";
  }
  return "?";
}

// g(p^alpha) = polys[alpha-1](1/p) for alpha <= A, then per tail_mode.
// Polynomials are stored exactly; a double mirror serves the hot path.
struct AlphaPolyRule {
  std::vector<std::vector<Rational>> polys;
  AlphaDefault tail_mode = AlphaDefault::repeat_last;
  std::vector<std::vector<double>> polys_d;   // derived, same shape

  AlphaPolyRule() = default;
  AlphaPolyRule(std::vector<std::vector<Rational>> ps, AlphaDefault mode)
      : polys(std::move(ps)), tail_mode(mode) {
    if (polys.empty())
      throw std::invalid_argument("AlphaPolyRule: needs at least one polynomial");
    polys_d.reserve(polys.size());
    for (const auto& poly : polys) {
      std::vector<double> pd;
      pd.reserve(poly.size());
      for (const auto& c : poly) pd.push_back(to_double(c));
      polys_d.push_back(std::move(pd));
    }
    // |g| <= 1 must hold; spot-check the smallest primes exactly, one
    // exponent past the listed range so the tail mode is exercised too.
    for (uint64_t p : {2ull, 3ull, 5ull, 7ull}) {
      for (uint32_t a = 1; a <= polys.size() + 1; ++a) {
        Rational v = value_at(p, a);
        if (v > 1 || v < -1)
          throw std::domain_error(
              "AlphaPolyRule: |g(p^alpha)| exceeds 1 at p=" + std::to_string(p) +
              ", alpha=" + std::to_string(a));
      }
    }
  }

  Rational value_at(uint64_t p, uint32_t alpha) const {
    if (alpha == 0) return Rational(1);
    size_t a = alpha;
    const std::vector<Rational>* poly = nullptr;
    if (a <= polys.size()) {
      poly = &polys[a - 1];
    } else {
      switch (tail_mode) {
        case AlphaDefault::repeat_last: poly = &polys.back(); break;
        case AlphaDefault::zero: return Rational(0);
        case AlphaDefault::one: return Rational(1);
        case AlphaDefault::same_as_alpha1: poly = &polys.front(); break;
      }
    }
    Rational t(1, p);
    Rational acc(0);
    for (size_t i = poly->size(); i-- > 0;) acc = acc * t + (*poly)[i];
    return acc;
  }

  double value(uint64_t p, uint32_t alpha) const {
    if (alpha == 0) return 1.0;
    size_t a = alpha;
    const std::vector<double>* poly = nullptr;
    if (a <= polys_d.size()) {
      poly = &polys_d[a - 1];
    } else {
      switch (tail_mode) {
        case AlphaDefault::repeat_last: poly = &polys_d.back(); break;
        case AlphaDefault::zero: return 0.0;
        case AlphaDefault::one: return 1.0;
        case AlphaDefault::same_as_alpha1: poly = &polys_d.front(); break;
      }
    }
    double t = 1.0 / static_cast<double>(p);
    double acc = 0.0;
    for (size_t i = poly->size(); i-- > 0;) acc = acc * t + (*poly)[i];
    return acc;
  }
};

namespace detail {

// poly(t) * t^shift as a series of the given order.
inline RationalSeries poly_shifted(const std::vector<Rational>& poly, int shift,
                                   int order) {
  RationalSeries r(order);
  for (size_t i = 0; i < poly.size(); ++i) {
    long long k = static_cast<long long>(i) + shift;
    if (k > order) break;
    r.coeff[static_cast<size_t>(k)] = poly[i];
  }
  return r;
}

}  // namespace detail

// Exact deficiency series X with (1 - t) * sum_alpha g(p^alpha) t^alpha = 1 - X(t),
// truncated at order k_order. The tail mode closes the alpha-sum:
//   zero:            (1-t) * (1 + sum_{a<=A} poly_a t^a)
//   repeat_last:     (1-t) * (1 + sum_{a<=A-1} poly_a t^a) + poly_A t^A
//   one:             (1-t) * (1 + sum_{a<=A} poly_a t^a) + t^{A+1}
//   same_as_alpha1:  (1-t) * (1 + sum_{a<=A} poly_a t^a) + poly_1 t^{A+1}
inline RationalSeries local_factor_to_X(const AlphaPolyRule& rule, int k_order) {
  if (k_order < 2)
    throw std::invalid_argument("local_factor_to_X: order must be at least 2");
  const int A = static_cast<int>(rule.polys.size());

  RationalSeries s(k_order);
  s.coeff[0] = 1;
  int explicit_upto = (rule.tail_mode == AlphaDefault::repeat_last) ? A - 1 : A;
  for (int a = 1; a <= explicit_upto && a <= k_order; ++a)
    s = series_add(s, detail::poly_shifted(rule.polys[static_cast<size_t>(a - 1)], a, k_order));

  RationalSeries one_minus_t(k_order);
  one_minus_t.coeff[0] = 1;
  one_minus_t.coeff[1] = -1;
  s = series_mul(s, one_minus_t);

  switch (rule.tail_mode) {
    case AlphaDefault::repeat_last:
      s = series_add(s, detail::poly_shifted(rule.polys.back(), A, k_order));
      break;
    case AlphaDefault::zero:
      break;
    case AlphaDefault::one: {
      RationalSeries closure(k_order);
      if (A + 1 <= k_order) closure.coeff[static_cast<size_t>(A + 1)] = 1;
      s = series_add(s, closure);
      break;
    }
    case AlphaDefault::same_as_alpha1:
      s = series_add(s, detail::poly_shifted(rule.polys.front(), A + 1, k_order));
      break;
  }

  RationalSeries x(k_order);
  x.coeff[0] = 1;
  for (int k = 0; k <= k_order; ++k)
    x.coeff[static_cast<size_t>(k)] -= s.coeff[static_cast<size_t>(k)];
  if (x.at(0) != 0)
    throw std::domain_error("local_factor_to_X: rule does not fix g(1) = 1");
  return x;
}

}  // namespace multmean
