// Walkthrough: define a multiplicative function from scratch, classify it,
// compute its mean value three ways, and compare against the summatory sums.
//
// The function used here is g(p^a) = (1 - 1/p)^2 at every prime power, i.e.
// the strongly multiplicative (phi(m)/m)^2, plus a second, hand-rolled rule
// fed through the JSON schema to show the spec-file path.

#include <multmean/multmean.hpp>

#include <cstdio>
#include <string>

namespace mm = multmean;

int main() {
  // --- 1. a builtin, straight from the catalog -----------------------------
  const mm::MultiplicativeSpec& totient = mm::catalog_lookup("totient_ratio_squared");

  mm::MeanValueOptions opt;
  mm::MeanValueResult accel = mm::mean_value(totient, opt);
  std::printf("catalog %-22s mean = %.15f  (%s, +/- %.2e)\n", totient.name.c_str(),
              accel.value, mm::to_string(accel.method),
              accel.error_bound.value_or(0.0));

  opt.method = mm::MethodChoice::product;
  opt.prime_limit = 1'000'000;
  mm::MeanValueResult prod = mm::mean_value(totient, opt);
  std::printf("  product over p <= %llu      = %.15f\n",
              static_cast<unsigned long long>(prod.prime_limit), prod.value);

  // --- 2. the same function, declared through the JSON schema --------------
  // One polynomial in 1/p, repeated for every exponent >= 1.
  const std::string doc = R"({
    "name": "totient_clone",
    "rule": {"type": "alpha_poly", "polys": [["1", "-2", "1"]], "default": "repeat_last"},
    "strongly_multiplicative": true
  })";
  mm::MultiplicativeSpec clone = mm::parse_spec(doc);
  mm::MeanValueResult clone_mean = mm::mean_value(clone, mm::MeanValueOptions{});
  std::printf("spec-file clone            mean = %.15f  (class %s)\n", clone_mean.value,
              mm::to_string(clone_mean.convergence_class));

  // --- 3. exact series coefficients ----------------------------------------
  mm::RationalSeries x = mm::local_factor_to_X(*clone.series_rule, 8);
  mm::RationalSeries b = mm::series_neg_log(x, 8);
  std::printf("deficiency X:  ");
  for (int k = 1; k <= 8; ++k) std::printf("a_%d=%s ", k, mm::to_string(x.at(k)).c_str());
  std::printf("\nneg-log of it: ");
  for (int k = 1; k <= 8; ++k) std::printf("b_%d=%s ", k, mm::to_string(b.at(k)).c_str());
  std::printf("\n");

  // --- 4. summatory sums vs. the predicted mean ----------------------------
  mm::SummatoryOptions sopt;
  std::vector<uint64_t> cps = {1'000, 10'000, 100'000, 1'000'000};
  auto reports = mm::compare(totient, 1'000'000, cps, mm::MeanValueOptions{}, sopt);
  std::printf("%10s %18s %12s\n", "x", "S(x)/x", "residual");
  for (const auto& r : reports)
    std::printf("%10llu %18.12f %12.2e\n", static_cast<unsigned long long>(r.x), r.ratio,
                r.residual);
  return 0;
}
