// Acceptance gate: one PASS/FAIL line per criterion, exit 0 only if all pass.
// Usage: acceptance <path-to-cli-binary>

#include <multmean/multmean.hpp>

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace mm = multmean;
using ojson = nlohmann::ordered_json;

namespace {

std::string g_cli;
int g_failures = 0;

struct Criterion {
  std::string label;
  bool ok = true;
  std::string detail;
  std::chrono::steady_clock::time_point start;

  explicit Criterion(std::string l)
      : label(std::move(l)), start(std::chrono::steady_clock::now()) {}

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }

  ~Criterion() {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    std::printf("%s %s (%lld ms)%s%s\n", ok ? "PASS" : "FAIL", label.c_str(),
                static_cast<long long>(ms), detail.empty() ? "" : " -- ",
                detail.c_str());
    if (!ok) ++g_failures;
  }
};

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  std::string cmd = g_cli + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  CliRun r;
  if (!pipe) return r;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

void criterion_1_series_coefficients() {
  Criterion c("1 exact series coefficients b2..b9, later terms flagged");
  auto r = cli("coefficients totient-ratio-squared --series-order 9 --json");
  c.expect(r.code == 0, "cli exit " + std::to_string(r.code));
  if (r.code != 0) return;
  ojson j = ojson::parse(r.out, nullptr, false);
  c.expect(!j.is_discarded(), "bad json");
  if (j.is_discarded()) return;
  const char* want[] = {"2", "-1", "2", "-2", "19/6", "-4"};
  for (int k = 2; k <= 7; ++k) {
    const auto& row = j["rows"][k - 1];
    c.expect(row["b"] == want[k - 2],
             "b" + std::to_string(k) + " = " + row["b"].dump());
    c.expect(row["matches"] == true, "b" + std::to_string(k) + " not confirmed");
  }
  c.expect(j["rows"][7]["b"] == "6", "b8 = " + j["rows"][7]["b"].dump());
  c.expect(j["rows"][7]["matches"] == false, "b8 must be flagged");
  c.expect(j["rows"][8]["b"] == "-25/3", "b9 = " + j["rows"][8]["b"].dump());
  c.expect(j["rows"][8]["matches"] == false, "b9 must be flagged");
}

void criterion_2_low_order_truncation() {
  Criterion c("2 low-order truncated constant (c ~ 0.8122, value ~ 0.4438)");
  auto r = cli("meanvalue totient-ratio-squared --method paper_truncation --json");
  c.expect(r.code == 0, "cli exit " + std::to_string(r.code));
  if (r.code != 0) return;
  ojson j = ojson::parse(r.out, nullptr, false);
  double cc = j["c_constant"].get<double>();
  double v = j["value"].get<double>();
  c.expect(std::fabs(cc - 0.8122) <= 5e-4, "c = " + std::to_string(cc));
  c.expect(std::fabs(v - 0.4438) <= 5e-4, "value = " + std::to_string(v));
}

void criterion_3_corrected_constant() {
  Criterion c("3 corrected constant: acceleration vs product vs summatory");
  const auto& tot = mm::catalog_lookup("totient_ratio_squared");

  auto accel = mm::mean_value_accelerated(tot, 101, 40);
  auto prod = mm::mean_value_product(tot, 1'000'000);
  c.expect(std::fabs(accel.value - prod.value) <= 1e-6,
           "route gap " + std::to_string(std::fabs(accel.value - prod.value)));
  c.expect(std::fabs(accel.value - 0.4282495) <= 1e-6, "accelerated off target");
  c.expect(std::fabs(prod.value - 0.4282495) <= 1e-6, "product off target");
  // the two routes sit inside each other's reported uncertainty
  c.expect(accel.error_bound && prod.error_bound, "missing error bounds");
  if (accel.error_bound && prod.error_bound)
    c.expect(std::fabs(accel.value - prod.value) <=
                 *accel.error_bound + *prod.error_bound,
             "bounds do not cover the route gap");

  mm::SummatoryOptions so;
  auto rows = mm::summatory(tot, 10'000'000, {10'000'000}, so);
  double ratio = rows[0].ratio;
  c.expect(std::fabs(ratio - accel.value) <= 1e-3,
           "summatory ratio " + std::to_string(ratio));
}

void criterion_4_squarefree_density() {
  Criterion c("4 squarefree density at 1e6 and exact complement");
  auto census = mm::squarefree_census(1'000'000);
  c.expect(census.squarefree + census.not_squarefree == 1'000'000,
           "complement does not partition");
  double dens = static_cast<double>(census.squarefree) / 1e6;
  c.expect(std::fabs(dens - 0.6079271) <= 1e-4, "density " + std::to_string(dens));
}

void criterion_5_mertens_decay() {
  Criterion c("5 Mertens decay at 1e6 and zero mean for mobius");
  const auto& mob = mm::catalog_lookup("mobius");
  mm::SummatoryOptions so;
  auto rows = mm::summatory(mob, 1'000'000, {1'000'000}, so);
  c.expect(rows[0].s_exact.has_value(), "no exact sum");
  if (rows[0].s_exact) {
    double frac = std::fabs(static_cast<double>(*rows[0].s_exact)) / 1e6;
    c.expect(frac <= 5e-4, "M(1e6)/1e6 = " + std::to_string(frac));
  }
  auto mv = mm::mean_value(mob, mm::MeanValueOptions{});
  c.expect(mv.value == 0.0 && mv.method == mm::MeanMethod::divergent_zero,
           "dispatcher did not return the divergent zero");
}

void criterion_6_powerful_decay() {
  Criterion c("6 powerful-number decay and exact small count");
  const auto& pw = mm::catalog_lookup("powerful");
  mm::SummatoryOptions so;
  auto rows = mm::summatory(pw, 1'000'000, {100, 1'000'000}, so);
  c.expect(rows[0].s_exact && *rows[0].s_exact == 14,
           "count(100) != 14");
  if (rows[1].s_exact) {
    double frac = static_cast<double>(*rows[1].s_exact) / 1e6;
    c.expect(frac <= 5e-3, "count(1e6)/1e6 = " + std::to_string(frac));
  } else {
    c.expect(false, "no exact count at 1e6");
  }
  auto mv = mm::mean_value(pw, mm::MeanValueOptions{});
  c.expect(mv.value == 0.0, "dispatcher mean not zero");
}

void criterion_7_prime_zeta() {
  Criterion c("7 prime zeta routes agree to 1e-12 for k = 2..10");
  auto r = cli("primezeta --k-min 2 --k-max 10 --json");
  c.expect(r.code == 0, "cli exit " + std::to_string(r.code));
  if (r.code != 0) return;
  ojson j = ojson::parse(r.out, nullptr, false);
  c.expect(j["all_ok"] == true, "route disagreement reported");
  for (const auto& row : j["rows"])
    c.expect(row["abs_diff"].get<double>() <= 1e-12,
             "k=" + row["k"].dump() + " diff " + row["abs_diff"].dump());
  double p2 = j["rows"][0]["log_zeta_route"].get<double>();
  c.expect(std::fabs(p2 - 0.4522474200) <= 1e-9, "P(2) = " + std::to_string(p2));
}

void criterion_8_mertens_third_theorem() {
  Criterion c("8 partial prime product times ln x near exp(-gamma)");
  auto d = mm::mertens_partial_product_check(1'000'000);
  c.expect(std::fabs(d.relative_gap) <= 0.02,
           "relative gap " + std::to_string(d.relative_gap));
}

void criterion_9_property_suites() {
  Criterion c("9 property suites: multiplicativity, bounds, invariances");

  // multiplicativity on random coprime pairs, all catalog functions
  {
    mm::SpfTable spf = mm::spf_table(9'100'000);
    std::mt19937_64 rng(20260819);
    std::uniform_int_distribution<uint64_t> pick(2, 3'000);
    int tested = 0;
    for (int i = 0; tested < 250 && i < 20'000; ++i) {
      uint64_t m1 = pick(rng), m2 = pick(rng);
      if (std::gcd(m1, m2) != 1) continue;
      ++tested;
      auto f1 = mm::factorize(m1, spf);
      auto f2 = mm::factorize(m2, spf);
      auto f12 = mm::factorize(m1 * m2, spf);
      for (const auto& s : mm::catalog()) {
        double lhs = mm::evaluate(s, f12);
        double rhs = mm::evaluate(s, f1) * mm::evaluate(s, f2);
        if (std::fabs(lhs - rhs) > 1e-12) {
          c.expect(false, s.name + " not multiplicative at " + std::to_string(m1) +
                              "*" + std::to_string(m2));
          break;
        }
      }
    }
    c.expect(tested == 250, "coprime sampling starved");
  }

  // |S(x)| <= x for unit-bounded rules
  {
    mm::SummatoryOptions so;
    for (const auto& s : mm::catalog()) {
      auto rows = mm::summatory(s, 100'000, {10, 1'000, 100'000}, so);
      for (const auto& r : rows)
        c.expect(std::fabs(r.s) <= static_cast<double>(r.x),
                 s.name + " breaks |S| <= x at " + std::to_string(r.x));
    }
  }

  // block-size invariance of the sieved oracle
  {
    mm::SummatoryOptions big;   // default 1 MiB blocks
    mm::SummatoryOptions small_blocks;
    small_blocks.block_size = 65'536;
    auto a = mm::summatory(mm::catalog_lookup("mobius"), 400'000, {123'456, 400'000},
                           big);
    auto b = mm::summatory(mm::catalog_lookup("mobius"), 400'000, {123'456, 400'000},
                           small_blocks);
    for (size_t i = 0; i < a.size(); ++i)
      c.expect(*a[i].s_exact == *b[i].s_exact, "integer oracle moved with block size");

    auto ta = mm::summatory(mm::catalog_lookup("totient_ratio_squared"), 400'000,
                            {400'000}, big);
    auto tb = mm::summatory(mm::catalog_lookup("totient_ratio_squared"), 400'000,
                            {400'000}, small_blocks);
    c.expect(std::fabs(ta[0].s - tb[0].s) <= 1e-9,
             "real oracle moved with block size");

    // and thread-count invariance is bit-exact by construction
    mm::SummatoryOptions t1 = big, t4 = big;
    t1.threads = 1;
    t4.threads = 4;
    auto ra = mm::summatory(mm::catalog_lookup("totient_ratio_squared"), 400'000,
                            {400'000}, t1);
    auto rb = mm::summatory(mm::catalog_lookup("totient_ratio_squared"), 400'000,
                            {400'000}, t4);
    c.expect(ra[0].s == rb[0].s, "thread count changed the sum");
  }

  // hybrid split invariance
  {
    const auto& tot = mm::catalog_lookup("totient_ratio_squared");
    auto a = mm::mean_value_accelerated(tot, 11, 40);
    auto b = mm::mean_value_accelerated(tot, 101, 40);
    auto d = mm::mean_value_accelerated(tot, 1'009, 40);
    c.expect(std::fabs(a.value - b.value) <= 1e-9, "split 11 vs 101 moved");
    c.expect(std::fabs(d.value - b.value) <= 1e-9, "split 1009 vs 101 moved");
  }

  // rescaling linearity, exact
  {
    const auto& tot = mm::catalog_lookup("totient_ratio_squared");
    mm::MultiplicativeSpec scaled = tot;
    scaled.bound = 7.5;
    auto u = mm::mean_value_accelerated(tot);
    auto v = mm::mean_value_accelerated(scaled);
    c.expect(v.value == 7.5 * u.value, "acceleration not exactly linear");
    auto up = mm::mean_value_product(tot, 100'000);
    auto vp = mm::mean_value_product(scaled, 100'000);
    c.expect(vp.value == 7.5 * up.value, "product not exactly linear");
  }
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: acceptance <cli-binary>\n");
    return 64;
  }
  g_cli = argv[1];

  criterion_1_series_coefficients();
  criterion_2_low_order_truncation();
  criterion_3_corrected_constant();
  criterion_4_squarefree_density();
  criterion_5_mertens_decay();
  criterion_6_powerful_decay();
  criterion_7_prime_zeta();
  criterion_8_mertens_third_theorem();
  criterion_9_property_suites();

  if (g_failures) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all 9 criteria passed\n");
  return 0;
}
