// Command-line front end. Subcommands:
//   meanvalue     asymptotic mean of a multiplicative function
//   summatory     exact S(x) at checkpoints, with the predicted mean
//   compare       S(x)/x against the predicted mean, residual flagging
//   primezeta     P(k) two ways (log-zeta formula vs sieve+tail), cross-checked
//   coefficients  exact a_k / b_k series tables, checked against the
//                 published truncated expansion where one exists
// Exit codes: 0 ok, 2 invalid spec/config, 3 indeterminate under --strict,
// 4 numeric cross-check failure.

#include <multmean/multmean.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mm = multmean;
using ojson = nlohmann::ordered_json;

namespace {

struct Common {
  std::string function;
  std::string spec_path;
  std::string method = "auto";
  uint64_t prime_limit = 1000000;
  uint64_t split_p0 = 101;
  int series_order = 40;
  int threads = 0;
  bool json = false;
  bool csv = false;
  bool strict = false;
};

void add_common(CLI::App* cmd, Common& c, bool with_function = true) {
  if (with_function)
    cmd->add_option("function", c.function,
                    "builtin function id (see `catalog` in the README)");
  cmd->add_option("--spec", c.spec_path, "JSON spec file describing the function")
      ->check(CLI::ExistingFile);
  cmd->add_option("--method", c.method, "evaluation route")
      ->check(CLI::IsMember(
          {"auto", "product", "accelerated", "strong", "paper_truncation"}));
  cmd->add_option("--prime-limit", c.prime_limit,
                  "Euler product truncation (product route)");
  cmd->add_option("--series-order", c.series_order, "series order K")
      ->check(CLI::Range(2, 64));
  cmd->add_option("--split-p0", c.split_p0, "hybrid split P0 (accelerated route)");
  cmd->add_option("--threads", c.threads, "worker threads (0 = hardware)");
  cmd->add_flag("--json", c.json, "emit JSON");
  cmd->add_flag("--csv", c.csv, "emit CSV");
  cmd->add_flag("--strict", c.strict,
                "exit 3 if convergence cannot be certified");
}

mm::MultiplicativeSpec resolve_spec(const Common& c) {
  if (!c.spec_path.empty() && !c.function.empty())
    throw mm::SpecError("give a function name or --spec, not both");
  if (!c.spec_path.empty()) return mm::load_spec_file(c.spec_path);
  if (c.function.empty())
    throw mm::SpecError("no function selected: pass a name or --spec FILE");
  return mm::catalog_lookup(c.function);
}

mm::MeanValueOptions mean_options(const Common& c) {
  mm::MeanValueOptions o;
  if (c.method == "auto") o.method = mm::MethodChoice::automatic;
  else if (c.method == "product") o.method = mm::MethodChoice::product;
  else if (c.method == "accelerated") o.method = mm::MethodChoice::accelerated;
  else if (c.method == "strong") o.method = mm::MethodChoice::strong;
  else if (c.method == "paper_truncation") o.method = mm::MethodChoice::paper_truncation;
  else throw mm::SpecError("unknown method '" + c.method + "'");
  o.prime_limit = c.prime_limit;
  o.series_order = c.series_order;
  o.hybrid_split = c.split_p0;
  o.threads = c.threads;
  return o;
}

std::string num12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string num17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_format_flags(const Common& c) {
  if (c.json && c.csv) throw mm::SpecError("--json and --csv are exclusive");
}

// Exit 3 when requested and the class could not be certified; the result is
// still printed first so the caller sees what was computed.
int strict_exit(const Common& c, const mm::MeanValueResult& mv) {
  if (c.strict && mv.convergence_class == mm::ConvergenceClass::indeterminate) {
    std::cerr << "strict: convergence class is indeterminate\n";
    return 3;
  }
  return 0;
}

ojson opt_json(std::optional<double> v) {
  if (v) return *v;
  return nullptr;
}

ojson zero_is_null(uint64_t v) {
  if (v == 0) return nullptr;
  return v;
}

ojson zero_is_null(int v) {
  if (v == 0) return nullptr;
  return v;
}

// ---------------------------------------------------------------- meanvalue

int run_meanvalue(const Common& c) {
  check_format_flags(c);
  mm::MultiplicativeSpec spec = resolve_spec(c);
  mm::MeanValueResult mv = mm::mean_value(spec, mean_options(c));

  if (c.json) {
    ojson j;
    j["function"] = spec.name;
    j["value"] = mv.value;
    j["c_constant"] = opt_json(mv.c_constant);
    j["method"] = mm::to_string(mv.method);
    j["convergence_class"] = mm::to_string(mv.convergence_class);
    j["error_bound"] = opt_json(mv.error_bound);
    j["prime_limit"] = zero_is_null(mv.prime_limit);
    j["series_order"] = zero_is_null(mv.series_order);
    j["hybrid_split"] = zero_is_null(mv.hybrid_split);
    j["multiplier"] = mv.multiplier;
    j["warning"] = mv.warning.empty() ? ojson(nullptr) : ojson(mv.warning);
    std::cout << j.dump(2) << "\n";
  } else if (c.csv) {
    std::cout << "function,value,c_constant,method,convergence_class,error_bound,"
                 "prime_limit,series_order,hybrid_split,multiplier\n";
    std::cout << spec.name << "," << num17(mv.value) << ","
              << (mv.c_constant ? num17(*mv.c_constant) : "") << ","
              << mm::to_string(mv.method) << ","
              << mm::to_string(mv.convergence_class) << ","
              << (mv.error_bound ? num17(*mv.error_bound) : "") << ","
              << (mv.prime_limit ? std::to_string(mv.prime_limit) : "") << ","
              << (mv.series_order ? std::to_string(mv.series_order) : "") << ","
              << (mv.hybrid_split ? std::to_string(mv.hybrid_split) : "") << ","
              << num17(mv.multiplier) << "\n";
  } else {
    std::printf("function           %s\n", spec.name.c_str());
    std::printf("value              %s\n", num12(mv.value).c_str());
    std::printf("c_constant         %s\n",
                mv.c_constant ? num12(*mv.c_constant).c_str() : "-");
    std::printf("method             %s\n", mm::to_string(mv.method));
    std::printf("convergence_class  %s\n", mm::to_string(mv.convergence_class));
    std::printf("error_bound        %s\n",
                mv.error_bound ? num12(*mv.error_bound).c_str() : "unknown");
    if (mv.prime_limit)
      std::printf("prime_limit        %" PRIu64 "\n", mv.prime_limit);
    if (mv.series_order)
      std::printf("series_order       %d\n", mv.series_order);
    if (mv.hybrid_split)
      std::printf("hybrid_split       %" PRIu64 "\n", mv.hybrid_split);
    std::printf("multiplier         %s\n", num12(mv.multiplier).c_str());
    if (!mv.warning.empty()) std::printf("warning            %s\n", mv.warning.c_str());
  }
  return strict_exit(c, mv);
}

// ------------------------------------------------------ summatory / compare

// summatory defaults to the single checkpoint n; compare wants the decades
// up to n so the residual trend is visible without typing --checkpoints.
std::vector<uint64_t> default_checkpoints(uint64_t n, bool decades) {
  std::vector<uint64_t> cps;
  if (decades) {
    for (uint64_t x = 10; x <= n && x >= 10; x *= 10) {
      cps.push_back(x);
      if (x > n / 10) break;   // next *10 would overflow past n anyway
    }
  }
  if (cps.empty() || cps.back() != n) cps.push_back(n);
  return cps;
}

int run_summatory(const Common& c, uint64_t n, std::vector<uint64_t> checkpoints,
                  double threshold, bool is_compare) {
  check_format_flags(c);
  mm::MultiplicativeSpec spec = resolve_spec(c);
  if (checkpoints.empty()) checkpoints = default_checkpoints(n, is_compare);

  mm::MeanValueResult mv = mm::mean_value(spec, mean_options(c));
  mm::SummatoryOptions so;
  so.threads = c.threads;
  std::vector<mm::SummatoryReport> rows = mm::summatory(spec, n, checkpoints, so);
  for (auto& r : rows) {
    r.predicted_mean = mv.value;
    r.residual = r.ratio - mv.value;
  }

  auto s_text = [&](const mm::SummatoryReport& r, bool wide) {
    if (r.s_exact) return std::to_string(*r.s_exact);
    return wide ? num17(r.s) : num12(r.s);
  };

  if (c.json) {
    ojson j;
    j["function"] = spec.name;
    j["n"] = n;
    j["method"] = mm::to_string(mv.method);
    j["convergence_class"] = mm::to_string(mv.convergence_class);
    j["predicted_mean"] = mv.value;
    if (is_compare) j["threshold"] = threshold > 0 ? ojson(threshold) : ojson(nullptr);
    j["warning"] = mv.warning.empty() ? ojson(nullptr) : ojson(mv.warning);
    ojson arr = ojson::array();
    for (const auto& r : rows) {
      ojson row;
      row["x"] = r.x;
      if (r.s_exact) row["S"] = *r.s_exact;
      else row["S"] = r.s;
      row["S_over_x"] = r.ratio;
      row["predicted_mean"] = r.predicted_mean;
      row["residual"] = r.residual;
      if (is_compare && threshold > 0)
        row["flagged"] = std::abs(r.residual) > threshold;
      arr.push_back(std::move(row));
    }
    j["rows"] = std::move(arr);
    std::cout << j.dump(2) << "\n";
  } else if (c.csv) {
    std::cout << "x,S,S_over_x,predicted_mean,residual\n";
    for (const auto& r : rows)
      std::cout << r.x << "," << s_text(r, true) << "," << num17(r.ratio) << ","
                << num17(r.predicted_mean) << "," << num17(r.residual) << "\n";
  } else {
    std::printf("%s of %s up to %" PRIu64 "\n",
                is_compare ? "comparison" : "summatory", spec.name.c_str(), n);
    std::printf("method %s, class %s, predicted mean %s\n",
                mm::to_string(mv.method), mm::to_string(mv.convergence_class),
                num12(mv.value).c_str());
    if (!mv.warning.empty()) std::printf("warning: %s\n", mv.warning.c_str());
    if (is_compare && threshold > 0)
      std::printf("flag threshold |residual| > %s\n", num12(threshold).c_str());
    std::printf("%14s %18s %16s %16s %16s\n", "x", "S", "S/x", "predicted",
                "residual");
    for (const auto& r : rows) {
      std::printf("%14" PRIu64 " %18s %16s %16s %16s", r.x,
                  s_text(r, false).c_str(), num12(r.ratio).c_str(),
                  num12(r.predicted_mean).c_str(), num12(r.residual).c_str());
      if (is_compare && threshold > 0 && std::abs(r.residual) > threshold)
        std::printf("  FLAG");
      std::printf("\n");
    }
  }
  return strict_exit(c, mv);
}

// ----------------------------------------------------------------- primezeta

int run_primezeta(const Common& c, int k_min, int k_max) {
  check_format_flags(c);
  if (k_min < 2 || k_max < k_min || k_max > 60)
    throw mm::SpecError("primezeta: need 2 <= k-min <= k-max <= 60");

  mm::PrimeList pl = mm::sieve_primes(c.prime_limit);
  mm::PrimeZetaTable formula = mm::prime_zeta_table(k_max, 0);
  mm::PrimeZetaTable tails = mm::prime_zeta_table(k_max, c.prime_limit);

  struct Row {
    int k;
    double formula, direct, diff, bound;
    bool ok;
  };
  std::vector<Row> rows;
  bool all_ok = true;
  for (int k = k_min; k <= k_max; ++k) {
    mm::CompensatedSum head;
    for (uint64_t p : pl.primes)
      head.add(std::pow(static_cast<double>(p), -static_cast<double>(k)));
    Row r;
    r.k = k;
    r.formula = formula.values[static_cast<size_t>(k)];
    r.direct = head.value() + tails.values[static_cast<size_t>(k)];
    r.diff = std::abs(r.formula - r.direct);
    r.bound = 1e-12;   // pinned cross-route agreement
    r.ok = r.diff <= r.bound;
    all_ok = all_ok && r.ok;
    rows.push_back(r);
  }

  if (c.json) {
    ojson j;
    j["prime_limit"] = c.prime_limit;
    ojson arr = ojson::array();
    for (const auto& r : rows) {
      ojson row;
      row["k"] = r.k;
      row["log_zeta_route"] = r.formula;
      row["direct_route"] = r.direct;
      row["abs_diff"] = r.diff;
      row["bound"] = r.bound;
      row["ok"] = r.ok;
      arr.push_back(std::move(row));
    }
    j["rows"] = std::move(arr);
    j["all_ok"] = all_ok;
    std::cout << j.dump(2) << "\n";
  } else if (c.csv) {
    std::cout << "k,log_zeta_route,direct_route,abs_diff,bound,ok\n";
    for (const auto& r : rows)
      std::cout << r.k << "," << num17(r.formula) << "," << num17(r.direct)
                << "," << num17(r.diff) << "," << num17(r.bound) << ","
                << (r.ok ? "yes" : "no") << "\n";
  } else {
    std::printf("prime zeta P(k): log-zeta formula vs direct sieve to %" PRIu64
                " plus tail\n",
                c.prime_limit);
    std::printf("%4s %20s %20s %12s %10s %4s\n", "k", "log-zeta", "direct",
                "|diff|", "bound", "ok");
    for (const auto& r : rows)
      std::printf("%4d %20.15f %20.15f %12.3e %10.0e %4s\n", r.k, r.formula,
                  r.direct, r.diff, r.bound, r.ok ? "yes" : "NO");
  }
  if (!all_ok) {
    std::cerr << "error: prime zeta routes disagree beyond the pinned bound\n";
    return 4;
  }
  return 0;
}

// -------------------------------------------------------------- coefficients

// The published truncated expansion of the totient-ratio-squared constant
// kept the cubic part of the deficiency only; from k = 8 on its printed
// coefficients differ from the exact ones.
const std::map<int, mm::Rational>& published_reference(const std::string& name) {
  static const std::map<int, mm::Rational> totient_ref = {
      {2, mm::Rational(2)},  {3, mm::Rational(-1)},    {4, mm::Rational(2)},
      {5, mm::Rational(-2)}, {6, mm::Rational(19, 6)}, {7, mm::Rational(-4)},
      {8, mm::Rational(2)},  {9, mm::Rational(-1, 3)}};
  static const std::map<int, mm::Rational> none;
  if (name == "totient_ratio_squared") return totient_ref;
  return none;
}

int run_coefficients(const Common& c) {
  check_format_flags(c);
  mm::MultiplicativeSpec spec = resolve_spec(c);
  if (!spec.series_rule)
    throw mm::SpecError("coefficients: '" + spec.name +
                        "' has no exact series rule");
  int order = c.series_order;
  mm::RationalSeries x = mm::local_factor_to_X(*spec.series_rule, order);
  mm::RationalSeries b = mm::series_neg_log(x, order);
  const auto& ref = published_reference(mm::detail::normalize_id(spec.name));

  if (c.json) {
    ojson j;
    j["function"] = spec.name;
    j["order"] = order;
    ojson arr = ojson::array();
    for (int k = 1; k <= order; ++k) {
      ojson row;
      row["k"] = k;
      row["a"] = mm::to_string(x.at(k));
      row["b"] = mm::to_string(b.at(k));
      auto it = ref.find(k);
      if (it != ref.end()) {
        row["reference"] = mm::to_string(it->second);
        row["matches"] = (b.at(k) == it->second);
      } else {
        row["reference"] = nullptr;
        row["matches"] = nullptr;
      }
      arr.push_back(std::move(row));
    }
    j["rows"] = std::move(arr);
    std::cout << j.dump(2) << "\n";
  } else if (c.csv) {
    std::cout << "k,a_k,b_k,reference,match\n";
    for (int k = 1; k <= order; ++k) {
      auto it = ref.find(k);
      std::cout << k << "," << mm::to_string(x.at(k)) << ","
                << mm::to_string(b.at(k)) << ",";
      if (it != ref.end())
        std::cout << mm::to_string(it->second) << ","
                  << ((b.at(k) == it->second) ? "yes" : "no");
      else
        std::cout << ",";
      std::cout << "\n";
    }
  } else {
    std::printf("series coefficients for %s (order %d)\n", spec.name.c_str(),
                order);
    std::printf("%4s %12s %12s %12s %8s\n", "k", "a_k", "b_k", "reference",
                "match");
    for (int k = 1; k <= order; ++k) {
      auto it = ref.find(k);
      std::printf("%4d %12s %12s", k, mm::to_string(x.at(k)).c_str(),
                  mm::to_string(b.at(k)).c_str());
      if (it != ref.end())
        std::printf(" %12s %8s", mm::to_string(it->second).c_str(),
                    (b.at(k) == it->second) ? "yes" : "DIFFERS");
      else
        std::printf(" %12s %8s", "-", "-");
      std::printf("\n");
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean values of bounded multiplicative functions"};
  app.require_subcommand(1);

  Common mv_c, sum_c, cmp_c, pz_c, coef_c;
  uint64_t sum_n = 0, cmp_n = 0;
  std::vector<uint64_t> sum_cps, cmp_cps;
  double cmp_threshold = 0.0;
  int pz_kmin = 2, pz_kmax = 10;

  CLI::App* mv_cmd = app.add_subcommand("meanvalue", "asymptotic mean value");
  add_common(mv_cmd, mv_c);

  CLI::App* sum_cmd =
      app.add_subcommand("summatory", "exact partial sums S(x) at checkpoints");
  add_common(sum_cmd, sum_c);
  sum_cmd->add_option("--n", sum_n, "range end")->required();
  sum_cmd->add_option("--checkpoints", sum_cps, "checkpoint list")
      ->delimiter(',');

  CLI::App* cmp_cmd =
      app.add_subcommand("compare", "S(x)/x against the predicted mean");
  add_common(cmp_cmd, cmp_c);
  cmp_cmd->add_option("--n", cmp_n, "range end")->required();
  cmp_cmd->add_option("--checkpoints", cmp_cps, "checkpoint list")
      ->delimiter(',');
  cmp_cmd->add_option("--threshold", cmp_threshold,
                      "flag rows with |residual| above this");

  CLI::App* pz_cmd =
      app.add_subcommand("primezeta", "P(k) by two independent routes");
  add_common(pz_cmd, pz_c, /*with_function=*/false);
  pz_cmd->add_option("--k-min", pz_kmin, "smallest exponent")->check(CLI::Range(2, 60));
  pz_cmd->add_option("--k-max", pz_kmax, "largest exponent")->check(CLI::Range(2, 60));

  CLI::App* coef_cmd = app.add_subcommand(
      "coefficients", "exact deficiency / log series coefficients");
  add_common(coef_cmd, coef_c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (mv_cmd->parsed()) return run_meanvalue(mv_c);
    if (sum_cmd->parsed())
      return run_summatory(sum_c, sum_n, sum_cps, 0.0, /*is_compare=*/false);
    if (cmp_cmd->parsed())
      return run_summatory(cmp_c, cmp_n, cmp_cps, cmp_threshold,
                           /*is_compare=*/true);
    if (pz_cmd->parsed()) return run_primezeta(pz_c, pz_kmin, pz_kmax);
    if (coef_cmd->parsed()) return run_coefficients(coef_c);
  } catch (const mm::NumericFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const mm::SpecError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const mm::AccelerationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
