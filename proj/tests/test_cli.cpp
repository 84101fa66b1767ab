#include <catch2/catch_amalgamated.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>

using ojson = nlohmann::ordered_json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args) {
  std::string cmd = std::string(MM_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Run r;
  char buf[4096];
  size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (pos < s.size()) {
    size_t nl = s.find('\n', pos);
    if (nl == std::string::npos) nl = s.size();
    out.push_back(s.substr(pos, nl - pos));
    pos = nl + 1;
  }
  return out;
}

}  // namespace

TEST_CASE("meanvalue json carries the full result") {
  auto r = cli("meanvalue totient-ratio-squared --json");
  REQUIRE(r.code == 0);
  ojson j = ojson::parse(r.out);
  CHECK(j["function"] == "totient_ratio_squared");
  CHECK(std::fabs(j["value"].get<double>() - 0.42824950567709444) < 1e-12);
  CHECK(j["method"] == "accelerated");
  CHECK(j["convergence_class"] == "convergent");
  CHECK(j["error_bound"].get<double>() < 1e-12);
  CHECK(j["series_order"] == 40);
  CHECK(j["hybrid_split"] == 101);
  CHECK(j["multiplier"] == 1.0);
}

TEST_CASE("json output round-trips byte-identically") {
  for (const char* args : {"meanvalue squarefree --json",
                           "summatory mobius --n 10000 --json",
                           "compare one --n 1000 --json",
                           "primezeta --k-max 6 --json",
                           "coefficients squarefree --series-order 8 --json"}) {
    CAPTURE(args);
    auto r = cli(args);
    REQUIRE(r.code == 0);
    ojson j = ojson::parse(r.out);
    CHECK(j.dump(2) + "\n" == r.out);
  }
}

TEST_CASE("meanvalue handles the divergent and paper-style paths") {
  auto mob = cli("meanvalue mobius --json");
  REQUIRE(mob.code == 0);
  ojson j = ojson::parse(mob.out);
  CHECK(j["value"] == 0.0);
  CHECK(j["method"] == "divergent_zero");
  CHECK(j["convergence_class"] == "divergent");

  auto pt = cli("meanvalue totient_ratio_squared --method paper_truncation --json");
  REQUIRE(pt.code == 0);
  ojson p = ojson::parse(pt.out);
  CHECK(std::fabs(p["c_constant"].get<double>() - 0.81220844534333259) < 1e-12);
  CHECK(std::fabs(p["value"].get<double>() - 0.44387670553772497) < 1e-12);
  CHECK(p["series_order"] == 5);
  CHECK(p["hybrid_split"] == 1);
}

TEST_CASE("meanvalue accepts underscore and hyphen ids alike") {
  auto a = cli("meanvalue totient-ratio-squared --json");
  auto b = cli("meanvalue totient_ratio_squared --json");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("meanvalue loads spec files") {
  const char* path = "/tmp/mm_cli_spec.json";
  {
    std::ofstream f(path);
    f << R"({"rule": {"type": "builtin", "id": "squarefree"}})";
  }
  auto file = cli(std::string("meanvalue --spec ") + path + " --json");
  auto builtin = cli("meanvalue squarefree --json");
  REQUIRE(file.code == 0);
  CHECK(file.out == builtin.out);
  std::remove(path);
}

TEST_CASE("invalid configurations exit with 2") {
  CHECK(cli("meanvalue no_such_function").code == 2);
  CHECK(cli("meanvalue").code == 2);                      // selector required
  CHECK(cli("meanvalue epsilon --method accelerated").code == 2);
  CHECK(cli("meanvalue mobius --method strong").code == 2);
  CHECK(cli("summatory mobius").code == 2);               // --n required
  CHECK(cli("meanvalue mobius --series-order 1").code == 2);
  CHECK(cli("meanvalue mobius --series-order 65").code == 2);
  CHECK(cli("meanvalue mobius --json --csv").code == 2);  // pick one format
  CHECK(cli("meanvalue mobius --no-such-flag").code == 2);
  CHECK(cli("summatory mobius --n 0").code == 2);
  CHECK(cli("summatory mobius --n 100 --checkpoints 50,20").code == 2);
  CHECK(cli("nosubcommand").code == 2);

  const char* path = "/tmp/mm_cli_bad.json";
  {
    std::ofstream f(path);
    f << R"({"rule": {"type": "builtin", "id": "squarefree"}, "wild": 1})";
  }
  CHECK(cli(std::string("meanvalue --spec ") + path).code == 2);
  // spec file and positional selector are mutually exclusive
  CHECK(cli(std::string("meanvalue mobius --spec ") + path).code == 2);
  CHECK(cli("meanvalue --spec /tmp/mm_does_not_exist.json").code == 2);
  std::remove(path);
}

TEST_CASE("non-contracting acceleration exits with 4") {
  const char* path = "/tmp/mm_cli_wide.json";
  {
    std::ofstream f(path);
    f << R"({"name": "wide",
             "rule": {"type": "alpha_poly", "polys": [["1", "-18/5"]],
                      "default": "repeat_last"},
             "strongly_multiplicative": true})";
  }
  auto r = cli(std::string("meanvalue --spec ") + path +
               " --method accelerated --split-p0 1");
  CHECK(r.code == 4);
  // with the default split the same spec is fine
  auto ok = cli(std::string("meanvalue --spec ") + path + " --method accelerated");
  CHECK(ok.code == 0);
  std::remove(path);
}

TEST_CASE("strict flag is accepted on decisive runs") {
  CHECK(cli("meanvalue mobius --strict").code == 0);
  CHECK(cli("meanvalue squarefree --strict --json").code == 0);
}

TEST_CASE("summatory csv has the exact contract header and integer sums") {
  auto r = cli("summatory mobius --n 1000000 "
               "--checkpoints 10,100,1000,10000,100000,1000000 --csv");
  REQUIRE(r.code == 0);
  auto ls = lines(r.out);
  REQUIRE(ls.size() == 7);
  CHECK(ls[0] == "x,S,S_over_x,predicted_mean,residual");
  CHECK(ls[1].rfind("10,-1,", 0) == 0);
  CHECK(ls[2].rfind("100,1,", 0) == 0);
  CHECK(ls[3].rfind("1000,2,", 0) == 0);
  CHECK(ls[4].rfind("10000,-23,", 0) == 0);
  CHECK(ls[5].rfind("100000,-48,", 0) == 0);
  CHECK(ls[6].rfind("1000000,212,", 0) == 0);
}

TEST_CASE("summatory defaults to a single checkpoint at n") {
  auto eps = cli("summatory epsilon --n 100 --csv");
  REQUIRE(eps.code == 0);
  auto ls = lines(eps.out);
  REQUIRE(ls.size() == 2);   // header + one row
  CHECK(ls[1].rfind("100,1,", 0) == 0);

  auto one = cli("summatory one --n 100 --json");
  REQUIRE(one.code == 0);
  ojson j = ojson::parse(one.out);
  REQUIRE(j["rows"].size() == 1);
  CHECK(j["rows"][0]["x"] == 100);
  CHECK(j["rows"][0]["S"] == 100);
  CHECK(j["rows"][0]["S_over_x"] == 1.0);
}

TEST_CASE("compare defaults to decade checkpoints and flags residuals") {
  auto r = cli("compare powerful --n 1000000 --json");
  REQUIRE(r.code == 0);
  ojson j = ojson::parse(r.out);
  REQUIRE(j["rows"].size() == 6);
  double prev = 1.0;
  for (size_t i = 1; i < j["rows"].size(); ++i) {   // decades 100..1e6 decline
    double res = std::fabs(j["rows"][i]["residual"].get<double>());
    CHECK(res < prev);
    prev = res;
  }

  auto exact = cli("compare one --n 1000 --json");
  ojson e = ojson::parse(exact.out);
  for (const auto& row : e["rows"]) CHECK(row["residual"] == 0.0);

  // the final residual of the totient family at 1e5 is well under 1e-3
  auto tot = cli("compare totient-ratio-squared --n 100000 --json");
  ojson t = ojson::parse(tot.out);
  CHECK(std::fabs(t["rows"].back()["residual"].get<double>()) < 1e-3);

  // threshold column flips when the bar tightens
  auto flagged = cli("compare totient-ratio-squared --n 10000 --threshold 1e-9");
  REQUIRE(flagged.code == 0);
  CHECK(flagged.out.find("FLAG") != std::string::npos);
  auto calm = cli("compare one --n 1000 --threshold 1e-9");
  CHECK(calm.out.find("FLAG") == std::string::npos);
}

TEST_CASE("primezeta cross-validates its two routes") {
  auto r = cli("primezeta --k-min 2 --k-max 10 --json");
  REQUIRE(r.code == 0);
  ojson j = ojson::parse(r.out);
  REQUIRE(j["rows"].size() == 9);
  for (const auto& row : j["rows"]) {
    CHECK(row["ok"] == true);
    CHECK(row["abs_diff"].get<double>() <= 1e-12);
  }
  CHECK(std::fabs(j["rows"][0]["log_zeta_route"].get<double>() -
                  0.45224742004106549850) < 1e-10);
  CHECK(j["all_ok"] == true);

  CHECK(cli("primezeta --k-min 1 --k-max 10").code == 2);
  CHECK(cli("primezeta --k-min 8 --k-max 4").code == 2);
}

TEST_CASE("coefficients prints exact rationals with reference marks") {
  auto r = cli("coefficients totient-ratio-squared --series-order 11 --json");
  REQUIRE(r.code == 0);
  ojson j = ojson::parse(r.out);
  const char* want_b[] = {"0", "2",    "-1", "2",     "-2",   "19/6",
                          "-4", "6",   "-25/3", "62/5", "-18"};
  REQUIRE(j["rows"].size() == 11);
  for (size_t i = 0; i < j["rows"].size(); ++i) {
    const auto& row = j["rows"][i];
    CHECK(row["k"] == static_cast<int>(i) + 1);
    CHECK(row["b"] == want_b[i]);
  }
  // printed reference stops at k = 9; k = 8, 9 disagree with the recomputation
  CHECK(j["rows"][5]["matches"] == true);    // k = 6
  CHECK(j["rows"][7]["matches"] == false);   // k = 8: 6 vs printed 2
  CHECK(j["rows"][8]["matches"] == false);   // k = 9: -25/3 vs printed -1/3
  CHECK(j["rows"][9]["matches"].is_null());  // k = 10: nothing published
  CHECK(j["rows"][7]["reference"] == "2");
  CHECK(j["rows"][8]["reference"] == "-1/3");

  auto human = cli("coefficients totient-ratio-squared --series-order 9");
  CHECK(human.out.find("DIFFERS") != std::string::npos);

  auto sf = cli("coefficients squarefree --series-order 8 --json");
  ojson s = ojson::parse(sf.out);
  CHECK(s["rows"][1]["b"] == "1");     // k = 2
  CHECK(s["rows"][3]["b"] == "1/2");   // k = 4
  CHECK(s["rows"][5]["b"] == "1/3");   // k = 6
  CHECK(s["rows"][7]["b"] == "1/4");   // k = 8
  CHECK(s["rows"][0]["a"] == "0");
  CHECK(s["rows"][1]["a"] == "1");
}

TEST_CASE("summatory output is independent of the thread flag") {
  auto a = cli("summatory totient-ratio-squared --n 300000 "
               "--checkpoints 1000,300000 --csv --threads 1");
  auto b = cli("summatory totient-ratio-squared --n 300000 "
               "--checkpoints 1000,300000 --csv --threads 4");
  REQUIRE(a.code == 0);
  REQUIRE(b.code == 0);
  CHECK(a.out == b.out);
}

TEST_CASE("human meanvalue table lists the key fields") {
  auto r = cli("meanvalue squarefree");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("value") != std::string::npos);
  CHECK(r.out.find("method") != std::string::npos);
  CHECK(r.out.find("accelerated") != std::string::npos);
  CHECK(r.out.find("0.607927101854") != std::string::npos);   // 12 digits
}
