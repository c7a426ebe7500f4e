#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdc_cli/app.hpp"

using hdc::cli::run;

namespace {

struct Captured {
  int code;
  std::string out;
  std::string err;
};

Captured invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "hdc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  auto* old_out = std::cout.rdbuf(out.rdbuf());
  auto* old_err = std::cerr.rdbuf(err.rdbuf());
  const int code = run(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("gamma-star prints the exponent") {
  const Captured c = invoke({"gamma-star", "--tol", "1e-9", "--quiet"});
  CHECK(c.code == 0);
  CHECK(c.out == "1.567353753\n");
  const Captured d = invoke({"gamma-star", "--method", "digamma", "--tol", "1e-12", "--format", "json"});
  CHECK(d.code == 0);
  const auto doc = nlohmann::json::parse(d.out);
  CHECK(std::abs(doc["report"]["gamma_star"].get<double>() - 1.567353753101655) < 2e-12);
}

TEST_CASE("sequence csv rows") {
  const Captured c = invoke({"sequence", "--k", "2", "--xk", "0.5", "--n-max", "10", "--format", "csv", "--quiet"});
  CHECK(c.code == 0);
  CHECK(c.out.rfind("n,x_n,x_n_minus_x\n", 0) == 0);
  CHECK(c.out.find("\n3,0.33333333333333331,") != std::string::npos);
  CHECK(c.out.find("\n4,0.31818181818181818,") != std::string::npos);
  const Captured e = invoke({"sequence", "--k", "2", "--xk", "1/2", "--n-max", "4", "--exact", "--out", "csv", "--quiet"});
  CHECK(e.out.find("\n4,7/22,") != std::string::npos);
}

TEST_CASE("simulate is seeded and deterministic") {
  const Captured c = invoke({"simulate", "--n", "2", "--replicas", "10", "--stat", "count:2", "--seed", "1", "--quiet"});
  CHECK(c.code == 0);
  std::istringstream lines(c.out);
  std::string line;
  std::getline(lines, line);
  CHECK(line == "replica,value");
  int rows = 0;
  while (std::getline(lines, line)) {
    CHECK(line.substr(line.find(',') + 1) == "1");
    ++rows;
  }
  CHECK(rows == 10);
  const auto a = invoke({"simulate", "--n", "300", "--replicas", "20", "--stat", "length", "--seed", "8", "--quiet"});
  const auto b = invoke({"simulate", "--n", "300", "--replicas", "20", "--stat", "length", "--seed", "8", "--quiet", "--threads", "3"});
  CHECK(a.out == b.out);
  CHECK(invoke({"simulate", "--n", "10", "--replicas", "5"}).code == hdc::cli::kExitUsage);
  CHECK(invoke({"clt-check", "--n", "10", "--replicas", "5"}).code == hdc::cli::kExitUsage);
}

TEST_CASE("metadata block") {
  const Captured c = invoke({"em-check", "--n", "1000", "--format", "json"});
  REQUIRE(c.code == 0);
  const auto doc = nlohmann::json::parse(c.out);
  const auto& meta = doc["metadata"];
  CHECK(meta["tool"] == "hdc");
  CHECK(meta["version"].is_string());
  CHECK(meta["generator_id"] == "mt19937_64+splitmix64/v1");
  CHECK(meta["config"]["gamma"] == 2.5);
  CHECK(meta["config"]["n"] == 1000);
  CHECK(std::regex_match(meta["timestamp"].get<std::string>(),
                         std::regex(R"(\d{4}-\d\d-\d\dT\d\d:\d\d:\d\dZ)")));
  // Text and csv runs put the block on stderr.
  const Captured t = invoke({"occupation", "--n", "5"});
  CHECK(nlohmann::json::parse(t.err)["metadata"]["subcommand"] == "occupation");
}

TEST_CASE("resource guards and parameter errors") {
  CHECK(invoke({"sequence", "--n-max", "200000", "--quiet"}).code == hdc::cli::kExitResource);
  CHECK(invoke({"dp-moments", "--n-max", "100001", "--quiet"}).code == hdc::cli::kExitResource);
  CHECK(invoke({"simulate", "--n", "100000", "--replicas", "20000", "--seed", "1", "--quiet"}).code ==
        hdc::cli::kExitResource);
  CHECK(invoke({"sequence", "--exact", "--n-max", "600", "--quiet"}).code == hdc::cli::kExitResource);
  CHECK(invoke({"sequence", "--xk", "-1", "--quiet"}).code == hdc::cli::kExitUsage);
  CHECK(invoke({"sequence", "--kernel", "beta:0.5", "--quiet"}).code == hdc::cli::kExitUsage);
  CHECK(invoke({"ansatz", "--f", "pow:1", "--quiet"}).code == hdc::cli::kExitUsage);
  CHECK(invoke({"gamma-star", "--format", "csv"}).code == hdc::cli::kExitUsage);
  CHECK(invoke({"verify-all", "--only", "99"}).code == hdc::cli::kExitUsage);
  CHECK(invoke({"no-such-command"}).code == hdc::cli::kExitUsage);
}

TEST_CASE("output directory from the environment") {
  const auto dir = std::filesystem::temp_directory_path() / "hdc_cli_test_out";
  std::filesystem::remove_all(dir);
  ::setenv(hdc::cli::kOutputDirEnv, dir.c_str(), 1);
  const Captured c = invoke({"dp-moments", "--stat", "length", "--n-max", "20", "--out", "sub/len.csv", "--quiet"});
  ::unsetenv(hdc::cli::kOutputDirEnv);
  REQUIRE(c.code == 0);
  std::ifstream csv(dir / "sub" / "len.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "n,mean,variance,E_n,V_n");
  std::ifstream meta(dir / "sub" / "len.csv.meta.json");
  const auto doc = nlohmann::json::parse(meta);
  CHECK(doc["metadata"]["config"]["n-max"] == 20);
  std::filesystem::remove_all(dir);
}

TEST_CASE("check subcommands report verdicts") {
  CHECK(invoke({"gprime-check", "--quiet"}).code == 0);
  CHECK(invoke({"monotone-check", "--k-max", "4", "--n-exact", "60", "--n-float", "500", "--quiet"}).code == 0);
  CHECK(invoke({"monotone-check", "--kernel", "beta:-2", "--n-float", "300", "--quiet"}).code == 0);
  const Captured d = invoke({"differences", "--k", "3", "--n-max", "300", "--check-direct", "--format", "json"});
  CHECK(d.code == 0);
  CHECK(nlohmann::json::parse(d.out)["report"]["max_rel_vs_direct"].get<double>() < 1e-9);
  const Captured r = invoke({"clt-check", "--n", "400", "--replicas", "2000", "--stat", "length", "--seed", "3", "--format", "json"});
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["report"]["normality"]["source"] == "dp-exact");
  CHECK(r.code == (doc["report"]["normality"]["verdict"] == "pass" ? 0 : 1));
  const Captured a = invoke({"ansatz", "--n", "500", "1000", "--f", "pow:-2", "--format", "json"});
  CHECK(nlohmann::json::parse(a.out)["report"]["gaps_decreasing"] == true);
}

TEST_CASE("exact rational parsing") {
  using hdc::cli::parse_rational;
  CHECK(parse_rational("0.5") == hdc::Rational(1, 2));
  CHECK(parse_rational("7/22") == hdc::Rational(7, 22));
  CHECK(parse_rational("-1.25e-1") == hdc::Rational(-1, 8));
  CHECK(parse_rational("3") == 3);
  CHECK(parse_rational("2E2") == 200);
  for (const char* bad : {"", "abc", "1..2", "1/0", "e5", "1e"}) CHECK_THROWS(parse_rational(bad));
}
