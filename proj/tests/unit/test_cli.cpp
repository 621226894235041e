#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "xpv/cli.hpp"

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = xpv::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("report envelope") {
  const Run r = cli({"charsum", "--q", "3,7", "--pv-ratio"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  for (const char* key : {"version", "command", "config", "stamps", "results", "discrepancies", "pass"})
    CHECK(j.contains(key));
  CHECK(j["version"] == xpv::kVersion);
  CHECK(j["results"][1]["max_abs_S"] == 2);
}

TEST_CASE("exit codes") {
  CHECK(cli({"verify", "--check", "pnt-lower", "--from", "2", "--to", "58"}).code == 2);
  CHECK(cli({"verify", "--check", "pnt-upper", "--from", "59", "--to", "10000"}).code == 0);
  CHECK(cli({"verify", "--check", "log2p-plain", "--from", "1", "--to", "1000", "--open-lo"}).code == 1);
  CHECK(cli({"verify", "--check", "nope", "--from", "2", "--to", "3"}).code == 2);
  CHECK(cli({"frobnicate"}).code == 2);
  CHECK(cli({"--format", "csv", "dickman"}).code == 2);
  const Run e = cli({"mfunc", "--kind", "chi:9", "--x", "100"});
  CHECK(e.code == 2);
  CHECK(e.err.find("error (domain)") != std::string::npos);
}

TEST_CASE("published delta reproduces the table ratio") {
  const Run r = cli({"table", "--c1", "1", "--c", "0.99", "--delta-paper"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const double ratio = j["results"][1]["cells"][0]["ratio"]["value"];
  CHECK(ratio == doctest::Approx(1.42).epsilon(0.01));
}

TEST_CASE("sieve cap override") {
  CHECK(cli({"--sieve-limit", "1000", "verify", "--check", "pi-li-1", "--from", "2", "--to", "1e6"}).code == 2);
}

TEST_CASE("csv and text formats") {
  const Run csv = cli({"--format", "csv", "charsum", "--q", "3,7", "--pv-ratio"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("q,", 0) == 0);
  const Run text = cli({"--format", "text", "charsum", "--q", "7"});
  CHECK(text.code == 0);
  CHECK(text.out.find("max_abs_S") != std::string::npos);
}

TEST_CASE("output file") {
  const std::string path = "xpv_cli_test_out.json";
  const Run r = cli({"--out", path, "charsum", "--q", "11"});
  CHECK(r.code == 0);
  std::ifstream in(path);
  REQUIRE(in.good());
  const auto j = nlohmann::json::parse(in);
  CHECK(j["command"] == "charsum");
  std::remove(path.c_str());
}

TEST_CASE("identical flags give identical bytes") {
  const std::vector<std::vector<std::string>> commands = {
      {"verify", "--check", "mertens-remainder", "--from", "1", "--to", "100000", "--open-lo"},
      {"dickman", "--xmax", "40"},
      {"mfunc", "--kind", "random_pm1:5", "--kind", "liouville", "--x", "100,10000"},
      {"table"},
      {"charsum", "--q", "3,7,11", "--pv-ratio"},
  };
  for (const auto& c : commands) {
    CAPTURE(c[0]);
    const Run a = cli(c), b = cli(c);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("thread count leaves results unchanged") {
  auto results = [](const char* threads) {
    const Run r = cli({"--threads", threads, "verify", "--check", "pi-li-2", "--from", "2", "--to", "1e6"});
    auto j = nlohmann::json::parse(r.out);
    return j["results"].dump();
  };
  CHECK(results("1") == results("4"));
}
