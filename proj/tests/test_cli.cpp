#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "pcover/cli.hpp"

using namespace pcover;
using io::Json;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
  Json json() const { return Json::parse(out); }
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "pcover");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string data(const std::string& name) { return std::string(PCOVER_DATA_DIR) + "/" + name; }

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "pcover_cli_test";
  std::filesystem::create_directories(dir);
  return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, CertifyTinyFixture) {
  const auto r = run({"certify", "--family", data("tiny.json"), "--p", "1/8"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = r.json();
  EXPECT_EQ(j["result"]["verdict"], "p-small");
  EXPECT_EQ(j["result"]["cost"], "1/2");
  EXPECT_EQ(j["format_version"], io::kFormatVersion);
  EXPECT_EQ(j["config"]["subcommand"], "certify");
  EXPECT_EQ(j["config"]["p"], "1/8");
  EXPECT_TRUE(j["config"].contains("guards"));
}

TEST(Cli, CertifyFloatMode) {
  const auto r = run({"certify", "--family", data("tiny.json"), "--p", "1/4", "--mode", "float", "--greedy"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.json()["result"]["verdict"], "not-p-small");
  EXPECT_DOUBLE_EQ(r.json()["result"]["cost"].get<double>(), 1.0);
  EXPECT_EQ(r.json()["result"]["greedy"]["cost"], "1");
}

TEST(Cli, GenReproducesTheFixture) {
  const auto r = run({"gen", "--kind", "disjoint-singletons", "--n", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  Json j = r.json();
  EXPECT_EQ(j["format_version"], io::kFormatVersion);
  j.erase("format_version");
  j.erase("config");
  EXPECT_EQ(j, io::read_json_file(data("tiny.json")));
}

TEST(Cli, GeneratorsAreDeterministicAndReadable) {
  for (const std::string kind : {"random-family", "threshold-from-lambda", "random-multiset-family", "random-empirical"}) {
    const auto a = run({"gen", "--kind", kind, "--seed", "3", "--n", "4"});
    const auto b = run({"gen", "--kind", kind, "--seed", "3", "--n", "4"});
    ASSERT_EQ(a.code, 0) << kind << a.err;
    EXPECT_EQ(a.out, b.out) << kind;
    const auto path = scratch(kind + ".json");
    std::ofstream(path) << a.out;
    if (kind == "random-family" || kind == "threshold-from-lambda") {
      EXPECT_EQ(run({"certify", "--family", path.string()}).code, 0) << kind;
    } else if (kind == "random-multiset-family") {
      EXPECT_EQ(run({"mcertify", "--family", path.string()}).code, 0);
    } else {
      EXPECT_EQ(run({"coverage", "--instance", path.string()}).code, 0);
    }
  }
}

TEST(Cli, SuiteIsByteReproducible) {
  const auto a = run({"suite", "--seed", "7"});
  const auto b = run({"suite", "--seed", "7"});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.json()["result"]["all_passed"], true);
}

TEST(Cli, LedgerWritesCsv) {
  const auto csv = scratch("ledger.csv");
  const auto out = scratch("ledger.json");
  const auto r = run({"ledger", "--family", data("tiny.json"), "--J", "2", "--exhaustive", "--csv", csv.string(), "--out",
                      out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(slurp(csv), "b,s_b,t,bucket_cost,bound\n");
  const Json j = Json::parse(slurp(out));
  EXPECT_EQ(j["result"]["ledger"]["w"], 1);
  EXPECT_EQ(j["result"]["ledger"]["ok"], true);
}

TEST(Cli, EstimateAgreesWithExactAndTracesTheMean) {
  const auto csv = scratch("trace.csv");
  const auto r = run({"estimate", "--lambda", data("lambda_small.json"), "--p", "3/10", "--trials", "1e5", "--seed", "2",
                      "--csv", csv.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = r.json();
  EXPECT_EQ(j["result"]["exact"], "30447/40000");
  EXPECT_EQ(j["result"]["within_4_sigma"], true);
  EXPECT_EQ(j["config"]["trials"], "1e5");
  const auto text = slurp(csv);
  EXPECT_EQ(text.rfind("chunk,trials,running_mean\n", 0), 0U);
  EXPECT_NE(text.find("\n1,100000,"), std::string::npos);
}

TEST(Cli, RemainingSubcommandsSucceedOnFixtures) {
  const std::vector<std::vector<std::string>> cases = {
      {"fragment", "--family", data("tiny.json"), "--W", "0,2"},
      {"fragment", "--family", data("multiset_small.json"), "--W", "0:2,1:1"},
      {"reduce", "--family", data("tiny.json"), "--p", "1/2", "--K", "2", "--trials", "20000"},
      {"mcertify", "--family", data("multiset_small.json")},
      {"mledger", "--family", data("multiset_small.json"), "--J0", "400", "--c", "0.5"},
      {"bridge", "--instance", data("empirical_small.json"), "--L", "1"},
      {"coverage", "--instance", data("empirical_small.json"), "--L", "1", "--eps", "1/100"},
  };
  for (const auto& c : cases) {
    const auto r = run(c);
    EXPECT_EQ(r.code, 0) << c[0] << ": " << r.err;
    EXPECT_EQ(r.json()["command"], c[0]);
  }
}

TEST(Cli, PropertyViolationExitsOne) {
  // A good-threshold above the capture share lets a bad W take index -1.
  const auto r = run({"fragment", "--family", data("tiny.json"), "--W", "0", "--good-threshold", "2"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(r.json()["result"]["class"], "bad");
  EXPECT_EQ(r.json()["result"]["fragments"][0]["checks"]["bad_index"], false);
}

TEST(Cli, MalformedJsonExitsTwoWithLocation) {
  const auto path = scratch("broken.json");
  std::ofstream(path) << "{\"n\": 4, \"p\": \"1/8\", \"sets\": [ }";
  const auto r = run({"certify", "--family", path.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("at byte"), std::string::npos) << r.err;

  const auto bad = scratch("bad_schema.json");
  std::ofstream(bad) << R"({"n": 2, "p": "1/8", "sets": [{"elems": [5]}]})";
  const auto s = run({"certify", "--family", bad.string()});
  EXPECT_EQ(s.code, 2);
  EXPECT_NE(s.err.find("/sets/0"), std::string::npos) << s.err;
}

TEST(Cli, GuardBreachNamesTheGuard) {
  const auto r = run({"ledger", "--family", data("tiny.json"), "--J", "1/100"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ledger-w"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"certify"}).code, 2);
  EXPECT_EQ(run({"certify", "--family", data("tiny.json"), "--bogus"}).code, 2);
  EXPECT_EQ(run({"certify", "--family", data("tiny.json"), "--mode", "fuzzy"}).code, 2);
  EXPECT_EQ(run({"estimate", "--lambda", data("lambda_small.json"), "--p", "1/2", "--trials", "many"}).code, 2);
  EXPECT_EQ(run({"gen", "--kind", "nonsense"}).code, 2);
  EXPECT_EQ(run({"certify", "--family", data("missing.json")}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}
