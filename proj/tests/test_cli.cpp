#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fbl/cli.hpp"
#include "fbl/errors.hpp"

namespace {

using nlohmann::json;
namespace cli = fbl::cli;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

TEST(Cli, ParseSpace) {
  EXPECT_EQ(cli::parse_space("l1:3").dim(), 3);
  EXPECT_EQ(cli::parse_space("lp:2:inf").dim(), 2);
  EXPECT_EQ(cli::parse_space("wl1:0.5,2").dim(), 2);
  EXPECT_DOUBLE_EQ(cli::parse_space("lp:2:3").primal_norm(Eigen::Vector2d(1, 1)), std::cbrt(2.0));
  EXPECT_THROW(cli::parse_space("l3:2"), fbl::ValidationError);
  EXPECT_THROW(cli::parse_space("l1:0"), fbl::ValidationError);
  EXPECT_THROW(cli::parse_space("lp:2:0.5"), fbl::ValidationError);
}

TEST(Cli, NormOfJoin) {
  const auto o = run({"norm", "--space", "l1:2", "--expr", "join(abs(delta [1,0]),abs(delta [0,1]))", "--k", "2"});
  ASSERT_EQ(o.code, cli::kOk) << o.err;
  const json r = json::parse(o.out);
  EXPECT_NEAR(r["value"].get<double>(), 2.0, 1e-6);
  EXPECT_EQ(r["flags"]["value"], "heuristic-lower-bound");
  EXPECT_EQ(r["certificate"]["tuple"].size(), 2u);
}

TEST(Cli, WitnessAndGPhi) {
  const auto c0 = run({"witness", "c0", "--n", "4"});
  ASSERT_EQ(c0.code, cli::kOk) << c0.err;
  EXPECT_EQ(json::parse(c0.out)["tail_profile"], json::parse("[1.0,1.0,1.0,1.0]"));
  const auto g = run({"gphi", "--phi", "0.5,0.5", "--x", "1,-1"});
  ASSERT_EQ(g.code, cli::kOk) << g.err;
  const json r = json::parse(g.out);
  EXPECT_EQ(r["norm"].get<double>(), 1.0);
  EXPECT_EQ(r["value"].get<double>(), 1.0);
  EXPECT_EQ(r["flags"]["norm"], "exact");
}

TEST(Cli, ValidationFailuresExitWithTwo) {
  EXPECT_EQ(run({"norm", "--space", "l7:2", "--expr", "abs(delta [1,0])"}).code, cli::kValidationFailure);
  EXPECT_EQ(run({"norm", "--space", "l1:2", "--expr", "abs(delta [1,0,0])"}).code, cli::kValidationFailure);
  EXPECT_EQ(run({"norm", "--space", "l1:2", "--expr", "abs(delta [1,0]"}).code, cli::kValidationFailure);
  EXPECT_EQ(run({"norm", "--space", "l1:2", "--expr", "abs(delta [1,0])", "--k", "0"}).code, cli::kValidationFailure);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kValidationFailure);
}

TEST(Cli, MalformedFileReportsLine) {
  const std::string path = write_temp("fbl_cli_bad.json", "{\n  \"space\": \"l1:2\",\n  \"tasks\": [,]\n}\n");
  const auto o = run({"norm", "--file", path});
  EXPECT_EQ(o.code, cli::kValidationFailure);
  EXPECT_NE(o.err.find(path + ":3:"), std::string::npos) << o.err;
}

const char* kProblem = R"J({
  "space": {"kind": "l1", "dim": 2},
  "optimizer": {"seed": 7, "starts": 16, "iters": 500},
  "expressions": {
    "a": "abs(delta [1,0])",
    "b": "abs(delta [0,1])",
    "j": "join(a, b)"
  },
  "families": {"coords": {"directify": ["a", "b"]}},
  "tasks": [
    {"type": "norm", "expr": "j", "k": 2},
    {"type": "norm", "expr": "a", "k": 1},
    {"type": "maximal", "family": "coords", "k": 2},
    {"type": "gphi", "phi": [0.25, 0.75]}
  ]
})J";

TEST(Cli, ProblemFileTasks) {
  const std::string path = write_temp("fbl_cli_problem.json", kProblem);
  const auto o = run({"norm", "--file", path});
  ASSERT_EQ(o.code, cli::kOk) << o.err;
  const json doc = json::parse(o.out);
  ASSERT_EQ(doc["reports"].size(), 2u);
  EXPECT_NEAR(doc["reports"][0]["value"].get<double>(), 2.0, 1e-6);
  EXPECT_NEAR(doc["reports"][1]["value"].get<double>(), 1.0, 1e-9);
  const auto m = run({"maximal", "--file", path});
  ASSERT_EQ(m.code, cli::kOk) << m.err;
  EXPECT_EQ(json::parse(m.out)["reports"].size(), 1u);
  EXPECT_EQ(run({"bound", "--file", path}).code, cli::kValidationFailure);
}

TEST(Cli, UnknownReferencesInFiles) {
  const std::string path = write_temp("fbl_cli_ref.json",
                                      R"J({"space": "l1:2", "expressions": {"a": "abs(delta [1,0])"},
                                          "tasks": [{"type": "norm", "expr": "zz", "k": 1}]})J");
  const auto o = run({"norm", "--file", path});
  EXPECT_EQ(o.code, cli::kValidationFailure);
  EXPECT_NE(o.err.find("zz"), std::string::npos);
}

TEST(Cli, OutputIsDeterministic) {
  const std::vector<std::string> args = {"norm", "--space", "l2:2", "--expr", "meet(abs(delta [1,0]),abs(delta [0,1]))",
                                         "--k", "3", "--seed", "11", "--starts", "8"};
  const auto a = run(args), b = run(args);
  ASSERT_EQ(a.code, cli::kOk);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, CsvOutput) {
  const auto o = run({"gphi", "--phi", "1,0", "--csv"});
  ASSERT_EQ(o.code, cli::kOk) << o.err;
  EXPECT_EQ(o.out.rfind("field,value\n", 0), 0u);
  EXPECT_NE(o.out.find("norm,1.0\n"), std::string::npos) << o.out;
}

TEST(Cli, OutFileAndSelftest) {
  const auto path = (std::filesystem::temp_directory_path() / "fbl_cli_out.json").string();
  const auto o = run({"witness", "c0", "--n", "2", "--out", path});
  ASSERT_EQ(o.code, cli::kOk) << o.err;
  EXPECT_TRUE(o.out.empty());
  std::ifstream in(path);
  EXPECT_EQ(json::parse(in)["n"], 2);
  const auto s = run({"selftest"});
  EXPECT_EQ(s.code, cli::kOk) << s.err;
  EXPECT_TRUE(json::parse(s.out)["pass"].get<bool>());
}

}  // namespace
