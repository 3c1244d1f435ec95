#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "commands.h"

namespace etamix::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const fs::path kConfigs = ETAMIX_CONFIG_DIR;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "etamix");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("etamix_cli_" + std::string(::testing::UnitTest::GetInstance()
                                             ->current_test_info()
                                             ->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), {}};
  }

  fs::path dir_;
};

TEST_F(CliTest, MixingIidIsZero) {
  const auto r = run({"mixing", (kConfigs / "iid-fair-coin-n8.json").string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("schema_version"), 1);
  EXPECT_TRUE(j.contains("resolved_config"));
  const auto& values = j.at("eta_bar").at("bruteforce").at("values");
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t k = i + 1; k < 8; ++k) EXPECT_NEAR(values[i][k].get<double>(), 0.0, 1e-12);
}

TEST_F(CliTest, MixingBothMethodsAgree) {
  const auto r = run({"mixing", (kConfigs / "chain-theta025-n6.json").string(), "--method",
                      "both"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_LE(j.at("max_abs_difference").get<double>(), 1e-10);
}

TEST_F(CliTest, MixingSingleEntry) {
  const auto r = run({"mixing", (kConfigs / "figure1-joint.json").string(), "--i", "2",
                      "--j", "4"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = json::parse(r.out);
  EXPECT_GT(j.at("entry").at("eta_bar_bruteforce").get<double>(), 0.06);
}

TEST_F(CliTest, MalformedJsonIsInputError) {
  const auto p = write("bad.json", "{ \"n\": 3, \"hidden_alphabet\": [\"0\" ");
  const auto r = run({"mixing", p.string()});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, UnknownKeyIsInputError) {
  const auto p = write("extra.json", R"({"n": 1, "hidden_alphabet": ["0"],
    "observed_alphabet": ["0"], "initial": [1], "kernels": [], "colour": 3})");
  const auto r = run({"mixing", p.string()});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_NE(r.err.find("colour"), std::string::npos) << r.err;
}

TEST_F(CliTest, InvalidRowIsInputError) {
  const auto p = write("row.json", R"({"n": 2, "hidden_alphabet": ["0", "1"],
    "observed_alphabet": ["0", "1"], "initial": [0.5, 0.5],
    "kernels": [[0.9, 0.08], [0.2, 0.8]], "homogeneous": true})");
  const auto r = run({"mixing", p.string()});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_NE(r.err.find("row sum 0.98"), std::string::npos) << r.err;
}

TEST_F(CliTest, BoundsAtZeroAndClosedForms) {
  const auto r = run({"bounds", (kConfigs / "chain-theta025-n6.json").string(), "--t",
                      "0,0.3"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto j = json::parse(r.out);
  const auto& row0 = j.at("rows")[0];
  EXPECT_EQ(row0.at("kontram_raw"), 2.0);
  EXPECT_EQ(row0.at("kontram_capped"), 1.0);
  EXPECT_EQ(row0.at("samson_raw"), 2.0);
  const auto& cf = j.at("contracting_closed_forms");
  EXPECT_NEAR(cf.at("delta_inf_bound").get<double>(), 4.0 / 3.0, 1e-15);
  EXPECT_EQ(cf.at("gamma_2_bound").get<double>(), 2.0);
}

TEST_F(CliTest, BoundsNormsMatchMixing) {
  const auto cfg = (kConfigs / "chain-theta025-n6.json").string();
  const auto b = json::parse(run({"bounds", cfg}).out);
  const auto m = json::parse(run({"mixing", cfg}).out);
  EXPECT_EQ(b.at("delta_inf_norm"), m.at("delta_inf_norm"));
  EXPECT_EQ(b.at("gamma_2_norm"), m.at("gamma_2_norm"));
}

TEST_F(CliTest, MonteCarloDeterministicFiles) {
  const auto cfg = (kConfigs / "chain-theta07-n8.json").string();
  const auto a = dir_ / "a.json";
  const auto b = dir_ / "b.json";
  const auto csv = dir_ / "a.csv";
  ASSERT_EQ(run({"montecarlo", cfg, "--N", "5000", "--seed", "3", "-o", a.string(), "--csv",
                 csv.string()})
                .code,
            kExitOk);
  ASSERT_EQ(run({"montecarlo", cfg, "--N", "5000", "--seed", "3", "-o", b.string()}).code,
            kExitOk);
  EXPECT_EQ(slurp(a), slurp(b));
  const auto table = slurp(csv);
  EXPECT_EQ(table.substr(0, table.find('\n')),
            "t,empirical,stderr,bound_bruteforce_raw,bound_bruteforce_capped,"
            "bound_theorem_raw,bound_theorem_capped");
}

TEST_F(CliTest, MonteCarloDefaultConfigsDominate) {
  for (const char* name : {"iid-fair-coin-n8.json", "chain-theta07-n8.json"}) {
    const auto r = run({"montecarlo", (kConfigs / name).string(), "--N", "20000"});
    EXPECT_EQ(r.code, kExitOk) << name << r.err;
  }
}

TEST_F(CliTest, MonteCarloZeroSamplesIsInputError) {
  const auto r = run({"montecarlo", (kConfigs / "iid-fair-coin-n8.json").string(), "--N", "0"});
  EXPECT_EQ(r.code, kExitInputError);
}

TEST_F(CliTest, MonteCarloFunctionSpecs) {
  const auto cfg = (kConfigs / "chain-theta07-n8.json").string();
  for (const char* f : {"hamming:1", "const:0.2", "coord:1,-1,1,-1,1,-1,1,-1:1"}) {
    const auto r = run({"montecarlo", cfg, "--N", "1000", "--f", f});
    EXPECT_EQ(r.code, kExitOk) << f << " " << r.err;
  }
  EXPECT_EQ(run({"montecarlo", cfg, "--N", "1000", "--f", "cubic"}).code, kExitInputError);
}

TEST_F(CliTest, ScenarioListAndRun) {
  const auto list = run({"scenario", "--list"});
  ASSERT_EQ(list.code, kExitOk);
  for (const char* name : {"figure1-counterexample", "iid-uniform-n4", "deterministic-copy-n4"})
    EXPECT_NE(list.out.find(name), std::string::npos);
  const auto fig = run({"scenario", "figure1-counterexample"});
  ASSERT_EQ(fig.code, kExitOk) << fig.err;
  const auto j = json::parse(fig.out);
  EXPECT_TRUE(j.at("passed").get<bool>());
  EXPECT_GT(j.at("summary").at("eta_bar_observed").at("values")[1][3].get<double>(), 0.06);
}

TEST_F(CliTest, UnknownScenarioListsNames) {
  const auto r = run({"scenario", "nope"});
  EXPECT_EQ(r.code, kExitInputError);
  EXPECT_NE(r.err.find("figure1-counterexample"), std::string::npos);
}

TEST_F(CliTest, MissingFileIsInputError) {
  EXPECT_EQ(run({"mixing", (dir_ / "absent.json").string()}).code, kExitInputError);
  EXPECT_EQ(run({"frobnicate"}).code, kExitInputError);
}

}  // namespace
}  // namespace etamix::cli
