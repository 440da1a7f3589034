#include "cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace svet::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "svet");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> read_summary(const fs::path& p) {
  std::map<std::string, std::string> kv;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("svet_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const char* name) const { return (dir_ / name).string(); }
  fs::path dir_;
};

TEST_F(CliTest, BoundsTable) {
  const auto r = run_cli({"bounds"});
  EXPECT_EQ(r.code, 0);
  for (const char* row : {"CHSH local 2\n", "Mermin local 2\n", "Svetlichny bipartite 4\n", "Mermin bipartite 4\n",
                          "Svetlichny quantum 5.657\n", "CHSH quantum 2.828\n"}) {
    EXPECT_NE(r.out.find(row), std::string::npos) << row;
  }
}

TEST_F(CliTest, SourceSimulation) {
  const auto r = run_cli({"source-sim"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("postselection_probability=0.083333"), std::string::npos);
  EXPECT_NE(r.out.find("fidelity_ghz=1.0000000000"), std::string::npos);
  EXPECT_NE(r.out.find("amplitude_HHH=0.000000+0.000000i"), std::string::npos);
}

TEST_F(CliTest, PredictAndOptimize) {
  auto r = run_cli({"predict", "--v", "0.797"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("svetlichny=4.508513"), std::string::npos);

  r = run_cli({"optimize-angles", "--restarts", "5", "--out", path("angles")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("svetlichny=5.65685"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "angles" / "phases.json"));
}

TEST_F(CliTest, CorrelationsOnBundledData) {
  const auto r = run_cli({"correlations", "--replicates", "50", "--out", path("corr")});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("E(a,b,c) -0.593103"), std::string::npos);
  EXPECT_NE(r.out.find("-172/290"), std::string::npos);
  EXPECT_NE(r.out.find("svetlichny 4.507044"), std::string::npos);
  const auto csv = slurp(dir_ / "corr" / "correlations.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 9);
}

TEST_F(CliTest, SimulateIsDeterministicAndComplete) {
  ASSERT_EQ(run_cli({"simulate", "--v", "0.9", "--intensity", "500", "--seed", "4", "--out", path("a")}).code, 0);
  ASSERT_EQ(run_cli({"simulate", "--v", "0.9", "--intensity", "500", "--seed", "4", "--out", path("b")}).code, 0);
  ASSERT_EQ(run_cli({"simulate", "--v", "0.9", "--intensity", "500", "--seed", "5", "--out", path("c")}).code, 0);
  const auto a = slurp(dir_ / "a" / "counts.csv");
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 217);
  EXPECT_EQ(a, slurp(dir_ / "b" / "counts.csv"));
  EXPECT_NE(a, slurp(dir_ / "c" / "counts.csv"));
}

TEST_F(CliTest, ReportOnBundledData) {
  const auto r = run_cli({"report", "--out", path("report")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* f : {"correlations.csv", "svetlichny.json", "rho_real.csv", "rho_imag.csv", "summary.txt"}) {
    EXPECT_TRUE(fs::exists(dir_ / "report" / f)) << f;
    EXPECT_FALSE(fs::exists(dir_ / "report" / (std::string(f) + ".tmp"))) << f;
  }
  auto kv = read_summary(dir_ / "report" / "summary.txt");
  EXPECT_NEAR(std::stod(kv["svetlichny_point"]), 4.51, 0.005);
  EXPECT_NEAR(std::stod(kv["svetlichny_sigma"]), 0.14, 0.03);
  EXPECT_NEAR(std::stod(kv["fidelity_point"]), 0.84, 0.02);
  EXPECT_EQ(kv["sigma_weak"], "false");
  EXPECT_EQ(kv["tomography_converged"], "true");

  const auto summary = slurp(dir_ / "report" / "summary.txt");
  EXPECT_EQ(summary.rfind("svetlichny_point=", 0), 0u);
  EXPECT_LT(summary.find("svetlichny_sigma="), summary.find("fidelity_point="));

  const auto json = slurp(dir_ / "report" / "svetlichny.json");
  EXPECT_NE(json.find("\"bound\": 4"), std::string::npos);
  EXPECT_NE(json.find("\"quantum_max\": 5.65685"), std::string::npos);
}

TEST_F(CliTest, ReportRerunIsByteIdentical) {
  ASSERT_EQ(run_cli({"report", "--replicates", "20", "--out", path("one")}).code, 0);
  ASSERT_EQ(run_cli({"report", "--replicates", "20", "--out", path("two")}).code, 0);
  for (const char* f : {"correlations.csv", "svetlichny.json", "rho_real.csv", "rho_imag.csv", "summary.txt"}) {
    EXPECT_EQ(slurp(dir_ / "one" / f), slurp(dir_ / "two" / f)) << f;
  }
}

TEST_F(CliTest, FewReplicatesAreFlagged) {
  const auto r = run_cli({"report", "--replicates", "2", "--out", path("weak")});
  EXPECT_EQ(r.code, 0);
  auto kv = read_summary(dir_ / "weak" / "summary.txt");
  EXPECT_EQ(kv["sigma_weak"], "true");
  EXPECT_NE(r.out.find("statistically weak"), std::string::npos);
}

TEST_F(CliTest, ReportOnSimulatedIdealData) {
  ASSERT_EQ(run_cli({"simulate", "--v", "1", "--intensity", "1e5", "--out", path("sim")}).code, 0);
  const auto r = run_cli({"report", "--counts", path("sim/counts.csv"), "--phases", path("sim/phases.json"),
                          "--replicates", "20", "--out", path("rep")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto kv = read_summary(dir_ / "rep" / "summary.txt");
  EXPECT_NEAR(std::stod(kv["svetlichny_point"]), 5.66, 0.02);
  EXPECT_GE(std::stod(kv["fidelity_point"]), 0.99);
}

TEST_F(CliTest, NonConvergenceExitsThreeAndStillWrites) {
  const auto r = run_cli({"report", "--replicates", "2", "--max-iterations", "3", "--out", path("nc")});
  EXPECT_EQ(r.code, 3);
  auto kv = read_summary(dir_ / "nc" / "summary.txt");
  EXPECT_EQ(kv["tomography_converged"], "false");
  EXPECT_TRUE(fs::exists(dir_ / "nc" / "rho_real.csv"));
  EXPECT_EQ(run_cli({"tomography", "--max-iterations", "3"}).code, 3);
}

TEST_F(CliTest, MalformedInputExitsTwo) {
  std::ofstream(path("bad.csv")) << "a,b,c\n";
  std::ofstream(path("neg.csv")) << "party_a,party_b,party_c,count\nH,H,H,-3\n";
  std::ofstream(path("phases.json")) << "{\"phi_z\": 1}";
  std::ofstream(path("partial.csv")) << "party_a,party_b,party_c,count\nH,H,H,3\n";

  EXPECT_EQ(run_cli({"correlations", "--counts", path("bad.csv")}).code, 2);
  EXPECT_EQ(run_cli({"correlations", "--counts", path("neg.csv")}).code, 2);
  EXPECT_EQ(run_cli({"correlations", "--phases", path("phases.json")}).code, 2);
  EXPECT_EQ(run_cli({"tomography", "--counts", path("partial.csv")}).code, 2);
  EXPECT_EQ(run_cli({"report", "--counts", path("missing.csv")}).code, 2);
  EXPECT_EQ(run_cli({"simulate", "--v", "1.5"}).code, 2);
  EXPECT_EQ(run_cli({"simulate", "--intensity", "-1"}).code, 2);
  EXPECT_EQ(run_cli({"correlations", "--replicates", "1"}).code, 2);
  EXPECT_EQ(run_cli({"bounds", "--seed", "0"}).code, 2);
  EXPECT_EQ(run_cli({"bounds", "--no-such-flag"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  const auto r = run_cli({"correlations", "--counts", path("bad.csv")});
  EXPECT_NE(r.err.find("header"), std::string::npos);
}

}  // namespace
}  // namespace svet::cli
