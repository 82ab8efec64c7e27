#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + std::string(DLQ_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string kCircuit = std::string(DLQ_DATA_DIR) + "/paired_groups.qc";

}  // namespace

TEST(Cli, BuildCode) {
  const auto r = run("build-code --family 666 --d 3");
  ASSERT_EQ(r.exit_code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc.at("n").get<int>(), 7);
  EXPECT_EQ(doc.at("checks").size(), 6u);
}

TEST(Cli, AllocateFlexibleSplit) {
  const auto r = run("allocate --code 488 --d 5 --procs 40,26 --policy strict");
  ASSERT_EQ(r.exit_code, 0);
  const auto doc = nlohmann::json::parse(r.out);
  EXPECT_EQ(doc.at("cost").at("pnl_total").get<int>(), 12);
  EXPECT_EQ(doc.at("local_baseline").get<int>(), 17);
  EXPECT_EQ(doc.at("optimality").get<std::string>(), "ProvenOptimal");
}

TEST(Cli, SweepShowsAdvantageAtSeven) {
  const auto r = run("sweep --family 488 --dmax 9");
  ASSERT_EQ(r.exit_code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "family,d,local_pnl,distributed_pnl,optimality");
  bool saw_seven = false;
  while (std::getline(in, line)) {
    if (line.rfind("Hex488,7,", 0) == 0) {
      saw_seven = true;
      EXPECT_EQ(line, "Hex488,7,31,28,ProvenOptimal");
    }
  }
  EXPECT_TRUE(saw_seven);
}

TEST(Cli, ThreadsDoNotChangeOutput) {
  EXPECT_EQ(run("--threads 1 sweep --family 666 --dmax 5").out, run("--threads 4 sweep --family 666 --dmax 5").out);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
  for (const std::string& args : std::vector<std::string>{"allocate --code 488 --d 5 --procs 38,28",
                                 "partition --circuit " + kCircuit + " --procs 61,61,61,61 --code 488 --d 7",
                                 std::string("universality --strategy all --d 7..9 --nr 1..2 --c-cut 14"),
                                 std::string("thresholds --family 488 --pmin 2 --pmax 2 --dmax 7")}) {
    const auto a = run(args);
    const auto b = run(args);
    EXPECT_EQ(a.exit_code, 0) << args;
    EXPECT_FALSE(a.out.empty()) << args;
    EXPECT_EQ(a.out, b.out) << args;
  }
}

TEST(Cli, PartitionCosts) {
  auto total = [](const std::string& args) {
    const auto r = run(args);
    EXPECT_EQ(r.exit_code, 0) << args;
    return nlohmann::json::parse(r.out).at("total_pnl").get<int>();
  };
  EXPECT_EQ(total("partition --circuit " + kCircuit + " --procs 122,122 --code 488 --d 7"), 31);
  EXPECT_EQ(total("partition --circuit " + kCircuit + " --procs 61,61,61,61 --code 488 --d 7 --layout local"), 651);
  EXPECT_EQ(total("partition --circuit " + kCircuit + " --procs 61,61,61,61 --code 488 --d 7"), 591);
  EXPECT_EQ(total("partition --circuit " + kCircuit +
                  " --procs 122,122 --code 488 --d 7 --refine-procs 61,61,61,61 --rounds 2"),
            591);
}

TEST(Cli, Universality) {
  const auto r = run("universality --strategy msd --d 7 --nr 1..2 --c-cut 14");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.rfind("strategy,d,n_r,mode,pnl,logical_per_proc\n", 0), 0u);
  EXPECT_NE(r.out.find("MSD_FullyDistributed,7,1,standard,98,3"), std::string::npos);
  EXPECT_NE(r.out.find("MSD_FullyDistributed,7,2,standard,490,3"), std::string::npos);
}

TEST(Cli, Verify) {
  const auto r = run("verify --dmax 9");
  EXPECT_EQ(r.exit_code, 0);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").exit_code, 2);
  EXPECT_EQ(run("frobnicate").exit_code, 2);
  EXPECT_EQ(run("allocate --code 488 --d 5 --procs 40,26 --bogus").exit_code, 2);
  EXPECT_EQ(run("build-code --family 488 --d 4").exit_code, 2);
  EXPECT_EQ(run("build-code --family surface --d 3").exit_code, 2);
  EXPECT_EQ(run("allocate --code 488 --d 5 --procs 40,26 --mode warp").exit_code, 2);
}

TEST(Cli, InfeasibleExitsOne) {
  EXPECT_EQ(run("allocate --code 488 --d 5 --procs 20,20").exit_code, 1);
  EXPECT_EQ(run("partition --circuit " + kCircuit + " --procs 61,61 --code 488 --d 7").exit_code, 1);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("dlq_cli_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto r = run("build-code --family 488 --d 5 --out code.json", "DLQ_OUT_DIR=" + dir.string());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(dir / "code.json");
  ASSERT_TRUE(in.good());
  const auto doc = nlohmann::json::parse(in);
  EXPECT_EQ(doc.at("n").get<int>(), 17);
  fs::remove_all(dir);
}
