#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "sgdlab/experiments.hpp"

namespace {

namespace fs = std::filesystem;

struct Result {
  int code = -1;
  std::string out;  // stdout and stderr
};

Result run(const std::string& args) {
  const std::string cmd = std::string("\"") + SGDLAB_CLI_PATH + "\" " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::path(SGDLAB_TEST_TMPDIR) / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

TEST(Cli, HelpExitsZero) {
  EXPECT_EQ(run("--help").code, 0);
  for (const char* sub : {"simulate", "sweep", "oracle", "bounds", "verify", "reproduce-fig1"}) {
    const Result r = run(std::string(sub) + " --help");
    EXPECT_EQ(r.code, 0) << sub;
    EXPECT_NE(r.out.find("Usage"), std::string::npos) << sub;
  }
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("simulate --scheme bogus --k 1 --auto-eta").code, 2);
  EXPECT_EQ(run("simulate --scheme ss --k 3").code, 2);  // no step size
  EXPECT_EQ(run("simulate --scheme ss --k 3 --eta 0.1 --auto-eta").code, 2);
  EXPECT_EQ(run("simulate --scheme ss --k 3 --eta 0.01 --lambda-max 0.5").code, 2);
  EXPECT_EQ(run("oracle --quantity beta --n 18 --eta-lmax 1 --method exact").code, 2);
  EXPECT_EQ(run("oracle --quantity nonsense").code, 2);
}

TEST(Cli, OracleValues) {
  Result r = run("oracle --quantity beta --n 2 --eta-lmax 0.5");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("0.25"), std::string::npos) << r.out;
  r = run("oracle --quantity perm-moment --n 6 --m 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("rational=1/10"), std::string::npos) << r.out;
  r = run("oracle --quantity beta --n 2 --eta-lmax 0.5 --csv");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("beta,2,0.5,"), std::string::npos) << r.out;
}

TEST(Cli, SimulateWritesTrajectory) {
  const fs::path d = fresh_dir("cli_simulate");
  const Result r = run("simulate --construction ss --n 10 --lambda-max 5 --scheme rr --k 4 --auto-eta --seed 3 --out \"" +
                       (d / "t.csv").string() + "\"");
  ASSERT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("final_loss="), std::string::npos);
  const std::string csv = slurp(d / "t.csv");
  EXPECT_NE(csv.find("# rng_algorithm_id="), std::string::npos);
  EXPECT_NE(csv.find("epoch,x_1,x_2,loss"), std::string::npos);
  const Result again = run("simulate --construction ss --n 10 --lambda-max 5 --scheme rr --k 4 --auto-eta --seed 3");
  EXPECT_EQ(again.out, r.out);
}

TEST(Cli, SimulateMethodsAgree) {
  const std::string base = "simulate --construction rr --n 8 --lambda-max 4 --scheme ss --k 5 --eta 0.05 --seed 9";
  const Result a = run(base + " --method iterative"), b = run(base + " --method closed-form");
  ASSERT_EQ(a.code, 0) << a.out;
  ASSERT_EQ(b.code, 0) << b.out;
  const auto loss = [](const std::string& s) { return std::stod(s.substr(s.find("final_loss=") + 11)); };
  EXPECT_NEAR(loss(a.out), loss(b.out), 1e-12 * std::abs(loss(a.out)) + 1e-300);
}

TEST(Cli, Bounds) {
  const Result r = run("bounds --n 500 --k 100 --lambda-max 200");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("k,SS-LOWER,RR-LOWER,SS-UPPER,RR-UPPER,WR-BASELINE"), std::string::npos);
  EXPECT_NE(r.out.find("crossover_epoch=200"), std::string::npos);
}

TEST(Cli, Verify) {
  const Result ok = run("verify --suite all");
  EXPECT_EQ(ok.code, 0) << ok.out;
  const Result broken = run("verify --suite lemmas --mutate perm-moment-sign");
  EXPECT_EQ(broken.code, 1) << broken.out;
  EXPECT_NE(broken.out.find("FAIL"), std::string::npos);
}

TEST(Cli, SweepCsvParses) {
  const fs::path d = fresh_dir("cli_sweep");
  const Result r = run("sweep --construction ss --scale desk --seeds 2 --k-values 1,2 --eta 0.001 --out \"" +
                       (d / "r.csv").string() + "\" --summary \"" + (d / "s.csv").string() + "\"");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto records = sgdlab::parse_records_csv(slurp(d / "r.csv"));
  EXPECT_EQ(records.size(), 3u * 2u * 2u);
  EXPECT_EQ(sgdlab::parse_summaries_csv(slurp(d / "s.csv")), sgdlab::summarize(records));
}

TEST(Cli, ReproduceRefusesNonEmptyDir) {
  const fs::path d = fresh_dir("cli_reproduce_busy");
  std::ofstream(d / "keep.txt") << "x";
  EXPECT_EQ(run("reproduce-fig1 --seeds 1 --out-dir \"" + d.string() + "\"").code, 2);
}

TEST(Cli, ReproduceWritesOutputs) {
  const fs::path d = fresh_dir("cli_reproduce");
  const Result r = run("reproduce-fig1 --seeds 2 --out-dir \"" + d.string() + "\"");
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* f : {"ss_records.csv", "rr_records.csv", "ss.svg", "rr.svg"}) {
    EXPECT_TRUE(fs::exists(d / f)) << f;
  }
  EXPECT_NE(slurp(d / "ss.svg").find("stroke-dasharray"), std::string::npos);
  EXPECT_EQ(run("reproduce-fig1 --seeds 2 --force --out-dir \"" + d.string() + "\"").code, 0);
}

}  // namespace
