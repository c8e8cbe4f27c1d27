#include <gtest/gtest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "amqsec/curve_io.hpp"

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + " " + AMQSEC_CLI_PATH + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf;
  while (std::size_t n = fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::map<std::string, std::string> fields(const std::string& out) {
  std::map<std::string, std::string> m;
  std::istringstream is(out);
  std::string line;
  while (std::getline(is, line)) {
    auto p = line.find(": ");
    if (p != std::string::npos) m[line.substr(0, p)] = line.substr(p + 2);
  }
  return m;
}

std::filesystem::path scratch(const std::string& name) {
  auto d = std::filesystem::temp_directory_path() / ("amqsec_cli_" + name);
  std::filesystem::remove_all(d);
  std::filesystem::create_directories(d);
  return d;
}

TEST(Cli, FpBoundBloomExample) {
  auto r = run("fp-bound --family bloom --m 1024 --k 7 --n 100");
  ASSERT_EQ(r.code, 0);
  auto f = fields(r.out);
  EXPECT_NEAR(std::stod(f.at("bound")), 7.5e-3, 0.1e-3);
  EXPECT_LT(std::stod(f.at("estimate")), std::stod(f.at("bound")));
}

TEST(Cli, FpBoundCuckooFamilies) {
  auto c = fields(run("fp-bound --family cuckoo --s 4 --lambda-t 8").out);
  EXPECT_NEAR(std::stod(c.at("bound")), 3.46e-2, 0.01e-2);
  auto w = fields(run("fp-bound --family prf_wrapped_cuckoo --s 4 --lambda-t 8 --range-bits 20").out);
  EXPECT_NEAR(std::stod(w.at("bound")) - std::stod(c.at("bound")), 50 * std::ldexp(1.0, -20), 1e-15);
}

TEST(Cli, AdvAndPrivacyBounds) {
  auto a = fields(run("adv-bound --nai-fp 9.5367431640625e-07 --q-t 1024").out);
  EXPECT_DOUBLE_EQ(std::stod(a.at("eps_prime")), std::ldexp(1.0, -9));
  EXPECT_EQ(run("adv-bound --immutable --q-u 3").code, 2);
  auto p = fields(run("privacy-bound --q-u 512 --q-t 512 --min-entropy 32").out);
  EXPECT_DOUBLE_EQ(std::stod(p.at("guess_bound")), std::ldexp(1.0, -22));
}

TEST(Cli, PlanCuckooCsvSortedAndAdversarialAboveHonest) {
  auto dir = scratch("plan");
  auto r = run("plan --family cuckoo --log-n 7 --log-q 30 --eps-prf-log2 -256 --target-log2 -10",
               "AMQSEC_OUT_DIR=" + dir.string());
  ASSERT_EQ(r.code, 0) << r.out;
  std::ifstream in(dir / "plan_cuckoo.csv");
  ASSERT_TRUE(in);
  auto pts = amqsec::parse_curve_csv(in);
  ASSERT_FALSE(pts.empty());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) {
      EXPECT_LE(pts[i - 1].storage_bits, pts[i].storage_bits);
    }
    EXPECT_GE(pts[i].log2_eps_prime, pts[i].log2_honest_fp);
  }
  EXPECT_TRUE(fields(r.out).count("storage_ratio"));
  std::filesystem::remove_all(dir);
}

TEST(Cli, PlanSvgByExtension) {
  auto dir = scratch("svg");
  auto path = (dir / "curve.svg").string();
  ASSERT_EQ(run("plan --family bloom --log-n 7 --log-q 12 --out " + path).code, 0);
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first.rfind("<svg", 0), 0u);
  std::filesystem::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("fp-bound --bogus 1").code, 2);
  EXPECT_EQ(run("fp-bound --family bloom --k 0").code, 2);
  EXPECT_EQ(run("fp-bound --family quotient").code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("plan --format png").code, 2);
  EXPECT_EQ(run("plan --family bloom --log-q 4 --out /nonexistent_dir/x.csv").code, 1);
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("--version").code, 0);
}

TEST(Cli, ThresholdFailureExitCode) {
  EXPECT_EQ(run("experiment --check nai-check --trials 200 --threshold 0").code, 3);
  EXPECT_EQ(run("experiment --check fp --family bloom --m 4096 --k 4 --n 200 --probes 20000").code, 0);
}

TEST(Cli, RandomizedRunsPrintSeedAndAreDeterministic) {
  auto a = run("--seed 9 game roi --family cuckoo --s 2 --lambda-i 4 --lambda-t 6 --world ideal");
  auto b = run("game roi --family cuckoo --s 2 --lambda-i 4 --lambda-t 6 --world ideal --seed 9");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(fields(a.out).at("seed"), "9");
  auto c = run("game roi --family cuckoo --s 2 --lambda-i 4 --lambda-t 6 --world ideal --seed 10");
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, LoadFactorSmall) {
  auto r = run("experiment load-factor --s 4 --lambda-i 8 --lambda-t 8 --num 500 --trials 4 --seed 3");
  ASSERT_EQ(r.code, 0);
  auto f = fields(r.out);
  EXPECT_GT(std::stod(f.at("mean")), 0.8);
  EXPECT_TRUE(f.count("trial_3"));
}

TEST(Cli, AttackSubcommands) {
  auto p = fields(run("attack pollution --target weak --probes 500 --uniform-probes 500").out);
  EXPECT_GT(std::stod(p.at("adversarial_fp")), 10 * std::stod(p.at("honest_bound")));
  auto t = run("attack tsc --target weak --trials 3");
  EXPECT_EQ(t.code, 0);
  auto c = run("attack cuckoo-pi --trials 100");
  EXPECT_EQ(c.code, 0);
  EXPECT_GE(std::stod(fields(c.out).at("advantage")), 0.9);
  EXPECT_EQ(run("attack pollution --target medium").code, 2);
}

TEST(Cli, GameSubcommands) {
  EXPECT_EQ(run("game pi --trials 200").code, 0);
  EXPECT_EQ(run("game elem-rep --trials 200 --v-size 10").code, 0);
  EXPECT_EQ(run("game pi --trials 10").code, 2);
  auto dir = scratch("tr");
  auto path = (dir / "t.jsonl").string();
  ASSERT_EQ(run("game roi --transcript " + path).code, 0);
  std::ifstream in(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  EXPECT_GT(n, 10u);
  std::filesystem::remove_all(dir);
}

}  // namespace
