#include <gtest/gtest.h>

#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <stdexcept>

#include "thermoslip/invariants.hpp"
#include "thermoslip/mms.hpp"

using namespace thermoslip;

namespace {

int cli_exit(const std::string& args) {
  const std::string cmd = std::string("\"") + THERMOSLIP_CLI + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

RunConfig coarse() {
  RunConfig cfg;
  cfg.domain.nx = 6;
  cfg.domain.nz = 3;
  cfg.coupling.constant_samples = 20;
  return cfg;
}

class ThreadEnv : public ::testing::Test {
 protected:
  void SetUp() override {
    if (const char* v = std::getenv("THERMOSLIP_NUM_THREADS")) saved_ = v;
  }
  void TearDown() override {
    if (saved_.empty()) {
      ::unsetenv("THERMOSLIP_NUM_THREADS");
    } else {
      ::setenv("THERMOSLIP_NUM_THREADS", saved_.c_str(), 1);
    }
  }
  std::string saved_;
};

}  // namespace

TEST(SuiteReport, ExitCodes) {
  SuiteReport r;
  EXPECT_EQ(r.exit_code(), 0);
  r.checks.push_back({"a", true, false, 0.0, 1.0, ""});
  EXPECT_EQ(r.exit_code(), 0);
  r.checks.push_back({"b", false, true, 2.0, 1.0, ""});
  EXPECT_TRUE(r.all_passed());
  EXPECT_TRUE(r.has_expected_fail());
  EXPECT_EQ(r.exit_code(), 2);
  r.checks.push_back({"c", false, false, 2.0, 1.0, ""});
  EXPECT_FALSE(r.all_passed());
  EXPECT_EQ(r.exit_code(), 4);
  const Json j = to_json(r);
  EXPECT_EQ(j["checks"].size(), 3u);
  EXPECT_EQ(j["checks"][2]["name"].get<std::string>(), "c");
}

using Threads = ThreadEnv;

TEST_F(Threads, WorkerCountFromEnvironment) {
  ::unsetenv("THERMOSLIP_NUM_THREADS");
  EXPECT_EQ(worker_threads(), 1);
  ::setenv("THERMOSLIP_NUM_THREADS", "3", 1);
  EXPECT_EQ(worker_threads(), 3);
  for (const char* bad : {"0", "-2", "two", ""}) {
    ::setenv("THERMOSLIP_NUM_THREADS", bad, 1);
    EXPECT_EQ(worker_threads(), 1) << bad;
  }
}

TEST_F(Threads, ParallelForVisitsEveryIndexOnce) {
  for (const char* n : {"1", "4"}) {
    ::setenv("THERMOSLIP_NUM_THREADS", n, 1);
    std::vector<std::atomic<int>> hits(97);
    parallel_for(97, [&](int i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
    parallel_for(0, [](int) { FAIL(); });
  }
}

TEST_F(Threads, ParallelForRethrows) {
  ::setenv("THERMOSLIP_NUM_THREADS", "2", 1);
  std::atomic<int> done{0};
  EXPECT_THROW(parallel_for(10, [&](int i) {
                 done++;
                 if (i == 3) throw std::runtime_error("boom");
               }),
               std::runtime_error);
  EXPECT_GE(done.load(), 1);
}

TEST(RandomField, VanishesOnConstraintsAndIsSeeded) {
  const Scenario sc = build_scenario(coarse());
  const FlowSolver flow(sc.disc, sc.flow_problem, sc.flow_config);
  const HeatSolver heat(sc.disc, sc.models, sc.heat_bcs);
  const DirichletSet& bc = heat.constraints();
  const Field a = random_constrained_field(sc.disc.temperature, bc, 5, 2.0);
  const Field b = random_constrained_field(sc.disc.temperature, bc, 5, 2.0);
  const Field c = random_constrained_field(sc.disc.temperature, bc, 6, 2.0);
  EXPECT_EQ(a.values, b.values);
  EXPECT_NE(a.values, c.values);
  for (int i = 0; i < a.values.size(); ++i) {
    if (bc.constrained(i)) EXPECT_EQ(a.values[i], 0.0);
    EXPECT_LE(std::abs(a.values[i]), 2.0);
  }
}

TEST(Mms, FlowIsExactAndHeatConvergesAtSecondOrder) {
  const MmsTable flow = run_flow_mms(3);
  ASSERT_EQ(flow.levels.size(), 3u);
  for (const auto& l : flow.levels) {
    EXPECT_LE(l.l2, 1e-8);
    EXPECT_LE(l.h1, 1e-8);
  }
  const MmsTable heat = run_heat_mms(3);
  EXPECT_TRUE(heat.monotone);
  EXPECT_GE(heat.min_l2_rate, 1.8);
  EXPECT_GE(heat.min_h1_rate, 0.9);
  EXPECT_DOUBLE_EQ(heat.levels[1].h, heat.levels[0].h / 2.0);
  EXPECT_THROW(run_mms("nope", 3), InvalidInput);
}

TEST(Checks, TrescaAndPressureOnCoarseMesh) {
  const Scenario sc = build_scenario(coarse());
  for (const CheckResult& c : check_tresca(sc)) EXPECT_TRUE(c.passed) << c.name << " " << c.detail;
  for (const CheckResult& c : check_pressure(sc)) EXPECT_TRUE(c.passed) << c.name << " " << c.detail;
}

TEST(Checks, OperatorMonotonicityExpectedFailForShearThinning) {
  RunConfig cfg = coarse();
  cfg.rheology.r_exp = 1.5;
  const Scenario sc = build_scenario(cfg);
  const auto checks = check_operator(sc, 10, 3);
  bool saw = false;
  for (const CheckResult& c : checks) {
    if (c.name.find("monoton") != std::string::npos) {
      saw = true;
      EXPECT_TRUE(c.expected_fail);
    }
  }
  EXPECT_TRUE(saw);
}

TEST(Suite, CoarseDefaultPassesAndIsDeterministic) {
  const SuiteReport a = run_invariant_suite(coarse(), 11);
  for (const CheckResult& c : a.checks) {
    EXPECT_TRUE(c.passed || c.expected_fail) << c.name << " " << c.detail;
  }
  EXPECT_EQ(a.exit_code(), 0);
  const SuiteReport b = run_invariant_suite(coarse(), 11);
  EXPECT_EQ(to_json(a).dump(), to_json(b).dump());
}

TEST(Cli, ExitCodes) {
  const std::string dir = THERMOSLIP_CONFIG_DIR;
  EXPECT_EQ(cli_exit("info --config " + dir + "/default.ini"), 0);
  EXPECT_EQ(cli_exit("info --config " + dir + "/invalid_mu0.ini"), 5);
  EXPECT_EQ(cli_exit("info --config /nonexistent.ini"), 5);
  EXPECT_EQ(cli_exit("mms --case flow --levels 3"), 0);
  EXPECT_EQ(cli_exit("mms --case heat --levels 2"), 5);
  EXPECT_NE(cli_exit("no-such-command"), 0);
}
