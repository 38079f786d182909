#include <gtest/gtest.h>

#include <algorithm>

#include "thermoslip/config.hpp"
#include "thermoslip/scenario.hpp"

using namespace thermoslip;

namespace {

std::vector<std::string> errors_of(const std::string& text) {
  try {
    parse_config_string(text);
  } catch (const ConfigError& e) {
    return e.errors();
  }
  return {};
}

bool any_contains(const std::vector<std::string>& errors, const std::string& needle) {
  return std::any_of(errors.begin(), errors.end(), [&](const std::string& e) { return e.find(needle) != std::string::npos; });
}

}  // namespace

TEST(Config, EmptyTextGivesDefaults) {
  const RunConfig cfg = parse_config_string("");
  const RunConfig def;
  EXPECT_EQ(to_ini(cfg), to_ini(def));
  EXPECT_EQ(cfg.rheology.kind, "carreau_clamped");
  EXPECT_DOUBLE_EQ(cfg.rheology.mu0, 0.5);
  EXPECT_DOUBLE_EQ(cfg.coupling.p_exponent, 4.0);
  EXPECT_TRUE(validate(def).empty());
}

TEST(Config, DefaultFileParses) {
  const RunConfig cfg = parse_config(THERMOSLIP_CONFIG_DIR "/default.ini");
  EXPECT_EQ(cfg.domain.nx, 16);
  EXPECT_EQ(cfg.domain.nz, 8);
  EXPECT_DOUBLE_EQ(cfg.domain.slope_x, -0.25);
  EXPECT_EQ(cfg.coupling.mode, "gauss_seidel");
}

TEST(Config, CommentsAndWhitespace) {
  const RunConfig cfg = parse_config_string(
      "# leading comment\n"
      "  [ rheology ]  \n"
      "mu0 = 0.25   # trailing comment\n"
      "\r\n"
      "[coupling]\n"
      "mode=paper_nested\n");
  EXPECT_DOUBLE_EQ(cfg.rheology.mu0, 0.25);
  EXPECT_EQ(cfg.coupling.mode, "paper_nested");
}

TEST(Config, NonPositiveMu0Rejected) {
  for (const char* v : {"0", "-1", "0.0"}) {
    const auto errors = errors_of(std::string("[rheology]\nmu0 = ") + v + "\n");
    ASSERT_FALSE(errors.empty());
    EXPECT_TRUE(any_contains(errors, "mu0 must be positive"));
  }
  EXPECT_THROW(parse_config(THERMOSLIP_CONFIG_DIR "/invalid_mu0.ini"), ConfigError);
}

TEST(Config, ExponentBelowFourRejected) {
  EXPECT_TRUE(any_contains(errors_of("[coupling]\np_exponent = 3\n"), "p_exponent"));
  EXPECT_NO_THROW(parse_config_string("[coupling]\np_exponent = 6\n"));
}

TEST(Config, ConductivityBounds) {
  EXPECT_TRUE(any_contains(errors_of("[conductivity]\nk0 = 2\nk1 = 1\nk_const = 1.5\n"), "k1 must be at least k0"));
  EXPECT_TRUE(any_contains(errors_of("[conductivity]\nk_grad_x = 1\n"), "leaves [k0, k1]"));
}

TEST(Config, StructuralErrors) {
  EXPECT_TRUE(any_contains(errors_of("[nope]\nx = 1\n"), "unknown section [nope]"));
  EXPECT_TRUE(any_contains(errors_of("[domain]\nwidth = 1\n"), "unknown key 'width'"));
  EXPECT_TRUE(any_contains(errors_of("[domain]\nnx = 4\nnx = 5\n"), "duplicate key domain.nx"));
  EXPECT_TRUE(any_contains(errors_of("nx = 4\n"), "outside any section"));
  EXPECT_TRUE(any_contains(errors_of("[domain\n"), "malformed section header"));
  EXPECT_TRUE(any_contains(errors_of("[domain]\nnx\n"), "expected key = value"));
  EXPECT_TRUE(any_contains(errors_of("[domain]\nnx = four\n"), "domain.nx"));
  EXPECT_TRUE(any_contains(errors_of("[domain]\nnx = 2.5\n"), "domain.nx"));
}

TEST(Config, EveryErrorIsReported) {
  const auto errors = errors_of(
      "[rheology]\nmu0 = 0\n"
      "[coupling]\ndamping = 2\nmode = jacobi\n"
      "[flow]\ngauge = floating\n");
  EXPECT_GE(errors.size(), 4u);
  EXPECT_TRUE(any_contains(errors, "mu0"));
  EXPECT_TRUE(any_contains(errors, "damping"));
  EXPECT_TRUE(any_contains(errors, "coupling.mode"));
  EXPECT_TRUE(any_contains(errors, "flow.gauge"));
  try {
    parse_config_string("[rheology]\nmu0 = 0\n[coupling]\ndamping = 2\n");
    FAIL();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("mu0"), std::string::npos);
    EXPECT_NE(what.find("damping"), std::string::npos);
  }
}

TEST(Config, MissingFile) {
  try {
    parse_config("/nonexistent/thermoslip.ini");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_TRUE(any_contains(e.errors(), "/nonexistent/thermoslip.ini"));
  }
}

TEST(Config, IniRoundTrip) {
  RunConfig cfg;
  cfg.rheology.kind = "bingham_regularized";
  cfg.rheology.tau_y = 0.125;
  cfg.rheology.mu0 = 0.1 + 0.2;  // not exactly representable in short decimal
  cfg.domain.nx = 5;
  cfg.coupling.seed = 18446744073709551557ULL;
  cfg.flow.gauge = "pin_first";
  cfg.output.vtk = false;
  const std::string text = to_ini(cfg);
  const RunConfig back = parse_config_string(text);
  EXPECT_EQ(to_ini(back), text);
  EXPECT_EQ(back.rheology.mu0, cfg.rheology.mu0);
  EXPECT_EQ(back.coupling.seed, cfg.coupling.seed);
  EXPECT_FALSE(back.output.vtk);
}

TEST(Scenario, BuildRejectsInvalidConfig) {
  RunConfig cfg;
  cfg.conductivity.k0 = 2.0;
  cfg.conductivity.k1 = 1.0;
  EXPECT_THROW(build_scenario(cfg), ConfigError);
}

TEST(Scenario, LateralProfileCarriesFlowRate) {
  const HeightFunction h = HeightFunction::affine(1.0, {-0.25, 0.0});
  const VectorFunction g = lateral_profile(2.0, h, 2);
  for (double x : {0.0, 0.5, 1.0}) {
    const double top = h(x, 0.0);
    const int n = 2000;
    double q = 0.0;
    for (int i = 0; i < n; ++i) q += g(Vec3(x, (i + 0.5) * top / n, 0.0))[0] * top / n;
    EXPECT_NEAR(q, 2.0, 1e-6);
    EXPECT_NEAR(g(Vec3(x, top, 0.0)).norm(), 0.0, 1e-14);
  }
}
