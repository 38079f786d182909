#include <gtest/gtest.h>

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "thermoslip/io.hpp"

using namespace thermoslip;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class TempDir : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("thermoslip_io_") + info->name() + "_" + std::to_string(::getpid()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

struct SmallRun {
  Scenario sc;
  EmbeddingConstants constants;
  LipschitzEstimate lip;
  CoupledState state;

  SmallRun() : sc(build_scenario(config())) {
    constants = estimate_constants(sc.disc, sc.config.coupling.constant_samples, sc.config.coupling.seed);
    const FlowSolver flow(sc.disc, sc.flow_problem, sc.flow_config);
    const HeatSolver heat(sc.disc, sc.models, sc.heat_bcs, sc.heat_options);
    state = run_coupled(flow, heat, sc.coupling, Field::zeros(sc.disc.temperature));
    lip = lipschitz_estimate(state.v, sc.models, sc.heat_bcs, constants, sc.coupling.p_exponent);
  }
  static RunConfig config() {
    RunConfig cfg;
    cfg.domain.nx = 6;
    cfg.domain.nz = 3;
    cfg.coupling.constant_samples = 20;
    return cfg;
  }
};

}  // namespace

TEST(CsvNumber, RoundTripsExactly) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0}) {
    EXPECT_EQ(std::strtod(csv_number(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(csv_number(0.5), "0.5");
}

using WriteCsv = TempDir;

TEST_F(WriteCsv, QuotesAndLineEndings) {
  const fs::path p = dir_ / "t.csv";
  write_csv(p, {"a", "b,c"}, {{"1", "say \"hi\""}, {"x\ny", "plain"}});
  EXPECT_EQ(slurp(p), "a,\"b,c\"\r\n1,\"say \"\"hi\"\"\"\r\n\"x\ny\",plain\r\n");
}

TEST_F(WriteCsv, UnwritablePathNamedInError) {
  const fs::path p = dir_ / "missing" / "t.csv";
  try {
    write_csv(p, {"a"}, {});
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find(p.string()), std::string::npos);
  }
}

using WriteVtk = TempDir;

TEST_F(WriteVtk, ZeroFieldsOnSmallMesh) {
  DomainSpec spec;
  const int res[2] = {1, 1};
  const Discretization disc = Discretization::build(std::make_shared<const Mesh>(build_slab_mesh(spec, res)));
  const Field v = Field::zeros(disc.velocity), t = Field::zeros(disc.temperature);
  const fs::path p = dir_ / "z.vtk";
  write_vtk(p, *disc.mesh, {{"velocity", &v}, {"temperature", &t}});
  const std::string s = slurp(p);
  EXPECT_EQ(s.rfind("# vtk DataFile Version 3.0\n", 0), 0u);
  EXPECT_NE(s.find("POINTS 4 double"), std::string::npos);
  EXPECT_NE(s.find("CELLS 2 8"), std::string::npos);
  EXPECT_NE(s.find("CELL_TYPES 2\n5\n5\n"), std::string::npos);
  EXPECT_NE(s.find("POINT_DATA 4\nVECTORS velocity double\n0 0 0\n0 0 0\n0 0 0\n0 0 0\n"), std::string::npos);
  EXPECT_NE(s.find("SCALARS temperature double 1\nLOOKUP_TABLE default\n0\n0\n0\n0\n"), std::string::npos);
}

TEST_F(WriteVtk, RejectsFieldFromOtherMesh) {
  DomainSpec spec;
  const int res[2] = {1, 1};
  const Discretization a = Discretization::build(std::make_shared<const Mesh>(build_slab_mesh(spec, res)));
  const Discretization b = Discretization::build(std::make_shared<const Mesh>(build_slab_mesh(spec, res)));
  const Field t = Field::zeros(b.temperature);
  EXPECT_THROW(write_vtk(dir_ / "x.vtk", *a.mesh, {{"t", &t}}), InvalidInput);
}

using ExportState = TempDir;

TEST_F(ExportState, WritesAllArtifactsDeterministically) {
  const SmallRun run;
  ASSERT_TRUE(run.state.converged) << run.state.message;
  const auto first = export_state(run.state, run.sc, run.constants, run.lip, dir_ / "a");
  ASSERT_EQ(first.size(), 5u);
  for (const auto& p : first) EXPECT_TRUE(fs::exists(p)) << p;

  const std::string csv = slurp(dir_ / "a" / "history.csv");
  std::size_t lines = 0;
  for (std::size_t pos = 0; (pos = csv.find("\r\n", pos)) != std::string::npos; pos += 2) ++lines;
  EXPECT_EQ(lines, run.state.history.size() + 1);

  const Json doc = Json::parse(slurp(dir_ / "a" / "report.json"));
  EXPECT_EQ(doc["converged"].get<bool>(), true);
  EXPECT_EQ(doc["outer_iterations"].get<std::size_t>(), run.state.history.size());
  EXPECT_EQ(doc["config"]["domain"]["nx"].get<std::string>(), "6");
  EXPECT_DOUBLE_EQ(doc["lipschitz"]["L_hat"].get<double>(), run.lip.L_hat);

  const SmallRun again;
  export_state(again.state, again.sc, again.constants, again.lip, dir_ / "b");
  for (const char* name : {"history.csv", "report.json", "velocity.vtk", "pressure.vtk", "temperature.vtk"}) {
    EXPECT_EQ(slurp(dir_ / "a" / name), slurp(dir_ / "b" / name)) << name;
  }
}

TEST_F(ExportState, SkipsVtkOnRequestAndReportsBadDirectory) {
  const SmallRun run;
  const auto files = export_state(run.state, run.sc, run.constants, run.lip, dir_ / "novtk", false);
  EXPECT_EQ(files.size(), 2u);
  EXPECT_FALSE(fs::exists(dir_ / "novtk" / "velocity.vtk"));
  std::ofstream(dir_ / "blocker") << "x";
  try {
    export_state(run.state, run.sc, run.constants, run.lip, dir_ / "blocker" / "sub");
    FAIL();
  } catch (const IoError& e) {
    EXPECT_NE(std::string(e.what()).find("blocker"), std::string::npos);
  }
}

TEST(ConfigJson, MirrorsIni) {
  RunConfig cfg;
  cfg.rheology.mu0 = 0.75;
  const Json j = to_json(cfg);
  EXPECT_EQ(j["rheology"]["mu0"].get<std::string>(), "0.75");
  EXPECT_TRUE(j.contains("coupling"));
  EXPECT_EQ(j.begin().key(), "domain");
}
