#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "conslab/config.hpp"
#include "conslab/error.hpp"
#include "conslab/operators.hpp"
#include "conslab/snapshot.hpp"
#include "conslab/svg.hpp"
#include "conslab/sweep.hpp"
#include "util.hpp"

using namespace conslab;
using namespace testutil;
namespace fs = std::filesystem;
namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("conslab_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

const char* kTinySweep =
    "grid.n1 = 8\ngrid.n2 = 8\ngrid.nz = 24\ngrid.zmax = 6\ngrid.stretch = 3\n"
    "sim.dt = 0.02\nsim.tfinal = 0.04\nsim.sponge_start = 5\nsim.diag_every = 1\n"
    "init.kind = shear\nsweep.eps_list = 1e-2, 3e-3, 1e-3, 3e-4\n";

TEST(Config, DefaultsForOmittedKeys) {
  const auto c = parse_config("sim.eps = 0.01\nsim.alpha = 0.5\n");
  EXPECT_DOUBLE_EQ(c.sim.eps, 0.01);
  EXPECT_DOUBLE_EQ(c.sim.alpha, 0.5);
  const Config d;
  EXPECT_EQ(c.grid.nz, d.grid.nz);
  EXPECT_EQ(c.eps_list, d.eps_list);
  ASSERT_TRUE(c.sim.grid);
  EXPECT_EQ(c.sim.grid->Nz, d.grid.nz);
}

TEST(Config, CommentsAndWhitespace) {
  const auto c = parse_config("# header\n\n  grid.nz = 48   # inline\ninit.kind = vortex_pair\n");
  EXPECT_EQ(c.grid.nz, 48);
  EXPECT_EQ(c.init.kind, InitKind::vortex_pair);
}

TEST(Config, ErrorsNameTheLine) {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const InvalidArgument& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("sim.eps = 0.01\nsim.alpha = 2.0\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("grid.n1 = 7\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("grid.n1 = 6\n"), "");
  EXPECT_NE(message("sim.colour = red\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("sim.dt = fast\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("sim.dt = 0.01\nsim.dt = 0.02\n"), "");
  EXPECT_NE(message("sweep.eps_list = 1e-2, 1e-3, 1e-4\n"), "");
  EXPECT_NE(message("sweep.eps_list = 1e-3, 1e-2, 1e-4, 1e-5\n"), "");
}

TEST(Config, FormatRoundTrips) {
  const auto a = parse_config(kTinySweep);
  const auto text = format_config(a);
  const auto b = parse_config(text);
  EXPECT_EQ(format_config(b), text);
  EXPECT_EQ(b.grid.n1, 8);
  EXPECT_EQ(b.eps_list, a.eps_list);
  EXPECT_EQ(b.init.kind, InitKind::shear);
}

TEST(Config, LoadMissingFileFails) { EXPECT_THROW(load_config("/nonexistent/conslab.cfg"), InvalidArgument); }

TEST(Snapshot, RoundTripBitExact) {
  const auto dir = scratch("snap");
  const auto g = make_grid(3.0, 2.0, 8, 10, 12, 4.0, 1.5);
  const VectorField u(band_limited(g, 1), band_limited(g, 2), band_limited(g, 3));
  write_snapshot(dir / "u.cslb", u);
  const auto s = read_snapshot(dir / "u.cslb");
  ASSERT_EQ(s.components.size(), 3u);
  EXPECT_EQ(s.grid->N1, 8);
  EXPECT_EQ(s.grid->N2, 10);
  EXPECT_EQ(s.grid->Nz, 12);
  EXPECT_DOUBLE_EQ(s.grid->L1, 3.0);
  EXPECT_DOUBLE_EQ(s.grid->stretch, 1.5);
  EXPECT_EQ(s.grid->z, g->z);
  for (int c = 0; c < 3; ++c) EXPECT_EQ(s.components[c].values(), u[c].values());
  EXPECT_EQ(fs::file_size(dir / "u.cslb"), 5u + 16u + 32u + 3u * 8u * g->size());
  EXPECT_EQ(slurp(dir / "u.cslb").substr(0, 5), "CSLB1");
}

TEST(Snapshot, BadFilesRejected) {
  const auto dir = scratch("snapbad");
  std::ofstream(dir / "x.cslb", std::ios::binary) << "NOPE1xxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxxx";
  EXPECT_THROW(read_snapshot(dir / "x.cslb"), Error);
  EXPECT_THROW(read_snapshot(dir / "missing.cslb"), Error);
  std::ofstream(dir / "t.cslb", std::ios::binary) << "CSLB1\x08";
  EXPECT_THROW(read_snapshot(dir / "t.cslb"), Error);
}

TEST(Svg, StandaloneDocument) {
  PlotSpec spec;
  spec.title = "amplitude";
  spec.logx = spec.logy = true;
  const auto s = svg_plot(spec, {{"fit", {1e-4, 1e-2}, {1e-2, 1e-1}, true, false}, {"data", {1e-4, 1e-3, 1e-2}, {1e-2, 3e-2, 1e-1}}});
  EXPECT_EQ(s.rfind("<svg", 0), 0u);
  EXPECT_NE(s.find("</svg>"), std::string::npos);
  EXPECT_NE(s.find("amplitude"), std::string::npos);
  EXPECT_NE(s.find("data"), std::string::npos);
}

TEST(Sweep, ShortListRejected) {
  auto c = parse_config(kTinySweep);
  auto sc = SweepConfig::from(c);
  sc.eps_list = {1e-2, 1e-3, 1e-4};
  EXPECT_THROW(sweep(sc), InvalidArgument);
}

TEST(Sweep, ZeroInitialDataGivesZeroMetrics) {
  auto sc = SweepConfig::from(parse_config(std::string(kTinySweep) + "init.amplitude = 0\n"));
  const auto r = sweep(sc);
  ASSERT_EQ(r.entries.size(), 4u);
  for (const auto& e : r.entries) {
    EXPECT_TRUE(e.ok);
    EXPECT_EQ(e.max_N2, 0.0);
    EXPECT_EQ(e.amplitude, 0.0);
    EXPECT_EQ(e.sup_linf_diff, 0.0);
    EXPECT_EQ(e.max_div, 0.0);
  }
  EXPECT_TRUE(r.flags.invariants);
  EXPECT_TRUE(r.flags.eta_trace);
  EXPECT_LE(r.N2_ratio, 2.0);
}

class SweepOutput : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { report_ = new SweepReport(sweep(SweepConfig::from(parse_config(kTinySweep)))); }
  static void TearDownTestSuite() {
    delete report_;
    report_ = nullptr;
  }
  static SweepReport* report_;
};
SweepReport* SweepOutput::report_ = nullptr;

TEST_F(SweepOutput, DeterministicBytes) {
  const auto again = sweep(SweepConfig::from(parse_config(kTinySweep)));
  EXPECT_EQ(sweep_csv(again), sweep_csv(*report_));
  EXPECT_EQ(sweep_json(again), sweep_json(*report_));
}

TEST_F(SweepOutput, CsvRowsAreEntriesPlusSummary) {
  const auto csv = sweep_csv(*report_);
  std::istringstream in(csv);
  std::string line;
  int rows = 0;
  std::getline(in, line);  // header
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  EXPECT_EQ(rows, static_cast<int>(report_->entries.size()) + 1);
}

TEST_F(SweepOutput, EmptyReportIsHeaderOnly) {
  SweepReport empty;
  const auto csv = sweep_csv(empty);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1);
  EXPECT_EQ(sweep_csv(*report_).substr(0, csv.size()), csv);
}

TEST_F(SweepOutput, JsonRoundTripAndFlagsRecomputable) {
  for (const auto& parsed : {parse_sweep_json(sweep_json(*report_)), parse_sweep_csv(sweep_csv(*report_))}) {
    ASSERT_EQ(parsed.entries.size(), report_->entries.size());
    for (std::size_t i = 0; i < parsed.entries.size(); ++i) {
      EXPECT_DOUBLE_EQ(parsed.entries[i].eps, report_->entries[i].eps);
      EXPECT_DOUBLE_EQ(parsed.entries[i].amplitude, report_->entries[i].amplitude);
      EXPECT_DOUBLE_EQ(parsed.entries[i].max_dzz_uh, report_->entries[i].max_dzz_uh);
      EXPECT_DOUBLE_EQ(parsed.entries[i].max_N3, report_->entries[i].max_N3);
    }
    SweepReport re = parsed;
    evaluate_flags(re);
    EXPECT_EQ(re.flags.uniform_bound, report_->flags.uniform_bound);
    EXPECT_EQ(re.flags.dzz_growth, report_->flags.dzz_growth);
    EXPECT_EQ(re.flags.layer_amplitude, report_->flags.layer_amplitude);
    EXPECT_EQ(re.flags.inviscid_limit, report_->flags.inviscid_limit);
    EXPECT_EQ(re.flags.eta_trace, report_->flags.eta_trace);
    EXPECT_EQ(re.flags.invariants, report_->flags.invariants);
    EXPECT_DOUBLE_EQ(re.amp_slope, report_->amp_slope);
  }
  EXPECT_THROW(parse_sweep_json("{"), InvalidArgument);
  EXPECT_THROW(parse_sweep_csv("eps\n1\n"), InvalidArgument);
}

TEST_F(SweepOutput, EmitWritesFilesAndSnapshots) {
  const auto dir = scratch("emit");
  emit_report(*report_, "json", dir.string());
  EXPECT_TRUE(fs::exists(dir / "sweep.json"));
  EXPECT_TRUE(fs::exists(dir / "euler.cslb"));
  for (std::size_t i = 0; i < report_->entries.size(); ++i) EXPECT_TRUE(fs::exists(dir / ("eps_" + std::to_string(i) + ".cslb")));
  bool any_svg = false;
  for (const auto& e : fs::directory_iterator(dir / "plots")) any_svg |= e.path().extension() == ".svg";
  EXPECT_TRUE(any_svg);
  EXPECT_THROW(emit_report(*report_, "xml", dir.string()), InvalidArgument);
  const auto e = read_snapshot(dir / "euler.cslb");
  EXPECT_EQ(e.components[0].values(), report_->euler_final[0].values());
}

}  // namespace
