#include <poldoa/config.hpp>
#include <poldoa/experiments.hpp>
#include <poldoa/report_io.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <sstream>

using namespace poldoa;

namespace {

ExperimentConfig small_sweep() {
  ExperimentConfig c;
  c.sources = default_two_sources();
  c.snr_start_db = 10;
  c.snr_stop_db = 20;
  c.snr_step_db = 10;
  c.trials = 4;
  c.snapshots = 200;
  c.methods = {Method::Reduced2DDet, Method::Reduced2DEig};
  return c;
}

TEST(Config, ParsesFlatKeys) {
  std::istringstream in(R"(# scenario
geometry = crossed-dipole
layout = planar:2x3
spacing = 0.5
sources = 10,20,15,30; 60,70,60,80
snr_start = 0
snr_stop = 30
snr_step = 10
trials = 7
snapshots = 500
grid_step_doa = 2
grid_step_pol = 1
refine = true
window_4d = 4
method = det, music4d
seed = 99
)");
  const auto c = parse_config(in);
  EXPECT_EQ(c.geometry.sensor_kind(), SensorKind::CrossedDipole);
  EXPECT_TRUE(c.geometry.is_planar());
  EXPECT_EQ(c.geometry.element_count(), 6);
  ASSERT_EQ(c.sources.size(), 2u);
  EXPECT_NEAR(c.sources[1].degrees()[3], 80, 1e-12);
  EXPECT_EQ(c.snr_points(), (std::vector<double>{0, 10, 20, 30}));
  EXPECT_EQ(c.trials, 7);
  EXPECT_EQ(c.snapshots, 500);
  EXPECT_TRUE(c.grid.refine);
  EXPECT_EQ(*c.grid.window_4d_deg, 4.0);
  EXPECT_EQ(c.methods, (std::vector<Method>{Method::Reduced2DDet, Method::Music4D}));
  EXPECT_EQ(c.seed, 99u);
}

TEST(Config, Errors) {
  std::istringstream bad_key("colour = blue\n");
  EXPECT_THROW(parse_config(bad_key), Error);
  std::istringstream bad_line("trials 5\n");
  EXPECT_THROW(parse_config(bad_line), Error);
  std::istringstream bad_source("sources = 10,20,15\n");
  EXPECT_THROW(parse_config(bad_source), Error);
  std::istringstream bad_range("sources = 100,20,15,30\n");
  EXPECT_THROW(parse_config(bad_range), Error);
  ExperimentConfig c;
  c.trials = 0;
  EXPECT_THROW(c.validate(), Error);
  c.trials = 1;
  c.snr_stop_db = -5;
  EXPECT_THROW(c.validate(), Error);
  EXPECT_THROW(load_config("/nonexistent/poldoa.cfg"), Error);
}

TEST(MatchEstimates, PermutationAndWrapping) {
  const auto truth = default_two_sources();
  const std::vector<SourceParams> est{SourceParams::from_degrees(61, 71, 59, 79),
                                      SourceParams::from_degrees(10, 359, 15, -179)};
  const auto e = match_estimates({SourceParams::from_degrees(10, 1, 15, 179), truth[1]}, est);
  EXPECT_NEAR(e[0][1], -2.0, 1e-9);
  EXPECT_NEAR(e[0][3], 2.0, 1e-9);
  EXPECT_NEAR(e[1][0], 1.0, 1e-9);
  EXPECT_THROW(match_estimates(truth, {truth[0]}), Error);
}

TEST(RmseSweep, WrappedErrorsBounded) {
  const auto t = run_rmse_sweep(small_sweep());
  ASSERT_EQ(t.rows.size(), 2u * 2 * 2 * 4);
  for (const auto& r : t.rows) {
    EXPECT_GE(r.rmse_deg, 0.0);
    EXPECT_LE(r.rmse_deg, 180.0);
    EXPECT_EQ(r.trials + r.failures, 4);
    EXPECT_GT(r.crb_deg, 0.0);
    EXPECT_EQ(r.snapshots, 200);
  }
}

TEST(RmseSweep, DeterministicAcrossThreadCounts) {
  auto a = small_sweep(), b = small_sweep();
  a.grid.threads = 1;
  b.grid.threads = 3;
  EXPECT_EQ(format_rmse_csv(run_rmse_sweep(a)), format_rmse_csv(run_rmse_sweep(b)));
}

TEST(RmseSweep, NoiseFreeWithinGridStep) {
  auto c = small_sweep();
  c.noise_free = true;
  c.grid.refine = true;
  c.sources = {SourceParams::from_degrees(10.4, 20.3, 15.2, 30.6), SourceParams::from_degrees(60.5, 70.1, 59.7, 80.2)};
  const auto t = run_rmse_sweep(c);
  for (const auto& r : t.rows) {
    EXPECT_EQ(r.failures, 0);
    EXPECT_LE(r.rmse_deg, r.grid_step_deg);
  }
}

TEST(EstimatorComparison, ForcesBothReducedMethods) {
  auto c = small_sweep();
  c.methods = {Method::Music4D};
  c.sources = {SourceParams::from_degrees(10, 20, 15, 30)};
  const auto t = run_estimator_comparison(c);
  EXPECT_NO_THROW(t.find(10, "theta", 1, "det"));
  EXPECT_NO_THROW(t.find(10, "theta", 1, "mineig"));
  EXPECT_THROW(t.find(10, "theta", 1, "music4d"), Error);
}

TEST(GeometryComparison, EchoesBothGeometries) {
  auto c = small_sweep();
  c.methods = {Method::Reduced2DDet};
  c.snr_start_db = c.snr_stop_db = 20;
  const auto t = run_geometry_comparison(c);
  EXPECT_EQ(c.geometry.dipole_count(), 12);
  EXPECT_EQ(c.compare_geometry.dipole_count(), 12);
  EXPECT_NO_THROW(t.find(20, "phi", 1, "det", c.geometry.describe()));
  EXPECT_NO_THROW(t.find(20, "phi", 1, "det", c.compare_geometry.describe()));
  c.compare_geometry = ArrayGeometry::planar(SensorKind::CrossedDipole, 2, 2);
  EXPECT_THROW(run_geometry_comparison(c), Error);
}

TEST(CrbSweep, Rows) {
  auto c = small_sweep();
  const auto rows = run_crb_sweep(c);
  ASSERT_EQ(rows.size(), 16u);
  EXPECT_GT(rows[0].crb_deg, rows[8].crb_deg);
}

TEST(SpectrumExport, TripoleSinglePeak) {
  ExperimentConfig c;
  c.geometry = ArrayGeometry::linear(SensorKind::Tripole, 5);
  c.sources = {default_spectrum_source()};
  c.noise_free = true;
  const auto s = run_spectrum_export(c);
  EXPECT_EQ(global_peak(s).coordinates, (std::vector<double>{30, 80}));
}

TEST(SpectrumExport, NoiseOnlyHasNoSpuriousCapHits) {
  ExperimentConfig c;
  c.geometry = ArrayGeometry::linear(SensorKind::Tripole, 5);
  c.signals = 1;
  c.seed = 3;
  const auto s = run_spectrum_export(c);
  auto v = s.values();
  auto sorted = v;
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
  const double median = sorted[sorted.size() / 2];
  EXPECT_LT(*std::max_element(v.begin(), v.end()), 100 * median);
}

TEST(SpectrumExport, CsvAndSidecar) {
  ExperimentConfig c;
  c.grid.doa_step_deg = 30;
  c.sources = {default_spectrum_source()};
  c.noise_free = true;
  const auto s = run_spectrum_export(c);
  const auto csv = format_spectrum_csv(s);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "theta_deg,phi_deg,value");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 4 * 12);
  const auto json = format_spectrum_json(s, "test");
  EXPECT_NE(json.find("\"periodic\": true"), std::string::npos);
}

TEST(AmbiguityReportTest, ContainsCertificates) {
  ExperimentConfig c;
  c.geometry = ArrayGeometry::linear(SensorKind::Tripole, 5);
  c.sources = {default_spectrum_source()};
  const auto r = run_ambiguity_report(c);
  int partners = 0, scans = 0;
  for (const auto& row : r.rows) {
    if (row.kind == "linear-partner" || row.kind == "crossed-dipole-partner") {
      EXPECT_TRUE(row.parallel);
      ++partners;
    }
    if (row.kind == "linear-control") EXPECT_LT(row.cosine, 0.999);
    if (row.kind == "tripole-scan") {
      EXPECT_LT(row.cosine, 1 - 1e-3);
      ++scans;
    }
  }
  EXPECT_EQ(partners, 5);
  EXPECT_EQ(scans, 1);
}

TEST(ReportIo, NumberFormat) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(1.0 / 3), "0.3333333333");
  EXPECT_THROW(write_text_file("/nonexistent/dir/x.csv", "x"), Error);
}

}  // namespace
