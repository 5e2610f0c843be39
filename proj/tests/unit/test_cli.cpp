#include <gtest/gtest.h>

#include <filesystem>
#include <regex>
#include <sstream>

#include "condmon/bag/writer.hpp"
#include "condmon/bus/broker.hpp"
#include "condmon/cli/commands.hpp"
#include "support/temp_dir.hpp"

using namespace condmon;
using testing_support::TempDir;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

// Two scalar streams at the given rates over `seconds`, all stamps on a
// common clock starting at 100 s.
void rate_bag(const std::string& path, double rate_a, double rate_b, double seconds) {
  bag::Writer w(path);
  Stamper a({"human/a", StreamKind::PhysiologicalSensor, rate_a, PayloadSchema::scalar()});
  Stamper b({"human/b", StreamKind::PhysiologicalSensor, rate_b, PayloadSchema::scalar()});
  w.advertise(a.descriptor());
  w.advertise(b.descriptor());
  const auto na = static_cast<int>(seconds * rate_a), nb = static_cast<int>(seconds * rate_b);
  int i = 0, j = 0;
  while (i < na || j < nb) {
    const double ta = i < na ? i / rate_a : 1e18, tb = j < nb ? j / rate_b : 1e18;
    if (ta <= tb) {
      w.publish(a.stamp_at(Timestamp::from_seconds(100 + ta), static_cast<double>(i)));
      ++i;
    } else {
      w.publish(b.stamp_at(Timestamp::from_seconds(100 + tb), static_cast<double>(j)));
      ++j;
    }
  }
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir;
    fleet_ = dir_->file("fleet.cmbag");
    physio_ = dir_->file("physio.cmbag");
    ASSERT_EQ(run({"sim-fleet", "--duration", "120", "-o", fleet_}).code, 0);
    ASSERT_EQ(run({"sim-physio", "--schedule", "workload", "--round", "30", "-o", physio_}).code, 0);
  }
  static void TearDownTestSuite() { delete dir_; }

  static TempDir* dir_;
  static std::string fleet_, physio_;
};

TempDir* CliTest::dir_ = nullptr;
std::string CliTest::fleet_, CliTest::physio_;

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, cli::kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"plot", "x.cmbag"}).code, cli::kExitUsage);  // --streams and -o missing
  auto r = run({"sync", "x.cmbag", "--topics", "human/a"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, MissingBagIsDomainError) {
  auto r = run({"info", "/nonexistent/nothing.cmbag"});
  EXPECT_EQ(r.code, cli::kExitDomain);
  EXPECT_NE(r.err.find("IoError"), std::string::npos);
}

TEST(Cli, BrokerOnOccupiedPort) {
  bus::BrokerOptions o;
  o.listen = "127.0.0.1:0";
  bus::Broker held(o);
  auto r = run({"broker", "--listen", held.address()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("BindFailed"), std::string::npos);
}

TEST_F(CliTest, Info) {
  auto r = run({"info", fleet_});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("messages:  1200"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("streams:   10"), std::string::npos);
  EXPECT_NE(r.out.find("robot3/wifi"), std::string::npos);
  EXPECT_NE(r.out.find("recovered: no"), std::string::npos);
}

TEST_F(CliTest, PlotCsvRowCount) {
  const auto out = dir_->file("wifi.csv");
  auto r = run({"plot", fleet_, "--streams", "*/wifi", "--from", "10", "--to", "40", "--period", "0.5", "-o", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(testing_support::read_file(out));
  ASSERT_EQ(rows.size(), 1u + 60u);
  EXPECT_EQ(rows[0], "stamp,robot1/wifi,robot2/wifi,robot3/wifi,robot4/wifi,robot5/wifi");
  EXPECT_TRUE(rows[1].starts_with("1700000010.000000000,"));
  EXPECT_TRUE(rows[2].starts_with("1700000010.500000000,"));
  EXPECT_EQ(count(rows[1], ","), 5u);
}

TEST_F(CliTest, PlotSvgHasOneLinePerRobot) {
  const auto out = dir_->file("wifi.svg");
  ASSERT_EQ(run({"plot", fleet_, "--streams", "*/wifi", "-o", out}).code, 0);
  const auto svg = testing_support::read_file(out);
  EXPECT_TRUE(svg.starts_with("<svg") || svg.starts_with("<?xml"));
  EXPECT_EQ(count(svg, "<polyline class=\"series\""), 5u);
  for (int k = 1; k <= 5; ++k) {
    EXPECT_NE(svg.find("data-stream=\"robot" + std::to_string(k) + "/wifi\""), std::string::npos);
  }
}

TEST_F(CliTest, PlotMarkers) {
  const auto out = dir_->file("physio.svg");
  ASSERT_EQ(run({"plot", physio_, "--streams", "human/gsr", "human/ibi", "--markers", "-o", out}).code, 0);
  const auto svg = testing_support::read_file(out);
  EXPECT_EQ(count(svg, "<polyline class=\"series\""), 2u);
  EXPECT_EQ(count(svg, "<g class=\"marker\""), 4u);
  EXPECT_NE(svg.find("data-marker=\"Dual 2-back\""), std::string::npos);
}

TEST_F(CliTest, PlotNoDataWritesNothing) {
  const auto out = dir_->file("none.csv");
  auto r = run({"plot", fleet_, "--streams", "robot9/*", "-o", out});
  EXPECT_EQ(r.code, cli::kExitDomain);
  EXPECT_NE(r.err.find("NoData"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(out));
  r = run({"plot", fleet_, "--streams", "*/wifi", "--from", "500", "--to", "600", "-o", out});
  EXPECT_EQ(r.code, cli::kExitDomain);
  EXPECT_FALSE(std::filesystem::exists(out));
}

TEST_F(CliTest, PlotBadRange) {
  const auto out = dir_->file("bad.csv");
  auto r = run({"plot", fleet_, "--streams", "*/wifi", "--from", "40", "--to", "10", "-o", out});
  EXPECT_EQ(r.code, cli::kExitDomain);
  EXPECT_NE(r.err.find("BadRange"), std::string::npos);
  EXPECT_FALSE(std::filesystem::exists(out));
}

TEST_F(CliTest, ReportTable) {
  const auto csv = dir_->file("report.csv");
  auto r = run({"report", physio_, "-o", csv});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(testing_support::read_file(csv));
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0], "task,statistic,IBI,PPG,GSR,ECG");
  EXPECT_TRUE(rows[1].starts_with("Dual 1-back,Average,"));
  EXPECT_TRUE(rows[9].starts_with("Dual 3-back,Median,"));
  EXPECT_NE(r.out.find("Dual 2-back"), std::string::npos);
}

TEST_F(CliTest, ReportWithoutBaselineFails) {
  auto r = run({"report", fleet_});
  EXPECT_EQ(r.code, cli::kExitDomain);
  EXPECT_NE(r.err.find("MissingBaseline"), std::string::npos);
}

TEST_F(CliTest, Features) {
  const auto csv = dir_->file("features.csv");
  ASSERT_EQ(run({"features", fleet_, "--window", "30", "-o", csv}).code, 0);
  const auto rows = lines(testing_support::read_file(csv));
  ASSERT_EQ(rows.size(), 1u + 5u * 4u);
  EXPECT_EQ(rows[0], "robot,window_start,window_end,battery_utilization_pct_per_min,mean_rssi_dbm,deployment_s");
  EXPECT_TRUE(rows[1].starts_with("robot1,1700000000.000000000,1700000030.000000000,"));
}

TEST_F(CliTest, Deterministic) {
  const auto again = dir_->file("fleet2.cmbag");
  ASSERT_EQ(run({"sim-fleet", "--duration", "120", "-o", again}).code, 0);
  const auto a = dir_->file("a.csv"), b = dir_->file("b.csv");
  ASSERT_EQ(run({"plot", fleet_, "--streams", "**", "-o", a}).code, 0);
  ASSERT_EQ(run({"plot", again, "--streams", "**", "-o", b}).code, 0);
  EXPECT_EQ(testing_support::read_file(a), testing_support::read_file(b));
}

TEST(CliSync, AlignedStreamsHaveZeroSpread) {
  TempDir dir;
  const auto path = dir.file("aligned.cmbag");
  rate_bag(path, 10, 10, 10);
  const auto out = dir.file("sync.csv");
  auto r = run({"sync", path, "--topics", "human/a", "human/b", "-o", out});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = lines(testing_support::read_file(out));
  ASSERT_EQ(rows.size(), 101u);
  EXPECT_EQ(rows[0], "pivot,human/a,human/b,spread_ns");
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_TRUE(rows[i].ends_with(",0")) << rows[i];
}

TEST(CliSync, DenseStreamMatchesSlowerRate) {
  TempDir dir;
  const auto path = dir.file("rates.cmbag");
  rate_bag(path, 4, 64, 60);
  const auto out = dir.file("sync.csv");
  ASSERT_EQ(run({"sync", path, "--topics", "human/a", "human/b", "--slop", "125", "-o", out}).code, 0);
  const auto tuples = static_cast<double>(lines(testing_support::read_file(out)).size() - 1);
  EXPECT_NEAR(tuples / 60.0, 4.0, 4.0 * 0.05);
  // Default slop is half the slowest period, the same 125 ms here.
  const auto out2 = dir.file("sync2.csv");
  ASSERT_EQ(run({"sync", path, "--topics", "human/a", "human/b", "-o", out2}).code, 0);
  EXPECT_EQ(testing_support::read_file(out), testing_support::read_file(out2));
}
