#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "condmon/bag/reader.hpp"
#include "condmon/error.hpp"
#include "condmon/features/report.hpp"
#include "condmon/sim/physio.hpp"
#include "support/collect_sink.hpp"

using namespace condmon;
using namespace condmon::features;

namespace {

Timestamp at(double s) { return Timestamp::from_seconds(500 + s); }

// Four feature streams at 1 Hz over [0, 40) with markers every 10 s. Each
// task segment repeats the baseline values unless `shift` is non-zero.
std::vector<StampedMessage> synthetic(double shift, bool with_baseline = true, bool with_gsr = true) {
  std::vector<StampedMessage> msgs;
  const char* names[] = {"baseline", "Dual 1-back", "Dual 2-back", "Dual 3-back"};
  for (int seg = 0; seg < 4; ++seg) {
    if (seg > 0 || with_baseline) msgs.push_back(make_marker(kSegmentTopic, names[seg], at(seg * 10), seg + 1));
  }
  std::uint64_t seq = 1;
  for (int i = 0; i < 40; ++i) {
    const int seg = i / 10;
    const double base = (i % 10) * 0.1 + (i % 10) % 3;
    for (const char* s : {"human/ibi", "human/ppg", "human/gsr", "human/ecg"}) {
      if (!with_gsr && std::string(s) == "human/gsr") continue;
      msgs.push_back({s, at(i + 0.25), seq, encode_reals(std::vector<double>{base + seg * shift}), false});
    }
    ++seq;
  }
  return bag::sorted_messages(msgs);
}

template <typename F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(Segments, FromMarkers) {
  std::vector<StampedMessage> msgs{
      make_marker(kSegmentTopic, "baseline", at(0), 1),
      {"human/ibi", at(3), 1, {}, false},
      make_marker(kSegmentTopic, "Dual 1-back", at(5), 2),
      make_marker(kSegmentTopic, "end", at(8), 3),
      {"human/ibi", at(9), 2, {}, false},
      make_marker(kSegmentTopic, "Dual 2-back", at(10), 4),
      {"human/ibi", at(12), 3, {}, false},
  };
  auto segs = segments_from_markers(msgs);
  ASSERT_EQ(segs.size(), 3u);
  EXPECT_EQ(segs[0].name, "baseline");
  EXPECT_EQ(segs[0].end, at(5));
  EXPECT_EQ(segs[1].end, at(8));
  EXPECT_EQ(segs[2].start, at(10));
  EXPECT_EQ(segs[2].end, at(12).plus_nanos(1));
  EXPECT_EQ(marker_text(msgs[2]), "Dual 1-back");
}

TEST(Report, TaskEqualsBaselineGivesZeros) {
  const auto msgs = synthetic(0);
  const auto r = stats_report(msgs);
  ASSERT_EQ(r.rows.size(), 9u);
  EXPECT_EQ(r.filled_cells(), 3u * 4u * 3u);
  for (const auto& row : r.rows) {
    for (const auto& c : row.cells) EXPECT_NEAR(*c, 0, 1e-12);
  }
  EXPECT_TRUE(r.warnings.empty());
}

TEST(Report, ShiftShowsInMeanAndMedianOnly) {
  const auto r = stats_report(synthetic(2.0));
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t f = 0; f < 4; ++f) {
      EXPECT_NEAR(*r.rows[t * 3 + 0].cells[f], 2.0 * (t + 1), 1e-9);
      EXPECT_NEAR(*r.rows[t * 3 + 1].cells[f], 0, 1e-9);
      EXPECT_NEAR(*r.rows[t * 3 + 2].cells[f], 2.0 * (t + 1), 1e-9);
    }
  }
}

TEST(Report, TableLayout) {
  const auto r = stats_report(synthetic(0.5));
  EXPECT_EQ(r.columns, (std::vector<std::string>{"IBI", "PPG", "GSR", "ECG"}));
  EXPECT_EQ(r.tasks, (std::vector<std::string>{"Dual 1-back", "Dual 2-back", "Dual 3-back"}));
  const std::vector<std::string> stats{"Average", "S.D.", "Median"};
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    EXPECT_EQ(r.rows[i].task, r.tasks[i / 3]);
    EXPECT_EQ(r.rows[i].statistic, stats[i % 3]);
  }

  const auto csv = report_csv(r);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "task,statistic,IBI,PPG,GSR,ECG");
  std::getline(in, line);
  EXPECT_EQ(line, "Dual 1-back,Average,0.500000,0.500000,0.500000,0.500000");
  std::getline(in, line);
  EXPECT_EQ(line, "Dual 1-back,S.D.,0.000000,0.000000,0.000000,0.000000");

  const auto text = report_text(r);
  std::istringstream tin(text);
  std::getline(tin, line);
  EXPECT_EQ(line, "Task         Features     IBI     PPG     GSR     ECG");
  std::getline(tin, line);
  EXPECT_EQ(line, std::string(line.size(), '-'));
  std::getline(tin, line);
  EXPECT_EQ(line, "Dual 1-back  Average   0.5000  0.5000  0.5000  0.5000");
  std::getline(tin, line);
  EXPECT_EQ(line, "             S.D.      0.0000  0.0000  0.0000  0.0000");
}

TEST(Report, MissingBaseline) {
  EXPECT_EQ(error_of([] { stats_report(synthetic(0, false)); }), Errc::MissingBaseline);
}

TEST(Report, MissingStreamLeavesBlanks) {
  const auto r = stats_report(synthetic(0, true, false));
  EXPECT_EQ(r.filled_cells(), 3u * 3u * 3u);
  ASSERT_EQ(r.warnings.size(), 3u);
  EXPECT_NE(r.warnings[0].find("MissingStream"), std::string::npos);
  for (const auto& row : r.rows) EXPECT_FALSE(row.cells[2].has_value());
  const auto csv = report_csv(r);
  EXPECT_NE(csv.find("Dual 1-back,Average,0.000000,0.000000,,0.000000"), std::string::npos);
  EXPECT_NE(report_text(r).find("-  0.0000"), std::string::npos);
}

TEST(Report, PhysioWorkloadRaisesIbi) {
  sim::PhysioConfig cfg;
  cfg.schedule = sim::workload_schedule(60);
  testing_support::CollectSink sink;
  sim::physio_generator(cfg, sink);
  const auto r = stats_report(bag::sorted_messages(sink.messages));
  ASSERT_EQ(r.tasks.size(), 3u);
  const double d1 = *r.rows[0].cells[0], d2 = *r.rows[3].cells[0], d3 = *r.rows[6].cells[0];
  EXPECT_LT(d1, d2);
  EXPECT_LT(d2, d3);
  EXPECT_GT(d1, 0);
}
