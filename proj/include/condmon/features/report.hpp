#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "condmon/features/stats.hpp"

namespace condmon::features {

inline constexpr const char* kSegmentTopic = "markers/segment";
inline constexpr const char* kStimulusTopic = "markers/stimulus";
inline constexpr const char* kBaselineSegment = "baseline";
inline constexpr const char* kEndSegment = "end";

struct Segment {
  std::string name;
  Timestamp start, end;  // [start, end)
};

// Segments delimited by marker messages (payload = UTF-8 segment name). A
// segment runs until the next marker or, for the last one, past the final
// message of the recording. An "end" marker closes without opening.
std::vector<Segment> segments_from_markers(std::span<const StampedMessage> sorted,
                                           const std::string& marker_topic = kSegmentTopic);

StampedMessage make_marker(const std::string& topic, const std::string& name, Timestamp stamp,
                           std::uint64_t seq);
std::string marker_text(const StampedMessage& m);

struct ReportOptions {
  std::string marker_topic = kSegmentTopic;
  std::string baseline = kBaselineSegment;
  // (column label, stream id)
  std::vector<std::pair<std::string, std::string>> features = {
      {"IBI", "human/ibi"}, {"PPG", "human/ppg"}, {"GSR", "human/gsr"}, {"ECG", "human/ecg"}};
};

struct ReportRow {
  std::string task;
  std::string statistic;  // "Average", "S.D.", "Median"
  std::vector<std::optional<double>> cells;  // one per feature column
};

struct Report {
  std::vector<std::string> columns;
  std::vector<std::string> tasks;
  std::vector<ReportRow> rows;
  std::vector<std::string> warnings;  // MissingStream diagnostics

  std::size_t filled_cells() const;
};

// Baseline deltas per (task segment, feature stream). Throws MissingBaseline.
Report stats_report(std::span<const StampedMessage> sorted, const ReportOptions& opts = {});

// CSV: task,statistic,<columns...>; blanks for missing cells.
std::string report_csv(const Report& r);
// Aligned plain-text table.
std::string report_text(const Report& r);

}  // namespace condmon::features
