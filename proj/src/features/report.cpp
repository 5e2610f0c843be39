#include "condmon/features/report.hpp"

#include <fmt/format.h>

#include <algorithm>

#include "condmon/error.hpp"

namespace condmon::features {

std::string marker_text(const StampedMessage& m) { return {m.payload.begin(), m.payload.end()}; }

StampedMessage make_marker(const std::string& topic, const std::string& name, Timestamp stamp,
                           std::uint64_t seq) {
  StampedMessage m;
  m.stream = topic;
  m.stamp = stamp;
  m.seq = seq;
  m.payload.assign(name.begin(), name.end());
  return m;
}

std::vector<Segment> segments_from_markers(std::span<const StampedMessage> sorted,
                                           const std::string& marker_topic) {
  std::vector<Segment> out;
  std::optional<Segment> open;
  for (const auto& m : sorted) {
    if (m.stream != marker_topic) continue;
    if (open) {
      open->end = m.stamp;
      if (open->start < open->end) out.push_back(*open);
      open.reset();
    }
    auto name = marker_text(m);
    if (name != kEndSegment && !name.empty()) open = Segment{name, m.stamp, m.stamp};
  }
  if (open && !sorted.empty()) {
    open->end = sorted.back().stamp.plus_nanos(1);
    if (open->start < open->end) out.push_back(*open);
  }
  return out;
}

std::size_t Report::filled_cells() const {
  std::size_t n = 0;
  for (const auto& r : rows) n += std::count_if(r.cells.begin(), r.cells.end(), [](auto& c) { return c.has_value(); });
  return n;
}

Report stats_report(std::span<const StampedMessage> sorted, const ReportOptions& opts) {
  const auto segments = segments_from_markers(sorted, opts.marker_topic);
  auto base = std::find_if(segments.begin(), segments.end(), [&](const Segment& s) { return s.name == opts.baseline; });
  if (base == segments.end()) throw Error(Errc::MissingBaseline, "no '" + opts.baseline + "' segment marker");

  Report r;
  std::vector<Series> series;
  for (const auto& [label, stream] : opts.features) {
    r.columns.push_back(label);
    series.push_back(Series::from_messages(stream, sorted));
  }

  for (const auto& seg : segments) {
    if (seg.name == opts.baseline) continue;
    r.tasks.push_back(seg.name);
    ReportRow avg{seg.name, "Average", {}}, sd{seg.name, "S.D.", {}}, med{seg.name, "Median", {}};
    for (std::size_t f = 0; f < series.size(); ++f) {
      try {
        auto d = baseline_delta(series[f].slice(base->start, base->end), series[f].slice(seg.start, seg.end));
        avg.cells.emplace_back(d.d_mean);
        sd.cells.emplace_back(d.d_sd);
        med.cells.emplace_back(d.d_median);
      } catch (const Error& e) {
        r.warnings.push_back(fmt::format("{}: {} ({}) has too few samples for '{}' or baseline: {}",
                                         errc_name(Errc::MissingStream), r.columns[f],
                                         opts.features[f].second, seg.name, e.what()));
        avg.cells.emplace_back();
        sd.cells.emplace_back();
        med.cells.emplace_back();
      }
    }
    r.rows.push_back(std::move(avg));
    r.rows.push_back(std::move(sd));
    r.rows.push_back(std::move(med));
  }
  return r;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string report_csv(const Report& r) {
  std::string out = "task,statistic";
  for (const auto& c : r.columns) out += "," + csv_field(c);
  out += "\n";
  for (const auto& row : r.rows) {
    out += csv_field(row.task) + "," + row.statistic;
    for (const auto& c : row.cells) out += c ? fmt::format(",{:.6f}", *c) : std::string(",");
    out += "\n";
  }
  return out;
}

std::string report_text(const Report& r) {
  std::vector<std::string> head{"Task", "Features"};
  head.insert(head.end(), r.columns.begin(), r.columns.end());
  std::vector<std::vector<std::string>> body;
  for (const auto& row : r.rows) {
    std::vector<std::string> line{row.statistic == "Average" ? row.task : "", row.statistic};
    for (const auto& c : row.cells) line.push_back(c ? fmt::format("{:.4f}", *c) : "-");
    body.push_back(std::move(line));
  }
  std::vector<std::size_t> width(head.size());
  for (std::size_t i = 0; i < head.size(); ++i) width[i] = head[i].size();
  for (const auto& line : body) {
    for (std::size_t i = 0; i < line.size(); ++i) width[i] = std::max(width[i], line[i].size());
  }
  auto render = [&](const std::vector<std::string>& line) {
    std::string s;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (i < 2) {
        s += fmt::format("{:<{}}", line[i], width[i]);
      } else {
        s += fmt::format("{:>{}}", line[i], width[i]);
      }
      if (i + 1 < line.size()) s += "  ";
    }
    return s + "\n";
  };
  std::size_t total = 0;
  for (auto w : width) total += w;
  total += 2 * (width.size() - 1);
  const std::string rule(total, '-');
  std::string out = render(head) + rule + "\n";
  for (std::size_t i = 0; i < body.size(); ++i) {
    out += render(body[i]);
    if (i % 3 == 2) out += rule + "\n";
  }
  return out;
}

}  // namespace condmon::features
