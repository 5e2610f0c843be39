#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include <fmt/format.h>

#include "condmon/bag/reader.hpp"
#include "condmon/bus/topic.hpp"
#include "condmon/cli/commands.hpp"
#include "condmon/error.hpp"
#include "condmon/features/report.hpp"
#include "condmon/features/stats.hpp"

namespace condmon::cli {

namespace {

struct Range {
  Timestamp start, end;  // [start, end)
};

Range resolve_range(const PlotSpec& spec, const std::vector<StampedMessage>& sorted) {
  if (spec.from_s && spec.to_s && !(*spec.from_s < *spec.to_s)) {
    throw Error(Errc::BadRange, fmt::format("range start {} is not before end {}", *spec.from_s, *spec.to_s));
  }
  if (sorted.empty()) throw Error(Errc::NoData, "bag holds no messages");
  const Timestamp first = sorted.front().stamp;
  Range r{first, sorted.back().stamp.plus_nanos(1)};
  auto offset = [&](double s) {
    if (!(s >= 0)) throw Error(Errc::BadRange, fmt::format("range offset {} is negative", s));
    return first.plus_nanos(static_cast<std::int64_t>(std::llround(s * 1e9)));
  };
  if (spec.from_s) r.start = offset(*spec.from_s);
  if (spec.to_s) r.end = offset(*spec.to_s);
  if (!(r.start < r.end)) throw Error(Errc::BadRange, "empty time range");
  return r;
}

// Scalar streams matched by any pattern, in id order.
std::vector<std::string> resolve_streams(const PlotSpec& spec, const std::vector<StreamDescriptor>& streams) {
  if (spec.streams.empty()) throw Error(Errc::InvalidArgument, "plot needs at least one stream");
  for (const auto& p : spec.streams) {
    if (!bus::is_valid_pattern(p)) throw Error(Errc::BadPattern, "invalid stream pattern '" + p + "'");
  }
  std::vector<std::string> out;
  for (const auto& d : streams) {
    if (d.schema.kind != PayloadSchema::Kind::Scalar) continue;
    const bool hit = std::any_of(spec.streams.begin(), spec.streams.end(),
                                 [&](const std::string& p) { return bus::match_topic(p, d.id); });
    if (hit) out.push_back(d.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string render_csv(const PlotSpec& spec, const std::map<std::string, features::Series>& series, Range r) {
  if (!(spec.period_s > 0)) throw Error(Errc::BadRange, "grid period must be > 0");
  const auto period = static_cast<std::int64_t>(std::llround(spec.period_s * 1e9));
  if (period <= 0) throw Error(Errc::BadRange, "grid period below 1 ns");
  const std::int64_t span = timestamp_diff(r.end, r.start);
  const auto count = static_cast<std::size_t>((span + period - 1) / period);

  std::vector<std::map<Timestamp, double>> columns;
  for (const auto& [id, s] : series) {
    std::map<Timestamp, double> col;
    if (!s.empty()) {
      const auto grid = features::resample_nearest(s, r.start, period, count);
      for (const auto& sample : grid.samples()) col.emplace(sample.stamp, sample.value);
    }
    columns.push_back(std::move(col));
  }

  std::string out = "stamp";
  for (const auto& [id, _] : series) out += "," + id;
  out += "\n";
  for (std::size_t k = 0; k < count; ++k) {
    const Timestamp t = r.start.plus_nanos(static_cast<std::int64_t>(k) * period);
    out += to_string(t);
    for (const auto& col : columns) {
      out += ",";
      if (auto it = col.find(t); it != col.end()) out += fmt::format("{}", it->second);
    }
    out += "\n";
  }
  return out;
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string render_svg(const PlotSpec& spec, const std::map<std::string, features::Series>& series,
                       const std::vector<StampedMessage>& sorted, Range r) {
  constexpr double kWidth = 900, kLeft = 140, kRight = 20, kTop = 20, kPanel = 110, kGap = 20, kAxis = 40;
  const double plot_w = kWidth - kLeft - kRight;
  const double height = kTop + static_cast<double>(series.size()) * (kPanel + kGap) + kAxis;
  const double span_s = static_cast<double>(timestamp_diff(r.end, r.start)) * 1e-9;
  auto x_of = [&](Timestamp t) { return kLeft + plot_w * (static_cast<double>(timestamp_diff(t, r.start)) * 1e-9) / span_s; };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\">\n",
      kWidth, height, kWidth, height);
  out += fmt::format("<g class=\"meta\" data-start=\"{}\" data-end=\"{}\"/>\n", to_string(r.start), to_string(r.end));

  double y0 = kTop;
  for (const auto& [id, s] : series) {
    const auto win = s.window(r.start, r.end);
    double lo = 0, hi = 1;
    if (!win.empty()) {
      auto [mn, mx] = std::minmax_element(win.begin(), win.end(),
                                          [](const auto& a, const auto& b) { return a.value < b.value; });
      lo = mn->value;
      hi = mx->value;
      if (hi - lo < 1e-12) {
        lo -= 0.5;
        hi += 0.5;
      }
    }
    out += fmt::format("<g class=\"panel\" data-stream=\"{}\">\n", xml_escape(id));
    out += fmt::format("<rect x=\"{:.2f}\" y=\"{:.2f}\" width=\"{:.2f}\" height=\"{:.2f}\" fill=\"none\" stroke=\"#999\"/>\n",
                       kLeft, y0, plot_w, kPanel);
    out += fmt::format("<text x=\"8\" y=\"{:.2f}\" font-size=\"12\">{}</text>\n", y0 + kPanel / 2, xml_escape(id));
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"end\">{:.4g}</text>\n",
                       kLeft - 4, y0 + 10, hi);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"end\">{:.4g}</text>\n",
                       kLeft - 4, y0 + kPanel, lo);
    out += fmt::format("<polyline class=\"series\" data-stream=\"{}\" fill=\"none\" stroke=\"#1f77b4\" points=\"",
                       xml_escape(id));
    bool first = true;
    for (const auto& sample : win) {
      const double y = y0 + kPanel - kPanel * (sample.value - lo) / (hi - lo);
      out += fmt::format("{}{:.2f},{:.2f}", first ? "" : " ", x_of(sample.stamp), y);
      first = false;
    }
    out += "\"/>\n</g>\n";
    y0 += kPanel + kGap;
  }

  const double axis_y = y0;
  out += fmt::format("<g class=\"axis\">\n<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#000\"/>\n",
                     kLeft, axis_y, kLeft + plot_w, axis_y);
  for (int k = 0; k <= 5; ++k) {
    const double x = kLeft + plot_w * k / 5.0;
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" text-anchor=\"middle\">{:.1f} s</text>\n", x,
                       axis_y + 14, span_s * k / 5.0);
  }
  out += "</g>\n";

  if (spec.markers) {
    for (const auto& m : sorted) {
      if (m.stream != features::kSegmentTopic && m.stream != features::kStimulusTopic) continue;
      if (m.stamp < r.start || !(m.stamp < r.end)) continue;
      const double x = x_of(m.stamp);
      const std::string name = xml_escape(features::marker_text(m));
      out += fmt::format(
          "<g class=\"marker\" data-topic=\"{}\" data-marker=\"{}\" data-stamp=\"{}\">"
          "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>"
          "<text x=\"{:.2f}\" y=\"{:.2f}\" font-size=\"10\" fill=\"#d62728\">{}</text></g>\n",
          m.stream, name, to_string(m.stamp), x, kTop, x, axis_y, x + 2, kTop - 4, name);
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace

PlotSpec::Format format_for(const std::string& path) {
  auto ext = std::filesystem::path(path).extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".svg" ? PlotSpec::Format::Svg : PlotSpec::Format::Csv;
}

std::string render_plot(const PlotSpec& spec, const std::vector<StampedMessage>& sorted,
                        const std::vector<StreamDescriptor>& streams) {
  const auto ids = resolve_streams(spec, streams);
  const Range r = resolve_range(spec, sorted);
  std::map<std::string, features::Series> series;
  std::size_t in_range = 0;
  for (const auto& id : ids) {
    auto s = features::Series::from_messages(id, sorted);
    in_range += s.window(r.start, r.end).size();
    series.emplace(id, std::move(s));
  }
  if (in_range == 0) throw Error(Errc::NoData, "no samples of the selected streams in range");
  return spec.format == PlotSpec::Format::Svg ? render_svg(spec, series, sorted, r) : render_csv(spec, series, r);
}

void write_plot(const PlotSpec& spec) {
  const auto contents = bag::load(spec.input);
  const auto text = render_plot(spec, bag::sorted_messages(contents.file_order), contents.streams);
  std::ofstream out(spec.output, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::IoError, "cannot write " + spec.output);
  out << text;
  if (!out.flush()) throw Error(Errc::IoError, "write failed for " + spec.output);
}

}  // namespace condmon::cli
