#include "condmon/features/stats.hpp"

#include <algorithm>
#include <cmath>

#include "condmon/error.hpp"

namespace condmon::features {

namespace {

std::vector<double> values_of(std::span<const Sample> samples) {
  std::vector<double> v;
  v.reserve(samples.size());
  for (const auto& s : samples) v.push_back(s.value);
  return v;
}

double median_of(std::vector<double> v) {
  const auto n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace

Series::Series(std::string stream, std::vector<Sample> samples)
    : stream_(std::move(stream)), samples_(std::move(samples)) {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i].value)) {
      throw Error(Errc::InvalidArgument, stream_ + ": non-finite sample");
    }
    if (i > 0 && !(samples_[i - 1].stamp < samples_[i].stamp)) {
      throw Error(Errc::InvalidArgument, stream_ + ": stamps must be strictly increasing");
    }
  }
}

Series Series::from_messages(const std::string& stream, std::span<const StampedMessage> msgs) {
  std::vector<Sample> out;
  for (const auto& m : msgs) {
    if (m.stream != stream || m.payload.size() < 8) continue;
    const double v = decode_reals(ByteView(m.payload).first(8)).front();
    if (!std::isfinite(v)) continue;
    if (!out.empty() && !(out.back().stamp < m.stamp)) continue;
    out.push_back({m.stamp, v});
  }
  return Series(stream, std::move(out));
}

std::span<const Sample> Series::window(Timestamp start, Timestamp end) const {
  auto lo = std::lower_bound(samples_.begin(), samples_.end(), start,
                             [](const Sample& s, Timestamp t) { return s.stamp < t; });
  auto hi = std::lower_bound(lo, samples_.end(), end,
                             [](const Sample& s, Timestamp t) { return s.stamp < t; });
  return {lo, hi};
}

Series Series::slice(Timestamp start, Timestamp end) const {
  auto w = window(start, end);
  Series s;
  s.stream_ = stream_;
  s.samples_.assign(w.begin(), w.end());
  return s;
}

Location location_of(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptyWindow, "no samples");
  double sum = 0;
  for (double v : values) sum += v;
  return {sum / static_cast<double>(values.size()), median_of({values.begin(), values.end()})};
}

StatTriple stats_of(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptyWindow, "no samples");
  if (values.size() < 2) throw Error(Errc::SingleSample, "standard deviation needs two samples");
  auto loc = location_of(values);
  // Two-pass variance about the mean.
  double ss = 0;
  for (double v : values) ss += (v - loc.mean) * (v - loc.mean);
  return {loc.mean, std::sqrt(ss / static_cast<double>(values.size() - 1)), loc.median};
}

StatTriple window_stats(const Series& s, Timestamp start, Timestamp end) {
  return stats_of(values_of(s.window(start, end)));
}

Location window_location(const Series& s, Timestamp start, Timestamp end) {
  return location_of(values_of(s.window(start, end)));
}

BaselineDelta baseline_delta(std::span<const double> baseline, std::span<const double> task) {
  const auto b = stats_of(baseline);
  const auto t = stats_of(task);
  return {t.mean - b.mean, t.sd - b.sd, t.median - b.median};
}

BaselineDelta baseline_delta(const Series& baseline, const Series& task) {
  return baseline_delta(values_of(baseline.samples()), values_of(task.samples()));
}

Series resample_nearest(const Series& s, Timestamp start, std::int64_t period_ns, std::size_t count) {
  if (s.empty()) throw Error(Errc::EmptySeries, s.stream());
  if (period_ns <= 0) throw Error(Errc::InvalidArgument, "period must be positive");
  const auto& xs = s.samples();
  std::vector<Sample> out;
  std::size_t j = 0;  // first sample with stamp >= grid point
  for (std::size_t k = 0; k < count; ++k) {
    const Timestamp g = start.plus_nanos(static_cast<std::int64_t>(k) * period_ns);
    while (j < xs.size() && xs[j].stamp < g) ++j;
    std::optional<std::size_t> best;
    std::int64_t best_d = 0;
    if (j > 0) {
      best = j - 1;
      best_d = timestamp_diff(g, xs[j - 1].stamp);
    }
    if (j < xs.size()) {
      const auto d = timestamp_diff(xs[j].stamp, g);
      if (!best || d < best_d) {  // strict: ties stay with the earlier sample
        best = j;
        best_d = d;
      }
    }
    if (best && best_d <= period_ns) out.push_back({g, xs[*best].value});
  }
  return Series(s.stream(), std::move(out));
}

}  // namespace condmon::features
