#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "condmon/stream.hpp"

namespace condmon::features {

struct Sample {
  Timestamp stamp;
  double value = 0;
};

// Scalar time series with strictly increasing stamps and finite values.
class Series {
 public:
  Series() = default;
  // Throws InvalidArgument when the invariants do not hold.
  Series(std::string stream, std::vector<Sample> samples);

  // Scalar payloads of `stream` taken from stamp-sorted messages. Messages
  // whose stamp does not advance are skipped.
  static Series from_messages(const std::string& stream, std::span<const StampedMessage> msgs);

  const std::string& stream() const { return stream_; }
  const std::vector<Sample>& samples() const { return samples_; }
  bool empty() const { return samples_.empty(); }
  std::size_t size() const { return samples_.size(); }

  // Samples with start <= stamp < end.
  std::span<const Sample> window(Timestamp start, Timestamp end) const;
  Series slice(Timestamp start, Timestamp end) const;

 private:
  std::string stream_;
  std::vector<Sample> samples_;
};

struct StatTriple {
  double mean = 0;
  double sd = 0;  // sample standard deviation (n - 1)
  double median = 0;
};

// stat(task) - stat(baseline), field by field; any field may be negative.
struct BaselineDelta {
  double d_mean = 0;
  double d_sd = 0;
  double d_median = 0;
};

// Mean and median only; needs one value. Throws EmptyWindow.
struct Location {
  double mean = 0;
  double median = 0;
};

StatTriple stats_of(std::span<const double> values);  // throws EmptyWindow / SingleSample
Location location_of(std::span<const double> values);

// Statistics over [start, end).
StatTriple window_stats(const Series& s, Timestamp start, Timestamp end);
Location window_location(const Series& s, Timestamp start, Timestamp end);

BaselineDelta baseline_delta(const Series& baseline, const Series& task);
BaselineDelta baseline_delta(std::span<const double> baseline, std::span<const double> task);

// Nearest-sample resampling onto start + k * period, k < count. Ties go to
// the earlier sample; grid points further than one period from every
// sample are omitted. Throws EmptySeries.
Series resample_nearest(const Series& s, Timestamp start, std::int64_t period_ns, std::size_t count);

}  // namespace condmon::features
