#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

// Straightforward reference formulas, evaluated in long double.
namespace oracle {

inline long double mean(const std::vector<double>& v) {
  long double s = 0;
  for (double x : v) s += x;
  return s / static_cast<long double>(v.size());
}

inline long double sample_sd(const std::vector<double>& v) {
  const long double m = mean(v);
  long double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<long double>(v.size() - 1));
}

inline long double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : (static_cast<long double>(v[n / 2 - 1]) + v[n / 2]) / 2;
}

// Slope of the least-squares line through (x, y), normal equations form.
inline long double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const auto n = static_cast<long double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracle
