#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "mks/loopsoup.hpp"

namespace mks {

namespace {

int floor_div(int a, int b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

}  // namespace

DimensionEstimate box_dimension(std::span<const std::vector<Site>> curves, std::span<const int> scales) {
  if (curves.size() < 20) throw Error(ErrorCode::InsufficientData, "need at least 20 curves");
  std::vector<int> s(scales.begin(), scales.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  if (s.size() < 4) throw Error(ErrorCode::InsufficientData, "need at least 4 distinct scales");
  if (s.front() < 1) throw Error(ErrorCode::InvalidArgument, "scales must be positive");
  if (s.back() < 4 * s.front()) throw Error(ErrorCode::InsufficientData, "scales must span two octaves");

  std::vector<double> lx;
  for (int v : s) lx.push_back(-std::log(static_cast<double>(v)));
  double mx = 0.0;
  for (double v : lx) mx += v;
  mx /= static_cast<double>(lx.size());
  double sxx = 0.0;
  for (double v : lx) sxx += (v - mx) * (v - mx);

  std::vector<double> slopes;
  slopes.reserve(curves.size());
  for (const auto& curve : curves) {
    if (curve.empty()) throw Error(ErrorCode::InsufficientData, "empty curve");
    double sxy = 0.0;
    for (std::size_t k = 0; k < s.size(); ++k) {
      std::unordered_set<Site, SiteHash> boxes;
      for (Site p : curve) boxes.insert({floor_div(p.x, s[k]), floor_div(p.y, s[k])});
      sxy += (lx[k] - mx) * std::log(static_cast<double>(boxes.size()));
    }
    slopes.push_back(sxy / sxx);
  }

  const double n = static_cast<double>(slopes.size());
  double mean = 0.0;
  for (double v : slopes) mean += v;
  mean /= n;
  double var = 0.0;
  for (double v : slopes) var += (v - mean) * (v - mean);
  var /= (n - 1.0);
  return {mean, std::sqrt(var / n), slopes.size()};
}

}  // namespace mks
