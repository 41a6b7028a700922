#include <algorithm>
#include <cmath>
#include <vector>

#include "mks/ising.hpp"

namespace mks {

double log_partition_transfer(const DiscreteDomain& domain, InverseTemperature beta) {
  auto [lo, hi] = domain.bounds();
  int width = hi.x - lo.x + 1, height = hi.y - lo.y + 1;
  bool transpose = false;
  if (height > kMaxTransferWidth) {
    if (width > kMaxTransferWidth)
      throw Error(ErrorCode::StripTooWide, "both bounding-box sides exceed 16 sites");
    transpose = true;
    std::swap(width, height);
  }
  // present[c * height + r]: site in column c, row r
  std::vector<char> present(static_cast<std::size_t>(width * height), 0);
  for (const Site s : domain.sites()) {
    const int c = transpose ? s.y - lo.y : s.x - lo.x;
    const int r = transpose ? s.x - lo.x : s.y - lo.y;
    present[static_cast<std::size_t>(c * height + r)] = 1;
  }
  auto is_present = [&](int c, int r) {
    return c >= 0 && c < width && r >= 0 && r < height && present[static_cast<std::size_t>(c * height + r)];
  };

  const double b = beta.value();
  const double e_plus = std::exp(b), e_minus = std::exp(-b);
  const std::size_t states = std::size_t{1} << height;
  std::vector<double> weight(states, 0.0);
  weight[0] = 1.0;  // virtual column -1: all frozen +
  double log_scale = 0.0;

  std::vector<double> boltzmann(static_cast<std::size_t>(4 * height + 5));
  const int offset = 2 * height + 2;
  for (int e = -offset; e <= offset; ++e) boltzmann[static_cast<std::size_t>(e + offset)] = std::exp(b * e);

  // Bit r set means spin -1 at row r. Column `width` is a virtual frozen column.
  for (int c = 0; c <= width; ++c) {
    for (int r = 0; r < height; ++r) {
      const bool p = is_present(c - 1, r), q = is_present(c, r);
      if (!p && !q) continue;
      const std::size_t bit = std::size_t{1} << r;
      for (std::size_t s0 = 0; s0 < states; ++s0) {
        if (s0 & bit) continue;
        const std::size_t s1 = s0 | bit;
        const double a_plus = weight[s0], a_minus = weight[s1];
        if (p && q) {
          weight[s0] = e_plus * a_plus + e_minus * a_minus;
          weight[s1] = e_minus * a_plus + e_plus * a_minus;
        } else if (p) {
          // the old site sees a frozen + to its right
          weight[s0] = e_plus * a_plus + e_minus * a_minus;
          weight[s1] = 0.0;
        } else {
          // the new site sees a frozen + to its left
          weight[s0] = e_plus * a_plus;
          weight[s1] = e_minus * a_plus;
        }
      }
    }
    if (c < width) {
      for (std::size_t s = 0; s < states; ++s) {
        if (weight[s] == 0.0) continue;
        int e = 0;
        for (int r = 0; r < height; ++r) {
          if (!is_present(c, r)) continue;
          const int sr = (s >> r) & 1u ? -1 : 1;
          if (is_present(c, r - 1)) e += sr * (((s >> (r - 1)) & 1u) ? -1 : 1);
          else e += sr;
          if (!is_present(c, r + 1)) e += sr;
        }
        weight[s] *= boltzmann[static_cast<std::size_t>(e + offset)];
      }
    }
    const double m = *std::max_element(weight.begin(), weight.end());
    for (double& w : weight) w /= m;
    log_scale += std::log(m);
  }
  return log_scale + std::log(weight[0]);
}

}  // namespace mks
