#include <cmath>
#include <complex>
#include <deque>
#include <map>
#include <vector>

#include "mks/ising.hpp"
#include "mks/linalg.hpp"

namespace mks {

namespace {

using Complex = std::complex<double>;

constexpr int kMaxHoles = 12;

struct DualGraph {
  std::vector<Site> vertices;                 // doubled coordinates
  std::vector<std::pair<int, int>> edges;     // undirected, vertex indices
  std::vector<Site> midpoints;                // per edge, doubled coordinates
};

DualGraph contour_graph(const DiscreteDomain& domain) {
  DualGraph g;
  std::map<Site, int> index;
  auto vertex = [&](Site p) {
    auto [it, inserted] = index.emplace(p, static_cast<int>(g.vertices.size()));
    if (inserted) g.vertices.push_back(p);
    return it->second;
  };
  for (const Site u : domain.sites()) {
    for (const Site d : kNeighborOffsets) {
      const Site v = u + d;
      if (domain.contains(v) && v < u) continue;
      const Site m = edge_midpoint(u, v);
      const bool horizontal_primal = (m.x & 1) != 0;
      const Site p = horizontal_primal ? Site{m.x, m.y - 1} : Site{m.x - 1, m.y};
      const Site q = horizontal_primal ? Site{m.x, m.y + 1} : Site{m.x + 1, m.y};
      g.edges.emplace_back(vertex(p), vertex(q));
      g.midpoints.push_back(m);
    }
  }
  return g;
}

// One representative site per bounded 4-connected component of the complement.
std::vector<Site> hole_representatives(const DiscreteDomain& domain) {
  auto [lo, hi] = domain.bounds();
  lo = lo - Site{1, 1};
  hi = hi + Site{1, 1};
  const int h = hi.y - lo.y + 1;
  std::vector<char> seen(static_cast<std::size_t>((hi.x - lo.x + 1) * h), 0);
  auto idx = [&](Site s) { return static_cast<std::size_t>((s.x - lo.x) * h + (s.y - lo.y)); };
  for (const Site s : domain.sites()) seen[idx(s)] = 1;
  std::vector<Site> holes;
  for (int x = lo.x; x <= hi.x; ++x) {
    for (int y = lo.y; y <= hi.y; ++y) {
      if (seen[idx({x, y})]) continue;
      bool bounded = true;
      std::deque<Site> queue{{x, y}};
      seen[idx({x, y})] = 1;
      while (!queue.empty()) {
        const Site c = queue.front();
        queue.pop_front();
        if (c.x == lo.x || c.x == hi.x || c.y == lo.y || c.y == hi.y) bounded = false;
        for (const Site d : kNeighborOffsets) {
          const Site n = c + d;
          if (n.x < lo.x || n.x > hi.x || n.y < lo.y || n.y > hi.y || seen[idx(n)]) continue;
          seen[idx(n)] = 1;
          queue.push_back(n);
        }
      }
      if (bounded) holes.push_back({x, y});
    }
  }
  return holes;
}

// log |det(I - T)| for the Kac-Ward transition matrix with per-edge weights.
double log_kac_ward_det(const DualGraph& g, const std::vector<double>& weight) {
  const auto n_dir = static_cast<int>(2 * g.edges.size());
  auto tail = [&](int e) { return e % 2 == 0 ? g.edges[e / 2].first : g.edges[e / 2].second; };
  auto head = [&](int e) { return e % 2 == 0 ? g.edges[e / 2].second : g.edges[e / 2].first; };
  std::vector<std::vector<int>> outgoing(g.vertices.size());
  for (int e = 0; e < n_dir; ++e) outgoing[static_cast<std::size_t>(tail(e))].push_back(e);
  auto direction = [&](int e) {
    const Site a = g.vertices[static_cast<std::size_t>(tail(e))], b = g.vertices[static_cast<std::size_t>(head(e))];
    return Site{(b.x - a.x) / 2, (b.y - a.y) / 2};
  };

  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<std::size_t>(4 * n_dir));
  for (int e = 0; e < n_dir; ++e) {
    triplets.emplace_back(e, e, Complex(1.0, 0.0));
    const Site de = direction(e);
    for (const int f : outgoing[static_cast<std::size_t>(head(e))]) {
      const Site df = direction(f);
      const int dot = de.x * df.x + de.y * df.y;
      if (dot == -1) continue;  // no backtracking
      const int cross = de.x * df.y - de.y * df.x;
      const double half_turn = 0.5 * std::atan2(static_cast<double>(cross), static_cast<double>(dot));
      triplets.emplace_back(e, f, -weight[static_cast<std::size_t>(e / 2)] * std::polar(1.0, half_turn));
    }
  }
  Eigen::SparseMatrix<Complex> m(n_dir, n_dir);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return log_abs_det_lu(m, ErrorCode::SingularMatrix);
}

}  // namespace

double log_partition_kac_ward(const DiscreteDomain& domain, InverseTemperature beta) {
  const DualGraph g = contour_graph(domain);
  const std::vector<Site> holes = hole_representatives(domain);
  if (holes.size() > kMaxHoles)
    throw Error(ErrorCode::InvalidArgument, "too many holes for the parity projection");
  const double x = std::exp(-2.0 * beta.value());

  // on_seam[i][k]: dual edge k crosses the horizontal ray from hole i to +infinity
  std::vector<std::vector<char>> on_seam(holes.size(), std::vector<char>(g.edges.size(), 0));
  for (std::size_t i = 0; i < holes.size(); ++i)
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
      const Site m = g.midpoints[k];
      on_seam[i][k] = m.y == 2 * holes[i].y && (m.x & 1) && m.x > 2 * holes[i].x;
    }

  // Z_+ = e^{beta |E|} 2^{-h} sum_S V_S, where V_S is the contour sum with the
  // edges on the seams of S negated; each V_S >= 0 (Griffiths), so
  // V_S = sqrt(det(I - T_S)).
  double log_sum = -INFINITY;
  const std::size_t subsets = std::size_t{1} << holes.size();
  std::vector<double> weight(g.edges.size());
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    for (std::size_t k = 0; k < g.edges.size(); ++k) {
      bool negate = false;
      for (std::size_t i = 0; i < holes.size(); ++i)
        if ((mask >> i) & 1u) negate ^= on_seam[i][k] != 0;
      weight[k] = negate ? -x : x;
    }
    log_sum = log_add_exp(log_sum, 0.5 * log_kac_ward_det(g, weight));
  }
  return beta.value() * static_cast<double>(g.edges.size()) - static_cast<double>(holes.size()) * std::log(2.0) +
         log_sum;
}

}  // namespace mks
