#pragma once

// Slow reference implementations used only by the tests. They share nothing
// with the library beyond the Site/DiscreteDomain/DualLoop containers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include <Eigen/Dense>

#include "mks/lattice.hpp"

namespace oracle {

using mks::Site;

inline std::vector<Site> nbrs(Site s) { return {{s.x + 1, s.y}, {s.x, s.y + 1}, {s.x - 1, s.y}, {s.x, s.y - 1}}; }

inline int find_index(const std::vector<Site>& v, Site s) {
  auto it = std::lower_bound(v.begin(), v.end(), s);
  return (it != v.end() && *it == s) ? int(it - v.begin()) : -1;
}

/// log Z with + boundary by direct summation, energy recomputed per state.
inline double ising_log_z(const std::vector<Site>& sites_in, double beta) {
  std::vector<Site> sites = sites_in;
  std::sort(sites.begin(), sites.end());
  const int n = int(sites.size());
  std::vector<std::pair<int, int>> inner;  // both ends inside, counted once
  std::vector<int> outside_neighbours(n, 0);
  for (int i = 0; i < n; ++i)
    for (Site t : nbrs(sites[i])) {
      const int j = find_index(sites, t);
      if (j < 0) ++outside_neighbours[i];
      else if (i < j) inner.push_back({i, j});
    }
  std::vector<double> terms;
  terms.reserve(std::size_t(1) << n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << n); ++mask) {
    auto spin = [&](int i) { return (mask >> i & 1) ? -1 : 1; };
    long e = 0;
    for (auto [i, j] : inner) e += spin(i) * spin(j);
    for (int i = 0; i < n; ++i) e += outside_neighbours[i] * spin(i);
    terms.push_back(beta * double(e));
  }
  const double m = *std::max_element(terms.begin(), terms.end());
  // compensated sum: 2^20 terms lose ~1e-10 with a plain loop
  long double s = 0.0L, comp = 0.0L;
  for (double t : terms) {
    const long double v = std::exp(static_cast<long double>(t) - m);
    const long double u = s + v;
    comp += std::abs(s) >= std::abs(v) ? (s - u) + v : (v - u) + s;
    s = u;
  }
  return m + double(std::log(s + comp));
}

/// Number of spanning trees of the domain with its exterior wired into one
/// root: each vertex picks one of its four edge slots as the parent edge, and
/// a choice is valid when following parents always ends at the root.
inline std::uint64_t wired_tree_count(const std::vector<Site>& sites_in) {
  std::vector<Site> sites = sites_in;
  std::sort(sites.begin(), sites.end());
  const int n = int(sites.size());
  std::vector<std::vector<int>> slots(n);  // -1 = root
  for (int i = 0; i < n; ++i)
    for (Site t : nbrs(sites[i])) slots[i].push_back(find_index(sites, t));
  std::vector<int> parent(n, -2);
  std::uint64_t count = 0;
  auto reaches_root = [&](int v) {
    for (int steps = 0; steps <= n; ++steps) {
      if (v == -1) return true;
      if (parent[v] == -2) return true;  // unassigned yet: no cycle so far
      v = parent[v];
    }
    return false;
  };
  auto rec = [&](auto&& self, int v) -> void {
    if (v == n) {
      ++count;
      return;
    }
    for (int p : slots[v]) {
      parent[v] = p;
      if (reaches_root(v)) self(self, v + 1);
    }
    parent[v] = -2;
  };
  rec(rec, 0);
  return count;
}

/// All fixed polyominoes with up to max_cells cells, normalised to min corner 0.
inline std::vector<std::vector<Site>> polyominoes(int max_cells) {
  std::vector<std::vector<Site>> out;
  std::set<std::vector<Site>> level{{Site{0, 0}}};
  for (int size = 1; size <= max_cells; ++size) {
    out.insert(out.end(), level.begin(), level.end());
    if (size == max_cells) break;
    std::set<std::vector<Site>> next;
    for (const auto& p : level)
      for (Site s : p)
        for (Site t : nbrs(s)) {
          if (std::find(p.begin(), p.end(), t) != p.end()) continue;
          std::vector<Site> q = p;
          q.push_back(t);
          int mx = q[0].x, my = q[0].y;
          for (Site u : q) mx = std::min(mx, u.x), my = std::min(my, u.y);
          for (Site& u : q) u = {u.x - mx, u.y - my};
          std::sort(q.begin(), q.end());
          next.insert(q);
        }
    level = std::move(next);
  }
  return out;
}

inline Eigen::MatrixXd dense_walk(const std::vector<Site>& sites_in) {
  std::vector<Site> sites = sites_in;
  std::sort(sites.begin(), sites.end());
  const int n = int(sites.size());
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (Site t : nbrs(sites[i]))
      if (int j = find_index(sites, t); j >= 0) q(i, j) = 0.25;
  return q;
}

/// Textbook Gaussian elimination with partial pivoting.
inline double naive_det(Eigen::MatrixXd a) {
  const int n = int(a.rows());
  double det = 1.0;
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(a(r, c)) > std::abs(a(p, c))) p = r;
    if (a(p, c) == 0.0) return 0.0;
    if (p != c) a.row(p).swap(a.row(c)), det = -det;
    det *= a(c, c);
    for (int r = c + 1; r < n; ++r) a.row(r) -= a(r, c) / a(c, c) * a.row(c);
  }
  return det;
}

/// Vertices of the domain with the loop's incident vertices deleted.
inline std::vector<Site> minus_loop(const std::vector<Site>& sites, const mks::DualLoop& loop) {
  const auto inc = loop.incident_vertices();
  std::vector<Site> out;
  for (Site s : sites)
    if (std::find(inc.begin(), inc.end(), s) == inc.end()) out.push_back(s);
  return out;
}

struct SeriesValue {
  double value;
  double tail;
};

/// Loop-mass difference m(A) - m(B) + ... as sum_n (1/n) [tr Q_A^n - ...],
/// i.e. closed walks of each length counted with weight 4^-n, truncated at
/// n_max with a geometric bound on the rest.
inline SeriesValue soup_series(const mks::NestedConfig& cfg, int n_max) {
  const std::vector<Site> omega = cfg.outer.sites(), inner = cfg.inner.sites();
  const std::vector<std::vector<Site>> sets{omega, minus_loop(omega, cfg.loop), inner, minus_loop(inner, cfg.loop)};
  const double sign[4] = {1, -1, -1, 1};
  double total = 0.0;
  std::vector<Eigen::MatrixXd> q, pw;
  for (const auto& s : sets) {
    q.push_back(dense_walk(s));
    pw.push_back(q.back());
  }
  for (int n = 1; n <= n_max; ++n) {
    double term = 0.0;
    for (int k = 0; k < 4; ++k) {
      if (q[k].size() == 0) continue;
      term += sign[k] * pw[k].trace();
      pw[k] = pw[k] * q[k];
    }
    total += term / n;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q[0]);
  const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
  const double size = double(omega.size());
  // each bracketed difference lies in [0, tr Q_omega^n] <= size * rho^n
  const double tail = 2.0 * size * std::pow(rho, n_max + 1) / ((n_max + 1) * (1.0 - rho));
  return {total, tail};
}

/// Essential test by flood fill: the loop separates the hole from infinity.
inline bool separates(const mks::DualLoop& loop, Site hole, const mks::DiscreteDomain& annulus) {
  for (Site v : loop.incident_vertices())
    if (!annulus.contains(v)) return false;
  const auto cut = loop.crossed_edge_midpoints();
  std::set<Site> blocked(cut.begin(), cut.end());
  auto [lo, hi] = annulus.bounds();
  lo = {lo.x - 2, lo.y - 2};
  hi = {hi.x + 2, hi.y + 2};
  std::set<Site> seen{hole};
  std::vector<Site> stack{hole};
  while (!stack.empty()) {
    Site s = stack.back();
    stack.pop_back();
    if (s.x <= lo.x || s.y <= lo.y || s.x >= hi.x || s.y >= hi.y) return false;
    for (Site t : nbrs(s)) {
      if (blocked.count({s.x + t.x, s.y + t.y}) || seen.count(t)) continue;
      seen.insert(t);
      stack.push_back(t);
    }
  }
  return true;
}

}  // namespace oracle
