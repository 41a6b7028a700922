#include <algorithm>
#include <map>

#include "mks/ising.hpp"

namespace mks {

namespace {

// Sides of a dual vertex: 0 east, 1 north, 2 west, 3 south.
constexpr std::array<Site, 4> kSide{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};
constexpr std::array<int, 4> kCornerPartner{1, 0, 3, 2};  // N-E, S-W

int side_of(Site from, Site to) {
  const Site d{(to.x - from.x) / 2, (to.y - from.y) / 2};
  for (int k = 0; k < 4; ++k)
    if (kSide[static_cast<std::size_t>(k)] == d) return k;
  return -1;
}

}  // namespace

bool InterfaceLoop::is_simple() const {
  auto sorted = sites;
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
}

DualLoop InterfaceLoop::to_dual_loop() const { return DualLoop::from_sites(sites); }

std::vector<InterfaceLoop> extract_interfaces(const SpinConfig& sigma) {
  const auto& sites = sigma.domain->sites();
  struct Edge {
    Site p, q;
  };
  std::vector<Edge> edges;
  std::map<Site, std::array<int, 4>> incidence;
  auto attach = [&](Site v, int side, int e) {
    auto [it, inserted] = incidence.try_emplace(v);
    if (inserted) it->second.fill(-1);
    it->second[static_cast<std::size_t>(side)] = e;
  };
  for (std::size_t i = 0; i < sites.size(); ++i) {
    for (const Site d : kNeighborOffsets) {
      const Site n = sites[i] + d;
      const bool inside = sigma.domain->contains(n);
      if (inside && !(sites[i] < n)) continue;
      if (sigma.spins[i] == sigma.spin_at(n)) continue;
      const Site m = edge_midpoint(sites[i], n);
      const Site p = (m.x & 1) ? Site{m.x, m.y - 1} : Site{m.x - 1, m.y};
      const Site q = (m.x & 1) ? Site{m.x, m.y + 1} : Site{m.x + 1, m.y};
      const int e = static_cast<int>(edges.size());
      edges.push_back({p, q});
      attach(p, side_of(p, q), e);
      attach(q, side_of(q, p), e);
    }
  }

  std::vector<char> used(edges.size(), 0);
  std::vector<InterfaceLoop> loops;
  for (std::size_t e0 = 0; e0 < edges.size(); ++e0) {
    if (used[e0]) continue;
    used[e0] = 1;
    InterfaceLoop loop;
    loop.sites.push_back(edges[e0].p);
    Site cur = edges[e0].q;
    int in_side = side_of(cur, edges[e0].p);
    for (;;) {
      const auto& inc = incidence.at(cur);
      const int degree = static_cast<int>(std::count_if(inc.begin(), inc.end(), [](int x) { return x >= 0; }));
      int out_side = -1;
      if (degree == 4) {
        out_side = kCornerPartner[static_cast<std::size_t>(in_side)];
      } else {
        for (int k = 0; k < 4; ++k)
          if (k != in_side && inc[static_cast<std::size_t>(k)] >= 0) out_side = k;
      }
      const int e = inc[static_cast<std::size_t>(out_side)];
      if (e == static_cast<int>(e0)) break;
      used[static_cast<std::size_t>(e)] = 1;
      loop.sites.push_back(cur);
      const Site next = cur + Site{2 * kSide[static_cast<std::size_t>(out_side)].x,
                                   2 * kSide[static_cast<std::size_t>(out_side)].y};
      in_side = (out_side + 2) % 4;
      cur = next;
    }
    loops.push_back(std::move(loop));
  }
  return loops;
}

}  // namespace mks
