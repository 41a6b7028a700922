#include <cstdlib>
#include <deque>

#include "mks/loopsoup.hpp"
#include "mks/random.hpp"

namespace mks {

PrimalCycle sample_lerw_loop(const DiscreteDomain& domain, Site root, std::uint64_t seed) {
  const Site start = root + Site{0, 1};
  const auto root_index = domain.index_of(root);
  const auto start_index = domain.index_of(start);
  if (!root_index || !start_index)
    throw Error(ErrorCode::NoCyclePossible, "marked edge is not inside the domain");

  const auto blocked = [&](Site a, Site b) {
    if (a.x != b.x || a.x < root.x) return false;
    return std::min(a.y, b.y) == root.y && std::abs(a.y - b.y) == 1;
  };

  const auto& sites = domain.sites();
  const std::size_t n = sites.size();
  std::vector<std::vector<int>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (const Site d : kNeighborOffsets) {
      const Site t = sites[i] + d;
      if (blocked(sites[i], t)) continue;
      if (auto j = domain.index_of(t)) adj[i].push_back(static_cast<int>(*j));
    }

  {
    std::vector<char> seen(n, 0);
    std::deque<int> queue{static_cast<int>(*start_index)};
    seen[*start_index] = 1;
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : adj[u])
        if (!seen[v]) seen[v] = 1, queue.push_back(v);
    }
    if (!seen[*root_index]) throw Error(ErrorCode::NoCyclePossible, "root unreachable once the marked edge is cut");
  }

  std::mt19937_64 rng(seed);
  std::vector<int> path{static_cast<int>(*start_index)};
  std::vector<int> position(n, -1);
  position[*start_index] = 0;
  int current = static_cast<int>(*start_index);
  while (current != static_cast<int>(*root_index)) {
    const auto& nb = adj[current];
    const int next = nb[uniform_index(rng, nb.size())];
    if (position[next] >= 0) {
      for (std::size_t k = static_cast<std::size_t>(position[next]) + 1; k < path.size(); ++k) position[path[k]] = -1;
      path.resize(static_cast<std::size_t>(position[next]) + 1);
    } else {
      position[next] = static_cast<int>(path.size());
      path.push_back(next);
    }
    current = next;
  }

  PrimalCycle cycle;
  cycle.sites.reserve(path.size());
  for (int i : path) cycle.sites.push_back(sites[i]);
  return cycle;
}

LerwSetup lerw_annulus(int side) {
  if (side < 8) throw Error(ErrorCode::InvalidArgument, "annulus side must be at least 8");
  const int hole = side / 4;
  const int lo = (side - hole) / 2;
  const int hi = lo + hole - 1;
  std::vector<Site> raw;
  raw.reserve(static_cast<std::size_t>(side) * side);
  for (int x = 0; x < side; ++x)
    for (int y = 0; y < side; ++y)
      if (x < lo || x > hi || y < lo || y > hi) raw.push_back({x, y});
  return {validate_domain(std::move(raw)), Site{hi + 1, lo + hole / 2 - 1}};
}

}  // namespace mks
