#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <vector>

#include "mks/ising.hpp"
#include "mks/linalg.hpp"

namespace mks {

const char* to_string(IsingEngine engine) {
  switch (engine) {
    case IsingEngine::Enumeration: return "enum";
    case IsingEngine::Transfer: return "transfer";
    case IsingEngine::KacWard: return "kacward";
  }
  return "unknown";
}

IsingEngine parse_engine(const std::string& name) {
  if (name == "enum") return IsingEngine::Enumeration;
  if (name == "transfer") return IsingEngine::Transfer;
  if (name == "kacward") return IsingEngine::KacWard;
  throw Error(ErrorCode::InvalidArgument, "unknown Ising engine '" + name + "'");
}

std::size_t interacting_edge_count(const DiscreteDomain& domain) {
  std::size_t count = 0;
  for (const Site s : domain.sites())
    for (const Site d : kNeighborOffsets) {
      const Site n = s + d;
      // internal edges are seen from both ends
      if (!domain.contains(n) || s < n) ++count;
    }
  return count;
}

double log_partition_enumeration(const DiscreteDomain& domain, InverseTemperature beta) {
  const std::size_t n = domain.size();
  if (n > kMaxEnumerationSites)
    throw Error(ErrorCode::DomainTooLarge, "enumeration is limited to 25 sites");
  const auto& sites = domain.sites();
  std::vector<std::vector<int>> nbrs(n);
  std::vector<int> boundary(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (const Site d : kNeighborOffsets) {
      if (auto j = domain.index_of(sites[i] + d)) nbrs[i].push_back(static_cast<int>(*j));
      else ++boundary[i];
    }

  // Histogram of the integer energy -H over the Gray-code walk through all
  // 2^n configurations; the sum is beta independent until the last step.
  const auto edges = static_cast<int>(interacting_edge_count(domain));
  std::vector<std::uint64_t> histogram(static_cast<std::size_t>(2 * edges + 1), 0);
  std::vector<int> spin(n, 1);
  int energy = edges;
  ++histogram[static_cast<std::size_t>(energy + edges)];
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t k = 1; k < total; ++k) {
    const auto i = static_cast<std::size_t>(std::countr_zero(k));
    int field = boundary[i];
    for (const int j : nbrs[i]) field += spin[static_cast<std::size_t>(j)];
    energy -= 2 * spin[i] * field;
    spin[i] = -spin[i];
    ++histogram[static_cast<std::size_t>(energy + edges)];
  }

  double log_z = -INFINITY;
  for (int e = -edges; e <= edges; ++e) {
    const auto c = histogram[static_cast<std::size_t>(e + edges)];
    if (c == 0) continue;
    log_z = log_add_exp(log_z, std::log(static_cast<double>(c)) + beta.value() * e);
  }
  return log_z;
}

double log_partition(const DiscreteDomain& domain, InverseTemperature beta, IsingEngine engine) {
  switch (engine) {
    case IsingEngine::Enumeration: return log_partition_enumeration(domain, beta);
    case IsingEngine::Transfer: return log_partition_transfer(domain, beta);
    case IsingEngine::KacWard: return log_partition_kac_ward(domain, beta);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown engine");
}

double log_partition(const LoopComplement& pieces, InverseTemperature beta, IsingEngine engine) {
  double total = 0.0;
  for (const DiscreteDomain* d : pieces.all()) total += log_partition(*d, beta, engine);
  return total;
}

double ising_restriction(const NestedConfig& cfg, InverseTemperature beta, IsingEngine engine) {
  if (cfg.inner == cfg.outer) return 0.0;
  const double inner_cut = log_partition(subtract_loop(cfg.inner, cfg.loop), beta, engine);
  const double outer_cut = log_partition(subtract_loop(cfg.outer, cfg.loop), beta, engine);
  const double inner = log_partition(cfg.inner, beta, engine);
  const double outer = log_partition(cfg.outer, beta, engine);
  return (inner_cut - inner) - (outer_cut - outer);
}

}  // namespace mks
