#include "mks/loopsoup.hpp"

#include <cmath>

#include "mks/linalg.hpp"

namespace mks {

namespace {

Eigen::SparseMatrix<double> neighbour_matrix(const DiscreteDomain& domain, double diagonal, double off) {
  const auto n = static_cast<Eigen::Index>(domain.size());
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(domain.size() * 5);
  const auto& sites = domain.sites();
  for (std::size_t i = 0; i < sites.size(); ++i) {
    if (diagonal != 0.0) t.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i), diagonal);
    for (const Site d : kNeighborOffsets)
      if (auto j = domain.index_of(sites[i] + d))
        t.emplace_back(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*j), off);
  }
  Eigen::SparseMatrix<double> m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

Eigen::SparseMatrix<double> walk_kernel(const DiscreteDomain& domain) {
  return neighbour_matrix(domain, 0.0, 0.25);
}

Eigen::SparseMatrix<double> dirichlet_laplacian(const DiscreteDomain& domain) {
  return neighbour_matrix(domain, 4.0, -1.0);
}

double loop_mass(const DiscreteDomain& domain) {
  return -log_det_spd(neighbour_matrix(domain, 1.0, -0.25), ErrorCode::NumericalSingularity);
}

double loop_mass(const LoopComplement& pieces) {
  double m = 0.0;
  for (const DiscreteDomain* d : pieces.all()) m += loop_mass(*d);
  return m;
}

double soup_mass(const NestedConfig& cfg) {
  if (cfg.inner == cfg.outer) return 0.0;
  return (loop_mass(cfg.outer) - loop_mass(subtract_loop(cfg.outer, cfg.loop))) -
         (loop_mass(cfg.inner) - loop_mass(subtract_loop(cfg.inner, cfg.loop)));
}

double log_tree_count(const DiscreteDomain& domain) {
  return log_abs_det_lu(dirichlet_laplacian(domain), ErrorCode::NumericalSingularity);
}

double log_tree_count(const LoopComplement& pieces) {
  double t = 0.0;
  for (const DiscreteDomain* d : pieces.all()) t += log_tree_count(*d);
  return t;
}

double ust_restriction(const NestedConfig& cfg) {
  if (cfg.inner == cfg.outer) return 0.0;
  return (log_tree_count(subtract_loop(cfg.inner, cfg.loop)) - log_tree_count(cfg.inner)) -
         (log_tree_count(subtract_loop(cfg.outer, cfg.loop)) - log_tree_count(cfg.outer));
}

double central_charge(double kappa) {
  if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidArgument, "kappa must be positive");
  return (3.0 * kappa - 8.0) * (6.0 - kappa) / (2.0 * kappa);
}

}  // namespace mks
