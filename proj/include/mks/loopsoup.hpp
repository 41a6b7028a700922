#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "mks/lattice.hpp"

namespace mks {

/// Killed simple random walk: Q(u,v) = 1/4 for lattice neighbours inside the
/// domain, 0 otherwise. Mass leaks through every boundary edge.
Eigen::SparseMatrix<double> walk_kernel(const DiscreteDomain& domain);

/// Laplacian with the boundary wired to a single killed vertex: 4 on the
/// diagonal, -1 between neighbours.
Eigen::SparseMatrix<double> dirichlet_laplacian(const DiscreteDomain& domain);

/// Random-walk loop mass m = -log det(I - Q), by sparse Cholesky.
/// Throws NumericalSingularity.
double loop_mass(const DiscreteDomain& domain);
double loop_mass(const LoopComplement& pieces);

/// Mass of walk loops in the outer domain that meet both the loop's incident
/// vertices and outer \ inner:
///   m(outer) - m(outer \ loop) - m(inner) + m(inner \ loop).
double soup_mass(const NestedConfig& cfg);

/// log of the number of spanning trees of the wired graph, by sparse LU of
/// the Dirichlet Laplacian.
double log_tree_count(const DiscreteDomain& domain);
double log_tree_count(const LoopComplement& pieces);

/// log[ T(inner \ loop) T(outer) / (T(inner) T(outer \ loop)) ]. Equal to
/// -soup_mass(cfg): the 4^|V| factors cancel by vertex-count balance.
double ust_restriction(const NestedConfig& cfg);

/// c(kappa) = (3 kappa - 8)(6 - kappa) / (2 kappa).
double central_charge(double kappa);

/// Closed lattice path of primal sites; consecutive entries (cyclically) are
/// lattice neighbours.
struct PrimalCycle {
  std::vector<Site> sites;
};

/// Loop-erased walk closed through a marked edge.
///
/// The marked edge joins `root` to `root + (0, 1)`. The walk starts at the
/// upper endpoint on the graph of the domain with the marked edge and every
/// vertical edge (x, root.y)-(x, root.y + 1) with x > root.x removed (the
/// slit), reflects at the domain boundary, and is loop-erased chronologically
/// until it reaches the root. The erased path plus the marked edge is the
/// returned cycle. In a domain with a hole to the left of the root the cycle
/// winds once around the hole.
/// Throws NoCyclePossible when the root cannot be reached.
PrimalCycle sample_lerw_loop(const DiscreteDomain& domain, Site root, std::uint64_t seed);

/// side x side square with a centred square hole of side side/4, and the
/// marked-edge root just right of the hole.
struct LerwSetup {
  DiscreteDomain domain;
  Site root;
};
LerwSetup lerw_annulus(int side);

struct DimensionEstimate {
  double dimension = 0.0;
  double standard_error = 0.0;
  std::size_t curves = 0;
};

/// Box-counting dimension: per curve, the least-squares slope of
/// log N(s) against log(1/s) over the box sides s; the estimate is the mean
/// slope and its standard error across curves.
/// Requires >= 20 curves and >= 4 integer scales spanning >= 2 octaves.
/// Throws InsufficientData.
DimensionEstimate box_dimension(std::span<const std::vector<Site>> curves, std::span<const int> scales);

}  // namespace mks
