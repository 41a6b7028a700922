#pragma once

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mks/ising.hpp"
#include "mks/lattice.hpp"

namespace mks {

/// f(loop, inner, outer) for a nested pair.
struct RestrictionEvaluator {
  std::string name;
  std::function<double(const NestedConfig&)> eval;

  double operator()(const NestedConfig& cfg) const { return eval(cfg); }
};

RestrictionEvaluator ising_evaluator(InverseTemperature beta, IsingEngine engine = IsingEngine::Transfer);
RestrictionEvaluator ust_evaluator();
/// c * soup_mass(cfg).
RestrictionEvaluator soup_evaluator(double c = 1.0);
RestrictionEvaluator zero_evaluator();

/// Reference pair used to pin gauge constants: the unit loop around the
/// origin inside the centred square of side 2^k, k = 3.
struct ReferencePair {
  DualLoop loop;
  DiscreteDomain domain;
};
ReferencePair reference_pair(int k = 3);

/// g(loop, domain) with g(reference) = 0.
struct GaugeFunction {
  std::string name;
  std::function<double(const DualLoop&, const DiscreteDomain&)> g;

  double operator()(const DualLoop& loop, const DiscreteDomain& domain) const { return g(loop, domain); }
};

/// Wraps a raw function and subtracts its value on the reference pair.
GaugeFunction make_gauge(std::string name, std::function<double(const DualLoop&, const DiscreteDomain&)> raw);
GaugeFunction zero_gauge();
/// Number of dual edges of the loop (depends on the loop only).
GaugeFunction loop_length_gauge();
GaugeFunction negate(const GaugeFunction& g);

struct CocycleReport {
  std::string evaluator;
  double f13 = 0.0;
  double f12 = 0.0;
  double f23 = 0.0;
  double defect = 0.0;  // f13 - f12 - f23
  double tolerance = 0.0;
  bool pass = false;
};

/// Requires loop in d1, d1 ⊆ d2 ⊆ d3. Throws InvalidConfig.
CocycleReport check_cocycle(const RestrictionEvaluator& f, const DualLoop& loop, const DiscreteDomain& d1,
                            const DiscreteDomain& d2, const DiscreteDomain& d3, double tolerance = 1e-8);

/// f'(loop, inner, outer) = f + g(loop, outer) - g(loop, inner).
RestrictionEvaluator gauge_transform(const RestrictionEvaluator& f, const GaugeFunction& g);

/// Essential annular neighbourhoods of the loop inside sigma: sites within
/// Chebyshev distance w of the loop's incident vertices, w = 0, 1, ..., kept
/// while they are annular and the loop is essential in them.
std::vector<AnnularDomain> loop_annuli(const DualLoop& loop, const DiscreteDomain& sigma);

struct GaugeReconstruction {
  double value = 0.0;        // f(loop, A, sigma) + seed(loop, A) for the first annulus
  double discrepancy = 0.0;  // same expression with the second annulus, minus value
  std::size_t annuli_used = 0;
};

/// Rebuilds g(loop, sigma) from f and a seed on annuli. With an empty list the
/// annuli come from loop_annuli. Throws NoEssentialAnnulus.
GaugeReconstruction reconstruct_g(const RestrictionEvaluator& f, const GaugeFunction& seed, const DualLoop& loop,
                                  const DiscreteDomain& sigma, std::span<const AnnularDomain> annuli = {});

/// Dyadic rescaling realised as refinement by the given number of levels.
struct Dilation {
  int levels = 1;
};
using GridMap = std::variant<Symmetry, Dilation>;

/// For a symmetry psi fixing the loop: f(loop, psi A, omega) - f(loop, A, omega).
/// For a dilation: f of the refined triple minus f of the original.
/// Throws ImageNotNested when psi moves the loop or psi A leaves omega.
double rho_defect(const RestrictionEvaluator& f, const GridMap& psi, const DualLoop& loop,
                  const AnnularDomain& annulus, const DiscreteDomain& omega);

/// Hausdorff distance between the loops' face centres, in lattice units.
double loop_distance(const DualLoop& a, const DualLoop& b);

struct ContinuityRow {
  double distance = 0.0;
  double difference = 0.0;
};

struct ContinuityReport {
  std::vector<ContinuityRow> rows;
  bool shrinking = true;  // differences never grow along the sequence (slack 1e-12)
};

/// Tabulates |g(loop_n) - g(limit)| against loop_distance(loop_n, limit).
ContinuityReport continuity_probe(const std::function<double(const DualLoop&)>& g, const DualLoop& limit,
                                  std::span<const DualLoop> sequence);

}  // namespace mks
