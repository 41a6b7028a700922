#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "mks/lattice.hpp"

namespace mks {

/// beta_c = (1/2) ln(1 + sqrt 2), the critical point of the square-lattice model.
inline const double kBetaCritical = 0.5 * std::log(std::sqrt(2.0) + 1.0);

class InverseTemperature {
 public:
  explicit InverseTemperature(double beta) : beta_(beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::InvalidArgument, "beta must be positive");
  }
  static InverseTemperature critical() { return InverseTemperature(kBetaCritical); }
  double value() const { return beta_; }

 private:
  double beta_;
};

enum class IsingEngine { Enumeration, Transfer, KacWard };

const char* to_string(IsingEngine engine);
IsingEngine parse_engine(const std::string& name);  // "enum" | "transfer" | "kacward"

inline constexpr std::size_t kMaxEnumerationSites = 25;
inline constexpr int kMaxTransferWidth = 16;

// All partition functions use + boundary conditions: every lattice neighbour
// outside the domain is a frozen +1 spin, and Z = sum_sigma exp(beta * sum_{x~y} s_x s_y)
// where the sum runs over every edge with at least one endpoint in the domain.
// Values are natural logarithms.

/// Exhaustive sum over 2^n configurations (n <= 25). Throws DomainTooLarge.
double log_partition_enumeration(const DiscreteDomain& domain, InverseTemperature beta);

/// Column transfer matrix with the strip oriented along its narrower side.
/// Throws StripTooWide when both bounding-box sides exceed 16.
double log_partition_transfer(const DiscreteDomain& domain, InverseTemperature beta);

/// Low-temperature contour expansion evaluated with Kac-Ward determinants on
/// the dual graph, x = exp(-2 beta). Each bounded hole of the complement is
/// pinned to + by a parity projection over sign-twisted determinants.
/// Throws SingularMatrix.
double log_partition_kac_ward(const DiscreteDomain& domain, InverseTemperature beta);

double log_partition(const DiscreteDomain& domain, InverseTemperature beta, IsingEngine engine);
/// Sum over the vertex-disjoint pieces; an empty complement contributes 0.
double log_partition(const LoopComplement& pieces, InverseTemperature beta, IsingEngine engine);

/// Number of lattice edges with at least one endpoint in the domain.
std::size_t interacting_edge_count(const DiscreteDomain& domain);

/// log[ Z(inner \ loop) Z(outer) / (Z(inner) Z(outer \ loop)) ].
double ising_restriction(const NestedConfig& cfg, InverseTemperature beta,
                         IsingEngine engine = IsingEngine::Transfer);

/// Spin assignment aligned with the sorted sites of its domain; the boundary is +.
struct SpinConfig {
  std::shared_ptr<const DiscreteDomain> domain;
  std::vector<std::int8_t> spins;

  int spin_at(Site s) const;  // +1 outside the domain
  double magnetization() const;
  /// -H(sigma), boundary edges included.
  int negative_energy() const;
};

/// Run-length text: e.g. "3+2-1+" in the domain's sorted site order.
std::string encode_rle(const SpinConfig& sigma);
SpinConfig decode_rle(std::shared_ptr<const DiscreteDomain> domain, const std::string& text);

struct SamplerOptions {
  std::size_t burn_in = 1000;   // cluster updates discarded first
  std::size_t thinning = 10;    // cluster updates between recorded samples
};

/// Wolff cluster dynamics for the + boundary model. The frozen boundary is a
/// single ghost spin joined to every boundary edge; when a cluster absorbs the
/// ghost the whole state is re-gauged so the ghost reads +.
class WolffSampler {
 public:
  WolffSampler(DiscreteDomain domain, InverseTemperature beta, std::uint64_t seed);

  void step();
  SpinConfig state() const;

 private:
  std::shared_ptr<const DiscreteDomain> domain_;
  std::vector<std::array<int, 4>> neighbors_;  // -1 marks a boundary edge
  std::vector<int> boundary_sites_;             // one entry per boundary edge
  std::vector<std::int8_t> spins_;
  std::int8_t ghost_ = 1;
  double add_probability_;
  std::mt19937_64 rng_;
};

std::vector<SpinConfig> sample_ising(const DiscreteDomain& domain, InverseTemperature beta,
                                     std::size_t n_samples, std::uint64_t seed,
                                     SamplerOptions options = {});

/// Closed interface walk on the dual lattice (doubled coordinates). A site is
/// repeated only where the loop passes a resolved four-way corner twice.
struct InterfaceLoop {
  std::vector<Site> sites;
  bool is_simple() const;
  DualLoop to_dual_loop() const;  // throws InvalidLoop unless simple
};

/// Decomposes the dual edges separating disagreeing spins (boundary included)
/// into closed loops. At a face with four disagreeing edges the south edge is
/// joined to the west edge and the north edge to the east edge.
std::vector<InterfaceLoop> extract_interfaces(const SpinConfig& sigma);

}  // namespace mks
