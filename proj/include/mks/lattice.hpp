#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "mks/error.hpp"

namespace mks {

/// Integer point on Z^2. Primal sites use plain coordinates; dual sites (face
/// centres) use the doubled convention where a face centre (x+1/2, y+1/2) is
/// stored as (2x+1, 2y+1).
struct Site {
  int x = 0;
  int y = 0;
  auto operator<=>(const Site&) const = default;
};

inline Site operator+(Site a, Site b) { return {a.x + b.x, a.y + b.y}; }
inline Site operator-(Site a, Site b) { return {a.x - b.x, a.y - b.y}; }

inline constexpr std::array<Site, 4> kNeighborOffsets{{{1, 0}, {0, 1}, {-1, 0}, {0, -1}}};

struct SiteHash {
  std::size_t operator()(Site s) const noexcept {
    const auto packed = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.x)) << 32) |
                        static_cast<std::uint32_t>(s.y);
    return std::hash<std::uint64_t>{}(packed * 0x9E3779B97F4A7C15ULL);
  }
};

/// Connected finite set of lattice sites at mesh 2^-mesh_exponent. Sites are
/// kept sorted, so equality is structural.
class DiscreteDomain {
 public:
  DiscreteDomain() = default;

  const std::vector<Site>& sites() const { return sites_; }
  int mesh_exponent() const { return mesh_exponent_; }
  std::size_t size() const { return sites_.size(); }
  bool contains(Site s) const;
  std::optional<std::size_t> index_of(Site s) const;
  /// Inclusive bounding box corners.
  std::pair<Site, Site> bounds() const;
  bool is_subset_of(const DiscreteDomain& other) const;

  bool operator==(const DiscreteDomain&) const = default;

 private:
  friend DiscreteDomain validate_domain(std::vector<Site> raw, int mesh_exponent);
  std::vector<Site> sites_;
  int mesh_exponent_ = 0;
};

/// Sorts, deduplicates and checks 4-connectivity.
/// Throws EmptyDomain or DisconnectedDomain.
DiscreteDomain validate_domain(std::vector<Site> raw, int mesh_exponent = 0);

/// Splits an arbitrary site set into its 4-connected components.
std::vector<DiscreteDomain> connected_components(std::vector<Site> raw, int mesh_exponent);

/// Simple closed path on the dual lattice, doubled coordinates. Stored in the
/// canonical rotation/orientation so that equality ignores rerooting and
/// orientation.
class DualLoop {
 public:
  DualLoop() = default;

  static DualLoop from_sites(std::vector<Site> dual_sites);

  const std::vector<Site>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }

  /// Midpoints (doubled coordinates) of the primal edges crossed by the loop.
  /// A dual edge and the primal edge it crosses share the same midpoint.
  std::vector<Site> crossed_edge_midpoints() const;
  /// Primal endpoints of every crossed edge, sorted and unique.
  std::vector<Site> incident_vertices() const;
  /// Primal corners of every face visited by the loop, sorted and unique.
  std::vector<Site> corner_vertices() const;
  /// Jordan test by ray parity: true if the primal site lies inside the loop.
  bool encloses(Site primal) const;

  bool operator==(const DualLoop&) const = default;

 private:
  std::vector<Site> sites_;
};

/// Converts a primal edge (u, v) to its doubled-coordinate midpoint.
inline Site edge_midpoint(Site u, Site v) { return {u.x + v.x, u.y + v.y}; }

/// Dual loop tracing the boundary of a finite cell set. Fails with InvalidLoop
/// when the boundary is not a single simple loop.
DualLoop boundary_loop(std::span<const Site> cells);

/// Square dual loop enclosing the (2r-1)x(2r-1) block of primal sites centred
/// at the origin; r = 1 is the unit loop around (0,0).
DualLoop centered_square_loop(int half_width);

/// Axis-aligned block of sites [x0, x1] x [y0, y1].
DiscreteDomain block_domain(int x0, int y0, int x1, int y1, int mesh_exponent = 0);

/// Loop nested in two domains: loop ⊂ inner ⊆ outer.
struct NestedConfig {
  DualLoop loop;
  DiscreteDomain inner;
  DiscreteDomain outer;
  bool operator==(const NestedConfig&) const = default;
};

/// Checks inner ⊆ outer and that every corner of the loop's faces lies in
/// inner. Throws InvalidConfig.
NestedConfig make_nested(DualLoop loop, DiscreteDomain inner, DiscreteDomain outer);

/// Domain with exactly one bounded complementary component.
struct AnnularDomain {
  DiscreteDomain domain;
  Site hole;  // a site of the bounded complementary component
  bool operator==(const AnnularDomain&) const = default;
};

/// Throws NotAnnular unless the 8-connected complement within the bounding box
/// has exactly two components and the witness lies in the bounded one.
AnnularDomain make_annular(DiscreteDomain domain, Site hole_witness);

/// Remainder of a domain after deleting every vertex incident to the loop.
struct LoopComplement {
  std::vector<DiscreteDomain> inside;
  std::vector<DiscreteDomain> outside;
  std::size_t vertex_count() const;
  std::vector<const DiscreteDomain*> all() const;
};

/// Throws LoopTouchesBoundary when an incident vertex lies outside the domain.
LoopComplement subtract_loop(const DiscreteDomain& domain, const DualLoop& loop);

/// True when the loop separates the hole from the outer boundary. False for
/// loops that are not inside the annulus.
bool is_essential(const DualLoop& loop, const AnnularDomain& annulus);

DiscreteDomain refine(const DiscreteDomain& domain, int levels);
DualLoop refine(const DualLoop& loop, int levels);
NestedConfig refine(const NestedConfig& cfg, int levels);
AnnularDomain refine(const AnnularDomain& annulus, int levels);

/// Element of the symmetry group of Z^2: one of the eight point symmetries
/// fixing the origin followed by an integer translation.
struct Symmetry {
  /// 0..3 rotations by k*90 degrees, 4..7 the reflection x -> -x followed by
  /// the rotation (k-4)*90 degrees.
  int element = 0;
  Site translation{};

  static Symmetry identity() { return {}; }
  static Symmetry rotation(int quarter_turns);
  static Symmetry reflection();
  static Symmetry translate(Site t) { return {0, t}; }

  Site apply_primal(Site s) const;
  Site apply_dual(Site s) const;
  /// (a * b)(s) = a(b(s)).
  friend Symmetry operator*(const Symmetry& a, const Symmetry& b);
  Symmetry inverse() const;
  bool operator==(const Symmetry&) const = default;
};

DiscreteDomain apply_symmetry(const DiscreteDomain& domain, const Symmetry& s);
DualLoop apply_symmetry(const DualLoop& loop, const Symmetry& s);
NestedConfig apply_symmetry(const NestedConfig& cfg, const Symmetry& s);
AnnularDomain apply_symmetry(const AnnularDomain& annulus, const Symmetry& s);

}  // namespace mks
