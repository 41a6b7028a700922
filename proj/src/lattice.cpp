#include "mks/lattice.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace mks {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyDomain: return "EmptyDomain";
    case ErrorCode::DisconnectedDomain: return "DisconnectedDomain";
    case ErrorCode::InvalidLoop: return "InvalidLoop";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::NotAnnular: return "NotAnnular";
    case ErrorCode::LoopTouchesBoundary: return "LoopTouchesBoundary";
    case ErrorCode::DomainTooLarge: return "DomainTooLarge";
    case ErrorCode::StripTooWide: return "StripTooWide";
    case ErrorCode::SingularMatrix: return "SingularMatrix";
    case ErrorCode::NumericalSingularity: return "NumericalSingularity";
    case ErrorCode::NoCyclePossible: return "NoCyclePossible";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::NoEssentialAnnulus: return "NoEssentialAnnulus";
    case ErrorCode::ImageNotNested: return "ImageNotNested";
    case ErrorCode::NotInvertible: return "NotInvertible";
    case ErrorCode::IterationBudgetExceeded: return "IterationBudgetExceeded";
    case ErrorCode::MonotonicityViolation: return "MonotonicityViolation";
    case ErrorCode::SpecParseError: return "SpecParseError";
    case ErrorCode::GenerationExhausted: return "GenerationExhausted";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

namespace {

using SiteSet = std::unordered_set<Site, SiteHash>;

std::vector<std::vector<Site>> components_of(const std::vector<Site>& sorted_sites) {
  SiteSet remaining(sorted_sites.begin(), sorted_sites.end());
  std::vector<std::vector<Site>> out;
  for (const Site start : sorted_sites) {
    if (!remaining.count(start)) continue;
    std::vector<Site> comp{start};
    remaining.erase(start);
    for (std::size_t head = 0; head < comp.size(); ++head) {
      for (const Site d : kNeighborOffsets) {
        const Site n = comp[head] + d;
        if (remaining.erase(n)) comp.push_back(n);
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

void sort_unique(std::vector<Site>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool is_odd(int v) { return (v & 1) != 0; }

// Endpoints (doubled coordinates) of the dual edge through a primal-edge
// midpoint.
std::pair<Site, Site> dual_edge_of_midpoint(Site m) {
  if (is_odd(m.x)) return {{m.x, m.y - 1}, {m.x, m.y + 1}};
  return {{m.x - 1, m.y}, {m.x + 1, m.y}};
}

// Primal endpoints of the edge with the given doubled midpoint.
std::pair<Site, Site> primal_edge_of_midpoint(Site m) {
  if (is_odd(m.x)) return {{(m.x - 1) / 2, m.y / 2}, {(m.x + 1) / 2, m.y / 2}};
  return {{m.x / 2, (m.y - 1) / 2}, {m.x / 2, (m.y + 1) / 2}};
}

std::vector<Site> canonical_cycle(const std::vector<Site>& cycle) {
  const std::size_t n = cycle.size();
  const auto start = static_cast<std::size_t>(
      std::min_element(cycle.begin(), cycle.end()) - cycle.begin());
  std::vector<Site> fwd(n), bwd(n);
  for (std::size_t i = 0; i < n; ++i) {
    fwd[i] = cycle[(start + i) % n];
    bwd[i] = cycle[(start + n - i) % n];
  }
  return std::min(fwd, bwd);
}

}  // namespace

bool DiscreteDomain::contains(Site s) const {
  return std::binary_search(sites_.begin(), sites_.end(), s);
}

std::optional<std::size_t> DiscreteDomain::index_of(Site s) const {
  const auto it = std::lower_bound(sites_.begin(), sites_.end(), s);
  if (it == sites_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - sites_.begin());
}

std::pair<Site, Site> DiscreteDomain::bounds() const {
  Site lo = sites_.front(), hi = sites_.front();
  for (const Site s : sites_) {
    lo.x = std::min(lo.x, s.x);
    lo.y = std::min(lo.y, s.y);
    hi.x = std::max(hi.x, s.x);
    hi.y = std::max(hi.y, s.y);
  }
  return {lo, hi};
}

bool DiscreteDomain::is_subset_of(const DiscreteDomain& other) const {
  return std::includes(other.sites_.begin(), other.sites_.end(), sites_.begin(), sites_.end());
}

DiscreteDomain validate_domain(std::vector<Site> raw, int mesh_exponent) {
  if (raw.empty()) throw Error(ErrorCode::EmptyDomain, "domain has no vertices");
  sort_unique(raw);
  if (components_of(raw).size() != 1)
    throw Error(ErrorCode::DisconnectedDomain, "domain is not 4-connected");
  DiscreteDomain d;
  d.sites_ = std::move(raw);
  d.mesh_exponent_ = mesh_exponent;
  return d;
}

std::vector<DiscreteDomain> connected_components(std::vector<Site> raw, int mesh_exponent) {
  sort_unique(raw);
  std::vector<DiscreteDomain> out;
  for (auto& comp : components_of(raw)) out.push_back(validate_domain(std::move(comp), mesh_exponent));
  return out;
}

DiscreteDomain block_domain(int x0, int y0, int x1, int y1, int mesh_exponent) {
  std::vector<Site> s;
  for (int x = x0; x <= x1; ++x)
    for (int y = y0; y <= y1; ++y) s.push_back({x, y});
  return validate_domain(std::move(s), mesh_exponent);
}

// ---------------------------------------------------------------------------
// DualLoop

DualLoop DualLoop::from_sites(std::vector<Site> dual_sites) {
  const std::size_t n = dual_sites.size();
  if (n < 4) throw Error(ErrorCode::InvalidLoop, "a dual loop needs at least 4 sites");
  for (const Site s : dual_sites)
    if (!is_odd(s.x) || !is_odd(s.y))
      throw Error(ErrorCode::InvalidLoop, "dual sites must have odd doubled coordinates");
  for (std::size_t i = 0; i < n; ++i) {
    const Site d = dual_sites[(i + 1) % n] - dual_sites[i];
    if (std::abs(d.x) + std::abs(d.y) != 2 || (d.x != 0 && d.y != 0))
      throw Error(ErrorCode::InvalidLoop, "consecutive dual sites are not adjacent");
  }
  std::vector<Site> sorted = dual_sites;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw Error(ErrorCode::InvalidLoop, "dual loop visits a site twice");
  DualLoop loop;
  loop.sites_ = canonical_cycle(dual_sites);
  return loop;
}

std::vector<Site> DualLoop::crossed_edge_midpoints() const {
  std::vector<Site> out;
  out.reserve(sites_.size());
  const std::size_t n = sites_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Site a = sites_[i], b = sites_[(i + 1) % n];
    out.push_back({(a.x + b.x) / 2, (a.y + b.y) / 2});
  }
  return out;
}

std::vector<Site> DualLoop::incident_vertices() const {
  std::vector<Site> out;
  for (const Site m : crossed_edge_midpoints()) {
    const auto [u, v] = primal_edge_of_midpoint(m);
    out.push_back(u);
    out.push_back(v);
  }
  sort_unique(out);
  return out;
}

std::vector<Site> DualLoop::corner_vertices() const {
  std::vector<Site> out;
  for (const Site d : sites_) {
    const int a = (d.x - 1) / 2, b = (d.y - 1) / 2;
    out.insert(out.end(), {{a, b}, {a + 1, b}, {a, b + 1}, {a + 1, b + 1}});
  }
  sort_unique(out);
  return out;
}

bool DualLoop::encloses(Site p) const {
  int crossings = 0;
  for (const Site m : crossed_edge_midpoints())
    if (m.y == 2 * p.y && is_odd(m.x) && m.x > 2 * p.x) ++crossings;
  return is_odd(crossings);
}

DualLoop boundary_loop(std::span<const Site> cells) {
  SiteSet set(cells.begin(), cells.end());
  std::map<Site, std::vector<Site>> adj;
  std::size_t edges = 0;
  for (const Site c : set) {
    for (const Site d : kNeighborOffsets) {
      const Site n = c + d;
      if (set.count(n)) continue;
      const auto [p, q] = dual_edge_of_midpoint(edge_midpoint(c, n));
      adj[p].push_back(q);
      adj[q].push_back(p);
      ++edges;
    }
  }
  if (edges == 0) throw Error(ErrorCode::InvalidLoop, "empty cell set has no boundary");
  for (const auto& [v, nb] : adj)
    if (nb.size() != 2) throw Error(ErrorCode::InvalidLoop, "cell boundary is pinched");
  std::vector<Site> cycle{adj.begin()->first};
  Site prev = cycle.front(), cur = adj.begin()->second.front();
  while (cur != cycle.front()) {
    cycle.push_back(cur);
    const auto& nb = adj[cur];
    const Site next = nb[0] == prev ? nb[1] : nb[0];
    prev = cur;
    cur = next;
  }
  if (cycle.size() != edges)
    throw Error(ErrorCode::InvalidLoop, "cell boundary has several components");
  return DualLoop::from_sites(std::move(cycle));
}

DualLoop centered_square_loop(int half_width) {
  if (half_width < 1) throw Error(ErrorCode::InvalidArgument, "half_width must be >= 1");
  std::vector<Site> cells;
  for (int x = -half_width + 1; x <= half_width - 1; ++x)
    for (int y = -half_width + 1; y <= half_width - 1; ++y) cells.push_back({x, y});
  return boundary_loop(cells);
}

// ---------------------------------------------------------------------------
// Configurations

NestedConfig make_nested(DualLoop loop, DiscreteDomain inner, DiscreteDomain outer) {
  if (inner.mesh_exponent() != outer.mesh_exponent())
    throw Error(ErrorCode::InvalidConfig, "inner and outer mesh exponents differ");
  if (!inner.is_subset_of(outer)) throw Error(ErrorCode::InvalidConfig, "inner domain not inside outer");
  for (const Site c : loop.corner_vertices())
    if (!inner.contains(c)) throw Error(ErrorCode::InvalidConfig, "loop not strictly inside inner domain");
  return {std::move(loop), std::move(inner), std::move(outer)};
}

AnnularDomain make_annular(DiscreteDomain domain, Site hole_witness) {
  if (domain.contains(hole_witness))
    throw Error(ErrorCode::NotAnnular, "hole witness belongs to the domain");
  auto [lo, hi] = domain.bounds();
  lo = lo - Site{1, 1};
  hi = hi + Site{1, 1};
  if (hole_witness.x <= lo.x || hole_witness.x >= hi.x || hole_witness.y <= lo.y || hole_witness.y >= hi.y)
    throw Error(ErrorCode::NotAnnular, "hole witness outside the bounding box");
  const int w = hi.x - lo.x + 1, h = hi.y - lo.y + 1;
  std::vector<int> label(static_cast<std::size_t>(w * h), -1);
  auto idx = [&](Site s) { return static_cast<std::size_t>((s.x - lo.x) * h + (s.y - lo.y)); };
  for (const Site s : domain.sites()) label[idx(s)] = -2;
  int count = 0;
  bool witness_bounded = false;
  for (int x = lo.x; x <= hi.x; ++x) {
    for (int y = lo.y; y <= hi.y; ++y) {
      if (label[idx({x, y})] != -1) continue;
      bool touches_border = false, has_witness = false;
      std::deque<Site> queue{{x, y}};
      label[idx({x, y})] = count;
      while (!queue.empty()) {
        const Site c = queue.front();
        queue.pop_front();
        if (c.x == lo.x || c.x == hi.x || c.y == lo.y || c.y == hi.y) touches_border = true;
        if (c == hole_witness) has_witness = true;
        for (int dx = -1; dx <= 1; ++dx) {
          for (int dy = -1; dy <= 1; ++dy) {
            const Site n{c.x + dx, c.y + dy};
            if (n.x < lo.x || n.x > hi.x || n.y < lo.y || n.y > hi.y) continue;
            if (label[idx(n)] != -1) continue;
            label[idx(n)] = count;
            queue.push_back(n);
          }
        }
      }
      if (has_witness) witness_bounded = !touches_border;
      ++count;
    }
  }
  if (count != 2 || !witness_bounded)
    throw Error(ErrorCode::NotAnnular, "complement does not have exactly one bounded component around the witness");
  return {std::move(domain), hole_witness};
}

std::size_t LoopComplement::vertex_count() const {
  std::size_t n = 0;
  for (const auto& d : inside) n += d.size();
  for (const auto& d : outside) n += d.size();
  return n;
}

std::vector<const DiscreteDomain*> LoopComplement::all() const {
  std::vector<const DiscreteDomain*> out;
  for (const auto& d : inside) out.push_back(&d);
  for (const auto& d : outside) out.push_back(&d);
  return out;
}

LoopComplement subtract_loop(const DiscreteDomain& domain, const DualLoop& loop) {
  const std::vector<Site> removed = loop.incident_vertices();
  for (const Site s : removed)
    if (!domain.contains(s))
      throw Error(ErrorCode::LoopTouchesBoundary, "loop-incident vertex outside the domain");
  std::vector<Site> in, out;
  for (const Site s : domain.sites()) {
    if (std::binary_search(removed.begin(), removed.end(), s)) continue;
    (loop.encloses(s) ? in : out).push_back(s);
  }
  return {connected_components(std::move(in), domain.mesh_exponent()),
          connected_components(std::move(out), domain.mesh_exponent())};
}

bool is_essential(const DualLoop& loop, const AnnularDomain& annulus) {
  for (const Site s : loop.incident_vertices())
    if (!annulus.domain.contains(s)) return false;
  return loop.encloses(annulus.hole);
}

// ---------------------------------------------------------------------------
// Refinement

DiscreteDomain refine(const DiscreteDomain& domain, int levels) {
  if (levels < 0) throw Error(ErrorCode::InvalidArgument, "refinement levels must be >= 0");
  if (levels == 0) return domain;
  const int s = 1 << levels;
  std::vector<Site> out;
  out.reserve(domain.size() * static_cast<std::size_t>(s * s));
  for (const Site p : domain.sites())
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) out.push_back({s * p.x + i, s * p.y + j});
  return validate_domain(std::move(out), domain.mesh_exponent() + levels);
}

DualLoop refine(const DualLoop& loop, int levels) {
  if (levels < 0) throw Error(ErrorCode::InvalidArgument, "refinement levels must be >= 0");
  if (levels == 0) return loop;
  const int s = 1 << levels;
  const auto& src = loop.sites();
  std::vector<Site> out;
  for (std::size_t i = 0; i < src.size(); ++i) {
    const Site a{s * src[i].x + s - 1, s * src[i].y + s - 1};
    const Site b{s * src[(i + 1) % src.size()].x + s - 1, s * src[(i + 1) % src.size()].y + s - 1};
    const Site step{(b.x > a.x) - (b.x < a.x), (b.y > a.y) - (b.y < a.y)};
    for (Site c = a; c != b; c = c + Site{2 * step.x, 2 * step.y}) out.push_back(c);
  }
  return DualLoop::from_sites(std::move(out));
}

NestedConfig refine(const NestedConfig& cfg, int levels) {
  return {refine(cfg.loop, levels), refine(cfg.inner, levels), refine(cfg.outer, levels)};
}

AnnularDomain refine(const AnnularDomain& annulus, int levels) {
  const int s = 1 << levels;
  return {refine(annulus.domain, levels), {s * annulus.hole.x, s * annulus.hole.y}};
}

// ---------------------------------------------------------------------------
// Symmetries

namespace {

using Mat2 = std::array<int, 4>;  // row-major

Mat2 mul(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat2 matrix_of(int element) {
  const Mat2 rot{0, -1, 1, 0};
  Mat2 m{1, 0, 0, 1};
  for (int k = 0; k < element % 4; ++k) m = mul(rot, m);
  if (element >= 4) m = mul(m, Mat2{-1, 0, 0, 1});
  return m;
}

int element_of(const Mat2& m) {
  for (int e = 0; e < 8; ++e)
    if (matrix_of(e) == m) return e;
  throw Error(ErrorCode::InvalidArgument, "matrix is not a lattice point symmetry");
}

Site mat_apply(const Mat2& m, Site s) { return {m[0] * s.x + m[1] * s.y, m[2] * s.x + m[3] * s.y}; }

}  // namespace

Symmetry Symmetry::rotation(int quarter_turns) { return {((quarter_turns % 4) + 4) % 4, {}}; }
Symmetry Symmetry::reflection() { return {4, {}}; }

Site Symmetry::apply_primal(Site s) const { return mat_apply(matrix_of(element), s) + translation; }

Site Symmetry::apply_dual(Site s) const {
  return mat_apply(matrix_of(element), s) + Site{2 * translation.x, 2 * translation.y};
}

Symmetry operator*(const Symmetry& a, const Symmetry& b) {
  const Mat2 ma = matrix_of(a.element);
  return {element_of(mul(ma, matrix_of(b.element))), mat_apply(ma, b.translation) + a.translation};
}

Symmetry Symmetry::inverse() const {
  const Mat2 m = matrix_of(element);
  const Mat2 inv{m[0], m[2], m[1], m[3]};  // orthogonal
  const Site t = mat_apply(inv, translation);
  return {element_of(inv), {-t.x, -t.y}};
}

DiscreteDomain apply_symmetry(const DiscreteDomain& domain, const Symmetry& s) {
  std::vector<Site> out;
  out.reserve(domain.size());
  for (const Site p : domain.sites()) out.push_back(s.apply_primal(p));
  return validate_domain(std::move(out), domain.mesh_exponent());
}

DualLoop apply_symmetry(const DualLoop& loop, const Symmetry& s) {
  std::vector<Site> out;
  out.reserve(loop.size());
  for (const Site p : loop.sites()) out.push_back(s.apply_dual(p));
  return DualLoop::from_sites(std::move(out));
}

NestedConfig apply_symmetry(const NestedConfig& cfg, const Symmetry& s) {
  return {apply_symmetry(cfg.loop, s), apply_symmetry(cfg.inner, s), apply_symmetry(cfg.outer, s)};
}

AnnularDomain apply_symmetry(const AnnularDomain& annulus, const Symmetry& s) {
  return {apply_symmetry(annulus.domain, s), s.apply_primal(annulus.hole)};
}

}  // namespace mks
