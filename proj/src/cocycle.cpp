#include "mks/cocycle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "mks/loopsoup.hpp"

namespace mks {

RestrictionEvaluator ising_evaluator(InverseTemperature beta, IsingEngine engine) {
  return {std::string("ising-") + to_string(engine),
          [beta, engine](const NestedConfig& cfg) { return ising_restriction(cfg, beta, engine); }};
}

RestrictionEvaluator ust_evaluator() {
  return {"ust", [](const NestedConfig& cfg) { return ust_restriction(cfg); }};
}

RestrictionEvaluator soup_evaluator(double c) {
  return {"soup", [c](const NestedConfig& cfg) { return c * soup_mass(cfg); }};
}

RestrictionEvaluator zero_evaluator() {
  return {"zero", [](const NestedConfig&) { return 0.0; }};
}

ReferencePair reference_pair(int k) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "reference square needs k >= 2");
  const int h = 1 << (k - 1);
  return {centered_square_loop(1), block_domain(-h, -h, h - 1, h - 1)};
}

GaugeFunction make_gauge(std::string name, std::function<double(const DualLoop&, const DiscreteDomain&)> raw) {
  const ReferencePair ref = reference_pair();
  const double offset = raw(ref.loop, ref.domain);
  return {std::move(name), [raw = std::move(raw), offset](const DualLoop& l, const DiscreteDomain& d) {
            return raw(l, d) - offset;
          }};
}

GaugeFunction zero_gauge() {
  return {"zero", [](const DualLoop&, const DiscreteDomain&) { return 0.0; }};
}

GaugeFunction loop_length_gauge() {
  return make_gauge("length", [](const DualLoop& l, const DiscreteDomain&) { return static_cast<double>(l.size()); });
}

GaugeFunction negate(const GaugeFunction& g) {
  return {"-" + g.name, [g](const DualLoop& l, const DiscreteDomain& d) { return -g(l, d); }};
}

CocycleReport check_cocycle(const RestrictionEvaluator& f, const DualLoop& loop, const DiscreteDomain& d1,
                            const DiscreteDomain& d2, const DiscreteDomain& d3, double tolerance) {
  if (!d2.is_subset_of(d3)) throw Error(ErrorCode::InvalidConfig, "middle domain is not inside the outer one");
  const NestedConfig c13 = make_nested(loop, d1, d3);
  const NestedConfig c12 = make_nested(loop, d1, d2);
  const NestedConfig c23 = make_nested(loop, d2, d3);
  CocycleReport r;
  r.evaluator = f.name;
  r.f13 = f(c13);
  r.f12 = f(c12);
  r.f23 = f(c23);
  r.defect = r.f13 - r.f12 - r.f23;
  r.tolerance = tolerance;
  r.pass = std::abs(r.defect) <= tolerance;
  return r;
}

RestrictionEvaluator gauge_transform(const RestrictionEvaluator& f, const GaugeFunction& g) {
  return {f.name + "+d(" + g.name + ")", [f, g](const NestedConfig& cfg) {
            return f(cfg) + g(cfg.loop, cfg.outer) - g(cfg.loop, cfg.inner);
          }};
}

std::vector<AnnularDomain> loop_annuli(const DualLoop& loop, const DiscreteDomain& sigma) {
  constexpr std::size_t kMaxAnnuli = 8;
  const std::vector<Site> core = loop.corner_vertices();
  for (Site s : core)
    if (!sigma.contains(s)) return {};

  std::vector<AnnularDomain> out;
  for (int w = 0; out.size() < kMaxAnnuli; ++w) {
    std::unordered_set<Site, SiteHash> grown;
    for (Site c : core)
      for (int dx = -w; dx <= w; ++dx)
        for (int dy = -w; dy <= w; ++dy) {
          const Site s = c + Site{dx, dy};
          if (sigma.contains(s)) grown.insert(s);
        }

    // any enclosed site left uncovered witnesses the hole
    std::optional<Site> witness;
    Site lo = core.front(), hi = core.front();
    for (Site c : core) {
      lo = {std::min(lo.x, c.x), std::min(lo.y, c.y)};
      hi = {std::max(hi.x, c.x), std::max(hi.y, c.y)};
    }
    for (int x = lo.x; x <= hi.x && !witness; ++x)
      for (int y = lo.y; y <= hi.y && !witness; ++y)
        if (!grown.count({x, y}) && loop.encloses({x, y})) witness = Site{x, y};
    if (!witness) break;

    try {
      AnnularDomain a = make_annular(validate_domain({grown.begin(), grown.end()}, sigma.mesh_exponent()), *witness);
      if (!is_essential(loop, a)) break;
      out.push_back(std::move(a));
    } catch (const Error&) {
      break;
    }
  }
  return out;
}

GaugeReconstruction reconstruct_g(const RestrictionEvaluator& f, const GaugeFunction& seed, const DualLoop& loop,
                                  const DiscreteDomain& sigma, std::span<const AnnularDomain> annuli) {
  std::vector<AnnularDomain> automatic;
  if (annuli.empty()) {
    automatic = loop_annuli(loop, sigma);
    annuli = automatic;
  }
  if (annuli.empty()) throw Error(ErrorCode::NoEssentialAnnulus, "no essential annulus around the loop");

  const auto through = [&](const AnnularDomain& a) {
    if (!is_essential(loop, a)) throw Error(ErrorCode::NoEssentialAnnulus, "loop is not essential in the annulus");
    return f(make_nested(loop, a.domain, sigma)) + seed(loop, a.domain);
  };

  GaugeReconstruction r;
  r.value = through(annuli[0]);
  r.annuli_used = 1;
  if (annuli.size() > 1) {
    r.discrepancy = through(annuli[1]) - r.value;
    r.annuli_used = 2;
  }
  return r;
}

double rho_defect(const RestrictionEvaluator& f, const GridMap& psi, const DualLoop& loop,
                  const AnnularDomain& annulus, const DiscreteDomain& omega) {
  const double base = f(make_nested(loop, annulus.domain, omega));
  if (const auto* d = std::get_if<Dilation>(&psi)) {
    return f(make_nested(refine(loop, d->levels), refine(annulus.domain, d->levels), refine(omega, d->levels))) - base;
  }
  const Symmetry& s = std::get<Symmetry>(psi);
  if (!(apply_symmetry(loop, s) == loop)) throw Error(ErrorCode::ImageNotNested, "map does not fix the loop");
  const DiscreteDomain image = apply_symmetry(annulus.domain, s);
  if (!image.is_subset_of(omega)) throw Error(ErrorCode::ImageNotNested, "image annulus leaves the ambient domain");
  return f(make_nested(loop, image, omega)) - base;
}

double loop_distance(const DualLoop& a, const DualLoop& b) {
  const auto directed = [](const DualLoop& p, const DualLoop& q) {
    double worst = 0.0;
    for (Site s : p.sites()) {
      double best = std::numeric_limits<double>::infinity();
      for (Site t : q.sites()) best = std::min(best, std::hypot(s.x - t.x, s.y - t.y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return 0.5 * std::max(directed(a, b), directed(b, a));
}

ContinuityReport continuity_probe(const std::function<double(const DualLoop&)>& g, const DualLoop& limit,
                                  std::span<const DualLoop> sequence) {
  ContinuityReport r;
  const double g0 = g(limit);
  for (const DualLoop& l : sequence) {
    const ContinuityRow row{loop_distance(l, limit), std::abs(g(l) - g0)};
    if (!r.rows.empty() && row.difference > r.rows.back().difference + 1e-12) r.shrinking = false;
    r.rows.push_back(row);
  }
  return r;
}

}  // namespace mks
