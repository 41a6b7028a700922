#include <doctest.h>

#include <cmath>
#include <random>

#include "mks/cocycle.hpp"
#include "mks/experiment.hpp"
#include "mks/loopsoup.hpp"

using namespace mks;

namespace {

DiscreteDomain chebyshev_ring(int lo, int hi) {
  std::vector<Site> raw;
  for (int x = -hi; x <= hi; ++x)
    for (int y = -hi; y <= hi; ++y)
      if (std::max(std::abs(x), std::abs(y)) >= lo) raw.push_back({x, y});
  return validate_domain(raw);
}

std::vector<NestedTriple> triples(std::size_t n, std::uint64_t seed, std::size_t max_sites = 400) {
  GeneratorSpec g;
  g.count = n;
  g.levels = 3;
  g.max_sites = max_sites;
  g.margin_max = max_sites <= 25 ? 1 : 3;
  g.loop_max_side = max_sites <= 25 ? 1 : 2;
  if (max_sites <= 25) {
    g.family = "blob";
    g.blob_growth = 3;
  }
  return generate_triples(g, seed);
}

}  // namespace

TEST_CASE("cocycle identity") {
  const auto ust = ust_evaluator();
  const DualLoop l = centered_square_loop(1);
  const auto a = block_domain(-2, -2, 2, 2), b = block_domain(-3, -2, 3, 4), c = block_domain(-5, -5, 5, 5);
  const auto flat = check_cocycle(ust, l, a, a, c);
  CHECK(flat.defect == 0.0);
  CHECK(flat.pass);
  CHECK(check_cocycle(ust, l, a, b, c).pass);
  CHECK_THROWS_AS(check_cocycle(ust, l, a, c, b), Error);

  for (const auto& t : triples(40, 5)) {
    const auto& d = t.domains;
    CHECK(std::abs(check_cocycle(ust, t.loop, d[0], d[1], d[2]).defect) <= 1e-8);
    CHECK(std::abs(check_cocycle(soup_evaluator(1.0), t.loop, d[0], d[1], d[2]).defect) <= 1e-8);
  }
  const auto ising = ising_evaluator(InverseTemperature::critical(), IsingEngine::Enumeration);
  for (const auto& t : triples(10, 6, 25)) {
    CHECK(t.domains[2].size() <= 25);
    const auto r = check_cocycle(ising, t.loop, t.domains[0], t.domains[1], t.domains[2], 1e-9);
    CHECK(r.pass);
  }
}

TEST_CASE("gauge transforms") {
  const auto ust = ust_evaluator();
  const auto g = make_gauge("area", [](const DualLoop& l, const DiscreteDomain& d) {
    return 0.01 * double(d.size()) + 0.1 * double(l.size());
  });
  const ReferencePair ref = reference_pair();
  CHECK(g(ref.loop, ref.domain) == 0.0);
  CHECK(loop_length_gauge()(ref.loop, ref.domain) == 0.0);

  const auto back = gauge_transform(gauge_transform(ust, g), negate(g));
  const auto zero_g = gauge_transform(ust, zero_gauge());
  const auto length_only = gauge_transform(zero_evaluator(), loop_length_gauge());
  for (const auto& t : triples(20, 9)) {
    const NestedConfig cfg = t.outer_pair();
    CHECK(back(cfg) == doctest::Approx(ust(cfg)).epsilon(1e-12));
    CHECK(zero_g(cfg) == ust(cfg));
    CHECK(length_only(cfg) == 0.0);
    const auto& d = t.domains;
    const double d0 = check_cocycle(ust, t.loop, d[0], d[1], d[2]).defect;
    const double d1 = check_cocycle(gauge_transform(ust, g), t.loop, d[0], d[1], d[2]).defect;
    CHECK(std::abs(d1 - d0) <= 1e-12);
  }
}

TEST_CASE("annuli around a loop") {
  const DualLoop l = centered_square_loop(4);
  const auto sigma = block_domain(-8, -8, 8, 8);
  const auto annuli = loop_annuli(l, sigma);
  REQUIRE(annuli.size() == 3);
  for (std::size_t k = 1; k < annuli.size(); ++k) CHECK(annuli[k - 1].domain.is_subset_of(annuli[k].domain));
  CHECK(loop_annuli(centered_square_loop(1), sigma).empty());
  CHECK_THROWS_AS(reconstruct_g(ust_evaluator(), zero_gauge(), centered_square_loop(1), sigma), Error);
}

TEST_CASE("reconstructing g") {
  const auto ust = ust_evaluator();
  const DualLoop l = centered_square_loop(3);
  const auto sigma = chebyshev_ring(1, 5);
  const AnnularDomain whole = make_annular(sigma, {0, 0});
  const auto seed = make_gauge("seed", [](const DualLoop&, const DiscreteDomain& d) { return 0.5 * double(d.size()); });

  // A = sigma: f(l, sigma, sigma) = 0 leaves the seed value
  const std::vector<AnnularDomain> only{whole};
  CHECK(reconstruct_g(ust, seed, l, sigma, only).value == seed(l, sigma));

  // two nested annuli: the discrepancy replays the cocycle identity
  const auto annuli = loop_annuli(l, sigma);
  REQUIRE(annuli.size() >= 2);
  const auto r = reconstruct_g(ust, zero_gauge(), l, sigma);
  CHECK(r.annuli_used == 2);
  const double f_between = ust(make_nested(l, annuli[0].domain, annuli[1].domain));
  CHECK(r.discrepancy == doctest::Approx(-f_between).epsilon(1e-10));

  // coboundary input: the seed built from g0 recovers g0 exactly
  const auto g0 = make_gauge("g0", [](const DualLoop& loop, const DiscreteDomain& d) {
    return std::sqrt(double(d.size())) + 0.25 * double(loop.size());
  });
  const auto f = gauge_transform(zero_evaluator(), g0);
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    const int r0 = 2 + int(rng() % 3);
    const int outer = r0 + 2 + int(rng() % 3);
    const auto s = block_domain(-outer, -outer - int(rng() % 2), outer + int(rng() % 3), outer);
    const DualLoop loop = centered_square_loop(r0);
    const auto rec = reconstruct_g(f, g0, loop, s);
    CHECK(rec.value == doctest::Approx(g0(loop, s)).epsilon(1e-12));
    CHECK(std::abs(rec.discrepancy) <= 1e-12);
  }
}

TEST_CASE("rho defect") {
  const auto ust = ust_evaluator();
  const DualLoop l = centered_square_loop(3);
  const auto omega = block_domain(-9, -9, 9, 9);
  std::vector<Site> raw;  // lopsided annulus so that symmetries move it
  for (int x = -4; x <= 6; ++x)
    for (int y = -4; y <= 4; ++y)
      if (std::max(std::abs(x), std::abs(y)) >= 1 && (x <= 4 || (y >= 0 && y <= 2))) raw.push_back({x, y});
  const AnnularDomain a = make_annular(validate_domain(raw), {0, 0});
  CHECK(rho_defect(ust, Symmetry::identity(), l, a, omega) == 0.0);
  for (int e = 1; e < 8; ++e) {
    CHECK_FALSE(apply_symmetry(a.domain, Symmetry{e, {}}) == a.domain);
    CHECK(std::abs(rho_defect(ust, Symmetry{e, {}}, l, a, omega)) <= 1e-10);
    CHECK(std::abs(rho_defect(soup_evaluator(), Symmetry{e, {}}, l, a, omega)) <= 1e-10);
  }
  CHECK_THROWS_AS(rho_defect(ust, Symmetry::translate({1, 0}), l, a, omega), Error);
  CHECK_THROWS_AS(rho_defect(ust, Symmetry::rotation(1), l, a, block_domain(-9, -9, 9, 4)), Error);
  CHECK(std::isfinite(rho_defect(soup_evaluator(), Dilation{1}, l, a, omega)));
}

TEST_CASE("loop distance and continuity probe") {
  const DualLoop big = centered_square_loop(8);
  CHECK(loop_distance(big, big) == 0.0);
  CHECK(loop_distance(centered_square_loop(2), centered_square_loop(3)) == doctest::Approx(std::sqrt(2.0)));

  // notched squares converging to the plain square
  std::vector<DualLoop> seq;
  for (int depth = 5; depth >= 1; --depth) {
    std::vector<Site> cells;
    for (int x = -7; x <= 7; ++x)
      for (int y = -7; y <= 7; ++y)
        if (!(y > 7 - depth && std::abs(x) <= 1)) cells.push_back({x, y});
    seq.push_back(boundary_loop(cells));
  }
  const auto area = [](const DualLoop& l) {
    double n = 0;
    for (int x = -10; x <= 10; ++x)
      for (int y = -10; y <= 10; ++y) n += l.encloses({x, y});
    return n;
  };
  const auto rep = continuity_probe(area, big, seq);
  REQUIRE(rep.rows.size() == 5);
  CHECK(rep.shrinking);
  for (std::size_t k = 1; k < rep.rows.size(); ++k) CHECK(rep.rows[k].distance < rep.rows[k - 1].distance);

  const std::vector<DualLoop> constant(5, big);
  const auto flat = continuity_probe(area, big, constant);
  for (const auto& row : flat.rows) CHECK(row.difference == 0.0);
}
