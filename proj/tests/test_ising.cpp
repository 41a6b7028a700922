#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "mks/ising.hpp"
#include "oracles.hpp"

using namespace mks;

namespace {

const InverseTemperature kCrit = InverseTemperature::critical();

// random polyomino grown one frontier cell at a time
DiscreteDomain random_domain(std::mt19937_64& rng, int n) {
  std::set<Site> cells{{0, 0}};
  while (int(cells.size()) < n) {
    std::vector<Site> frontier;
    for (Site s : cells)
      for (Site d : kNeighborOffsets)
        if (!cells.count(s + d)) frontier.push_back(s + d);
    cells.insert(frontier[rng() % frontier.size()]);
  }
  return validate_domain({cells.begin(), cells.end()});
}

}  // namespace

TEST_CASE("hand-checked partition functions") {
  CHECK(kBetaCritical == doctest::Approx(0.44068679350977147).epsilon(1e-15));
  const auto one = validate_domain({{0, 0}});
  const auto two = validate_domain({{0, 0}, {1, 0}});
  const auto three = validate_domain({{0, 0}, {1, 0}, {2, 0}});
  for (auto engine : {IsingEngine::Enumeration, IsingEngine::Transfer, IsingEngine::KacWard}) {
    CAPTURE(to_string(engine));
    // e^{4 beta_c} + e^{-4 beta_c} = 6
    CHECK(log_partition(one, kCrit, engine) == doctest::Approx(1.791759469228055).epsilon(1e-12));
    CHECK(log_partition(two, kCrit, engine) == doctest::Approx(3.146772582983396).epsilon(1e-12));
    CHECK(log_partition(three, kCrit, engine) == doctest::Approx(4.502310947797279).epsilon(1e-12));
  }
  const InverseTemperature b(0.3);
  CHECK(log_partition_enumeration(one, b) == doctest::Approx(std::log(std::exp(1.2) + std::exp(-1.2))));
}

TEST_CASE("engine names") {
  CHECK(parse_engine("enum") == IsingEngine::Enumeration);
  CHECK(parse_engine("transfer") == IsingEngine::Transfer);
  CHECK(parse_engine("kacward") == IsingEngine::KacWard);
  CHECK_THROWS_AS(parse_engine("mc"), Error);
  CHECK_THROWS_AS(InverseTemperature(0.0), Error);
}

TEST_CASE("engines agree with the brute-force oracle") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 40; ++t) {
    const auto d = random_domain(rng, 1 + int(rng() % 14));
    const double beta = 0.2 + 0.1 * double(rng() % 8);
    const double want = oracle::ising_log_z(d.sites(), beta);
    CAPTURE(d.size());
    CAPTURE(beta);
    CHECK(log_partition_enumeration(d, InverseTemperature(beta)) == doctest::Approx(want).epsilon(1e-12));
    CHECK(log_partition_transfer(d, InverseTemperature(beta)) == doctest::Approx(want).epsilon(1e-12));
    CHECK(log_partition_kac_ward(d, InverseTemperature(beta)) == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("domains with holes") {
  // ring around one missing site, and a ring around a 2x1 hole plus a second hole
  std::vector<Site> ring;
  for (int x = -1; x <= 1; ++x)
    for (int y = -1; y <= 1; ++y)
      if (x || y) ring.push_back({x, y});
  std::vector<Site> two_holes;
  for (int x = 0; x <= 5; ++x)
    for (int y = 0; y <= 2; ++y)
      if (!(y == 1 && (x == 1 || x == 2 || x == 4))) two_holes.push_back({x, y});
  for (const auto& raw : {ring, two_holes}) {
    const auto d = validate_domain(raw);
    const double want = oracle::ising_log_z(d.sites(), kBetaCritical);
    CHECK(log_partition_transfer(d, kCrit) == doctest::Approx(want).epsilon(1e-12));
    CHECK(log_partition_kac_ward(d, kCrit) == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("limits and failures") {
  CHECK_THROWS_AS(log_partition_enumeration(block_domain(0, 0, 4, 5), kCrit), Error);
  try {
    log_partition_transfer(block_domain(0, 0, 16, 16), kCrit);
    FAIL("expected StripTooWide");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::StripTooWide);
  }
  // a 30x16 strip is fine for transfer and both finite
  const auto strip = block_domain(0, 0, 29, 15);
  const double tr = log_partition_transfer(strip, kCrit);
  const double kw = log_partition_kac_ward(strip, kCrit);
  CHECK(std::isfinite(tr));
  CHECK(kw == doctest::Approx(tr).epsilon(1e-10));
  CHECK(std::isfinite(log_partition_kac_ward(block_domain(0, 0, 29, 29), kCrit)));
  // frozen regime: log Z -> beta |E|
  const auto block = block_domain(0, 0, 3, 3);
  const InverseTemperature cold(20.0);
  CHECK(log_partition_kac_ward(block, cold) ==
        doctest::Approx(20.0 * double(interacting_edge_count(block))).epsilon(1e-14));
  CHECK(interacting_edge_count(block) == 40);
}

TEST_CASE("restriction function") {
  const auto cfg5 = make_nested(centered_square_loop(1), block_domain(-1, -1, 1, 1), block_domain(-2, -2, 2, 2));
  // four-term ratio from the oracle
  const auto f = [](const NestedConfig& c, double beta) {
    return oracle::ising_log_z(oracle::minus_loop(c.inner.sites(), c.loop), beta) -
           oracle::ising_log_z(c.inner.sites(), beta) -
           oracle::ising_log_z(oracle::minus_loop(c.outer.sites(), c.loop), beta) +
           oracle::ising_log_z(c.outer.sites(), beta);
  };
  const double want = f(cfg5, kBetaCritical);
  for (auto engine : {IsingEngine::Enumeration, IsingEngine::Transfer, IsingEngine::KacWard})
    CHECK(ising_restriction(cfg5, kCrit, engine) == doctest::Approx(want).epsilon(1e-10));

  // 7x7 outer is past enumeration: transfer against Kac-Ward
  const auto cfg7 = make_nested(centered_square_loop(1), block_domain(-2, -2, 2, 2), block_domain(-3, -3, 3, 3));
  CHECK(ising_restriction(cfg7, kCrit, IsingEngine::KacWard) ==
        doctest::Approx(ising_restriction(cfg7, kCrit, IsingEngine::Transfer)).epsilon(1e-10));

  const auto same = make_nested(centered_square_loop(1), block_domain(-2, -2, 2, 2), block_domain(-2, -2, 2, 2));
  CHECK(ising_restriction(same, kCrit) == 0.0);

  const auto big = make_nested(centered_square_loop(2), block_domain(-4, -4, 4, 4), block_domain(-6, -5, 6, 7));
  const double base = ising_restriction(big, kCrit, IsingEngine::Transfer);
  CHECK(ising_restriction(big, kCrit, IsingEngine::KacWard) == doctest::Approx(base).epsilon(1e-9));
  for (int e = 0; e < 8; ++e) {
    const auto moved = apply_symmetry(big, Symmetry{e, {3, -2}});
    CHECK(ising_restriction(moved, kCrit, IsingEngine::Transfer) == doctest::Approx(base).epsilon(1e-11));
  }
}

TEST_CASE("run-length encoding") {
  auto d = std::make_shared<const DiscreteDomain>(block_domain(0, 0, 2, 1));
  SpinConfig s{d, {1, 1, 1, -1, -1, 1}};
  CHECK(encode_rle(s) == "3+2-1+");
  CHECK(decode_rle(d, "3+2-1+").spins == s.spins);
  CHECK_THROWS_AS(decode_rle(d, "3+2-"), Error);
  CHECK(s.spin_at({5, 5}) == 1);
  CHECK(s.magnetization() == doctest::Approx(2.0 / 6.0));
}

TEST_CASE("Wolff sampler") {
  SUBCASE("single site marginal") {
    const auto one = validate_domain({{0, 0}});
    const auto samples = sample_ising(one, kCrit, 100000, 5, {100, 1});
    double plus = 0;
    for (const auto& s : samples) plus += s.spins[0] > 0;
    const double p = (3.0 + 2.0 * std::sqrt(2.0)) / 6.0;
    const double sigma = std::sqrt(p * (1 - p) / double(samples.size()));
    CHECK(std::abs(plus / double(samples.size()) - p) < 3 * sigma);
  }
  SUBCASE("frozen at low temperature") {
    const auto samples = sample_ising(block_domain(0, 0, 3, 3), InverseTemperature(3.0), 200, 9);
    double m = 0;
    for (const auto& s : samples) m += s.magnetization();
    CHECK(m / 200.0 > 0.99);
  }
  SUBCASE("seeded streams repeat") {
    const auto d = block_domain(0, 0, 5, 5);
    const auto a = sample_ising(d, kCrit, 20, 77), b = sample_ising(d, kCrit, 20, 77);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].spins == b[k].spins);
  }
  SUBCASE("energy histogram matches exact probabilities") {
    // 3x3 block: compare mean energy with the enumeration average
    const auto d = block_domain(0, 0, 2, 2);
    const auto samples = sample_ising(d, kCrit, 40000, 3, {500, 2});
    double mean = 0.0;
    for (const auto& s : samples) mean += s.negative_energy();
    mean /= double(samples.size());
    // d log Z / d beta by central difference on the exact value
    const double h = 1e-5;
    const double exact = (oracle::ising_log_z(d.sites(), kBetaCritical + h) -
                          oracle::ising_log_z(d.sites(), kBetaCritical - h)) / (2 * h);
    CHECK(mean == doctest::Approx(exact).epsilon(0.02));
  }
}

TEST_CASE("interfaces") {
  auto d = std::make_shared<const DiscreteDomain>(block_domain(0, 0, 3, 3));
  SpinConfig plus{d, std::vector<std::int8_t>(16, 1)};
  CHECK(extract_interfaces(plus).empty());

  SpinConfig single = plus;
  single.spins[*d->index_of({1, 2})] = -1;
  auto loops = extract_interfaces(single);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].is_simple());
  CHECK(loops[0].to_dual_loop() == boundary_loop(std::vector<Site>{{1, 2}}));

  // diagonal pair meeting at a corner: split south-west / north-east
  SpinConfig diag = plus;
  diag.spins[*d->index_of({1, 1})] = -1;
  diag.spins[*d->index_of({2, 2})] = -1;
  loops = extract_interfaces(diag);
  CHECK(loops.size() == 2);
  for (const auto& l : loops) CHECK(l.sites.size() == 4);

  // anti-diagonal pair: the same rule joins them into one loop through the corner twice
  SpinConfig anti = plus;
  anti.spins[*d->index_of({2, 1})] = -1;
  anti.spins[*d->index_of({1, 2})] = -1;
  loops = extract_interfaces(anti);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].sites.size() == 8);
  CHECK_FALSE(loops[0].is_simple());
  CHECK_THROWS_AS(loops[0].to_dual_loop(), Error);

  // minus spins on the domain edge produce loops through the boundary
  SpinConfig edge = plus;
  edge.spins[*d->index_of({0, 0})] = -1;
  loops = extract_interfaces(edge);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].to_dual_loop() == boundary_loop(std::vector<Site>{{0, 0}}));

  // every disagreement edge is used exactly once, on sampled states
  const auto samples = sample_ising(*d, kCrit, 50, 13);
  for (const auto& s : samples) {
    std::multiset<Site> used;
    for (const auto& l : extract_interfaces(s))
      for (std::size_t k = 0; k < l.sites.size(); ++k) {
        const Site a = l.sites[k], b = l.sites[(k + 1) % l.sites.size()];
        used.insert({(a.x + b.x) / 2, (a.y + b.y) / 2});
      }
    std::multiset<Site> want;
    for (Site v : d->sites())
      for (Site off : kNeighborOffsets) {
        const Site w = v + off;
        if (s.spin_at(v) != s.spin_at(w) && (v < w || !d->contains(w))) want.insert(edge_midpoint(v, w));
      }
    CHECK(used == want);
  }
}
