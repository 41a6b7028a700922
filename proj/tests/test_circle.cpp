#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mks/circle.hpp"
#include "mks/io.hpp"

using namespace mks;

namespace {

constexpr double kPi = std::numbers::pi;
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

double sup_gap(const CircleDiffeo& f, const CircleDiffeo& g, int n = 100) {
  double worst = 0.0;
  for (int j = 0; j < n; ++j) worst = std::max(worst, std::abs(f.lift(j / double(n)) - g.lift(j / double(n))));
  return worst;
}

// the circle map itself, straight from the formula on the unit circle
std::complex<double> mobius_z(double theta, std::complex<double> c, std::complex<double> z) {
  return std::polar(1.0, theta) * (z + c) / (std::conj(c) * z + 1.0);
}

}  // namespace

TEST_CASE("lifts") {
  const auto m = CircleDiffeo::mobius(0.7, {0.3, -0.2});
  for (int j = 0; j < 50; ++j) {
    const double x = j / 50.0 - 0.3;
    CHECK(m.lift(x + 1) == doctest::Approx(m.lift(x) + 1).epsilon(1e-14));
    const auto w = mobius_z(0.7, {0.3, -0.2}, std::polar(1.0, 2 * kPi * x));
    CHECK(std::abs(std::polar(1.0, 2 * kPi * m.lift(x)) - w) < 1e-12);
    const double h = 1e-6;
    CHECK(m.lift_with_derivative(x).second == doctest::Approx((m.lift(x + h) - m.lift(x - h)) / (2 * h)).epsilon(1e-7));
  }
  CHECK_THROWS_AS(CircleDiffeo::mobius(0.0, {1.0, 0.0}), Error);
  try {
    CircleDiffeo::trig(0.0, {{0.0, 0.2}});
    FAIL("expected NotInvertible");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInvertible);
  }
  // fails the coefficient bound but passes the grid certificate
  CHECK_NOTHROW(CircleDiffeo::trig(0.0, {{0.0, 0.15}, {0.0, 0.0}, {0.005, 0.0}}));
}

TEST_CASE("group laws") {
  CHECK(compose(rotate(0.2), rotate(0.45)).rotation_amount() == doctest::Approx(0.65));
  const std::vector<CircleDiffeo> maps{
      CircleDiffeo::mobius(1.1, {0.4, 0.3}), CircleDiffeo::trig(0.1, {{0.05, 0.02}, {0.01, -0.01}}),
      compose(CircleDiffeo::trig(0.0, {{0.0, 0.1}}), CircleDiffeo::mobius(-0.3, {0.0, 0.5}))};
  for (const auto& f : maps) {
    CHECK(sup_gap(compose(f, invert(f)), CircleDiffeo::identity()) < 1e-10);
    CHECK(sup_gap(compose(invert(f), f), CircleDiffeo::identity()) < 1e-10);
    CHECK(sup_gap(invert(invert(f)), f) < 1e-12);
  }
}

TEST_CASE("Mobius maps compose in closed form") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const double t1 = 4 * u(rng), t2 = 4 * u(rng);
    const std::complex<double> c1(0.6 * u(rng), 0.6 * u(rng)), c2(0.6 * u(rng), 0.6 * u(rng));
    const auto f = CircleDiffeo::mobius(t1, c1), g = CircleDiffeo::mobius(t2, c2);
    const auto fg = compose(f, g);
    REQUIRE(fg.mobius_params());
    const MobiusParams p = *fg.mobius_params();
    CHECK(std::abs(p.c) < 1.0);
    CHECK(sup_gap(fg, compose_lazy(f, g)) < 1e-12);
    for (int j = 0; j < 20; ++j) {
      const auto z = std::polar(1.0, 2 * kPi * j / 20.0);
      CHECK(std::abs(mobius_z(p.theta, p.c, z) - mobius_z(t1, c1, mobius_z(t2, c2, z))) < 1e-12);
    }
    const auto inv = invert(f);
    REQUIRE(inv.mobius_params());
    CHECK(inv.mobius_params()->theta == -t1);
    CHECK(std::abs(inv.mobius_params()->c + std::polar(1.0, t1) * c1) < 1e-15);
  }
}

TEST_CASE("rotation numbers") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    const double a = u(rng);
    const auto r = rotation_number(rotate(a), 1e-6);
    CHECK(std::abs(r.value - a) <= r.error_bound);
  }
  CHECK(rotation_number(CircleDiffeo::identity(), 1e-3).value == 0.0);
  const auto h = CircleDiffeo::trig(0.0, {{0.04, 0.03}});
  const auto conj = compose(invert(h), compose(rotate(kGolden), h));
  const auto r = rotation_number(conj, 1e-4);
  CHECK(std::abs(r.value - kGolden) <= r.error_bound);
  CHECK_THROWS_AS(rotation_number(rotate(0.1), 0.0), Error);
  try {
    rotation_number(rotate(0.1), 1e-9, {1000, 0});
    FAIL("expected IterationBudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IterationBudgetExceeded);
  }
}

TEST_CASE("rational certificates") {
  auto third = rational_certificate(rotate(1.0 / 3.0), 10);
  REQUIRE(third);
  CHECK(*third == std::pair<std::int64_t, int>{1, 3});
  CHECK_FALSE(rational_certificate(rotate(kGolden), 50));
  // R_{1/2} o (x + a sin 2 pi 2x) locks at 1/2
  const auto locked = compose(rotate(0.5), CircleDiffeo::trig(0.0, {{0.0, 0.0}, {0.0, 0.03}}));
  const auto cert = rational_certificate(locked, 10);
  REQUIRE(cert);
  CHECK(*cert == std::pair<std::int64_t, int>{1, 2});
  const auto r = rotation_number(locked, 1e-5, {100'000'000, 10});
  CHECK(std::abs(r.value - 0.5) <= r.error_bound);
  CHECK(r.certificate == cert);
  // a small phase shift stays inside the window
  const auto shifted = compose(rotate(0.505), CircleDiffeo::trig(0.0, {{0.0, 0.0}, {0.0, 0.03}}));
  CHECK(rational_certificate(shifted, 10) == cert);
}

TEST_CASE("solve_alpha") {
  const auto a = solve_alpha(CircleDiffeo::identity(), 0.25, 1e-6);
  CHECK(std::abs(a.alpha - 0.25) <= 1e-6);
  const auto b = solve_alpha(rotate(0.1), 0.35, 1e-6);
  CHECK(std::abs(b.alpha - 0.25) <= 1e-6);
  const auto c = solve_alpha(rotate(0.6), 0.1, 1e-6);
  CHECK(std::abs(c.alpha - 0.5) <= 1e-6);
  const auto f = CircleDiffeo::mobius(0.4, {0.2, 0.1});
  const auto s = solve_alpha(f, kGolden, 1e-6);
  const auto back = rotation_number(compose(rotate(s.alpha), f), 1e-6);
  CHECK(std::abs(back.value - kGolden) <= 2e-6);
}

TEST_CASE("commutator decomposition") {
  const auto trivial = commutator_decomposition_check(CircleDiffeo::identity(), 0.3, 0.0);
  CHECK(trivial.sup_defect <= 1e-12);
  CHECK(trivial.alpha_error <= 1e-6);
  const auto mob = commutator_decomposition_check(CircleDiffeo::mobius(0.0, {0.3, 0.0}), 0.5, 0.2);
  CHECK(mob.sup_defect <= 1e-9);
  CHECK(mob.alpha_error <= 1e-6);
  const auto trig = commutator_decomposition_check(CircleDiffeo::trig(0.0, {{0.05, 0.0}}), std::sqrt(2.0) - 1.0,
                                                   0.1, 1e-5);
  CHECK(trig.sup_defect <= 1e-8);
  CHECK(trig.alpha_error <= 1e-5);
}

TEST_CASE("map specs") {
  CHECK(io::parse_map("rotation:0.25").rotation_amount() == 0.25);
  const auto m = io::parse_map("mobius:0.0,0.3");
  REQUIRE(m.mobius_params());
  CHECK(m.mobius_params()->c == std::complex<double>(0.3, 0.0));
  const auto t = io::parse_map("trig:0.1,0.02,0.01");
  CHECK(t.lift(0.0) == doctest::Approx(0.12));
  const auto j = io::diffeo_from_json(nlohmann::json::parse(
      R"({"kind": "compose", "maps": [{"kind": "rotation", "alpha": 0.5}, {"kind": "inverse", "map": {"kind": "mobius", "theta": 0.2, "c": [0.1, 0.2]}}]})"));
  CHECK(sup_gap(j, compose(rotate(0.5), invert(CircleDiffeo::mobius(0.2, {0.1, 0.2})))) < 1e-14);
  CHECK_THROWS_AS(io::parse_map("spiral:1"), Error);
  CHECK_THROWS_AS(io::diffeo_from_json(nlohmann::json::parse(R"({"kind": "mobius"})")), Error);
}
