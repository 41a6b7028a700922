#include "mks/circle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "mks/error.hpp"

namespace mks {

struct CircleNode {
  enum class Kind { Rotation, Mobius, Trig, Compose, Inverse };
  Kind kind = Kind::Rotation;
  double alpha = 0.0;
  MobiusParams mobius;
  double a0 = 0.0;
  std::vector<std::pair<double, double>> coeffs;
  std::shared_ptr<const CircleNode> f, g;  // compose: f o g; inverse: f
};

namespace {

using Kind = CircleNode::Kind;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::pair<double, double> eval(const CircleNode& n, double x);

std::pair<double, double> mobius_principal(const MobiusParams& m, double x) {
  const std::complex<double> u = m.c * std::polar(1.0, -kTwoPi * x);
  const double value = x + m.theta / kTwoPi + std::arg(1.0 + u) / std::numbers::pi;
  const double derivative = 1.0 - 2.0 * std::real(u / (1.0 + u));
  return {value, derivative};
}

std::pair<double, double> inverse_eval(const CircleNode& f, double x) {
  const double y0 = x - (eval(f, x).first - x);
  double lo = y0, hi = y0;
  while (eval(f, lo).first > x) lo -= 1.0;
  while (eval(f, hi).first < x) hi += 1.0;
  double y = 0.5 * (lo + hi);
  double dy = 1.0;
  for (int it = 0; it < 200; ++it) {
    const auto [fy, dfy] = eval(f, y);
    dy = dfy;
    const double r = fy - x;
    if (r == 0.0) break;
    if (r > 0.0) hi = y; else lo = y;
    if (hi - lo <= 1e-15 * (1.0 + std::abs(y))) break;
    double next = y - r / dfy;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 4e-16 * (1.0 + std::abs(y))) {
      y = next;
      break;
    }
    y = next;
  }
  return {y, 1.0 / dy};
}

std::pair<double, double> eval(const CircleNode& n, double x) {
  switch (n.kind) {
    case Kind::Rotation:
      return {x + n.alpha, 1.0};
    case Kind::Mobius: {
      auto [v, d] = mobius_principal(n.mobius, x);
      return {v + static_cast<double>(n.mobius.shift), d};
    }
    case Kind::Trig: {
      double v = x + n.a0, d = 1.0;
      for (std::size_t k = 0; k < n.coeffs.size(); ++k) {
        const double w = kTwoPi * static_cast<double>(k + 1);
        const double s = std::sin(w * x), c = std::cos(w * x);
        v += n.coeffs[k].first * c + n.coeffs[k].second * s;
        d += w * (-n.coeffs[k].first * s + n.coeffs[k].second * c);
      }
      return {v, d};
    }
    case Kind::Compose: {
      const auto [gv, gd] = eval(*n.g, x);
      const auto [fv, fd] = eval(*n.f, gv);
      return {fv, fd * gd};
    }
    case Kind::Inverse:
      return inverse_eval(*n.f, x);
  }
  return {x, 1.0};
}

std::shared_ptr<CircleNode> make_node(Kind kind) {
  auto n = std::make_shared<CircleNode>();
  n->kind = kind;
  return n;
}

CircleDiffeo from_mobius(MobiusParams m) {
  auto n = make_node(Kind::Mobius);
  n->mobius = m;
  return CircleDiffeo(n);
}

std::optional<MobiusParams> as_mobius(const CircleDiffeo& f) {
  if (auto m = f.mobius_params()) return m;
  if (auto a = f.rotation_amount()) return MobiusParams{kTwoPi * *a, {}, 0};
  return std::nullopt;
}

// Fixes the integer shift so that the new lift agrees with `target` at 0.
MobiusParams with_matching_shift(MobiusParams m, double target) {
  m.shift = 0;
  m.shift = std::llround(target - mobius_principal(m, 0.0).first);
  return m;
}

}  // namespace

CircleDiffeo CircleDiffeo::identity() { return rotation(0.0); }

CircleDiffeo CircleDiffeo::rotation(double alpha) {
  auto n = make_node(Kind::Rotation);
  n->alpha = alpha;
  return CircleDiffeo(n);
}

CircleDiffeo CircleDiffeo::mobius(double theta, std::complex<double> c) {
  if (!(std::abs(c) < 1.0) || !std::isfinite(theta))
    throw Error(ErrorCode::InvalidArgument, "Mobius parameter needs |c| < 1");
  return from_mobius({theta, c, 0});
}

CircleDiffeo CircleDiffeo::trig(double a0, std::vector<std::pair<double, double>> coeffs) {
  double first = 0.0, second = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    const double w = kTwoPi * static_cast<double>(k + 1);
    const double r = std::hypot(coeffs[k].first, coeffs[k].second);
    first += w * r;
    second += w * w * r;
  }
  auto n = make_node(Kind::Trig);
  n->a0 = a0;
  n->coeffs = std::move(coeffs);
  if (!(first < 1.0)) {
    // grid minimum of F' minus the worst drop between grid points
    constexpr int kGrid = 4096;
    double lowest = INFINITY;
    for (int j = 0; j < kGrid; ++j) lowest = std::min(lowest, eval(*n, j / double(kGrid)).second);
    if (!(lowest - second * 0.5 / kGrid > 0.0))
      throw Error(ErrorCode::NotInvertible, "derivative of the lift is not certified positive");
  }
  return CircleDiffeo(n);
}

double CircleDiffeo::lift(double x) const { return eval(*node_, x).first; }

std::pair<double, double> CircleDiffeo::lift_with_derivative(double x) const { return eval(*node_, x); }

std::optional<double> CircleDiffeo::rotation_amount() const {
  if (node_->kind == Kind::Rotation) return node_->alpha;
  return std::nullopt;
}

std::optional<MobiusParams> CircleDiffeo::mobius_params() const {
  if (node_->kind == Kind::Mobius) return node_->mobius;
  return std::nullopt;
}

CircleDiffeo rotate(double alpha) { return CircleDiffeo::rotation(alpha); }

CircleDiffeo compose_lazy(const CircleDiffeo& f, const CircleDiffeo& g) {
  auto n = make_node(Kind::Compose);
  n->f = f.node();
  n->g = g.node();
  return CircleDiffeo(n);
}

CircleDiffeo compose(const CircleDiffeo& f, const CircleDiffeo& g) {
  const auto ra = f.rotation_amount(), rb = g.rotation_amount();
  if (ra && rb) return rotate(*ra + *rb);
  if ((ra || f.mobius_params()) && (rb || g.mobius_params()) ) {
    const MobiusParams m1 = *as_mobius(f), m2 = *as_mobius(g);
    // SU(1,1) matrices [[a, a c], [conj(a c), conj(a)]] with a = e^{i theta/2}
    const std::complex<double> a1 = std::polar(1.0, 0.5 * m1.theta), a2 = std::polar(1.0, 0.5 * m2.theta);
    const std::complex<double> A = a1 * a2 + a1 * m1.c * std::conj(a2 * m2.c);
    const std::complex<double> B = a1 * a2 * m2.c + a1 * m1.c * std::conj(a2);
    MobiusParams m{2.0 * std::arg(A), B / A, 0};
    return from_mobius(with_matching_shift(m, f.lift(g.lift(0.0))));
  }
  return compose_lazy(f, g);
}

CircleDiffeo invert(const CircleDiffeo& f) {
  if (auto a = f.rotation_amount()) return rotate(-*a);
  if (auto m = f.mobius_params()) {
    MobiusParams inv{-m->theta, -std::polar(1.0, m->theta) * m->c, 0};
    // want G(F(0)) = 0
    inv.shift = 0;
    inv.shift = -std::llround(mobius_principal(inv, f.lift(0.0)).first);
    return from_mobius(inv);
  }
  if (f.node()->kind == Kind::Inverse) return CircleDiffeo(f.node()->f);
  auto n = make_node(Kind::Inverse);
  n->f = f.node();
  return CircleDiffeo(n);
}

RotationResult rotation_number(const CircleDiffeo& f, double eps, RotationOptions options) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  const double wanted = std::ceil(1.0 / eps);
  if (wanted > static_cast<double>(options.max_iterations))
    throw Error(ErrorCode::IterationBudgetExceeded, "1/eps exceeds the iteration budget");
  const auto n = static_cast<std::uint64_t>(wanted);

  double y = 0.0;
  std::int64_t whole = 0;
  for (std::uint64_t k = 0; k < n; ++k) {
    y = f.lift(y);
    const double fl = std::floor(y);
    whole += static_cast<std::int64_t>(fl);
    y -= fl;
  }
  RotationResult r;
  r.iterations = n;
  r.translation = (static_cast<double>(whole) + y) / static_cast<double>(n);
  r.value = r.translation - std::floor(r.translation);
  if (r.value >= 1.0) r.value = 0.0;
  r.error_bound = 1.0 / static_cast<double>(n);
  if (options.certificate_q_max > 0) r.certificate = rational_certificate(f, options.certificate_q_max);
  return r;
}

std::optional<std::pair<std::int64_t, int>> rational_certificate(const CircleDiffeo& f, int q_max) {
  constexpr int kGrid = 1024;
  constexpr double kTol = 1e-12;
  std::vector<double> x(kGrid), y(kGrid);
  for (int j = 0; j < kGrid; ++j) x[j] = y[j] = j / double(kGrid);
  for (int q = 1; q <= q_max; ++q) {
    double lo = INFINITY, hi = -INFINITY;
    for (int j = 0; j < kGrid; ++j) {
      y[j] = f.lift(y[j]);
      lo = std::min(lo, y[j] - x[j]);
      hi = std::max(hi, y[j] - x[j]);
    }
    const auto p = static_cast<std::int64_t>(std::ceil(lo - kTol));
    if (static_cast<double>(p) <= hi + kTol) return std::make_pair(p, q);
  }
  return std::nullopt;
}

AlphaSolution solve_alpha(const CircleDiffeo& f, double theta, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "eps must be positive");
  struct Sample {
    double alpha, value, err;
  };
  std::vector<Sample> samples;
  AlphaSolution out;
  const auto phi = [&](double alpha, double err) {
    const RotationResult r = rotation_number(compose(rotate(alpha), f), err);
    ++out.evaluations;
    const Sample s{alpha, r.translation, r.error_bound};
    for (const Sample& o : samples) {
      const bool bad = (o.alpha < s.alpha && o.value - o.err > s.value + s.err) ||
                       (o.alpha > s.alpha && s.value - s.err > o.value + o.err);
      if (bad) throw Error(ErrorCode::MonotonicityViolation, "rotation number decreased as alpha increased");
    }
    samples.push_back(s);
    return s;
  };
  const auto finish = [&](double alpha, const Sample& s, double target) {
    out.alpha = alpha - std::floor(alpha);
    out.rotation = s.value - std::floor(s.value);
    out.error_bound = std::abs(s.value - target) + s.err;
    return out;
  };

  const double half = 0.5 * eps;
  const Sample s0 = phi(0.0, half);
  double target = theta - std::floor(theta);
  target += std::floor(s0.value - target);
  if (target < s0.value) target += 1.0;  // target in [s0, s0 + 1)
  if (target - s0.value + s0.err <= eps) return finish(0.0, s0, target);
  if (s0.value + 1.0 - target + s0.err <= eps) return finish(0.0, s0, target - 1.0);

  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    double err = std::clamp(hi - lo, half, 0.05);
    for (;;) {
      const Sample s = phi(mid, err);
      const double gap = s.value - target;
      if (std::abs(gap) + s.err <= eps) return finish(mid, s, target);
      if (gap > s.err) {
        hi = mid;
        break;
      }
      if (-gap > s.err) {
        lo = mid;
        break;
      }
      err = std::max(half, 0.25 * err);
    }
  }
  throw Error(ErrorCode::IterationBudgetExceeded, "bisection did not reach the requested accuracy");
}

CommutatorReport commutator_decomposition_check(const CircleDiffeo& h, double theta, double beta, double eps) {
  const CircleDiffeo h_inv = invert(h);
  const CircleDiffeo lhs = compose(rotate(-beta), compose(h_inv, compose(rotate(theta), h)));
  const CircleDiffeo commutator = compose_lazy(h_inv, compose_lazy(rotate(theta), compose_lazy(h, rotate(-theta))));
  const CircleDiffeo rhs = compose_lazy(rotate(-beta), compose_lazy(commutator, rotate(theta)));

  CommutatorReport r;
  for (int j = 0; j < r.grid_points; ++j) {
    const double x = j / double(r.grid_points);
    r.sup_defect = std::max(r.sup_defect, std::abs(lhs.lift(x) - rhs.lift(x)));
  }
  r.alpha = solve_alpha(lhs, theta, eps).alpha;
  const double d = r.alpha - beta;
  r.alpha_error = std::abs(d - std::round(d));
  return r;
}

}  // namespace mks
