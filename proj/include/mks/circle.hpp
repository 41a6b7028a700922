#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace mks {

// Circle maps are handled through degree-one lifts with period 1:
// F(x + 1) = F(x) + 1, and the circle is R/Z. Rotation amounts are in turns,
// Mobius angles in radians.

struct MobiusParams {
  double theta = 0.0;            // radians
  std::complex<double> c{};      // |c| < 1
  std::int64_t shift = 0;        // integer added to the principal lift
};

struct CircleNode;

/// Orientation-preserving analytic circle diffeomorphism, stored as an
/// immutable expression tree. Copies share the tree.
class CircleDiffeo {
 public:
  static CircleDiffeo identity();
  static CircleDiffeo rotation(double alpha);
  /// z -> e^{i theta} (z + c) / (conj(c) z + 1). Throws InvalidArgument unless |c| < 1.
  static CircleDiffeo mobius(double theta, std::complex<double> c);
  /// F(x) = x + a0 + sum_k a_k cos(2 pi k x) + b_k sin(2 pi k x), k = 1, 2, ...
  /// Throws NotInvertible unless F' > 0 is certified.
  static CircleDiffeo trig(double a0, std::vector<std::pair<double, double>> coeffs);

  double lift(double x) const;
  /// (F(x), F'(x)).
  std::pair<double, double> lift_with_derivative(double x) const;
  double operator()(double x) const { return lift(x); }

  std::optional<double> rotation_amount() const;
  std::optional<MobiusParams> mobius_params() const;

  explicit CircleDiffeo(std::shared_ptr<const CircleNode> node) : node_(std::move(node)) {}
  const std::shared_ptr<const CircleNode>& node() const { return node_; }

 private:
  std::shared_ptr<const CircleNode> node_;
};

CircleDiffeo rotate(double alpha);
/// f o g. Rotations add and Mobius maps multiply in closed form; anything
/// else becomes a lazy composite.
CircleDiffeo compose(const CircleDiffeo& f, const CircleDiffeo& g);
/// f o g kept as an unsimplified composite.
CircleDiffeo compose_lazy(const CircleDiffeo& f, const CircleDiffeo& g);
/// Closed form for rotations and Mobius maps; otherwise evaluated pointwise by
/// safeguarded Newton iteration on the lift, accurate to about 1e-14.
CircleDiffeo invert(const CircleDiffeo& f);

struct RotationOptions {
  std::uint64_t max_iterations = 100'000'000;
  int certificate_q_max = 0;  // > 0 also runs rational_certificate
};

struct RotationResult {
  double translation = 0.0;  // lim F^n(0) / n for this lift
  double value = 0.0;        // translation mod 1, in [0, 1)
  double error_bound = 0.0;  // 1 / n
  std::uint64_t iterations = 0;
  std::optional<std::pair<std::int64_t, int>> certificate;
};

/// n = ceil(1 / eps) iterates of the lift from 0; |estimate - true| <= 1/n.
/// Throws InvalidArgument for eps <= 0 and IterationBudgetExceeded.
RotationResult rotation_number(const CircleDiffeo& f, double eps, RotationOptions options = {});

/// Smallest q <= q_max such that F^q(x) - x - p changes sign (tolerance 1e-12)
/// on a 1024-point grid for some integer p; returns (p, q) with p lift-level.
std::optional<std::pair<std::int64_t, int>> rational_certificate(const CircleDiffeo& f, int q_max);

struct AlphaSolution {
  double alpha = 0.0;         // in [0, 1)
  double rotation = 0.0;      // rotation number of R_alpha o f, mod 1
  double error_bound = 0.0;
  int evaluations = 0;
};

/// Bisection for alpha with r(R_alpha o f) = theta mod 1 within eps. Every
/// sampled pair is checked for monotonicity; a violation beyond the combined
/// error bounds throws MonotonicityViolation.
AlphaSolution solve_alpha(const CircleDiffeo& f, double theta, double eps);

struct CommutatorReport {
  double sup_defect = 0.0;     // sup over the grid of |LHS - RHS|
  double alpha = 0.0;          // solve_alpha(f_beta, theta)
  double alpha_error = 0.0;    // circular distance between alpha and beta
  int grid_points = 256;
};

/// With f_beta = R_{-beta} o h^{-1} o R_theta o h, compares f_beta (closed-form
/// composition) with the lazy chain R_{-beta} o (h^{-1} R_theta h R_theta^{-1}) o R_theta
/// on a 256-point grid, then recovers beta through solve_alpha.
CommutatorReport commutator_decomposition_check(const CircleDiffeo& h, double theta, double beta = 0.0,
                                                double eps = 1e-6);

}  // namespace mks
