#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "mks/error.hpp"

namespace mks {

/// log |det A| through a pivoted sparse LU; accumulates logs of the pivots so
/// large matrices never under- or overflow. Works for real and complex scalars.
template <typename Scalar>
double log_abs_det_lu(const Eigen::SparseMatrix<Scalar>& a, ErrorCode on_failure = ErrorCode::SingularMatrix) {
  if (a.rows() == 0) return 0.0;
  Eigen::SparseLU<Eigen::SparseMatrix<Scalar>, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) throw Error(on_failure, "sparse LU factorisation failed");
  const double value = std::real(lu.logAbsDeterminant());
  if (!std::isfinite(value)) throw Error(on_failure, "log-determinant is not finite");
  return value;
}

/// log det A for symmetric positive definite A via sparse Cholesky.
inline double log_det_spd(const Eigen::SparseMatrix<double>& a,
                          ErrorCode on_failure = ErrorCode::NumericalSingularity) {
  if (a.rows() == 0) return 0.0;
  Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(a);
  if (llt.info() != Eigen::Success) throw Error(on_failure, "matrix is not positive definite");
  const auto& l = llt.matrixL();
  double sum = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) sum += std::log(l.nestedExpression().coeff(i, i));
  return 2.0 * sum;
}

/// Numerically stable log(exp(a) + exp(b)).
inline double log_add_exp(double a, double b) {
  if (a == -INFINITY) return b;
  if (b == -INFINITY) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

}  // namespace mks
