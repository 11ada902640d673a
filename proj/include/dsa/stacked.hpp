#ifndef DSA_STACKED_HPP
#define DSA_STACKED_HPP

#include <Eigen/Dense>

#include "dsa/errors.hpp"

namespace dsa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Stacked per-node iterate x = [x_1; ...; x_N], stored as an N x p matrix
/// whose row n is node n's local variable. Applying an N x N mixing matrix A
/// blockwise, i.e. (A kron I_p) x, is then the plain product A * x, so the
/// Kronecker-extended matrices never need to be materialized.
using StackedVector = Matrix;

inline void check_stacked_dims(const StackedVector& x, int n_nodes, int dim) {
  if (x.rows() != n_nodes || x.cols() != dim)
    throw DimensionMismatch("stacked vector is " + std::to_string(x.rows()) +
                            "x" + std::to_string(x.cols()) + ", expected " +
                            std::to_string(n_nodes) + "x" +
                            std::to_string(dim));
}

/// x^T (A kron I_p) x for a stacked vector x and symmetric N x N weight A.
inline double weighted_norm_sq(const StackedVector& x, const Matrix& a) {
  if (a.rows() != x.rows() || a.cols() != x.rows())
    throw DimensionMismatch("weight matrix does not match stacked vector");
  return x.cwiseProduct(a * x).sum();
}

inline double norm_sq(const StackedVector& x) { return x.squaredNorm(); }

/// Stacks N copies of a single p-vector.
inline StackedVector replicate(const Vector& v, int n_nodes) {
  StackedVector out(n_nodes, v.size());
  for (int n = 0; n < n_nodes; ++n) out.row(n) = v.transpose();
  return out;
}

}  // namespace dsa

#endif  // DSA_STACKED_HPP
