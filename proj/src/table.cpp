#include "dsa/table.hpp"

#include "dsa/errors.hpp"

namespace dsa {

void GradientTable::initialize(const ProblemInstance& pi,
                               const StackedVector& x0) {
  check_stacked_dims(x0, pi.n_nodes(), pi.dim());
  const int n_nodes = pi.n_nodes();
  grads_.assign(n_nodes, {});
  points_.assign(n_nodes, {});
  sums_.assign(n_nodes, Vector::Zero(pi.dim()));
  for (int n = 0; n < n_nodes; ++n) {
    const Vector x_n = x0.row(n).transpose();
    grads_[n].reserve(pi.q(n));
    points_[n].reserve(pi.q(n));
    for (int i = 0; i < pi.q(n); ++i) {
      grads_[n].push_back(pi.grad(n, i, x_n));
      points_[n].push_back(x_n);
      sums_[n] += grads_[n].back();
    }
  }
}

void GradientTable::replace(int node, int i, const Vector& point,
                            const Vector& grad) {
  if (!initialized()) throw TableUninitialized("gradient table not initialized");
  sums_[node] += grad - grads_[node][i];
  grads_[node][i] = grad;
  points_[node][i] = point;
}

Vector GradientTable::recompute_sum(int node) const {
  Vector sum = Vector::Zero(grads_[node][0].size());
  for (const auto& g : grads_[node]) sum += g;
  return sum;
}

}  // namespace dsa
