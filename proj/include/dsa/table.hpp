#ifndef DSA_TABLE_HPP
#define DSA_TABLE_HPP

#include <vector>

#include "dsa/problem.hpp"
#include "dsa/stacked.hpp"

namespace dsa {

/// Per-node store of the most recent instantaneous gradients. Entry (n, i)
/// holds grad f_{n,i}(y_{n,i}) together with the point y_{n,i} it was
/// evaluated at; the per-node running sum is maintained in O(p) per update
/// instead of re-summing the q_n entries.
class GradientTable {
 public:
  GradientTable() = default;

  /// Fills every entry with grad f_{n,i}(x0_n) (y_{n,i} = x0_n). Costs
  /// sum_n q_n instantaneous-gradient evaluations.
  void initialize(const ProblemInstance& pi, const StackedVector& x0);

  bool initialized() const { return !grads_.empty(); }
  int n_nodes() const { return static_cast<int>(grads_.size()); }
  int q(int node) const { return static_cast<int>(grads_[node].size()); }

  const Vector& stored_grad(int node, int i) const { return grads_[node][i]; }
  const Vector& stored_point(int node, int i) const {
    return points_[node][i];
  }
  const Vector& running_sum(int node) const { return sums_[node]; }

  /// Overwrites entry (node, i) with a gradient evaluated at `point`,
  /// updating the running sum incrementally.
  void replace(int node, int i, const Vector& point, const Vector& grad);

  /// Re-sums the stored gradients of `node`; drift oracle for the
  /// incremental running sum.
  Vector recompute_sum(int node) const;

 private:
  std::vector<std::vector<Vector>> grads_;
  std::vector<std::vector<Vector>> points_;
  std::vector<Vector> sums_;
};

}  // namespace dsa

#endif  // DSA_TABLE_HPP
