#ifndef DSA_PROBLEM_HPP
#define DSA_PROBLEM_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "dsa/stacked.hpp"

namespace dsa {

/// Distributed objective: node n holds q_n instantaneous functions f_{n,i}
/// whose average is its local objective f_n. The network minimizes
/// sum_n f_n(x). `mu` and `lip` are the strong-convexity and gradient
/// Lipschitz constants shared by every instantaneous function.
class ProblemInstance {
 public:
  virtual ~ProblemInstance() = default;

  virtual int n_nodes() const = 0;
  virtual int dim() const = 0;
  virtual int q(int node) const = 0;
  virtual double eval(int node, int i, const Vector& x) const = 0;
  virtual Vector grad(int node, int i, const Vector& x) const = 0;
  virtual double mu() const = 0;
  virtual double lip() const = 0;

  /// f_n(x) = (1/q_n) sum_i f_{n,i}(x)
  double local_value(int node, const Vector& x) const;
  /// grad f_n(x), computed as sum-then-divide in index order so it matches
  /// the enumeration mean of the table estimator bit-for-bit where possible.
  Vector local_grad(int node, const Vector& x) const;

  /// sum_n f_n evaluated at a single point, and its gradient. The defaults
  /// sum the local terms; implementations may provide an algebraically equal
  /// form with a lower floating-point noise floor (the reference solver
  /// drives the gradient below 1e-12).
  virtual double centralized_value(const Vector& x) const;
  virtual Vector centralized_gradient(const Vector& x) const;

  int q_min() const;
  int q_max() const;
  std::int64_t total_samples() const;
};

/// f(x) = sum_n f_n(x_n) over a stacked iterate.
double aggregate_value(const ProblemInstance& pi, const StackedVector& x);
/// [grad f_1(x_1); ...; grad f_N(x_N)]. Costs q_n instantaneous-gradient
/// evaluations per node.
StackedVector aggregate_gradient(const ProblemInstance& pi,
                                 const StackedVector& x);

/// kappa_f = L / mu. Throws ZeroStrongConvexity when mu = 0.
double function_condition_number(const ProblemInstance& pi);

/// Synthetic two-class dataset for regularized logistic regression.
struct LogisticDataset {
  std::vector<std::vector<Vector>> features;  // [node][sample]
  std::vector<std::vector<int>> labels;       // +1 / -1
  double lambda = 0.0;

  std::string to_csv() const;  // node_id,label,feature_1..feature_p
};

struct LogisticParams {
  int n_nodes = 20;
  int total_samples = 500;
  int dim = 2;
  double lambda = 1e-4;
  double mean = 2.0;
  double std_plus = 2.0;
  double std_minus = 2.0;
  std::uint64_t seed = 1;
};

/// Instantaneous functions
///   f_{n,i}(x) = (lambda/(2N)) |x|^2 + q_n log(1 + exp(-l_{ni} s_{ni}' x)),
/// so (1/q_n) sum_i f_{n,i} recovers the node objective and the node
/// objectives sum to the global regularized log-likelihood. Half of each
/// node's samples carry label +1 with features drawn N(mean, std_plus^2) per
/// component, the other half label -1 with N(-mean, std_minus^2).
/// mu = lambda/N, L = lambda/N + q_n max_{n,i} |s_{ni}|^2 / 4.
std::pair<LogisticDataset, std::shared_ptr<ProblemInstance>> generate_logistic(
    const LogisticParams& params);

std::shared_ptr<ProblemInstance> make_logistic_problem(LogisticDataset data);

/// Exact-oracle test problem: f_{n,i}(x) = 0.5 |x - a_{n,i}|^2 with random
/// targets, mu = L = 1, and a closed-form optimum (the mean of the per-node
/// target averages).
class QuadraticProblem : public ProblemInstance {
 public:
  QuadraticProblem(int n_nodes, int q_per_node, int dim,
                   std::vector<std::vector<Vector>> targets);

  int n_nodes() const override { return n_nodes_; }
  int dim() const override { return dim_; }
  int q(int) const override { return q_per_node_; }
  double eval(int node, int i, const Vector& x) const override;
  Vector grad(int node, int i, const Vector& x) const override;
  double mu() const override { return 1.0; }
  double lip() const override { return 1.0; }

  Vector closed_form_optimum() const;
  const Vector& target(int node, int i) const { return targets_[node][i]; }

 private:
  int n_nodes_, q_per_node_, dim_;
  std::vector<std::vector<Vector>> targets_;
};

std::shared_ptr<QuadraticProblem> generate_quadratic(int n_nodes,
                                                     int q_per_node, int dim,
                                                     std::uint64_t seed);

}  // namespace dsa

#endif  // DSA_PROBLEM_HPP
