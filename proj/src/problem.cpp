#include "dsa/problem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "dsa/errors.hpp"

namespace dsa {

double ProblemInstance::local_value(int node, const Vector& x) const {
  double sum = 0.0;
  for (int i = 0; i < q(node); ++i) sum += eval(node, i, x);
  return sum / q(node);
}

Vector ProblemInstance::local_grad(int node, const Vector& x) const {
  Vector sum = Vector::Zero(dim());
  for (int i = 0; i < q(node); ++i) sum += grad(node, i, x);
  return sum / q(node);
}

int ProblemInstance::q_min() const {
  int m = q(0);
  for (int n = 1; n < n_nodes(); ++n) m = std::min(m, q(n));
  return m;
}

int ProblemInstance::q_max() const {
  int m = q(0);
  for (int n = 1; n < n_nodes(); ++n) m = std::max(m, q(n));
  return m;
}

std::int64_t ProblemInstance::total_samples() const {
  std::int64_t total = 0;
  for (int n = 0; n < n_nodes(); ++n) total += q(n);
  return total;
}

double ProblemInstance::centralized_value(const Vector& x) const {
  double f = 0.0;
  for (int n = 0; n < n_nodes(); ++n) f += local_value(n, x);
  return f;
}

Vector ProblemInstance::centralized_gradient(const Vector& x) const {
  Vector g = Vector::Zero(dim());
  for (int n = 0; n < n_nodes(); ++n) g += local_grad(n, x);
  return g;
}

double aggregate_value(const ProblemInstance& pi, const StackedVector& x) {
  check_stacked_dims(x, pi.n_nodes(), pi.dim());
  double sum = 0.0;
  for (int n = 0; n < pi.n_nodes(); ++n)
    sum += pi.local_value(n, x.row(n).transpose());
  return sum;
}

StackedVector aggregate_gradient(const ProblemInstance& pi,
                                 const StackedVector& x) {
  check_stacked_dims(x, pi.n_nodes(), pi.dim());
  StackedVector g(pi.n_nodes(), pi.dim());
  for (int n = 0; n < pi.n_nodes(); ++n)
    g.row(n) = pi.local_grad(n, x.row(n).transpose()).transpose();
  return g;
}

double function_condition_number(const ProblemInstance& pi) {
  if (pi.mu() <= 0.0)
    throw ZeroStrongConvexity("strong convexity constant is zero");
  return pi.lip() / pi.mu();
}

namespace {

// log(1 + exp(z)) without overflow for large |z|.
double log1p_exp(double z) {
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z)));
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

class LogisticProblem : public ProblemInstance {
 public:
  explicit LogisticProblem(LogisticDataset data) : data_(std::move(data)) {
    n_nodes_ = static_cast<int>(data_.features.size());
    dim_ = static_cast<int>(data_.features.at(0).at(0).size());
    reg_ = data_.lambda / n_nodes_;
    double max_sq = 0.0;
    int q_top = 0;
    for (int n = 0; n < n_nodes_; ++n) {
      if (data_.features[n].empty())
        throw InvalidParam("every node needs at least one sample");
      q_top = std::max(q_top, static_cast<int>(data_.features[n].size()));
      for (const auto& s : data_.features[n])
        max_sq = std::max(max_sq, s.squaredNorm());
    }
    lip_ = reg_ + q_top * max_sq / 4.0;
  }

  int n_nodes() const override { return n_nodes_; }
  int dim() const override { return dim_; }
  int q(int node) const override {
    return static_cast<int>(data_.features[node].size());
  }

  double eval(int node, int i, const Vector& x) const override {
    const double z =
        -data_.labels[node][i] * data_.features[node][i].dot(x);
    return 0.5 * reg_ * x.squaredNorm() + q(node) * log1p_exp(z);
  }

  Vector grad(int node, int i, const Vector& x) const override {
    const int l = data_.labels[node][i];
    const Vector& s = data_.features[node][i];
    const double z = -l * s.dot(x);
    return reg_ * x + (q(node) * -l * sigmoid(z)) * s;
  }

  double mu() const override { return reg_; }
  double lip() const override { return lip_; }

  // Direct form without the q_n-scaled instantaneous terms; the smaller
  // summands push the cancellation floor at the optimum well below 1e-12.
  double centralized_value(const Vector& x) const override {
    double f = 0.5 * data_.lambda * x.squaredNorm();
    for (int n = 0; n < n_nodes_; ++n)
      for (int i = 0; i < q(n); ++i)
        f += log1p_exp(-data_.labels[n][i] * data_.features[n][i].dot(x));
    return f;
  }

  Vector centralized_gradient(const Vector& x) const override {
    Vector g = data_.lambda * x;
    for (int n = 0; n < n_nodes_; ++n)
      for (int i = 0; i < q(n); ++i) {
        const int l = data_.labels[n][i];
        const Vector& s = data_.features[n][i];
        g += (-l * sigmoid(-l * s.dot(x))) * s;
      }
    return g;
  }

 private:
  LogisticDataset data_;
  int n_nodes_, dim_;
  double reg_, lip_;
};

}  // namespace

std::shared_ptr<ProblemInstance> make_logistic_problem(LogisticDataset data) {
  return std::make_shared<LogisticProblem>(std::move(data));
}

std::pair<LogisticDataset, std::shared_ptr<ProblemInstance>> generate_logistic(
    const LogisticParams& p) {
  if (p.n_nodes < 1 || p.dim < 1) throw InvalidParam("bad dimensions");
  if (p.lambda < 0.0) throw InvalidParam("lambda must be >= 0");
  if (p.total_samples % p.n_nodes != 0)
    throw InvalidParam("total sample count must be divisible by n_nodes");
  const int q_n = p.total_samples / p.n_nodes;

  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  LogisticDataset data;
  data.lambda = p.lambda;
  data.features.resize(p.n_nodes);
  data.labels.resize(p.n_nodes);
  const int positives = (q_n + 1) / 2;
  for (int n = 0; n < p.n_nodes; ++n) {
    for (int i = 0; i < q_n; ++i) {
      const int label = i < positives ? 1 : -1;
      const double mean = label > 0 ? p.mean : -p.mean;
      const double sd = label > 0 ? p.std_plus : p.std_minus;
      Vector s(p.dim);
      for (int j = 0; j < p.dim; ++j) s[j] = mean + sd * normal(rng);
      data.features[n].push_back(std::move(s));
      data.labels[n].push_back(label);
    }
  }
  auto problem = make_logistic_problem(data);
  return {std::move(data), std::move(problem)};
}

std::string LogisticDataset::to_csv() const {
  std::ostringstream os;
  const int dim =
      features.empty() || features[0].empty() ? 0 : (int)features[0][0].size();
  os << "node_id,label";
  for (int j = 1; j <= dim; ++j) os << ",feature_" << j;
  os << "\n";
  char buf[32];
  for (std::size_t n = 0; n < features.size(); ++n) {
    for (std::size_t i = 0; i < features[n].size(); ++i) {
      os << n << "," << labels[n][i];
      for (int j = 0; j < dim; ++j) {
        std::snprintf(buf, sizeof(buf), "%.17g", features[n][i][j]);
        os << "," << buf;
      }
      os << "\n";
    }
  }
  return os.str();
}

QuadraticProblem::QuadraticProblem(int n_nodes, int q_per_node, int dim,
                                   std::vector<std::vector<Vector>> targets)
    : n_nodes_(n_nodes),
      q_per_node_(q_per_node),
      dim_(dim),
      targets_(std::move(targets)) {}

double QuadraticProblem::eval(int node, int i, const Vector& x) const {
  return 0.5 * (x - targets_[node][i]).squaredNorm();
}

Vector QuadraticProblem::grad(int node, int i, const Vector& x) const {
  return x - targets_[node][i];
}

Vector QuadraticProblem::closed_form_optimum() const {
  Vector total = Vector::Zero(dim_);
  for (int n = 0; n < n_nodes_; ++n) {
    Vector node_mean = Vector::Zero(dim_);
    for (const auto& a : targets_[n]) node_mean += a;
    total += node_mean / q_per_node_;
  }
  return total / n_nodes_;
}

std::shared_ptr<QuadraticProblem> generate_quadratic(int n_nodes,
                                                     int q_per_node, int dim,
                                                     std::uint64_t seed) {
  if (n_nodes < 1 || q_per_node < 1 || dim < 1)
    throw InvalidParam("quadratic problem parameters must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<Vector>> targets(n_nodes);
  for (int n = 0; n < n_nodes; ++n) {
    for (int i = 0; i < q_per_node; ++i) {
      Vector a(dim);
      for (int j = 0; j < dim; ++j) a[j] = normal(rng);
      targets[n].push_back(std::move(a));
    }
  }
  return std::make_shared<QuadraticProblem>(n_nodes, q_per_node, dim,
                                            std::move(targets));
}

}  // namespace dsa
