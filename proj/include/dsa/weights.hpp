#ifndef DSA_WEIGHTS_HPP
#define DSA_WEIGHTS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "dsa/graph.hpp"
#include "dsa/stacked.hpp"

namespace dsa {

/// Eigenvalue bounds consumed by the convergence theory:
///   gamma / gamma_cap       smallest / largest eigenvalue of W~
///   gamma_prime             smallest nonzero eigenvalue of W~ - W
///   gamma_cap_prime         largest eigenvalue of W~ - W
/// The Kronecker extensions W (x) I_p share these spectra (each eigenvalue
/// with multiplicity p), so the same bounds cover the stacked operators.
struct SpectralSummary {
  double gamma = 0.0;
  double gamma_cap = 0.0;
  double gamma_prime = 0.0;
  double gamma_cap_prime = 0.0;
  double lambda_max_laplacian = 0.0;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  double residual = 0.0;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
  /// Names of failed checks, comma separated (empty when all pass).
  std::string failures() const;
};

/// The mixing pair (W, W~) together with the PSD square root
/// U = (W~ - W)^{1/2} and its Moore-Penrose pseudoinverse. Immutable after
/// construction and safe to share across concurrent runs.
class WeightPair {
 public:
  /// Direct constructor for externally supplied matrices. Computes U and the
  /// spectral summary and runs the admissibility validation; throws
  /// AssumptionViolation when it fails.
  WeightPair(Matrix w, Matrix w_tilde, double validation_tol = 1e-9);

  int n_nodes() const { return static_cast<int>(w_.rows()); }
  const Matrix& w() const { return w_; }
  const Matrix& w_tilde() const { return w_tilde_; }
  const Matrix& u() const { return u_; }
  const Matrix& u_pinv() const { return u_pinv_; }
  const SpectralSummary& spectral() const { return spectral_; }

  /// Writes W (or W~) as CSV for debugging.
  std::string to_csv(bool tilde = false) const;

 private:
  friend WeightPair build_weight_pair(const Graph& g, double tau_factor);

  Matrix w_, w_tilde_, u_, u_pinv_;
  SpectralSummary spectral_;
};

/// Laplacian-based construction: tau = tau_factor * lambda_max(L),
/// W = I - L/tau, W~ = (I + W)/2. Requires tau_factor > 1/2 so that W~ stays
/// positive definite. The default tau_factor is 2/3.
WeightPair build_weight_pair(const Graph& g, double tau_factor = 2.0 / 3.0);

/// Checks the admissibility conditions on a mixing pair:
///  (a) W and W~ symmetric;
///  (b) (I-W)1 = 0, (I-W~)1 = 0, (W~-W)1 = 0, and the second-smallest
///      eigenvalue magnitudes of I-W and W~-W exceed tol (spectral
///      restatement of "null space equals span(1)");
///  (c) W <= W~ <= (I+W)/2 in the PSD order, and W~ positive definite.
/// Returns structured results; never throws.
ValidationReport validate_assumption1(const Matrix& w, const Matrix& w_tilde,
                                      double tol);
ValidationReport validate_assumption1(const WeightPair& wp, double tol);

/// kappa_g = max{Gamma, Gamma'} / min{gamma, gamma'}.
double graph_condition_number(const SpectralSummary& s);

}  // namespace dsa

#endif  // DSA_WEIGHTS_HPP
