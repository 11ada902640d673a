#include "dsa/weights.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "dsa/errors.hpp"

namespace dsa {

bool ValidationReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

std::string ValidationReport::failures() const {
  std::string out;
  for (const auto& c : checks) {
    if (c.pass) continue;
    if (!out.empty()) out += ", ";
    out += c.name;
  }
  return out;
}

namespace {

Vector sorted_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();  // ascending
}

// Smallest nonzero eigenvalue of a PSD matrix whose null space is expected to
// be one-dimensional. Eigenvalues within `zero_tol` of zero count as zero.
double smallest_nonzero(const Vector& evals, double zero_tol) {
  for (int i = 0; i < evals.size(); ++i)
    if (evals[i] > zero_tol) return evals[i];
  return 0.0;
}

void fill_spectral(const Matrix& w_tilde, const Matrix& diff,
                   SpectralSummary* s) {
  const Vector ev_t = sorted_eigenvalues(w_tilde);
  const Vector ev_d = sorted_eigenvalues(diff);
  s->gamma = ev_t[0];
  s->gamma_cap = ev_t[ev_t.size() - 1];
  s->gamma_cap_prime = ev_d[ev_d.size() - 1];
  const double zero_tol = 1e-10 * std::max(1.0, s->gamma_cap_prime);
  s->gamma_prime = smallest_nonzero(ev_d, zero_tol);
}

// Symmetric PSD square root. Eigenvalues within 1e-12 of zero (either sign)
// are treated as exact zeros: a null eigenvalue computed as +1e-16 would
// otherwise contribute sqrt(1e-16) = 1e-8 to U and blow up the pseudoinverse.
// Eigenvalues below -1e-12 mean the input was not PSD.
Matrix psd_sqrt(const Matrix& m, Matrix* pinv) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Vector ev = es.eigenvalues();
  const double scale = std::max(1.0, std::abs(ev[ev.size() - 1]));
  Vector root(ev.size()), root_inv(ev.size());
  for (int i = 0; i < ev.size(); ++i) {
    if (ev[i] < -1e-12 * scale)
      throw AssumptionViolation("matrix is not PSD (eigenvalue " +
                                std::to_string(ev[i]) + ")");
    const double lambda = std::abs(ev[i]) <= 1e-12 * scale ? 0.0 : ev[i];
    root[i] = std::sqrt(lambda);
    root_inv[i] = root[i] > 0.0 ? 1.0 / root[i] : 0.0;
  }
  const Matrix& v = es.eigenvectors();
  if (pinv) *pinv = v * root_inv.asDiagonal() * v.transpose();
  return v * root.asDiagonal() * v.transpose();
}

}  // namespace

WeightPair::WeightPair(Matrix w, Matrix w_tilde, double validation_tol) {
  if (w.rows() != w.cols() || w_tilde.rows() != w_tilde.cols() ||
      w.rows() != w_tilde.rows())
    throw DimensionMismatch("weight matrices must be square and equal size");
  w_ = std::move(w);
  w_tilde_ = std::move(w_tilde);
  const Matrix diff = w_tilde_ - w_;
  u_ = psd_sqrt(diff, &u_pinv_);
  fill_spectral(w_tilde_, diff, &spectral_);
  const ValidationReport report =
      validate_assumption1(w_, w_tilde_, validation_tol);
  if (!report.all_pass())
    throw AssumptionViolation("weight pair validation failed: " +
                              report.failures());
}

WeightPair build_weight_pair(const Graph& g, double tau_factor) {
  if (!(tau_factor > 0.5))
    throw InvalidParam("tau_factor must exceed 1/2");
  const Matrix l = laplacian(g);
  const Vector ev = sorted_eigenvalues(l);
  const double lambda_max = ev[ev.size() - 1];
  const double tau = tau_factor * lambda_max;
  const int n = g.n_nodes();
  Matrix w = Matrix::Identity(n, n) - l / tau;
  Matrix w_tilde = (Matrix::Identity(n, n) + w) / 2.0;
  WeightPair wp(std::move(w), std::move(w_tilde));
  wp.spectral_.lambda_max_laplacian = lambda_max;
  return wp;
}

ValidationReport validate_assumption1(const Matrix& w, const Matrix& w_tilde,
                                      double tol) {
  ValidationReport report;
  auto add = [&](const std::string& name, double residual, bool pass) {
    report.checks.push_back({name, pass, residual});
  };
  const int n = static_cast<int>(w.rows());
  const Matrix eye = Matrix::Identity(n, n);
  const Vector ones = Vector::Ones(n);

  // (a) symmetry
  const double sym_w = (w - w.transpose()).cwiseAbs().maxCoeff();
  add("w_symmetric", sym_w, sym_w <= tol);
  const double sym_wt = (w_tilde - w_tilde.transpose()).cwiseAbs().maxCoeff();
  add("wtilde_symmetric", sym_wt, sym_wt <= tol);

  // (b) null-space conditions, tested spectrally
  const Matrix i_minus_w = eye - w;
  const Matrix diff = w_tilde - w;
  const double r1 = (i_minus_w * ones).cwiseAbs().maxCoeff();
  add("ones_in_null_i_minus_w", r1, r1 <= tol);
  const double r2 = ((eye - w_tilde) * ones).cwiseAbs().maxCoeff();
  add("ones_in_null_i_minus_wtilde", r2, r2 <= tol);
  const double r3 = (diff * ones).cwiseAbs().maxCoeff();
  add("ones_in_null_wtilde_minus_w", r3, r3 <= tol);
  if (n >= 2) {
    // second-smallest magnitude eigenvalue must stay away from zero so the
    // null space is exactly one-dimensional
    Vector mags = sorted_eigenvalues(0.5 * (i_minus_w + i_minus_w.transpose()))
                      .cwiseAbs();
    std::sort(mags.data(), mags.data() + mags.size());
    add("null_i_minus_w_is_span_ones", mags[1], mags[1] > tol);
    Vector mags_d =
        sorted_eigenvalues(0.5 * (diff + diff.transpose())).cwiseAbs();
    std::sort(mags_d.data(), mags_d.data() + mags_d.size());
    add("null_wtilde_minus_w_is_span_ones", mags_d[1], mags_d[1] > tol);
  }

  // (c) spectral ordering W <= W~ <= (I+W)/2, and W~ > 0
  const double min_diff = sorted_eigenvalues(0.5 * (diff + diff.transpose()))[0];
  add("w_preceq_wtilde", min_diff, min_diff >= -tol);
  const Matrix upper = (eye + w) / 2.0 - w_tilde;
  const double min_upper =
      sorted_eigenvalues(0.5 * (upper + upper.transpose()))[0];
  add("wtilde_preceq_half_i_plus_w", min_upper, min_upper >= -tol);
  const double min_wt =
      sorted_eigenvalues(0.5 * (w_tilde + w_tilde.transpose()))[0];
  add("wtilde_positive_definite", min_wt, min_wt > tol);

  return report;
}

ValidationReport validate_assumption1(const WeightPair& wp, double tol) {
  return validate_assumption1(wp.w(), wp.w_tilde(), tol);
}

double graph_condition_number(const SpectralSummary& s) {
  return std::max(s.gamma_cap, s.gamma_cap_prime) /
         std::min(s.gamma, s.gamma_prime);
}

std::string WeightPair::to_csv(bool tilde) const {
  const Matrix& m = tilde ? w_tilde_ : w_;
  std::ostringstream os;
  char buf[32];
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      os << buf << (j + 1 < m.cols() ? "," : "");
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace dsa
