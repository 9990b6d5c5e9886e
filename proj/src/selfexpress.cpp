#include "usm/selfexpress.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace usm {

namespace {

void validate(const SolverConfig& cfg) {
  if (cfg.lambda < 0.0 || cfg.mu <= 0.0 || cfg.rho <= 0.0 || cfg.tol <= 0.0 ||
      cfg.max_iter < 1)
    fail(ErrorCode::DimensionMismatch, "solver: invalid config");
}

Mat normalized_columns(const Mat& z) {
  Mat out = z;
  for (Eigen::Index c = 0; c < out.cols(); ++c) {
    const double norm = out.col(c).norm();
    if (norm == 0.0)
      fail(ErrorCode::DegenerateCoefficients,
           "solver: zero column " + std::to_string(c) +
               " cannot be normalized");
    out.col(c) /= norm;
  }
  return out;
}

}  // namespace

double objective(const Mat& z, const Mat& c, const SolverConfig& cfg) {
  validate(cfg);
  if (z.cols() != c.rows() || c.rows() != c.cols())
    fail(ErrorCode::DimensionMismatch, "objective: Z/C dimension mismatch");
  const double l1 = c.cwiseAbs().sum();
  const double nuc = cfg.lambda > 0.0 ? nuclear_norm(c) : 0.0;
  const double fit = (z - z * c).squaredNorm();
  return l1 + cfg.lambda * nuc + 0.5 * cfg.mu * fit;
}

std::pair<Mat, SolveReport> solve_self_expressive(const Mat& z_in,
                                                  const SolverConfig& cfg) {
  validate(cfg);
  const Eigen::Index n = z_in.cols();
  if (n < 2) fail(ErrorCode::DimensionMismatch, "solver: need N >= 2 columns");
  const Mat z = cfg.normalize_columns ? normalized_columns(z_in) : z_in;

  const Mat gram = z.transpose() * z;
  const Mat system = cfg.mu * gram + 2.0 * cfg.rho * Mat::Identity(n, n);
  Eigen::LLT<Mat> llt(system);  // factored once; Z is fixed during a solve
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::NotPositiveDefinite, "solver: C-update system not SPD");

  Mat a = Mat::Zero(n, n);
  Mat b = Mat::Zero(n, n);
  Mat dual_a = Mat::Zero(n, n);
  Mat dual_b = Mat::Zero(n, n);

  SolveReport report;
  const double thresh = cfg.tol * std::sqrt(static_cast<double>(n));
  for (int it = 0; it < cfg.max_iter; ++it) {
    const Mat c =
        llt.solve(cfg.mu * gram + cfg.rho * (a - dual_a + b - dual_b));
    a = soft_threshold(c + dual_a, 1.0 / cfg.rho);
    a.diagonal().setZero();
    b = svt(c + dual_b, cfg.lambda / cfg.rho);
    dual_a += c - a;
    dual_b += c - b;
    const double res_a = (c - a).norm();
    const double res_b = (c - b).norm();
    report.res_a.push_back(res_a);
    report.res_b.push_back(res_b);
    if (cfg.track_objectives) report.objectives.push_back(objective(z, a, cfg));
    ++report.iterations;
    if (res_a <= thresh && res_b <= thresh) {
      report.converged = true;
      break;
    }
  }
  report.objective = objective(z, a, cfg);
  return {std::move(a), std::move(report)};
}

}  // namespace usm
