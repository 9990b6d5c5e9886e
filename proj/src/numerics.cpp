#include "usm/numerics.hpp"

#include <cmath>
#include <string>

namespace usm {

namespace {

bool all_finite(const Mat& m) { return m.allFinite(); }

}  // namespace

namespace {

SvdResult jacobi_svd(const Mat& m) {
  Eigen::JacobiSVD<Mat> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {dec.matrixU(), dec.singularValues(), dec.matrixV()};
}

bool finite_result(const SvdResult& r) {
  return r.u.allFinite() && r.s.allFinite() && r.v.allFinite();
}

}  // namespace

SvdResult svd(const Mat& m) {
  if (!all_finite(m)) fail(ErrorCode::NonConvergence, "svd: non-finite input");
  // BDCSVD falls back to Jacobi internally for small matrices; use Jacobi
  // explicitly below the crossover for slightly tighter orthogonality.
  if (std::min(m.rows(), m.cols()) <= 16) {
    const SvdResult out = jacobi_svd(m);
    if (!finite_result(out))
      fail(ErrorCode::NonConvergence, "svd: non-finite factors");
    return out;
  }
  Eigen::BDCSVD<Mat> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out{dec.matrixU(), dec.singularValues(), dec.matrixV()};
  if (dec.info() != Eigen::Success || !finite_result(out)) {
    // BDCSVD can emit NaN factors on matrices with clustered singular
    // values; Jacobi is slower but does not share the failure mode.
    out = jacobi_svd(m);
    if (!finite_result(out))
      fail(ErrorCode::NonConvergence, "svd: non-finite factors");
  }
  return out;
}

EigResult sym_eig(const Mat& m) {
  if (m.rows() != m.cols())
    fail(ErrorCode::NotSymmetric, "sym_eig: matrix not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale)
    fail(ErrorCode::NotSymmetric,
         "sym_eig: asymmetry " + std::to_string(asym) + " above tolerance");
  Eigen::SelfAdjointEigenSolver<Mat> dec(0.5 * (m + m.transpose()));
  if (dec.info() != Eigen::Success)
    fail(ErrorCode::NonConvergence, "sym_eig: eigensolver did not converge");
  return {dec.eigenvalues(), dec.eigenvectors()};
}

Mat solve_spd(const Mat& a, const Mat& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows())
    fail(ErrorCode::DimensionMismatch, "solve_spd: dimension mismatch");
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success)
    fail(ErrorCode::NotPositiveDefinite,
         "solve_spd: Cholesky pivot not positive");
  return llt.solve(b);
}

Mat soft_threshold(const Mat& m, double tau) {
  return m.unaryExpr([tau](double x) {
    const double mag = std::abs(x) - tau;
    return mag > 0.0 ? (x > 0.0 ? mag : -mag) : 0.0;
  });
}

Mat svt(const Mat& m, double tau) {
  const SvdResult f = svd(m);
  Vec s = (f.s.array() - tau).max(0.0);
  return f.u * s.asDiagonal() * f.v.transpose();
}

double nuclear_norm(const Mat& m) { return svd(m).s.sum(); }

}  // namespace usm
