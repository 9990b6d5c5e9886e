#ifndef USM_NUMERICS_HPP_
#define USM_NUMERICS_HPP_

#include <Eigen/Dense>

#include "usm/errors.hpp"

namespace usm {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct SvdResult {
  Mat u;       // rows x r
  Vec s;       // r singular values, non-negative, descending
  Mat v;       // cols x r
};

struct EigResult {
  Vec values;   // ascending
  Mat vectors;  // orthonormal columns
};

// Thin SVD. Throws NonConvergence if the decomposition fails or produces
// non-finite output.
SvdResult svd(const Mat& m);

// Symmetric eigendecomposition, eigenvalues ascending. Throws NotSymmetric
// when max|M - M^T| exceeds 1e-12 * max(1, max|M|).
EigResult sym_eig(const Mat& m);

// Solve A X = B for symmetric positive definite A (Cholesky). Throws
// NotPositiveDefinite when the factorization hits a non-positive pivot.
Mat solve_spd(const Mat& a, const Mat& b);

// Entrywise prox of tau*||.||_1: sign(x) * max(|x| - tau, 0).
Mat soft_threshold(const Mat& m, double tau);

// Singular value thresholding, the prox of tau*||.||_* .
Mat svt(const Mat& m, double tau);

// Sum of singular values.
double nuclear_norm(const Mat& m);

}  // namespace usm

#endif  // USM_NUMERICS_HPP_
