#ifndef USM_SELFEXPRESS_HPP_
#define USM_SELFEXPRESS_HPP_

#include <vector>

#include "usm/numerics.hpp"

namespace usm {

struct SolverConfig {
  double lambda = 1.0;   // nuclear-norm weight
  double mu = 10.0;      // data-fidelity penalty
  double rho = 1.0;      // ADMM penalty
  double tol = 1e-6;
  int max_iter = 500;
  bool normalize_columns = true;
  bool track_objectives = false;  // record the objective every iteration
};

struct SolveReport {
  int iterations = 0;
  std::vector<double> res_a;      // ||C - A||_F per iteration
  std::vector<double> res_b;      // ||C - B||_F per iteration
  std::vector<double> objectives; // objective at the sparse iterate, per iteration
  double objective = 0.0;         // final value
  bool converged = false;
};

// ||C||_1 + lambda*||C||_* + (mu/2)*||Z - Z C||_F^2
double objective(const Mat& z, const Mat& c, const SolverConfig& cfg);

// ADMM on the penalized self-expressive program. Splitting variables: A
// carries the sparse (zero-diagonal) term, B the low-rank term, C the
// coupling iterate. Returns A as the canonical coefficient matrix.
std::pair<Mat, SolveReport> solve_self_expressive(const Mat& z,
                                                  const SolverConfig& cfg);

}  // namespace usm

#endif  // USM_SELFEXPRESS_HPP_
