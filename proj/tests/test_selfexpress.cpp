#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "oracles.hpp"
#include "usm/phantom.hpp"
#include "usm/rng.hpp"
#include "usm/selfexpress.hpp"
#include "usm/subcluster.hpp"

using usm::Mat;
using usm::SolverConfig;
using usm::Vec;

namespace {

Mat random_matrix(usm::Rng& rng, int rows, int cols) {
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.normal();
  return m;
}

Mat random_zero_diag(usm::Rng& rng, int n) {
  Mat c = random_matrix(rng, n, n);
  c.diagonal().setZero();
  return c;
}

}  // namespace

TEST_CASE("objective: analytic limits") {
  usm::Rng rng(1);
  const Mat z = random_matrix(rng, 3, 4);
  SolverConfig cfg;
  cfg.lambda = 2.0;
  cfg.mu = 5.0;

  CHECK(usm::objective(z, Mat::Zero(4, 4), cfg) ==
        doctest::Approx(0.5 * cfg.mu * z.squaredNorm()).epsilon(1e-14));

  const Mat c = random_zero_diag(rng, 4);
  const double norms_only = usm::objective(Mat::Zero(3, 4), c, cfg);
  CHECK(norms_only ==
        doctest::Approx(c.cwiseAbs().sum() + cfg.lambda * usm::nuclear_norm(c))
            .epsilon(1e-12));
}

TEST_CASE("objective: matches the independent summation oracle") {
  usm::Rng rng(2);
  const Mat z = random_matrix(rng, 3, 4);
  const Mat c = random_zero_diag(rng, 4);
  SolverConfig cfg;
  cfg.lambda = 1.5;
  cfg.mu = 10.0;
  CHECK(usm::objective(z, c, cfg) ==
        doctest::Approx(oracles::objective_oracle(z, c, cfg.lambda, cfg.mu))
            .epsilon(1e-12));
}

TEST_CASE("objective: rejects mismatched dimensions") {
  usm::Rng rng(3);
  CHECK_THROWS_AS(
      usm::objective(random_matrix(rng, 3, 4), random_zero_diag(rng, 5), {}),
      usm::Error);
}

TEST_CASE("solve: two identical columns force the unique self-expression") {
  Mat z(3, 2);
  z.col(0) << 0.6, 0.8, 0.0;
  z.col(1) = z.col(0);
  SolverConfig cfg;
  cfg.mu = 1e4;
  const auto [c, report] = usm::solve_self_expressive(z, cfg);
  CHECK(std::abs(c(0, 1) - 1.0) <= 1e-3);
  CHECK(std::abs(c(1, 0) - 1.0) <= 1e-3);
  CHECK(c(0, 0) == 0.0);
  CHECK(c(1, 1) == 0.0);
}

TEST_CASE("solve: vanishing mu drives C to zero") {
  usm::Rng rng(4);
  const Mat z = random_matrix(rng, 4, 6);
  SolverConfig cfg;
  cfg.mu = 1e-8;
  const auto [c, report] = usm::solve_self_expressive(z, cfg);
  CHECK(c.cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("solve: objective matches the generalized forward-backward oracle") {
  usm::Rng rng(5);
  const Mat z_raw = random_matrix(rng, 8, 12);
  SolverConfig cfg;
  cfg.lambda = 1.0;
  cfg.mu = 10.0;
  cfg.normalize_columns = true;
  const auto [c, report] = usm::solve_self_expressive(z_raw, cfg);
  CHECK(report.converged);

  // The oracle sees the same normalized input the solver used.
  Mat z = z_raw;
  for (int i = 0; i < z.cols(); ++i) z.col(i).normalize();
  const Mat c_oracle = oracles::gfb_selfexpress_oracle(z, cfg.lambda, cfg.mu, 20000);
  const double got = usm::objective(z, c, cfg);
  const double want = usm::objective(z, c_oracle, cfg);
  CHECK(std::abs(got - want) / want <= 1e-3);
}

TEST_CASE("solve: returned diagonal is exactly zero, report is consistent") {
  usm::Rng rng(6);
  const Mat z = random_matrix(rng, 5, 9);
  const auto [c, report] = usm::solve_self_expressive(z, {});
  for (int i = 0; i < 9; ++i) CHECK(c(i, i) == 0.0);
  CHECK(report.iterations == static_cast<int>(report.res_a.size()));
  CHECK(report.iterations == static_cast<int>(report.res_b.size()));
  CHECK(report.objective == doctest::Approx(usm::objective(
                                [&] {
                                  Mat zn = z;
                                  for (int i = 0; i < zn.cols(); ++i)
                                    zn.col(i).normalize();
                                  return zn;
                                }(),
                                c, SolverConfig{})));
}

TEST_CASE("solve: residuals settle over the final stretch") {
  usm::Rng rng(7);
  const Mat z = random_matrix(rng, 6, 15);
  SolverConfig cfg;
  cfg.tol = 1e-10;  // force a long run
  cfg.max_iter = 300;
  const auto [c, report] = usm::solve_self_expressive(z, cfg);
  const size_t n = report.res_a.size();
  for (size_t i = n - n / 10; i < n; ++i) {
    CHECK(report.res_a[i] <= report.res_a[i - 1] + 1e-12);
    CHECK(report.res_b[i] <= report.res_b[i - 1] + 1e-12);
  }
}

TEST_CASE("solve: permutation equivariance") {
  usm::Rng rng(8);
  const int n = 10;
  const Mat z = random_matrix(rng, 6, n);
  SolverConfig cfg;
  cfg.tol = 1e-9;
  const auto [c, r1] = usm::solve_self_expressive(z, cfg);

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[static_cast<size_t>(i)] = (i + 3) % n;
  Mat zp(6, n);
  Mat p = Mat::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    zp.col(i) = z.col(perm[static_cast<size_t>(i)]);
    p(perm[static_cast<size_t>(i)], i) = 1.0;
  }
  const auto [cp, r2] = usm::solve_self_expressive(zp, cfg);
  CHECK((cp - p.transpose() * c * p).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("solve: column scaling invariance under normalization") {
  usm::Rng rng(9);
  Mat z = random_matrix(rng, 5, 8);
  const auto [c1, r1] = usm::solve_self_expressive(z, {});
  z.col(2) *= 4.0;  // power of two keeps normalization exact in IEEE-754
  z.col(5) *= 0.25;
  const auto [c2, r2] = usm::solve_self_expressive(z, {});
  CHECK((c1 - c2).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("solve: two orthogonal subspaces give block-structured C") {
  usm::SubspacePhantomConfig pc;
  pc.subspace_count = 2;
  pc.ambient_dim = 20;
  pc.sub_dims = {3, 3};
  pc.points_per_subspace = {10, 10};
  pc.noise_sigma = 0.0;
  pc.orthogonal_bases = true;
  pc.seed = 12;
  const usm::SubspacePhantom phantom = usm::gen_subspace_data(pc);
  SolverConfig cfg;
  cfg.mu = 100.0;
  cfg.lambda = 1.0;
  const auto [c, report] = usm::solve_self_expressive(phantom.points, cfg);
  // off-block mass fraction <= 0.05
  CHECK(usm::subspace_preserving_rate(c, phantom.labels) >= 0.95);
}

TEST_CASE("solve: max_iter cap reports non-convergence") {
  usm::Rng rng(10);
  const Mat z = random_matrix(rng, 6, 10);
  SolverConfig cfg;
  cfg.tol = 1e-14;
  cfg.max_iter = 3;
  const auto [c, report] = usm::solve_self_expressive(z, cfg);
  CHECK_FALSE(report.converged);
  CHECK(report.iterations == 3);
}

TEST_CASE("solve: rejects single-column input and zero columns") {
  usm::Rng rng(11);
  CHECK_THROWS_AS(usm::solve_self_expressive(random_matrix(rng, 4, 1), {}),
                  usm::Error);
  Mat z = random_matrix(rng, 4, 5);
  z.col(3).setZero();
  CHECK_THROWS_AS(usm::solve_self_expressive(z, {}), usm::Error);
}
