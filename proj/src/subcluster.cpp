#include "usm/subcluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "usm/rng.hpp"

namespace usm {

Mat build_affinity(const Mat& c) {
  if (c.rows() != c.cols())
    fail(ErrorCode::DimensionMismatch, "build_affinity: C must be square");
  return c.cwiseAbs() + c.transpose().cwiseAbs();
}

namespace {

struct KMeansResult {
  std::vector<int> assignment;
  double inertia = std::numeric_limits<double>::infinity();
};

// Lloyd iterations from a k-means++ start. Rows of `points` are samples.
KMeansResult kmeans_once(const Mat& points, int k, Rng& rng) {
  const int n = static_cast<int>(points.rows());
  Mat centroids(k, points.cols());

  // k-means++ seeding
  std::vector<double> dist2(static_cast<size_t>(n),
                            std::numeric_limits<double>::infinity());
  int first = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
  centroids.row(0) = points.row(first);
  for (int j = 1; j < k; ++j) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = (points.row(i) - centroids.row(j - 1)).squaredNorm();
      dist2[static_cast<size_t>(i)] = std::min(dist2[static_cast<size_t>(i)], d);
      total += dist2[static_cast<size_t>(i)];
    }
    int pick = n - 1;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += dist2[static_cast<size_t>(i)];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    }
    centroids.row(j) = points.row(pick);
  }

  KMeansResult result;
  result.assignment.assign(static_cast<size_t>(n), 0);
  for (int round = 0; round < 100; ++round) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int j = 0; j < k; ++j) {
        const double d = (points.row(i) - centroids.row(j)).squaredNorm();
        if (d < best_d) {  // ties keep the lowest-index centroid
          best_d = d;
          best = j;
        }
      }
      if (result.assignment[static_cast<size_t>(i)] != best) {
        result.assignment[static_cast<size_t>(i)] = best;
        changed = true;
      }
    }
    centroids.setZero();
    std::vector<int> counts(static_cast<size_t>(k), 0);
    for (int i = 0; i < n; ++i) {
      centroids.row(result.assignment[static_cast<size_t>(i)]) += points.row(i);
      ++counts[static_cast<size_t>(result.assignment[static_cast<size_t>(i)])];
    }
    for (int j = 0; j < k; ++j) {
      if (counts[static_cast<size_t>(j)] > 0) {
        centroids.row(j) /= counts[static_cast<size_t>(j)];
      } else {
        // Re-seed an empty cluster at the point farthest from its centroid.
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d =
              (points.row(i) -
               centroids.row(result.assignment[static_cast<size_t>(i)]))
                  .squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centroids.row(j) = points.row(far);
      }
    }
    if (!changed && round > 0) break;
  }

  result.inertia = 0.0;
  for (int i = 0; i < n; ++i)
    result.inertia +=
        (points.row(i) - centroids.row(result.assignment[static_cast<size_t>(i)]))
            .squaredNorm();
  return result;
}

}  // namespace

std::vector<int> spectral_cluster(const Mat& w, int k, std::uint64_t seed) {
  const Eigen::Index n = w.rows();
  if (w.cols() != n) fail(ErrorCode::DimensionMismatch, "spectral_cluster: W not square");
  if (k < 1 || k > n) fail(ErrorCode::DimensionMismatch, "spectral_cluster: bad k");
  if (w.cwiseAbs().maxCoeff() == 0.0)
    fail(ErrorCode::DegenerateAffinity, "spectral_cluster: affinity entirely zero");
  if (k == 1) return std::vector<int>(static_cast<size_t>(n), 0);

  Vec degree = w.rowwise().sum();
  Vec dinv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i)
    dinv_sqrt(i) = degree(i) > 0.0 ? 1.0 / std::sqrt(degree(i)) : 1.0;
  Mat lap = Mat::Identity(n, n) -
            (dinv_sqrt.asDiagonal() * w * dinv_sqrt.asDiagonal());

  const EigResult eig = sym_eig(lap);
  Mat embedding = eig.vectors.leftCols(k);  // k smallest eigenvalues
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0) embedding.row(i) /= norm;
  }

  Rng rng(seed);
  KMeansResult best;
  for (int restart = 0; restart < 10; ++restart) {
    KMeansResult r = kmeans_once(embedding, k, rng);
    if (r.inertia < best.inertia) best = std::move(r);
  }
  return best.assignment;
}

namespace {

// Hungarian algorithm (potentials form) on a square cost matrix; returns the
// column matched to each row.
std::vector<int> hungarian(const Mat& cost) {
  const int n = static_cast<int>(cost.rows());
  std::vector<double> u(static_cast<size_t>(n + 1), 0.0), v(static_cast<size_t>(n + 1), 0.0);
  std::vector<int> match(static_cast<size_t>(n + 1), 0), way(static_cast<size_t>(n + 1), 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<size_t>(n + 1),
                             std::numeric_limits<double>::infinity());
    std::vector<char> used(static_cast<size_t>(n + 1), 0);
    do {
      used[static_cast<size_t>(j0)] = 1;
      const int i0 = match[static_cast<size_t>(j0)];
      double delta = std::numeric_limits<double>::infinity();
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[static_cast<size_t>(i0)] -
                           v[static_cast<size_t>(j)];
        if (cur < minv[static_cast<size_t>(j)]) {
          minv[static_cast<size_t>(j)] = cur;
          way[static_cast<size_t>(j)] = j0;
        }
        if (minv[static_cast<size_t>(j)] < delta) {
          delta = minv[static_cast<size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<size_t>(j)]) {
          u[static_cast<size_t>(match[static_cast<size_t>(j)])] += delta;
          v[static_cast<size_t>(j)] -= delta;
        } else {
          minv[static_cast<size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (match[static_cast<size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<size_t>(j0)];
      match[static_cast<size_t>(j0)] = match[static_cast<size_t>(j1)];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(static_cast<size_t>(n), -1);
  for (int j = 1; j <= n; ++j)
    if (match[static_cast<size_t>(j)] > 0)
      row_to_col[static_cast<size_t>(match[static_cast<size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

}  // namespace

double clustering_error(const std::vector<int>& pred,
                        const std::vector<int>& truth) {
  if (pred.size() != truth.size() || pred.empty())
    fail(ErrorCode::LengthMismatch, "clustering_error: length mismatch");
  const int n = static_cast<int>(pred.size());
  int kp = 0, kt = 0;
  for (int v : pred) kp = std::max(kp, v + 1);
  for (int v : truth) kt = std::max(kt, v + 1);
  const int k = std::max(kp, kt);

  Mat agree = Mat::Zero(k, k);
  for (int i = 0; i < n; ++i) agree(pred[static_cast<size_t>(i)], truth[static_cast<size_t>(i)]) += 1.0;

  double best_agree = 0.0;
  if (k <= 8) {
    std::vector<int> perm(static_cast<size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    do {
      double total = 0.0;
      for (int j = 0; j < k; ++j) total += agree(perm[static_cast<size_t>(j)], j);
      best_agree = std::max(best_agree, total);
    } while (std::next_permutation(perm.begin(), perm.end()));
  } else {
    const std::vector<int> m = hungarian(-agree);
    for (int i = 0; i < k; ++i)
      if (m[static_cast<size_t>(i)] >= 0) best_agree += agree(i, m[static_cast<size_t>(i)]);
  }
  return 1.0 - best_agree / static_cast<double>(n);
}

double subspace_preserving_rate(const Mat& c, const std::vector<int>& truth) {
  if (c.rows() != c.cols() ||
      static_cast<size_t>(c.rows()) != truth.size())
    fail(ErrorCode::LengthMismatch, "subspace_preserving_rate: size mismatch");
  double total = 0.0, same = 0.0;
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      const double m = std::abs(c(i, j));
      total += m;
      if (truth[static_cast<size_t>(i)] == truth[static_cast<size_t>(j)]) same += m;
    }
  if (total == 0.0)
    fail(ErrorCode::DegenerateCoefficients,
         "subspace_preserving_rate: ||C||_1 is zero");
  return same / total;
}

}  // namespace usm
