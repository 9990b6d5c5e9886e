#ifndef USM_SUBCLUSTER_HPP_
#define USM_SUBCLUSTER_HPP_

#include <cstdint>
#include <vector>

#include "usm/numerics.hpp"

namespace usm {

// W = |C| + |C^T|, symmetric non-negative with zero diagonal.
Mat build_affinity(const Mat& c);

// Normalized-Laplacian spectral clustering with seeded k-means++ (10 restarts).
std::vector<int> spectral_cluster(const Mat& w, int k, std::uint64_t seed);

// Minimum mismatch fraction over cluster label permutations (Hungarian
// matching above 8 clusters).
double clustering_error(const std::vector<int>& pred,
                        const std::vector<int>& truth);

// Fraction of |C| mass connecting same-label pairs.
double subspace_preserving_rate(const Mat& c, const std::vector<int>& truth);

}  // namespace usm

#endif  // USM_SUBCLUSTER_HPP_
