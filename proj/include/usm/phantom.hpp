#ifndef USM_PHANTOM_HPP_
#define USM_PHANTOM_HPP_

#include <cstdint>
#include <vector>

#include "usm/patchgrid.hpp"

namespace usm {

struct SubspacePhantomConfig {
  int subspace_count = 2;
  int ambient_dim = 30;
  std::vector<int> sub_dims = {3, 3};          // one entry per subspace
  std::vector<int> points_per_subspace = {25, 25};
  double noise_sigma = 0.0;
  bool orthogonal_bases = false;  // carve all bases out of one orthonormal frame
  std::uint64_t seed = 0;
};

struct SubspacePhantom {
  Mat points;               // ambient_dim x N, unit-norm columns
  std::vector<int> labels;  // per-column subspace index
  std::vector<Mat> bases;   // orthonormal basis per subspace
};

SubspacePhantom gen_subspace_data(const SubspacePhantomConfig& cfg);

struct PixelCoord {
  int x = 0;  // column
  int y = 0;  // row
};

struct ImagePhantomSpec {
  int height = 128;
  int width = 128;
  int organ_count = 4;
  int aorta_cx = 64;
  int aorta_cy = 64;
  int aorta_radius = 16;
  double aorta_intensity = 0.45;
  int plaque_count = 2;
  int plaque_radius = 1;
  double plaque_contrast = 0.45;
  double remap_x = 0.5;   // piecewise-linear knot, domain B intensity map
  double remap_y = 0.65;
  double vessel_contrast_delta = 0.2;
  std::uint64_t seed = 0;
};

struct CtPhantomPair {
  ImageGrid img_a;
  ImageGrid img_b;
  std::vector<PixelCoord> plaque_sites;
};

// Two pixel-aligned "CT-like" domains over the same geometry: domain B is a
// piecewise-linear intensity remap of A with the vessel interior raised,
// while plaque dots keep the same absolute intensity in both.
CtPhantomPair gen_ct_phantom_pair(const ImagePhantomSpec& spec);

}  // namespace usm

#endif  // USM_PHANTOM_HPP_
