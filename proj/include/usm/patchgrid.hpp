#ifndef USM_PATCHGRID_HPP_
#define USM_PATCHGRID_HPP_

#include "usm/numerics.hpp"

namespace usm {

// Grayscale image, intensities in [0,1], stored (height x width).
struct ImageGrid {
  Mat pixels;
  int height() const { return static_cast<int>(pixels.rows()); }
  int width() const { return static_cast<int>(pixels.cols()); }
};

struct PatchGridConfig {
  int patch_size = 32;
  int stride = 32;
};

// Number of patch origins along one axis; throws GeometryMismatch when the
// extent is not covered exactly.
int patch_count_1d(int extent, const PatchGridConfig& cfg);

// Columns are vectorized patches (row-major within a patch), patch origins
// ordered row-major over the image. Output is (patch_size^2) x N.
Mat extract_patches(const ImageGrid& img, const PatchGridConfig& cfg);

// Inverse of extract_patches: each pixel is the average of every patch entry
// covering it, clamped to [0,1] afterwards.
ImageGrid assemble_patches(const Mat& patches, const PatchGridConfig& cfg,
                           int height, int width);

}  // namespace usm

#endif  // USM_PATCHGRID_HPP_
