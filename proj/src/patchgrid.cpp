#include "usm/patchgrid.hpp"

#include <string>

namespace usm {

int patch_count_1d(int extent, const PatchGridConfig& cfg) {
  if (cfg.patch_size < 1 || cfg.stride < 1 || cfg.stride > cfg.patch_size)
    fail(ErrorCode::GeometryMismatch, "patch grid: invalid patch/stride");
  if (cfg.patch_size > extent)
    fail(ErrorCode::GeometryMismatch, "patch grid: patch larger than image");
  if ((extent - cfg.patch_size) % cfg.stride != 0)
    fail(ErrorCode::GeometryMismatch,
         "patch grid: extent " + std::to_string(extent) +
             " not covered by patch " + std::to_string(cfg.patch_size) +
             " stride " + std::to_string(cfg.stride));
  return (extent - cfg.patch_size) / cfg.stride + 1;
}

Mat extract_patches(const ImageGrid& img, const PatchGridConfig& cfg) {
  const int nr = patch_count_1d(img.height(), cfg);
  const int nc = patch_count_1d(img.width(), cfg);
  const int ps = cfg.patch_size;
  Mat out(ps * ps, nr * nc);
  int col = 0;
  for (int pr = 0; pr < nr; ++pr) {
    for (int pc = 0; pc < nc; ++pc, ++col) {
      const int r0 = pr * cfg.stride;
      const int c0 = pc * cfg.stride;
      for (int i = 0; i < ps; ++i)
        for (int j = 0; j < ps; ++j)
          out(i * ps + j, col) = img.pixels(r0 + i, c0 + j);
    }
  }
  return out;
}

ImageGrid assemble_patches(const Mat& patches, const PatchGridConfig& cfg,
                           int height, int width) {
  const int nr = patch_count_1d(height, cfg);
  const int nc = patch_count_1d(width, cfg);
  const int ps = cfg.patch_size;
  if (patches.rows() != static_cast<Eigen::Index>(ps) * ps ||
      patches.cols() != static_cast<Eigen::Index>(nr) * nc)
    fail(ErrorCode::GeometryMismatch,
         "assemble_patches: patch matrix inconsistent with geometry");
  Mat sum = Mat::Zero(height, width);
  Mat count = Mat::Zero(height, width);
  int col = 0;
  for (int pr = 0; pr < nr; ++pr) {
    for (int pc = 0; pc < nc; ++pc, ++col) {
      const int r0 = pr * cfg.stride;
      const int c0 = pc * cfg.stride;
      for (int i = 0; i < ps; ++i)
        for (int j = 0; j < ps; ++j) {
          sum(r0 + i, c0 + j) += patches(i * ps + j, col);
          count(r0 + i, c0 + j) += 1.0;
        }
    }
  }
  ImageGrid img;
  img.pixels = (sum.array() / count.array()).cwiseMax(0.0).cwiseMin(1.0);
  return img;
}

}  // namespace usm
