#include "usm/evalmetrics.hpp"

#include <algorithm>
#include <string>

namespace usm {

DotMetrics dot_recall(const ImageGrid& img, const std::vector<PixelCoord>& sites,
                      int radius, double min_contrast) {
  if (radius < 1)
    fail(ErrorCode::OutOfBounds, "dot_recall: radius must be >= 1");
  const int h = img.height(), w = img.width();

  DotMetrics out;
  out.total = static_cast<int>(sites.size());
  for (const PixelCoord& s : sites) {
    if (s.x < 0 || s.x >= w || s.y < 0 || s.y >= h)
      fail(ErrorCode::OutOfBounds,
           "dot_recall: site (" + std::to_string(s.x) + "," +
               std::to_string(s.y) + ") outside image");
    double peak = 0.0;
    double annulus_sum = 0.0;
    int annulus_count = 0;
    const int reach = radius + 4;
    for (int dy = -reach; dy <= reach; ++dy)
      for (int dx = -reach; dx <= reach; ++dx) {
        const int r = s.y + dy, c = s.x + dx;
        if (r < 0 || r >= h || c < 0 || c >= w) continue;
        const int cheb = std::max(std::abs(dx), std::abs(dy));
        if (cheb <= radius) {
          peak = std::max(peak, img.pixels(r, c));
        } else if (cheb >= radius + 2) {
          annulus_sum += img.pixels(r, c);
          ++annulus_count;
        }
      }
    const double annulus_mean = annulus_count ? annulus_sum / annulus_count : 0.0;
    const double contrast = peak - annulus_mean;
    out.contrasts.push_back(contrast);
    if (contrast >= min_contrast) ++out.hits;
  }
  out.recall = out.total ? static_cast<double>(out.hits) / out.total : 0.0;
  return out;
}

double global_mse(const ImageGrid& a, const ImageGrid& b) {
  if (a.height() != b.height() || a.width() != b.width())
    fail(ErrorCode::GeometryMismatch, "global_mse: image geometry differs");
  return (a.pixels - b.pixels).squaredNorm() /
         (static_cast<double>(a.height()) * a.width());
}

}  // namespace usm
