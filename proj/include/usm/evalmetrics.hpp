#ifndef USM_EVALMETRICS_HPP_
#define USM_EVALMETRICS_HPP_

#include <vector>

#include "usm/phantom.hpp"

namespace usm {

struct DotMetrics {
  double recall = 0.0;
  int hits = 0;
  int total = 0;
  std::vector<double> contrasts;  // per-site max-window minus annulus mean
};

// A site is a hit when the max intensity within the Chebyshev radius exceeds
// the mean of the (radius+2 .. radius+4) annulus by at least min_contrast.
DotMetrics dot_recall(const ImageGrid& img, const std::vector<PixelCoord>& sites,
                      int radius, double min_contrast);

double global_mse(const ImageGrid& a, const ImageGrid& b);

}  // namespace usm

#endif  // USM_EVALMETRICS_HPP_
