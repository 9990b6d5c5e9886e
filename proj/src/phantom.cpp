#include "usm/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "usm/rng.hpp"

namespace usm {

namespace {

Mat gaussian_matrix(Rng& rng, int rows, int cols) {
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = rng.normal();
  return m;
}

Mat orthonormalize(const Mat& m) {
  Eigen::HouseholderQR<Mat> qr(m);
  Mat q = qr.householderQ() * Mat::Identity(m.rows(), m.cols());
  return q;
}

void validate(const SubspacePhantomConfig& cfg) {
  if (cfg.subspace_count < 1 ||
      static_cast<int>(cfg.sub_dims.size()) != cfg.subspace_count ||
      static_cast<int>(cfg.points_per_subspace.size()) != cfg.subspace_count ||
      cfg.noise_sigma < 0.0)
    fail(ErrorCode::DimensionMismatch, "subspace phantom: invalid config");
  int total_dim = 0;
  for (int d : cfg.sub_dims) {
    if (d < 1 || d >= cfg.ambient_dim)
      fail(ErrorCode::DimensionMismatch,
           "subspace phantom: sub_dim must be in [1, ambient_dim)");
    total_dim += d;
  }
  if (cfg.orthogonal_bases && total_dim > cfg.ambient_dim)
    fail(ErrorCode::DimensionMismatch,
         "subspace phantom: orthogonal bases need sum(sub_dims) <= ambient");
  for (int n : cfg.points_per_subspace)
    if (n < 1) fail(ErrorCode::DimensionMismatch, "subspace phantom: empty subspace");
}

}  // namespace

SubspacePhantom gen_subspace_data(const SubspacePhantomConfig& cfg) {
  validate(cfg);
  Rng rng(cfg.seed);

  SubspacePhantom out;
  if (cfg.orthogonal_bases) {
    int total_dim = 0;
    for (int d : cfg.sub_dims) total_dim += d;
    const Mat frame = orthonormalize(gaussian_matrix(rng, cfg.ambient_dim, total_dim));
    int offset = 0;
    for (int k = 0; k < cfg.subspace_count; ++k) {
      out.bases.push_back(frame.middleCols(offset, cfg.sub_dims[k]));
      offset += cfg.sub_dims[k];
    }
  } else {
    for (int k = 0; k < cfg.subspace_count; ++k)
      out.bases.push_back(
          orthonormalize(gaussian_matrix(rng, cfg.ambient_dim, cfg.sub_dims[k])));
  }

  int total_points = 0;
  for (int n : cfg.points_per_subspace) total_points += n;
  out.points.resize(cfg.ambient_dim, total_points);
  out.labels.reserve(static_cast<size_t>(total_points));

  int col = 0;
  for (int k = 0; k < cfg.subspace_count; ++k) {
    for (int i = 0; i < cfg.points_per_subspace[k]; ++i, ++col) {
      Vec coeff(cfg.sub_dims[k]);
      for (int j = 0; j < cfg.sub_dims[k]; ++j) coeff(j) = rng.normal();
      Vec p = out.bases[k] * coeff;
      if (cfg.noise_sigma > 0.0)
        for (int j = 0; j < cfg.ambient_dim; ++j)
          p(j) += cfg.noise_sigma * rng.normal();
      const double norm = p.norm();
      out.points.col(col) = norm > 0.0 ? Vec(p / norm) : p;
      out.labels.push_back(k);
    }
  }
  return out;
}

namespace {

double remap_piecewise(double v, double x0, double y0) {
  if (v <= x0) return x0 > 0.0 ? v * (y0 / x0) : y0;
  return y0 + (v - x0) * (1.0 - y0) / (1.0 - x0);
}

void paint_disk(Mat& img, double cx, double cy, double radius, double value) {
  const int r_lo = std::max(0, static_cast<int>(std::floor(cy - radius)));
  const int r_hi = std::min(static_cast<int>(img.rows()) - 1,
                            static_cast<int>(std::ceil(cy + radius)));
  const int c_lo = std::max(0, static_cast<int>(std::floor(cx - radius)));
  const int c_hi = std::min(static_cast<int>(img.cols()) - 1,
                            static_cast<int>(std::ceil(cx + radius)));
  for (int r = r_lo; r <= r_hi; ++r)
    for (int c = c_lo; c <= c_hi; ++c) {
      const double dx = c - cx, dy = r - cy;
      if (dx * dx + dy * dy <= radius * radius) img(r, c) = value;
    }
}

void paint_ellipse(Mat& img, double cx, double cy, double ax, double ay,
                   double value) {
  const int r_lo = std::max(0, static_cast<int>(std::floor(cy - ay)));
  const int r_hi = std::min(static_cast<int>(img.rows()) - 1,
                            static_cast<int>(std::ceil(cy + ay)));
  const int c_lo = std::max(0, static_cast<int>(std::floor(cx - ax)));
  const int c_hi = std::min(static_cast<int>(img.cols()) - 1,
                            static_cast<int>(std::ceil(cx + ax)));
  for (int r = r_lo; r <= r_hi; ++r)
    for (int c = c_lo; c <= c_hi; ++c) {
      const double dx = (c - cx) / ax, dy = (r - cy) / ay;
      if (dx * dx + dy * dy <= 1.0) img(r, c) = value;
    }
}

void validate(const ImagePhantomSpec& s) {
  if (s.height < 8 || s.width < 8 || s.organ_count < 0 || s.plaque_count < 0 ||
      s.plaque_radius < 1 || s.aorta_radius < 2)
    fail(ErrorCode::DimensionMismatch, "ct phantom: invalid spec");
  if (s.aorta_intensity <= 0.0 || s.aorta_intensity + s.plaque_contrast > 1.0)
    fail(ErrorCode::DimensionMismatch, "ct phantom: intensities out of range");
  if (s.remap_x <= 0.0 || s.remap_x >= 1.0 || s.remap_y <= 0.0 || s.remap_y >= 1.0)
    fail(ErrorCode::DimensionMismatch, "ct phantom: remap knot out of range");
}

}  // namespace

CtPhantomPair gen_ct_phantom_pair(const ImagePhantomSpec& spec) {
  validate(spec);
  Rng rng(spec.seed);
  const double background = 0.1;

  Mat base = Mat::Constant(spec.height, spec.width, background);

  // Random elliptical "organs", kept clear of the aorta so the plaque
  // neighborhoods stay unoccluded.
  const double keepout = spec.aorta_radius + 8.0;
  for (int k = 0; k < spec.organ_count; ++k) {
    for (int attempt = 0; attempt < 200; ++attempt) {
      const double cx = rng.uniform(0.1 * spec.width, 0.9 * spec.width);
      const double cy = rng.uniform(0.1 * spec.height, 0.9 * spec.height);
      const double ax = rng.uniform(0.05, 0.18) * spec.width;
      const double ay = rng.uniform(0.05, 0.18) * spec.height;
      const double value = rng.uniform(0.2, 0.55);
      const double ddx = cx - spec.aorta_cx, ddy = cy - spec.aorta_cy;
      const double gap = std::sqrt(ddx * ddx + ddy * ddy);
      if (gap > keepout + std::max(ax, ay)) {
        paint_ellipse(base, cx, cy, ax, ay, value);
        break;
      }
    }
  }
  paint_disk(base, spec.aorta_cx, spec.aorta_cy, spec.aorta_radius,
             spec.aorta_intensity);

  // Plaque centers on the aorta rim, pairwise separated by > 2*plaque_radius.
  std::vector<PixelCoord> sites;
  for (int k = 0; k < spec.plaque_count; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      const double theta = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
      const PixelCoord cand{
          static_cast<int>(std::lround(spec.aorta_cx + spec.aorta_radius * std::cos(theta))),
          static_cast<int>(std::lround(spec.aorta_cy + spec.aorta_radius * std::sin(theta)))};
      if (cand.x < 0 || cand.x >= spec.width || cand.y < 0 || cand.y >= spec.height)
        continue;
      bool ok = true;
      for (const PixelCoord& s : sites) {
        const double dx = s.x - cand.x, dy = s.y - cand.y;
        if (std::sqrt(dx * dx + dy * dy) <= 2.0 * spec.plaque_radius) {
          ok = false;
          break;
        }
      }
      if (ok) {
        sites.push_back(cand);
        placed = true;
      }
    }
    if (!placed)
      fail(ErrorCode::PlacementFailure,
           "ct phantom: could not place plaque " + std::to_string(k) +
               " after 1000 attempts");
  }

  CtPhantomPair out;
  out.img_a.pixels = base;
  out.img_b.pixels = base.unaryExpr([&spec](double v) {
    return remap_piecewise(v, spec.remap_x, spec.remap_y);
  });
  paint_disk(out.img_b.pixels, spec.aorta_cx, spec.aorta_cy, spec.aorta_radius,
             std::min(1.0, remap_piecewise(spec.aorta_intensity, spec.remap_x,
                                           spec.remap_y) +
                               spec.vessel_contrast_delta));

  // Calcification is contrast-invariant: the same absolute intensity in both
  // domains, painted after the remap.
  const double plaque_value = spec.aorta_intensity + spec.plaque_contrast;
  for (const PixelCoord& s : sites) {
    paint_disk(out.img_a.pixels, s.x, s.y, spec.plaque_radius, plaque_value);
    paint_disk(out.img_b.pixels, s.x, s.y, spec.plaque_radius, plaque_value);
  }
  out.img_a.pixels = out.img_a.pixels.cwiseMax(0.0).cwiseMin(1.0);
  out.img_b.pixels = out.img_b.pixels.cwiseMax(0.0).cwiseMin(1.0);
  out.plaque_sites = std::move(sites);
  return out;
}

}  // namespace usm
