#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "usm/numerics.hpp"
#include "usm/phantom.hpp"

using usm::Mat;
using usm::Vec;

TEST_CASE("subspace data: K=1 noiseless points lie in the basis span") {
  usm::SubspacePhantomConfig cfg;
  cfg.subspace_count = 1;
  cfg.sub_dims = {4};
  cfg.points_per_subspace = {20};
  cfg.ambient_dim = 12;
  cfg.noise_sigma = 0.0;
  cfg.seed = 42;
  const usm::SubspacePhantom p = usm::gen_subspace_data(cfg);
  const Mat& b = p.bases[0];
  for (int c = 0; c < 20; ++c) {
    const Vec x = p.points.col(c);
    const Vec residual = x - b * (b.transpose() * x);
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("subspace data: unit-norm columns and labels") {
  usm::SubspacePhantomConfig cfg;
  cfg.noise_sigma = 0.05;
  cfg.seed = 3;
  const usm::SubspacePhantom p = usm::gen_subspace_data(cfg);
  CHECK(p.points.cols() == 50);
  CHECK(p.labels.size() == 50);
  for (int c = 0; c < 50; ++c)
    CHECK(std::abs(p.points.col(c).norm() - 1.0) <= 1e-12);
  CHECK(p.labels.front() == 0);
  CHECK(p.labels.back() == 1);
}

TEST_CASE("subspace data: same seed is bit-identical") {
  usm::SubspacePhantomConfig cfg;
  cfg.seed = 99;
  const usm::SubspacePhantom a = usm::gen_subspace_data(cfg);
  const usm::SubspacePhantom b = usm::gen_subspace_data(cfg);
  CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("subspace data: orthogonal option yields orthogonal bases") {
  usm::SubspacePhantomConfig cfg;
  cfg.orthogonal_bases = true;
  cfg.seed = 5;
  const usm::SubspacePhantom p = usm::gen_subspace_data(cfg);
  // principal-angle cosines are the singular values of B1^T B2
  const Vec cosines = usm::svd(Mat(p.bases[0].transpose() * p.bases[1])).s;
  CHECK(cosines.maxCoeff() <= 1e-12);
}

TEST_CASE("subspace data: noiseless cross-subspace projection loses energy") {
  usm::SubspacePhantomConfig cfg;
  cfg.orthogonal_bases = true;
  cfg.noise_sigma = 0.0;
  cfg.seed = 8;
  const usm::SubspacePhantom p = usm::gen_subspace_data(cfg);
  for (int c = 0; c < p.points.cols(); ++c) {
    const int own = p.labels[static_cast<size_t>(c)];
    const Vec x = p.points.col(c);
    const double own_energy = (p.bases[own].transpose() * x).squaredNorm();
    const double other_energy =
        (p.bases[1 - own].transpose() * x).squaredNorm();
    CHECK(own_energy >= 1.0 - 1e-10);
    CHECK(other_energy <= 1e-10);
  }
}

TEST_CASE("subspace data: invalid config rejected") {
  usm::SubspacePhantomConfig cfg;
  cfg.sub_dims = {40, 3};  // exceeds ambient_dim
  CHECK_THROWS_AS(usm::gen_subspace_data(cfg), usm::Error);
}

namespace {

double remap(double v, double x0, double y0) {
  if (v <= x0) return v * (y0 / x0);
  return y0 + (v - x0) * (1.0 - y0) / (1.0 - x0);
}

}  // namespace

TEST_CASE("ct phantom: zero plaques differ only by remap and vessel delta") {
  usm::ImagePhantomSpec spec;
  spec.plaque_count = 0;
  spec.seed = 1;
  const usm::CtPhantomPair pair = usm::gen_ct_phantom_pair(spec);
  for (int r = 0; r < spec.height; ++r)
    for (int c = 0; c < spec.width; ++c) {
      const double dx = c - spec.aorta_cx, dy = r - spec.aorta_cy;
      const bool in_aorta =
          dx * dx + dy * dy <= double(spec.aorta_radius) * spec.aorta_radius;
      double want = remap(pair.img_a.pixels(r, c), spec.remap_x, spec.remap_y);
      if (in_aorta) want = std::min(1.0, want + spec.vessel_contrast_delta);
      CHECK(pair.img_b.pixels(r, c) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("ct phantom: plaques are bright in both domains") {
  usm::ImagePhantomSpec spec;
  spec.plaque_count = 5;
  spec.seed = 2;
  const usm::CtPhantomPair pair = usm::gen_ct_phantom_pair(spec);
  CHECK(pair.plaque_sites.size() == 5);
  const double plaque = spec.aorta_intensity + spec.plaque_contrast;
  for (const usm::PixelCoord& s : pair.plaque_sites) {
    CHECK(pair.img_a.pixels(s.y, s.x) >=
          spec.aorta_intensity + spec.plaque_contrast - 1e-12);
    CHECK(pair.img_a.pixels(s.y, s.x) == doctest::Approx(plaque));
    CHECK(pair.img_b.pixels(s.y, s.x) == doctest::Approx(plaque));
  }
  // pairwise separation
  for (size_t i = 0; i < pair.plaque_sites.size(); ++i)
    for (size_t j = i + 1; j < pair.plaque_sites.size(); ++j) {
      const double dx = pair.plaque_sites[i].x - pair.plaque_sites[j].x;
      const double dy = pair.plaque_sites[i].y - pair.plaque_sites[j].y;
      CHECK(std::sqrt(dx * dx + dy * dy) > 2.0 * spec.plaque_radius);
    }
}

TEST_CASE("ct phantom: determinism and intensity range") {
  usm::ImagePhantomSpec spec;
  spec.plaque_count = 3;
  spec.seed = 77;
  const usm::CtPhantomPair a = usm::gen_ct_phantom_pair(spec);
  const usm::CtPhantomPair b = usm::gen_ct_phantom_pair(spec);
  CHECK((a.img_a.pixels - b.img_a.pixels).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.img_b.pixels - b.img_b.pixels).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.img_a.pixels.minCoeff() >= 0.0);
  CHECK(a.img_a.pixels.maxCoeff() <= 1.0);
  CHECK(a.img_b.pixels.minCoeff() >= 0.0);
  CHECK(a.img_b.pixels.maxCoeff() <= 1.0);
}

TEST_CASE("ct phantom: impossible plaque packing fails cleanly") {
  usm::ImagePhantomSpec spec;
  spec.plaque_count = 500;  // cannot fit on the rim with the separation rule
  spec.seed = 4;
  CHECK_THROWS_AS(usm::gen_ct_phantom_pair(spec), usm::Error);
}
