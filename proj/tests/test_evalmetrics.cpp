#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "usm/evalmetrics.hpp"
#include "usm/rng.hpp"

using usm::ImageGrid;
using usm::Mat;

TEST_CASE("dot_recall: ground-truth phantom images score 1.0") {
  usm::ImagePhantomSpec spec;
  spec.plaque_count = 6;
  spec.seed = 3;
  const usm::CtPhantomPair pair = usm::gen_ct_phantom_pair(spec);
  const usm::DotMetrics ma = usm::dot_recall(pair.img_a, pair.plaque_sites, 2, 0.1);
  const usm::DotMetrics mb = usm::dot_recall(pair.img_b, pair.plaque_sites, 2, 0.1);
  CHECK(ma.recall == 1.0);
  CHECK(mb.recall == 1.0);
  CHECK(ma.hits == 6);
  CHECK(ma.total == 6);
}

TEST_CASE("dot_recall: constant image scores zero") {
  ImageGrid img;
  img.pixels = Mat::Constant(32, 32, 0.4);
  const usm::DotMetrics m = usm::dot_recall(img, {{10, 10}, {20, 20}}, 2, 0.1);
  CHECK(m.recall == 0.0);
  CHECK(m.hits == 0);
  CHECK(m.total == 2);
}

TEST_CASE("dot_recall: invariant to changes outside site neighborhoods") {
  usm::ImagePhantomSpec spec;
  spec.plaque_count = 4;
  spec.seed = 9;
  const usm::CtPhantomPair pair = usm::gen_ct_phantom_pair(spec);
  ImageGrid altered = pair.img_a;
  // corrupt a far corner, beyond every radius+4 window
  altered.pixels.block(0, 0, 6, 6).setConstant(1.0);
  bool far_enough = true;
  for (const usm::PixelCoord& s : pair.plaque_sites)
    if (s.x < 14 && s.y < 14) far_enough = false;
  if (far_enough) {
    const usm::DotMetrics before = usm::dot_recall(pair.img_a, pair.plaque_sites, 2, 0.1);
    const usm::DotMetrics after = usm::dot_recall(altered, pair.plaque_sites, 2, 0.1);
    CHECK(before.recall == after.recall);
    for (size_t i = 0; i < before.contrasts.size(); ++i)
      CHECK(before.contrasts[i] == after.contrasts[i]);
  }
}

TEST_CASE("dot_recall: rejects out-of-bounds sites") {
  ImageGrid img;
  img.pixels = Mat::Zero(16, 16);
  CHECK_THROWS_AS(usm::dot_recall(img, {{16, 3}}, 2, 0.1), usm::Error);
  CHECK_THROWS_AS(usm::dot_recall(img, {{3, -1}}, 2, 0.1), usm::Error);
}

TEST_CASE("global_mse: analytic cases and symmetry") {
  ImageGrid a, b;
  a.pixels = Mat::Constant(8, 8, 0.3);
  b.pixels = Mat::Constant(8, 8, 0.4);
  CHECK(usm::global_mse(a, a) == 0.0);
  CHECK(usm::global_mse(a, b) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(usm::global_mse(a, b) == usm::global_mse(b, a));
}

TEST_CASE("global_mse: matches a direct summation oracle") {
  usm::Rng rng(4);
  ImageGrid a, b;
  a.pixels.resize(9, 7);
  b.pixels.resize(9, 7);
  double sum = 0.0;
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 7; ++c) {
      a.pixels(r, c) = rng.uniform();
      b.pixels(r, c) = rng.uniform();
      const double d = a.pixels(r, c) - b.pixels(r, c);
      sum += d * d;
    }
  CHECK(std::abs(usm::global_mse(a, b) - sum / 63.0) <= 1e-15);
}

TEST_CASE("global_mse: rejects mismatched geometry") {
  ImageGrid a, b;
  a.pixels = Mat::Zero(4, 4);
  b.pixels = Mat::Zero(4, 5);
  CHECK_THROWS_AS(usm::global_mse(a, b), usm::Error);
}
