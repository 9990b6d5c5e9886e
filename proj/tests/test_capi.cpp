#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "usm.h"

namespace {

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = std::string("capi_tmp_") + name;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

usm_matrix* make(int64_t rows, int64_t cols, double fill = 0.0) {
  usm_matrix* m = nullptr;
  REQUIRE(usm_matrix_create(rows, cols, &m) == USM_OK);
  for (int64_t r = 0; r < rows; ++r)
    for (int64_t c = 0; c < cols; ++c)
      REQUIRE(usm_matrix_set(m, r, c, fill) == USM_OK);
  return m;
}

double at(const usm_matrix* m, int64_t r, int64_t c) {
  double v = 0.0;
  REQUIRE(usm_matrix_get(m, r, c, &v) == USM_OK);
  return v;
}

}  // namespace

TEST_CASE("capi: matrix create, set, get, bounds") {
  usm_matrix* m = nullptr;
  REQUIRE(usm_matrix_create(3, 2, &m) == USM_OK);
  CHECK(usm_matrix_rows(m) == 3);
  CHECK(usm_matrix_cols(m) == 2);
  CHECK(usm_matrix_set(m, 2, 1, 4.5) == USM_OK);
  CHECK(at(m, 2, 1) == 4.5);

  double v = 0.0;
  CHECK(usm_matrix_get(m, 3, 0, &v) == USM_ERR_OUT_OF_BOUNDS);
  CHECK(usm_matrix_set(m, 0, -1, 1.0) == USM_ERR_OUT_OF_BOUNDS);
  CHECK(std::strlen(usm_last_error_message()) > 0);

  CHECK(usm_matrix_create(0, 2, &m) == USM_ERR_INVALID_ARGUMENT);
  CHECK(usm_matrix_get(nullptr, 0, 0, &v) == USM_ERR_INVALID_ARGUMENT);
  usm_matrix_free(m);
}

TEST_CASE("capi: usm1 file round trip and io error") {
  TempFile f("roundtrip.usm");
  usm_matrix* m = make(4, 3);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 3; ++c)
      usm_matrix_set(m, r, c, 0.1 * r - 0.7 * c);
  REQUIRE(usm_matrix_write_file(m, f.path.c_str()) == USM_OK);

  usm_matrix* back = nullptr;
  REQUIRE(usm_matrix_read_file(f.path.c_str(), &back) == USM_OK);
  CHECK(usm_matrix_rows(back) == 4);
  CHECK(usm_matrix_cols(back) == 3);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 3; ++c)
      CHECK(at(back, r, c) == at(m, r, c));
  usm_matrix_free(back);
  usm_matrix_free(m);

  usm_matrix* none = nullptr;
  CHECK(usm_matrix_read_file("no_such_dir/x.usm", &none) == USM_ERR_IO);
}

TEST_CASE("capi: pgm round trip quantizes to 16 bits") {
  TempFile f("img.pgm");
  usm_matrix* img = make(5, 7);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 7; ++c)
      usm_matrix_set(img, r, c, (r * 7 + c) / 34.0);
  REQUIRE(usm_image_write_pgm(img, f.path.c_str()) == USM_OK);

  usm_matrix* back = nullptr;
  REQUIRE(usm_image_read_pgm(f.path.c_str(), &back) == USM_OK);
  CHECK(usm_matrix_rows(back) == 5);
  CHECK(usm_matrix_cols(back) == 7);
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 7; ++c)
      CHECK(std::abs(at(back, r, c) - at(img, r, c)) <= 0.5 / 65535.0);
  usm_matrix_free(back);
  usm_matrix_free(img);
}

TEST_CASE("capi: patch extraction and assembly") {
  usm_matrix* img = make(8, 8);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      usm_matrix_set(img, r, c, (r * 8 + c) / 64.0);

  usm_matrix* patches = nullptr;
  REQUIRE(usm_extract_patches(img, 4, 4, &patches) == USM_OK);
  CHECK(usm_matrix_rows(patches) == 16);
  CHECK(usm_matrix_cols(patches) == 4);

  usm_matrix* back = nullptr;
  REQUIRE(usm_assemble_patches(patches, 4, 4, 8, 8, &back) == USM_OK);
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      CHECK(at(back, r, c) == at(img, r, c));

  usm_matrix* bad = nullptr;
  CHECK(usm_extract_patches(img, 3, 3, &bad) == USM_ERR_GEOMETRY_MISMATCH);

  usm_matrix_free(back);
  usm_matrix_free(patches);
  usm_matrix_free(img);
}

TEST_CASE("capi: solve, affinity, cluster on a subspace phantom") {
  const int sub_dims[2] = {2, 2};
  const int pts[2] = {12, 12};
  usm_subspace_config scfg{2, 12, sub_dims, pts, 0.0, 1, 7};
  usm_matrix* z = nullptr;
  std::vector<int> truth(24);
  REQUIRE(usm_gen_subspace_data(&scfg, &z, truth.data()) == USM_OK);
  CHECK(usm_matrix_rows(z) == 12);
  CHECK(usm_matrix_cols(z) == 24);

  usm_solver_config cfg;
  usm_solver_config_default(&cfg);
  CHECK(cfg.lambda == 1.0);
  CHECK(cfg.mu == 10.0);
  CHECK(cfg.track_objectives == 0);
  cfg.mu = 100.0;
  cfg.max_iter = 2000;
  cfg.track_objectives = 1;

  usm_matrix* coeff = nullptr;
  usm_solve_report* report = nullptr;
  REQUIRE(usm_solve_self_expressive(z, &cfg, &coeff, &report) == USM_OK);
  CHECK(usm_solve_report_converged(report) == 1);
  const int iters = usm_solve_report_iterations(report);
  CHECK(iters >= 1);
  CHECK(usm_solve_report_objective(report) > 0.0);
  CHECK(usm_solve_report_res_a(report, iters - 1) >= 0.0);
  CHECK(usm_solve_report_objective_at(report, iters - 1) > 0.0);

  double spr = 0.0;
  REQUIRE(usm_subspace_preserving_rate(coeff, truth.data(), &spr) == USM_OK);
  CHECK(spr >= 0.95);

  usm_matrix* w = nullptr;
  REQUIRE(usm_build_affinity(coeff, &w) == USM_OK);
  std::vector<int> pred(24);
  REQUIRE(usm_spectral_cluster(w, 2, 0, pred.data()) == USM_OK);
  double err = 0.0;
  REQUIRE(usm_clustering_error(pred.data(), truth.data(), 24, &err) == USM_OK);
  CHECK(err == 0.0);

  CHECK(usm_clustering_error(pred.data(), truth.data(), 0, &err) ==
        USM_ERR_INVALID_ARGUMENT);

  usm_matrix_free(w);
  usm_solve_report_free(report);
  usm_matrix_free(coeff);
  usm_matrix_free(z);
}

TEST_CASE("capi: ct phantom pair with plaque sites and dot recall") {
  usm_image_phantom_spec spec;
  usm_image_phantom_spec_default(&spec);
  CHECK(spec.height == 128);
  CHECK(spec.plaque_count == 2);
  spec.plaque_count = 3;
  spec.seed = 11;

  usm_matrix* a = nullptr;
  usm_matrix* b = nullptr;
  std::vector<int> sites(6);
  REQUIRE(usm_gen_ct_phantom_pair(&spec, &a, &b, sites.data()) == USM_OK);
  CHECK(usm_matrix_rows(a) == 128);
  CHECK(usm_matrix_cols(b) == 128);

  double recall = 0.0;
  int hits = 0;
  REQUIRE(usm_dot_recall(a, sites.data(), 3, 2, 0.1, &recall, &hits) == USM_OK);
  CHECK(recall == 1.0);
  CHECK(hits == 3);
  REQUIRE(usm_dot_recall(b, sites.data(), 3, 2, 0.1, &recall, &hits) == USM_OK);
  CHECK(recall == 1.0);

  double mse = 0.0;
  REQUIRE(usm_global_mse(a, b, &mse) == USM_OK);
  CHECK(mse > 0.0);
  REQUIRE(usm_global_mse(a, a, &mse) == USM_OK);
  CHECK(mse == 0.0);

  const int bad_site[2] = {1000, 0};
  CHECK(usm_dot_recall(a, bad_site, 1, 2, 0.1, &recall, &hits) ==
        USM_ERR_OUT_OF_BOUNDS);

  usm_matrix_free(b);
  usm_matrix_free(a);
}

TEST_CASE("capi: model init, train, translate, save, load") {
  const int p = 16;
  const int n = 40;
  usm_matrix* da = make(p, n);
  usm_matrix* db = make(p, n);
  uint64_t state = 99;
  auto next = [&state]() {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    return static_cast<double>(state >> 11) * 0x1.0p-53;
  };
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < n; ++c) {
      usm_matrix_set(da, r, c, next());
      usm_matrix_set(db, r, c, next());
    }

  usm_model* model = nullptr;
  REQUIRE(usm_model_init(da, db, 4, USM_ACTIVATION_NONE, &model) == USM_OK);
  CHECK(usm_model_patch_dim(model) == p);
  CHECK(usm_model_latent_dim(model) == 4);

  usm_train_config tcfg;
  usm_train_config_default(&tcfg);
  CHECK(tcfg.learning_rate == 0.05);
  CHECK(tcfg.steps == 2000);
  CHECK(tcfg.w_se == 0.1);
  tcfg.steps = 12;
  tcfg.batch = 10;
  tcfg.c_refresh_period = 6;
  tcfg.learning_rate = 0.01;
  tcfg.solver.max_iter = 100;
  tcfg.solver.tol = 1e-4;

  usm_matrix* history = nullptr;
  int invocations = 0;
  REQUIRE(usm_train(model, da, db, &tcfg, &history, &invocations) == USM_OK);
  CHECK(usm_matrix_rows(history) == 12);
  CHECK(usm_matrix_cols(history) == 6);
  CHECK(invocations == 2);
  CHECK(at(history, 0, 5) > 0.0);

  usm_matrix* out = nullptr;
  REQUIRE(usm_translate(model, 'a', 'b', da, &out) == USM_OK);
  CHECK(usm_matrix_rows(out) == p);
  CHECK(usm_matrix_cols(out) == n);

  usm_matrix* bad = nullptr;
  CHECK(usm_translate(model, 'x', 'b', da, &bad) == USM_ERR_INVALID_ARGUMENT);

  TempFile f("model.usm");
  REQUIRE(usm_model_write_file(model, f.path.c_str()) == USM_OK);
  usm_model* loaded = nullptr;
  REQUIRE(usm_model_read_file(f.path.c_str(), &loaded) == USM_OK);
  usm_matrix* out2 = nullptr;
  REQUIRE(usm_translate(loaded, 'a', 'b', da, &out2) == USM_OK);
  for (int r = 0; r < p; ++r)
    for (int c = 0; c < n; ++c)
      CHECK(at(out2, r, c) == at(out, r, c));

  usm_matrix_free(out2);
  usm_model_free(loaded);
  usm_matrix_free(out);
  usm_matrix_free(history);
  usm_model_free(model);
  usm_matrix_free(db);
  usm_matrix_free(da);
}

TEST_CASE("capi: error statuses map to the documented codes") {
  usm_matrix* tiny = make(2, 1, 1.0);
  usm_solver_config cfg;
  usm_solver_config_default(&cfg);
  usm_matrix* coeff = nullptr;
  CHECK(usm_solve_self_expressive(tiny, &cfg, &coeff, nullptr) ==
        USM_ERR_DIMENSION_MISMATCH);

  usm_matrix* zeros = make(2, 3, 0.0);
  CHECK(usm_solve_self_expressive(zeros, &cfg, &coeff, nullptr) ==
        USM_ERR_DEGENERATE_COEFFICIENTS);

  usm_matrix* w = make(4, 4, 0.0);
  std::vector<int> labels(4);
  CHECK(usm_spectral_cluster(w, 2, 0, labels.data()) ==
        USM_ERR_DEGENERATE_AFFINITY);
  CHECK(std::strlen(usm_last_error_message()) > 0);

  usm_matrix_free(w);
  usm_matrix_free(zeros);
  usm_matrix_free(tiny);
}
