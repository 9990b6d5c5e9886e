#include "usm.h"

#include <cstring>
#include <exception>
#include <string>
#include <vector>

#include "usm/evalmetrics.hpp"
#include "usm/io.hpp"
#include "usm/patchgrid.hpp"
#include "usm/phantom.hpp"
#include "usm/selfexpress.hpp"
#include "usm/subcluster.hpp"
#include "usm/translator.hpp"

struct usm_matrix {
  usm::Mat data;
};

struct usm_solve_report {
  usm::SolveReport report;
};

struct usm_model {
  usm::TranslatorModel model;
};

namespace {

thread_local std::string g_last_error;

usm_status status_from(usm::ErrorCode code) {
  using usm::ErrorCode;
  switch (code) {
    case ErrorCode::NonConvergence: return USM_ERR_NON_CONVERGENCE;
    case ErrorCode::NotSymmetric: return USM_ERR_NOT_SYMMETRIC;
    case ErrorCode::NotPositiveDefinite: return USM_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::DimensionMismatch: return USM_ERR_DIMENSION_MISMATCH;
    case ErrorCode::GeometryMismatch: return USM_ERR_GEOMETRY_MISMATCH;
    case ErrorCode::PlacementFailure: return USM_ERR_PLACEMENT_FAILURE;
    case ErrorCode::DegenerateAffinity: return USM_ERR_DEGENERATE_AFFINITY;
    case ErrorCode::DegenerateCoefficients:
      return USM_ERR_DEGENERATE_COEFFICIENTS;
    case ErrorCode::LengthMismatch: return USM_ERR_LENGTH_MISMATCH;
    case ErrorCode::OutOfBounds: return USM_ERR_OUT_OF_BOUNDS;
    case ErrorCode::NonFiniteLoss: return USM_ERR_NON_FINITE_LOSS;
    case ErrorCode::ParseError: return USM_ERR_PARSE;
    case ErrorCode::IoError: return USM_ERR_IO;
  }
  return USM_ERR_INTERNAL;
}

template <typename Fn>
usm_status guarded(Fn&& fn) {
  try {
    fn();
    return USM_OK;
  } catch (const usm::Error& e) {
    g_last_error = e.what();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return USM_ERR_INTERNAL;
  }
}

usm_status invalid(const char* what) {
  g_last_error = what;
  return USM_ERR_INVALID_ARGUMENT;
}

usm::Activation to_activation(int a) {
  if (a == USM_ACTIVATION_TANH) return usm::Activation::Tanh;
  return usm::Activation::None;
}

usm::SolverConfig to_solver_config(const usm_solver_config& c) {
  usm::SolverConfig out;
  out.lambda = c.lambda;
  out.mu = c.mu;
  out.rho = c.rho;
  out.tol = c.tol;
  out.max_iter = c.max_iter;
  out.normalize_columns = c.normalize_columns != 0;
  out.track_objectives = c.track_objectives != 0;
  return out;
}

}  // namespace

extern "C" {

const char* usm_last_error_message(void) { return g_last_error.c_str(); }

usm_status usm_matrix_create(int64_t rows, int64_t cols, usm_matrix** out) {
  if (!out || rows < 1 || cols < 1) return invalid("usm_matrix_create: bad args");
  return guarded([&] { *out = new usm_matrix{usm::Mat::Zero(rows, cols)}; });
}

void usm_matrix_free(usm_matrix* m) { delete m; }

int64_t usm_matrix_rows(const usm_matrix* m) { return m ? m->data.rows() : 0; }
int64_t usm_matrix_cols(const usm_matrix* m) { return m ? m->data.cols() : 0; }

usm_status usm_matrix_get(const usm_matrix* m, int64_t row, int64_t col,
                          double* out) {
  if (!m || !out) return invalid("usm_matrix_get: bad args");
  if (row < 0 || col < 0 || row >= m->data.rows() || col >= m->data.cols()) {
    g_last_error = "usm_matrix_get: index out of bounds";
    return USM_ERR_OUT_OF_BOUNDS;
  }
  *out = m->data(row, col);
  return USM_OK;
}

usm_status usm_matrix_set(usm_matrix* m, int64_t row, int64_t col, double value) {
  if (!m) return invalid("usm_matrix_set: bad args");
  if (row < 0 || col < 0 || row >= m->data.rows() || col >= m->data.cols()) {
    g_last_error = "usm_matrix_set: index out of bounds";
    return USM_ERR_OUT_OF_BOUNDS;
  }
  m->data(row, col) = value;
  return USM_OK;
}

usm_status usm_matrix_read_file(const char* path, usm_matrix** out) {
  if (!path || !out) return invalid("usm_matrix_read_file: bad args");
  return guarded([&] { *out = new usm_matrix{usm::read_usm1_file(path)}; });
}

usm_status usm_matrix_write_file(const usm_matrix* m, const char* path) {
  if (!m || !path) return invalid("usm_matrix_write_file: bad args");
  return guarded([&] { usm::write_usm1_file(path, m->data); });
}

usm_status usm_image_read_pgm(const char* path, usm_matrix** out) {
  if (!path || !out) return invalid("usm_image_read_pgm: bad args");
  return guarded([&] {
    *out = new usm_matrix{usm::read_pgm_file(path).pixels};
  });
}

usm_status usm_image_write_pgm(const usm_matrix* img, const char* path) {
  if (!img || !path) return invalid("usm_image_write_pgm: bad args");
  return guarded([&] { usm::write_pgm_file(path, usm::ImageGrid{img->data}); });
}

usm_status usm_extract_patches(const usm_matrix* img, int patch_size, int stride,
                               usm_matrix** out) {
  if (!img || !out) return invalid("usm_extract_patches: bad args");
  return guarded([&] {
    *out = new usm_matrix{usm::extract_patches(usm::ImageGrid{img->data},
                                               {patch_size, stride})};
  });
}

usm_status usm_assemble_patches(const usm_matrix* patches, int patch_size,
                                int stride, int height, int width,
                                usm_matrix** out) {
  if (!patches || !out) return invalid("usm_assemble_patches: bad args");
  return guarded([&] {
    *out = new usm_matrix{
        usm::assemble_patches(patches->data, {patch_size, stride}, height, width)
            .pixels};
  });
}

void usm_solver_config_default(usm_solver_config* cfg) {
  if (!cfg) return;
  const usm::SolverConfig d;
  *cfg = {d.lambda, d.mu, d.rho, d.tol, d.max_iter, d.normalize_columns ? 1 : 0,
          d.track_objectives ? 1 : 0};
}

usm_status usm_solve_self_expressive(const usm_matrix* z,
                                     const usm_solver_config* cfg,
                                     usm_matrix** coeff_out,
                                     usm_solve_report** report_out) {
  if (!z || !cfg || !coeff_out)
    return invalid("usm_solve_self_expressive: bad args");
  return guarded([&] {
    auto [coeff, report] =
        usm::solve_self_expressive(z->data, to_solver_config(*cfg));
    *coeff_out = new usm_matrix{std::move(coeff)};
    if (report_out) *report_out = new usm_solve_report{std::move(report)};
  });
}

void usm_solve_report_free(usm_solve_report* r) { delete r; }
int usm_solve_report_iterations(const usm_solve_report* r) {
  return r ? r->report.iterations : 0;
}
int usm_solve_report_converged(const usm_solve_report* r) {
  return r && r->report.converged ? 1 : 0;
}
double usm_solve_report_objective(const usm_solve_report* r) {
  return r ? r->report.objective : 0.0;
}
double usm_solve_report_res_a(const usm_solve_report* r, int iter) {
  if (!r || iter < 0 || iter >= r->report.iterations) return -1.0;
  return r->report.res_a[static_cast<size_t>(iter)];
}
double usm_solve_report_res_b(const usm_solve_report* r, int iter) {
  if (!r || iter < 0 || iter >= r->report.iterations) return -1.0;
  return r->report.res_b[static_cast<size_t>(iter)];
}

double usm_solve_report_objective_at(const usm_solve_report* r, int iter) {
  if (!r || iter < 0 ||
      iter >= static_cast<int>(r->report.objectives.size()))
    return -1.0;
  return r->report.objectives[static_cast<size_t>(iter)];
}

usm_status usm_build_affinity(const usm_matrix* coeff, usm_matrix** out) {
  if (!coeff || !out) return invalid("usm_build_affinity: bad args");
  return guarded([&] { *out = new usm_matrix{usm::build_affinity(coeff->data)}; });
}

usm_status usm_spectral_cluster(const usm_matrix* w, int k, uint64_t seed,
                                int* labels_out) {
  if (!w || !labels_out) return invalid("usm_spectral_cluster: bad args");
  return guarded([&] {
    const std::vector<int> labels = usm::spectral_cluster(w->data, k, seed);
    std::memcpy(labels_out, labels.data(), labels.size() * sizeof(int));
  });
}

usm_status usm_clustering_error(const int* pred, const int* truth, int64_t n,
                                double* out) {
  if (!pred || !truth || !out || n < 1)
    return invalid("usm_clustering_error: bad args");
  return guarded([&] {
    *out = usm::clustering_error(
        std::vector<int>(pred, pred + n), std::vector<int>(truth, truth + n));
  });
}

usm_status usm_subspace_preserving_rate(const usm_matrix* coeff,
                                        const int* truth, double* out) {
  if (!coeff || !truth || !out)
    return invalid("usm_subspace_preserving_rate: bad args");
  return guarded([&] {
    *out = usm::subspace_preserving_rate(
        coeff->data,
        std::vector<int>(truth, truth + coeff->data.rows()));
  });
}

usm_status usm_gen_subspace_data(const usm_subspace_config* cfg,
                                 usm_matrix** points_out, int* labels_out) {
  if (!cfg || !points_out || !labels_out || !cfg->sub_dims ||
      !cfg->points_per_subspace || cfg->subspace_count < 1)
    return invalid("usm_gen_subspace_data: bad args");
  return guarded([&] {
    usm::SubspacePhantomConfig c;
    c.subspace_count = cfg->subspace_count;
    c.ambient_dim = cfg->ambient_dim;
    c.sub_dims.assign(cfg->sub_dims, cfg->sub_dims + cfg->subspace_count);
    c.points_per_subspace.assign(cfg->points_per_subspace,
                                 cfg->points_per_subspace + cfg->subspace_count);
    c.noise_sigma = cfg->noise_sigma;
    c.orthogonal_bases = cfg->orthogonal_bases != 0;
    c.seed = cfg->seed;
    usm::SubspacePhantom phantom = usm::gen_subspace_data(c);
    std::memcpy(labels_out, phantom.labels.data(),
                phantom.labels.size() * sizeof(int));
    *points_out = new usm_matrix{std::move(phantom.points)};
  });
}

void usm_image_phantom_spec_default(usm_image_phantom_spec* spec) {
  if (!spec) return;
  const usm::ImagePhantomSpec d;
  *spec = {d.height, d.width, d.organ_count, d.aorta_cx, d.aorta_cy,
           d.aorta_radius, d.aorta_intensity, d.plaque_count, d.plaque_radius,
           d.plaque_contrast, d.remap_x, d.remap_y, d.vessel_contrast_delta,
           d.seed};
}

usm_status usm_gen_ct_phantom_pair(const usm_image_phantom_spec* spec,
                                   usm_matrix** img_a_out,
                                   usm_matrix** img_b_out, int* sites_xy_out) {
  if (!spec || !img_a_out || !img_b_out ||
      (spec->plaque_count > 0 && !sites_xy_out))
    return invalid("usm_gen_ct_phantom_pair: bad args");
  return guarded([&] {
    usm::ImagePhantomSpec s;
    s.height = spec->height;
    s.width = spec->width;
    s.organ_count = spec->organ_count;
    s.aorta_cx = spec->aorta_cx;
    s.aorta_cy = spec->aorta_cy;
    s.aorta_radius = spec->aorta_radius;
    s.aorta_intensity = spec->aorta_intensity;
    s.plaque_count = spec->plaque_count;
    s.plaque_radius = spec->plaque_radius;
    s.plaque_contrast = spec->plaque_contrast;
    s.remap_x = spec->remap_x;
    s.remap_y = spec->remap_y;
    s.vessel_contrast_delta = spec->vessel_contrast_delta;
    s.seed = spec->seed;
    usm::CtPhantomPair pair = usm::gen_ct_phantom_pair(s);
    for (size_t i = 0; i < pair.plaque_sites.size(); ++i) {
      sites_xy_out[2 * i] = pair.plaque_sites[i].x;
      sites_xy_out[2 * i + 1] = pair.plaque_sites[i].y;
    }
    *img_a_out = new usm_matrix{std::move(pair.img_a.pixels)};
    *img_b_out = new usm_matrix{std::move(pair.img_b.pixels)};
  });
}

usm_status usm_model_init(const usm_matrix* data_a, const usm_matrix* data_b,
                          int latent_dim, int activation, usm_model** out) {
  if (!data_a || !data_b || !out) return invalid("usm_model_init: bad args");
  return guarded([&] {
    *out = new usm_model{usm::init_model(data_a->data, data_b->data, latent_dim,
                                         to_activation(activation))};
  });
}

void usm_model_free(usm_model* m) { delete m; }
int usm_model_patch_dim(const usm_model* m) {
  return m ? m->model.patch_dim() : 0;
}
int usm_model_latent_dim(const usm_model* m) {
  return m ? m->model.latent_dim() : 0;
}

usm_status usm_model_read_file(const char* path, usm_model** out) {
  if (!path || !out) return invalid("usm_model_read_file: bad args");
  return guarded([&] { *out = new usm_model{usm::read_model_file(path)}; });
}

usm_status usm_model_write_file(const usm_model* m, const char* path) {
  if (!m || !path) return invalid("usm_model_write_file: bad args");
  return guarded([&] { usm::write_model_file(path, m->model); });
}

void usm_train_config_default(usm_train_config* cfg) {
  if (!cfg) return;
  const usm::TrainConfig d;
  cfg->learning_rate = d.learning_rate;
  cfg->steps = d.steps;
  cfg->w_rec = d.weights.rec;
  cfg->w_cyc = d.weights.cyc;
  cfg->w_se = d.weights.se;
  cfg->c_refresh_period = d.c_refresh_period;
  usm_solver_config_default(&cfg->solver);
  cfg->batch = d.batch;
  cfg->seed = d.seed;
}

usm_status usm_train(usm_model* model, const usm_matrix* data_a,
                     const usm_matrix* data_b, const usm_train_config* cfg,
                     usm_matrix** history_out, int* solver_invocations_out) {
  if (!model || !data_a || !data_b || !cfg) return invalid("usm_train: bad args");
  return guarded([&] {
    usm::TrainConfig c;
    c.learning_rate = cfg->learning_rate;
    c.steps = cfg->steps;
    c.weights = {cfg->w_rec, cfg->w_cyc, cfg->w_se};
    c.c_refresh_period = cfg->c_refresh_period;
    c.solver = to_solver_config(cfg->solver);
    c.batch = cfg->batch;
    c.seed = cfg->seed;
    usm::TrainResult result =
        usm::train(model->model, data_a->data, data_b->data, c);
    model->model = std::move(result.model);
    if (history_out) {
      usm::Mat h(static_cast<Eigen::Index>(result.history.size()), 6);
      for (size_t i = 0; i < result.history.size(); ++i) {
        const usm::LossBreakdown& l = result.history[i];
        h.row(static_cast<Eigen::Index>(i)) << l.rec_a, l.rec_b, l.cyc_a,
            l.cyc_b, l.se, l.total;
      }
      *history_out = new usm_matrix{std::move(h)};
    }
    if (solver_invocations_out)
      *solver_invocations_out = result.solver_invocations;
  });
}

usm_status usm_translate(const usm_model* model, char from, char to,
                         const usm_matrix* patches, usm_matrix** out) {
  if (!model || !patches || !out || (from != 'a' && from != 'b') ||
      (to != 'a' && to != 'b'))
    return invalid("usm_translate: bad args");
  return guarded([&] {
    *out = new usm_matrix{usm::translate(
        model->model, from == 'a' ? usm::Domain::A : usm::Domain::B,
        to == 'a' ? usm::Domain::A : usm::Domain::B, patches->data)};
  });
}

usm_status usm_dot_recall(const usm_matrix* img, const int* sites_xy,
                          int64_t site_count, int radius, double min_contrast,
                          double* recall_out, int* hits_out) {
  if (!img || (site_count > 0 && !sites_xy) || site_count < 0 || !recall_out)
    return invalid("usm_dot_recall: bad args");
  return guarded([&] {
    std::vector<usm::PixelCoord> sites;
    sites.reserve(static_cast<size_t>(site_count));
    for (int64_t i = 0; i < site_count; ++i)
      sites.push_back({sites_xy[2 * i], sites_xy[2 * i + 1]});
    const usm::DotMetrics m =
        usm::dot_recall(usm::ImageGrid{img->data}, sites, radius, min_contrast);
    *recall_out = m.recall;
    if (hits_out) *hits_out = m.hits;
  });
}

usm_status usm_global_mse(const usm_matrix* a, const usm_matrix* b, double* out) {
  if (!a || !b || !out) return invalid("usm_global_mse: bad args");
  return guarded([&] {
    *out = usm::global_mse(usm::ImageGrid{a->data}, usm::ImageGrid{b->data});
  });
}

}  // extern "C"
