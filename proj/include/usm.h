/* C API for the usm library: self-expressive subspace coefficients, spectral
 * clustering, patch-based two-domain translation, and synthetic phantoms.
 *
 * All functions return usm_status; output handles must be released with the
 * matching usm_*_free. On failure, usm_last_error_message() describes the
 * error for the calling thread. */
#ifndef USM_H_
#define USM_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum usm_status {
  USM_OK = 0,
  USM_ERR_INVALID_ARGUMENT = 1,
  USM_ERR_NON_CONVERGENCE = 2,
  USM_ERR_NOT_SYMMETRIC = 3,
  USM_ERR_NOT_POSITIVE_DEFINITE = 4,
  USM_ERR_DIMENSION_MISMATCH = 5,
  USM_ERR_GEOMETRY_MISMATCH = 6,
  USM_ERR_PLACEMENT_FAILURE = 7,
  USM_ERR_DEGENERATE_AFFINITY = 8,
  USM_ERR_DEGENERATE_COEFFICIENTS = 9,
  USM_ERR_LENGTH_MISMATCH = 10,
  USM_ERR_OUT_OF_BOUNDS = 11,
  USM_ERR_NON_FINITE_LOSS = 12,
  USM_ERR_PARSE = 13,
  USM_ERR_IO = 14,
  USM_ERR_INTERNAL = 15
} usm_status;

const char* usm_last_error_message(void);

/* ---- dense matrices (also used for images, height x width) ---- */

typedef struct usm_matrix usm_matrix;

usm_status usm_matrix_create(int64_t rows, int64_t cols, usm_matrix** out);
void usm_matrix_free(usm_matrix* m);
int64_t usm_matrix_rows(const usm_matrix* m);
int64_t usm_matrix_cols(const usm_matrix* m);
usm_status usm_matrix_get(const usm_matrix* m, int64_t row, int64_t col,
                          double* out);
usm_status usm_matrix_set(usm_matrix* m, int64_t row, int64_t col, double value);

/* USM1 file format. */
usm_status usm_matrix_read_file(const char* path, usm_matrix** out);
usm_status usm_matrix_write_file(const usm_matrix* m, const char* path);

/* Plain-text PGM (P2, maxval 65535); intensities in [0,1]. */
usm_status usm_image_read_pgm(const char* path, usm_matrix** out);
usm_status usm_image_write_pgm(const usm_matrix* img, const char* path);

/* ---- patch grids ---- */

usm_status usm_extract_patches(const usm_matrix* img, int patch_size, int stride,
                               usm_matrix** out);
usm_status usm_assemble_patches(const usm_matrix* patches, int patch_size,
                                int stride, int height, int width,
                                usm_matrix** out);

/* ---- self-expressive solver ---- */

typedef struct usm_solver_config {
  double lambda;   /* nuclear-norm weight, >= 0 */
  double mu;       /* data-fidelity penalty, > 0 */
  double rho;      /* ADMM penalty, > 0 */
  double tol;
  int max_iter;
  int normalize_columns; /* nonzero = normalize input columns */
  int track_objectives;  /* nonzero = record the objective every iteration */
} usm_solver_config;

void usm_solver_config_default(usm_solver_config* cfg);

typedef struct usm_solve_report usm_solve_report;

usm_status usm_solve_self_expressive(const usm_matrix* z,
                                     const usm_solver_config* cfg,
                                     usm_matrix** coeff_out,
                                     usm_solve_report** report_out);
void usm_solve_report_free(usm_solve_report* r);
int usm_solve_report_iterations(const usm_solve_report* r);
int usm_solve_report_converged(const usm_solve_report* r);
double usm_solve_report_objective(const usm_solve_report* r);
double usm_solve_report_res_a(const usm_solve_report* r, int iter);
double usm_solve_report_res_b(const usm_solve_report* r, int iter);
/* Valid only when track_objectives was set; -1 otherwise. */
double usm_solve_report_objective_at(const usm_solve_report* r, int iter);

/* ---- clustering ---- */

usm_status usm_build_affinity(const usm_matrix* coeff, usm_matrix** out);
/* labels_out must hold usm_matrix_rows(w) ints. */
usm_status usm_spectral_cluster(const usm_matrix* w, int k, uint64_t seed,
                                int* labels_out);
usm_status usm_clustering_error(const int* pred, const int* truth, int64_t n,
                                double* out);
usm_status usm_subspace_preserving_rate(const usm_matrix* coeff,
                                        const int* truth, double* out);

/* ---- phantoms ---- */

typedef struct usm_subspace_config {
  int subspace_count;
  int ambient_dim;
  const int* sub_dims;            /* subspace_count entries */
  const int* points_per_subspace; /* subspace_count entries */
  double noise_sigma;
  int orthogonal_bases;
  uint64_t seed;
} usm_subspace_config;

/* labels_out must hold sum(points_per_subspace) ints. */
usm_status usm_gen_subspace_data(const usm_subspace_config* cfg,
                                 usm_matrix** points_out, int* labels_out);

typedef struct usm_image_phantom_spec {
  int height, width;
  int organ_count;
  int aorta_cx, aorta_cy, aorta_radius;
  double aorta_intensity;
  int plaque_count;
  int plaque_radius;
  double plaque_contrast;
  double remap_x, remap_y;
  double vessel_contrast_delta;
  uint64_t seed;
} usm_image_phantom_spec;

void usm_image_phantom_spec_default(usm_image_phantom_spec* spec);

/* sites_xy_out must hold 2*plaque_count ints, filled as x0,y0,x1,y1,... */
usm_status usm_gen_ct_phantom_pair(const usm_image_phantom_spec* spec,
                                   usm_matrix** img_a_out,
                                   usm_matrix** img_b_out, int* sites_xy_out);

/* ---- translator ---- */

typedef struct usm_model usm_model;

#define USM_ACTIVATION_NONE 0
#define USM_ACTIVATION_TANH 1

usm_status usm_model_init(const usm_matrix* data_a, const usm_matrix* data_b,
                          int latent_dim, int activation, usm_model** out);
void usm_model_free(usm_model* m);
int usm_model_patch_dim(const usm_model* m);
int usm_model_latent_dim(const usm_model* m);
usm_status usm_model_read_file(const char* path, usm_model** out);
usm_status usm_model_write_file(const usm_model* m, const char* path);

typedef struct usm_train_config {
  double learning_rate;
  int steps;
  double w_rec, w_cyc, w_se;
  int c_refresh_period;
  usm_solver_config solver;
  int batch;
  uint64_t seed;
} usm_train_config;

void usm_train_config_default(usm_train_config* cfg);

/* Trains the model in place. history_out (optional) receives a steps x 6
 * matrix with columns rec_a, rec_b, cyc_a, cyc_b, se, total. */
usm_status usm_train(usm_model* model, const usm_matrix* data_a,
                     const usm_matrix* data_b, const usm_train_config* cfg,
                     usm_matrix** history_out, int* solver_invocations_out);

/* from/to are 'a' or 'b'; patches are columns. */
usm_status usm_translate(const usm_model* model, char from, char to,
                         const usm_matrix* patches, usm_matrix** out);

/* ---- evaluation ---- */

usm_status usm_dot_recall(const usm_matrix* img, const int* sites_xy,
                          int64_t site_count, int radius, double min_contrast,
                          double* recall_out, int* hits_out);
usm_status usm_global_mse(const usm_matrix* a, const usm_matrix* b,
                          double* out);

#ifdef __cplusplus
}
#endif

#endif /* USM_H_ */
