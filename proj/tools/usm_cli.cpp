// Command-line driver wiring phantom generation, the self-expressive solver,
// clustering, translator training and evaluation into reproducible runs.
// Talks to the core exclusively through the C API in usm.h.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "usm.h"

namespace {

namespace fs = std::filesystem;

class CliError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void check(usm_status status) {
  if (status != USM_OK) throw CliError(usm_last_error_message());
}

struct MatrixDeleter {
  void operator()(usm_matrix* m) const { usm_matrix_free(m); }
};
struct ModelDeleter {
  void operator()(usm_model* m) const { usm_model_free(m); }
};
struct ReportDeleter {
  void operator()(usm_solve_report* r) const { usm_solve_report_free(r); }
};
using MatrixPtr = std::unique_ptr<usm_matrix, MatrixDeleter>;
using ModelPtr = std::unique_ptr<usm_model, ModelDeleter>;
using ReportPtr = std::unique_ptr<usm_solve_report, ReportDeleter>;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw CliError("cannot open " + path + " for writing");
  return os;
}

usmtool::RunConfig load_config(const std::string& path) {
  if (path.empty()) return usmtool::RunConfig{};
  return usmtool::parse_config_file(path);
}

// ---- gen-phantom ----

void gen_phantom_ct(const usmtool::RunConfig& cfg, const std::string& out_dir,
                    std::uint64_t seed) {
  usm_image_phantom_spec spec = cfg.image;
  spec.seed = seed;
  std::vector<int> sites(static_cast<size_t>(2 * std::max(1, spec.plaque_count)));
  usm_matrix *a = nullptr, *b = nullptr;
  check(usm_gen_ct_phantom_pair(&spec, &a, &b, sites.data()));
  MatrixPtr img_a(a), img_b(b);
  check(usm_image_write_pgm(img_a.get(), (fs::path(out_dir) / "img_a.pgm").string().c_str()));
  check(usm_image_write_pgm(img_b.get(), (fs::path(out_dir) / "img_b.pgm").string().c_str()));
  std::ofstream os = open_out((fs::path(out_dir) / "sites.csv").string());
  os << "x,y\n";
  for (int i = 0; i < spec.plaque_count; ++i)
    os << sites[static_cast<size_t>(2 * i)] << ","
       << sites[static_cast<size_t>(2 * i + 1)] << "\n";
}

void gen_phantom_subspace(const usmtool::RunConfig& cfg,
                          const std::string& out_dir, std::uint64_t seed) {
  usm_subspace_config sc{};
  sc.subspace_count = cfg.subspace_count;
  sc.ambient_dim = cfg.ambient_dim;
  sc.sub_dims = cfg.sub_dims.data();
  sc.points_per_subspace = cfg.points_per_subspace.data();
  sc.noise_sigma = cfg.noise_sigma;
  sc.orthogonal_bases = cfg.orthogonal ? 1 : 0;
  sc.seed = seed;
  int total = 0;
  for (int n : cfg.points_per_subspace) total += n;
  std::vector<int> labels(static_cast<size_t>(total));
  usm_matrix* z = nullptr;
  check(usm_gen_subspace_data(&sc, &z, labels.data()));
  MatrixPtr points(z);
  check(usm_matrix_write_file(points.get(), (fs::path(out_dir) / "Z.usm").string().c_str()));
  std::ofstream os = open_out((fs::path(out_dir) / "labels.csv").string());
  os << "label\n";
  for (int v : labels) os << v << "\n";
}

int cmd_gen_phantom(const std::string& kind, const std::string& config_path,
                    const std::string& out_dir, std::uint64_t seed) {
  const usmtool::RunConfig cfg = load_config(config_path);
  fs::create_directories(out_dir);
  if (kind == "ct")
    gen_phantom_ct(cfg, out_dir, seed);
  else
    gen_phantom_subspace(cfg, out_dir, seed);
  return 0;
}

// ---- solve-c ----

int cmd_solve_c(const std::string& input, usm_solver_config solver,
                const std::string& out, const std::string& report_path) {
  usm_matrix* zin = nullptr;
  check(usm_matrix_read_file(input.c_str(), &zin));
  MatrixPtr z(zin);
  solver.track_objectives = report_path.empty() ? 0 : 1;
  usm_matrix* cout_ = nullptr;
  usm_solve_report* rep = nullptr;
  check(usm_solve_self_expressive(z.get(), &solver, &cout_, &rep));
  MatrixPtr coeff(cout_);
  ReportPtr report(rep);
  check(usm_matrix_write_file(coeff.get(), out.c_str()));
  if (!report_path.empty()) {
    std::ofstream os = open_out(report_path);
    os << "iter,res_a,res_b,objective\n";
    const int it = usm_solve_report_iterations(report.get());
    for (int i = 0; i < it; ++i)
      os << i << "," << fmt(usm_solve_report_res_a(report.get(), i)) << ","
         << fmt(usm_solve_report_res_b(report.get(), i)) << ","
         << fmt(usm_solve_report_objective_at(report.get(), i)) << "\n";
  }
  if (!usm_solve_report_converged(report.get()))
    std::cerr << "solve-c: max_iter reached without convergence\n";
  return 0;
}

// ---- cluster ----

int cmd_cluster(const std::string& coeff_path, int k, std::uint64_t seed,
                const std::string& out) {
  usm_matrix* cin = nullptr;
  check(usm_matrix_read_file(coeff_path.c_str(), &cin));
  MatrixPtr coeff(cin);
  usm_matrix* wout = nullptr;
  check(usm_build_affinity(coeff.get(), &wout));
  MatrixPtr w(wout);
  std::vector<int> labels(static_cast<size_t>(usm_matrix_rows(w.get())));
  check(usm_spectral_cluster(w.get(), k, seed, labels.data()));
  std::ofstream os = open_out(out);
  os << "label\n";
  for (int v : labels) os << v << "\n";
  return 0;
}

// ---- train ----

MatrixPtr load_domain_patches(const std::string& dir, int patch_size, int stride) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw CliError("no .pgm images in " + dir);

  std::vector<MatrixPtr> blocks;
  int64_t rows = 0, cols = 0;
  for (const fs::path& f : files) {
    usm_matrix* img = nullptr;
    check(usm_image_read_pgm(f.string().c_str(), &img));
    MatrixPtr image(img);
    usm_matrix* p = nullptr;
    check(usm_extract_patches(image.get(), patch_size, stride, &p));
    blocks.emplace_back(p);
    rows = usm_matrix_rows(p);
    cols += usm_matrix_cols(p);
  }
  usm_matrix* all = nullptr;
  check(usm_matrix_create(rows, cols, &all));
  MatrixPtr data(all);
  int64_t at = 0;
  for (const MatrixPtr& block : blocks) {
    const int64_t bc = usm_matrix_cols(block.get());
    for (int64_t c = 0; c < bc; ++c, ++at)
      for (int64_t r = 0; r < rows; ++r) {
        double v = 0.0;
        check(usm_matrix_get(block.get(), r, c, &v));
        check(usm_matrix_set(data.get(), r, at, v));
      }
  }
  return data;
}

int cmd_train(const std::string& dir_a, const std::string& dir_b,
              const std::string& config_path, const std::string& out,
              const std::string& log_path, std::uint64_t seed) {
  const usmtool::RunConfig cfg = load_config(config_path);
  MatrixPtr data_a = load_domain_patches(dir_a, cfg.patch_size, cfg.stride);
  MatrixPtr data_b = load_domain_patches(dir_b, cfg.patch_size, cfg.stride);

  usm_model* m = nullptr;
  check(usm_model_init(data_a.get(), data_b.get(), cfg.latent_dim,
                       cfg.activation == "tanh" ? USM_ACTIVATION_TANH
                                                : USM_ACTIVATION_NONE,
                       &m));
  ModelPtr model(m);

  usm_train_config tc = cfg.train;
  tc.seed = seed;
  usm_matrix* hist = nullptr;
  check(usm_train(model.get(), data_a.get(), data_b.get(), &tc, &hist, nullptr));
  MatrixPtr history(hist);

  check(usm_model_write_file(model.get(), out.c_str()));
  if (!log_path.empty()) {
    std::ofstream os = open_out(log_path);
    os << "step,rec_a,rec_b,cyc_a,cyc_b,se,total\n";
    for (int64_t i = 0; i < usm_matrix_rows(history.get()); ++i) {
      os << (i + 1);
      for (int64_t j = 0; j < 6; ++j) {
        double v = 0.0;
        check(usm_matrix_get(history.get(), i, j, &v));
        os << "," << fmt(v);
      }
      os << "\n";
    }
  }
  return 0;
}

// ---- translate ----

int cmd_translate(const std::string& model_path, const std::string& from,
                  const std::string& to, const std::string& input,
                  const std::string& out) {
  usm_model* m = nullptr;
  check(usm_model_read_file(model_path.c_str(), &m));
  ModelPtr model(m);
  const int p = usm_model_patch_dim(model.get());
  int patch_size = 1;
  while (patch_size * patch_size < p) ++patch_size;
  if (patch_size * patch_size != p)
    throw CliError("model patch dimension is not a square");

  usm_matrix* img = nullptr;
  check(usm_image_read_pgm(input.c_str(), &img));
  MatrixPtr image(img);
  const int height = static_cast<int>(usm_matrix_rows(image.get()));
  const int width = static_cast<int>(usm_matrix_cols(image.get()));

  usm_matrix* patches = nullptr;
  check(usm_extract_patches(image.get(), patch_size, patch_size, &patches));
  MatrixPtr x(patches);
  usm_matrix* translated = nullptr;
  check(usm_translate(model.get(), from[0], to[0], x.get(), &translated));
  MatrixPtr y(translated);
  usm_matrix* assembled = nullptr;
  check(usm_assemble_patches(y.get(), patch_size, patch_size, height, width,
                             &assembled));
  MatrixPtr result(assembled);
  check(usm_image_write_pgm(result.get(), out.c_str()));
  return 0;
}

// ---- eval ----

std::vector<int> read_sites_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw CliError("cannot open " + path);
  std::vector<int> xy;
  std::string line;
  bool first = true;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("x,", 0) == 0) continue;  // header row
    }
    const size_t comma = line.find(',');
    if (comma == std::string::npos)
      throw CliError("sites csv line " + std::to_string(line_no) + ": expected x,y");
    try {
      xy.push_back(std::stoi(line.substr(0, comma)));
      xy.push_back(std::stoi(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw CliError("sites csv line " + std::to_string(line_no) + ": bad integer");
    }
  }
  return xy;
}

int cmd_eval(const std::string& pred_path, const std::string& sites_path,
             const std::string& truth_path, const std::string& out,
             const std::string& config_path) {
  const usmtool::RunConfig cfg = load_config(config_path);
  usm_matrix* p = nullptr;
  check(usm_image_read_pgm(pred_path.c_str(), &p));
  MatrixPtr pred(p);
  const std::vector<int> sites = read_sites_csv(sites_path);

  double recall = 0.0;
  int hits = 0;
  check(usm_dot_recall(pred.get(), sites.data(),
                       static_cast<int64_t>(sites.size() / 2), cfg.radius,
                       cfg.min_contrast, &recall, &hits));

  std::ofstream os = open_out(out);
  os << "metric,value\n";
  os << "dot_recall," << fmt(recall) << "\n";
  os << "hits," << hits << "\n";
  os << "total," << sites.size() / 2 << "\n";
  if (!truth_path.empty()) {
    usm_matrix* t = nullptr;
    check(usm_image_read_pgm(truth_path.c_str(), &t));
    MatrixPtr truth(t);
    double mse = 0.0;
    check(usm_global_mse(pred.get(), truth.get(), &mse));
    os << "global_mse," << fmt(mse) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Union-of-subspaces self-expressive translation toolkit"};
  app.require_subcommand(1);

  // gen-phantom
  std::string gp_kind, gp_config, gp_out;
  std::uint64_t gp_seed = 0;
  CLI::App* gen = app.add_subcommand("gen-phantom", "Generate synthetic data");
  gen->add_option("--kind", gp_kind, "subspace or ct")
      ->required()
      ->check(CLI::IsMember({"subspace", "ct"}));
  gen->add_option("--config", gp_config, "run configuration file");
  gen->add_option("--out", gp_out, "output directory")->required();
  gen->add_option("--seed", gp_seed, "RNG seed");

  // solve-c
  std::string sc_input, sc_out, sc_report;
  usm_solver_config sc_solver;
  usm_solver_config_default(&sc_solver);
  CLI::App* solve = app.add_subcommand("solve-c", "Solve for the coefficient matrix");
  solve->add_option("--input", sc_input, "latent matrix, USM1")->required();
  solve->add_option("--lambda", sc_solver.lambda, "nuclear-norm weight");
  solve->add_option("--mu", sc_solver.mu, "data-fidelity penalty");
  solve->add_option("--rho", sc_solver.rho, "ADMM penalty");
  solve->add_option("--tol", sc_solver.tol, "residual tolerance");
  solve->add_option("--max-iter", sc_solver.max_iter, "iteration cap");
  solve->add_option("--normalize", sc_solver.normalize_columns,
                    "normalize input columns (0/1)");
  solve->add_option("--out", sc_out, "coefficient matrix, USM1")->required();
  solve->add_option("--report", sc_report, "per-iteration CSV report");

  // cluster
  std::string cl_coeff, cl_out;
  int cl_k = 2;
  std::uint64_t cl_seed = 0;
  CLI::App* cluster = app.add_subcommand("cluster", "Spectral clustering of C");
  cluster->add_option("--coeff", cl_coeff, "coefficient matrix, USM1")->required();
  cluster->add_option("--k", cl_k, "cluster count")->required();
  cluster->add_option("--seed", cl_seed, "RNG seed");
  cluster->add_option("--out", cl_out, "labels CSV")->required();

  // train
  std::string tr_a, tr_b, tr_config, tr_out, tr_log;
  std::uint64_t tr_seed = 0;
  CLI::App* train = app.add_subcommand("train", "Train the two-domain translator");
  train->add_option("--domain-a", tr_a, "directory of domain-A PGM images")->required();
  train->add_option("--domain-b", tr_b, "directory of domain-B PGM images")->required();
  train->add_option("--config", tr_config, "run configuration file");
  train->add_option("--out", tr_out, "model checkpoint path")->required();
  train->add_option("--log", tr_log, "loss history CSV");
  train->add_option("--seed", tr_seed, "RNG seed");

  // translate
  std::string x_model, x_from, x_to, x_input, x_out;
  CLI::App* translate = app.add_subcommand("translate", "Translate an image");
  translate->add_option("--model", x_model, "model checkpoint")->required();
  translate->add_option("--from", x_from)->required()->check(CLI::IsMember({"a", "b"}));
  translate->add_option("--to", x_to)->required()->check(CLI::IsMember({"a", "b"}));
  translate->add_option("--input", x_input, "input PGM")->required();
  translate->add_option("--out", x_out, "output PGM")->required();

  // eval
  std::string ev_pred, ev_sites, ev_truth, ev_out, ev_config;
  CLI::App* eval = app.add_subcommand("eval", "Small-structure metrics");
  eval->add_option("--pred", ev_pred, "image to evaluate, PGM")->required();
  eval->add_option("--sites", ev_sites, "plaque sites CSV")->required();
  eval->add_option("--truth", ev_truth, "reference image for MSE, PGM");
  eval->add_option("--out", ev_out, "metrics CSV")->required();
  eval->add_option("--config", ev_config, "run configuration file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_gen_phantom(gp_kind, gp_config, gp_out, gp_seed);
    if (solve->parsed()) return cmd_solve_c(sc_input, sc_solver, sc_out, sc_report);
    if (cluster->parsed()) return cmd_cluster(cl_coeff, cl_k, cl_seed, cl_out);
    if (train->parsed()) return cmd_train(tr_a, tr_b, tr_config, tr_out, tr_log, tr_seed);
    if (translate->parsed()) return cmd_translate(x_model, x_from, x_to, x_input, x_out);
    if (eval->parsed()) return cmd_eval(ev_pred, ev_sites, ev_truth, ev_out, ev_config);
  } catch (const usmtool::ConfigParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
