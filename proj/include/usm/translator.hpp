#ifndef USM_TRANSLATOR_HPP_
#define USM_TRANSLATOR_HPP_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "usm/selfexpress.hpp"

namespace usm {

enum class Activation { None, Tanh };
enum class Domain { A, B };

struct AffineMap {
  Mat weight;
  Vec bias;
};

// Shared-latent two-domain patch translator: encoders E1/E2 (p -> d, optional
// tanh at the output) and decoders G1/G2 (d -> p, affine).
struct TranslatorModel {
  AffineMap enc_a, enc_b;  // d x p weights
  AffineMap dec_a, dec_b;  // p x d weights
  Activation activation = Activation::None;

  int patch_dim() const { return static_cast<int>(dec_a.weight.rows()); }
  int latent_dim() const { return static_cast<int>(enc_a.weight.rows()); }
};

struct LossWeights {
  double rec = 1.0;
  double cyc = 1.0;
  double se = 0.1;
};

struct LossBreakdown {
  double rec_a = 0.0, rec_b = 0.0;
  double cyc_a = 0.0, cyc_b = 0.0;
  double se = 0.0;
  double total = 0.0;
};

// Gradients mirror the model layout.
struct ModelGradient {
  AffineMap enc_a, enc_b, dec_a, dec_b;
};

struct TrainConfig {
  double learning_rate = 0.05;
  int steps = 2000;
  LossWeights weights;
  int c_refresh_period = 25;  // gradient steps between ADMM refreshes
  SolverConfig solver;
  int batch = 128;  // patches per domain per step
  std::uint64_t seed = 0;
};

struct TrainResult {
  TranslatorModel model;
  std::vector<LossBreakdown> history;
  int solver_invocations = 0;
};

Mat encode(const TranslatorModel& model, Domain domain, const Mat& patches);
Mat decode(const TranslatorModel& model, Domain domain, const Mat& codes);
Mat translate(const TranslatorModel& model, Domain from, Domain to,
              const Mat& patches);

// Reconstruction + cycle + self-expressive losses, each normalized by its
// element count. C couples the pooled codes [E1(Xa) | E2(Xb)] and is treated
// as a constant.
LossBreakdown total_loss(const TranslatorModel& model, const Mat& xa,
                         const Mat& xb, const Mat& c, const LossWeights& w);

// Hand-derived reverse-mode gradient of total_loss.
ModelGradient loss_gradient(const TranslatorModel& model, const Mat& xa,
                            const Mat& xb, const Mat& c, const LossWeights& w);

// Deterministic start: per-domain top-d left singular vectors of (up to) the
// first 512 data columns, E = U^T, G = U, zero biases.
TranslatorModel init_model(const Mat& data_a, const Mat& data_b, int latent_dim,
                           Activation activation);

// Alternating minimization: plain gradient descent on the model with the
// coefficient matrix refreshed by a full ADMM solve every c_refresh_period
// steps on a frozen anchor batch.
TrainResult train(TranslatorModel model, const Mat& data_a, const Mat& data_b,
                  const TrainConfig& cfg);

// Checkpoint format "USMMODEL1".
void write_model(std::ostream& os, const TranslatorModel& model);
TranslatorModel read_model(std::istream& is);
void write_model_file(const std::string& path, const TranslatorModel& model);
TranslatorModel read_model_file(const std::string& path);

}  // namespace usm

#endif  // USM_TRANSLATOR_HPP_
