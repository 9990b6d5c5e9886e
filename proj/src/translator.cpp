#include "usm/translator.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <string>

#include "usm/io.hpp"
#include "usm/rng.hpp"

namespace usm {

namespace {

Mat affine_forward(const AffineMap& map, const Mat& in) {
  return (map.weight * in).colwise() + map.bias;
}

Mat activate(Activation act, const Mat& pre) {
  if (act == Activation::Tanh) return pre.array().tanh();
  return pre;
}

void check_patch_input(const TranslatorModel& model, const Mat& x) {
  if (x.rows() != model.patch_dim())
    fail(ErrorCode::DimensionMismatch,
         "translator: expected " + std::to_string(model.patch_dim()) +
             " rows, got " + std::to_string(x.rows()));
}

const AffineMap& encoder(const TranslatorModel& m, Domain d) {
  return d == Domain::A ? m.enc_a : m.enc_b;
}
const AffineMap& decoder(const TranslatorModel& m, Domain d) {
  return d == Domain::A ? m.dec_a : m.dec_b;
}

AffineMap zero_like(const AffineMap& map) {
  return {Mat::Zero(map.weight.rows(), map.weight.cols()),
          Vec::Zero(map.bias.size())};
}

// dY -> parameter gradients and dIn for an affine layer.
Mat affine_backward(AffineMap& grad, const AffineMap& map, const Mat& in,
                    const Mat& d_out) {
  grad.weight.noalias() += d_out * in.transpose();
  grad.bias.noalias() += d_out.rowwise().sum();
  return map.weight.transpose() * d_out;
}

// dZ (post-activation) -> dPre for the encoder output nonlinearity.
Mat activation_backward(Activation act, const Mat& z, const Mat& d_z) {
  if (act == Activation::Tanh)
    return d_z.array() * (1.0 - z.array().square());
  return d_z;
}

}  // namespace

Mat encode(const TranslatorModel& model, Domain domain, const Mat& patches) {
  check_patch_input(model, patches);
  return activate(model.activation, affine_forward(encoder(model, domain), patches));
}

Mat decode(const TranslatorModel& model, Domain domain, const Mat& codes) {
  if (codes.rows() != model.latent_dim())
    fail(ErrorCode::DimensionMismatch, "decode: latent dimension mismatch");
  return affine_forward(decoder(model, domain), codes);
}

Mat translate(const TranslatorModel& model, Domain from, Domain to,
              const Mat& patches) {
  return decode(model, to, encode(model, from, patches));
}

LossBreakdown total_loss(const TranslatorModel& model, const Mat& xa,
                         const Mat& xb, const Mat& c, const LossWeights& w) {
  check_patch_input(model, xa);
  check_patch_input(model, xb);
  const double p = static_cast<double>(model.patch_dim());
  const double d = static_cast<double>(model.latent_dim());
  const double na = static_cast<double>(xa.cols());
  const double nb = static_cast<double>(xb.cols());

  LossBreakdown out;
  const Mat za = encode(model, Domain::A, xa);
  const Mat zb = encode(model, Domain::B, xb);
  out.rec_a = (xa - decode(model, Domain::A, za)).squaredNorm() / (p * na);
  out.rec_b = (xb - decode(model, Domain::B, zb)).squaredNorm() / (p * nb);
  out.cyc_a = (xa - decode(model, Domain::A,
                           encode(model, Domain::B, decode(model, Domain::B, za))))
                  .squaredNorm() /
              (p * na);
  out.cyc_b = (xb - decode(model, Domain::B,
                           encode(model, Domain::A, decode(model, Domain::A, zb))))
                  .squaredNorm() /
              (p * nb);
  if (w.se != 0.0) {
    if (c.rows() != c.cols() || c.rows() != za.cols() + zb.cols())
      fail(ErrorCode::DimensionMismatch, "total_loss: C size mismatch");
    Mat z(za.rows(), za.cols() + zb.cols());
    z << za, zb;
    out.se = (z - z * c).squaredNorm() / (d * (na + nb));
  }
  out.total = w.rec * (out.rec_a + out.rec_b) + w.cyc * (out.cyc_a + out.cyc_b) +
              w.se * out.se;
  return out;
}

ModelGradient loss_gradient(const TranslatorModel& model, const Mat& xa,
                            const Mat& xb, const Mat& c, const LossWeights& w) {
  check_patch_input(model, xa);
  check_patch_input(model, xb);
  const double p = static_cast<double>(model.patch_dim());
  const double d = static_cast<double>(model.latent_dim());
  const Activation act = model.activation;

  ModelGradient g{zero_like(model.enc_a), zero_like(model.enc_b),
                  zero_like(model.dec_a), zero_like(model.dec_b)};

  auto rec_term = [&](const Mat& x, const AffineMap& enc, const AffineMap& dec,
                      AffineMap& g_enc, AffineMap& g_dec) {
    const double n = static_cast<double>(x.cols());
    const Mat z = activate(act, affine_forward(enc, x));
    const Mat y = affine_forward(dec, z);
    const Mat d_y = (w.rec * 2.0 / (p * n)) * (y - x);
    const Mat d_z = affine_backward(g_dec, dec, z, d_y);
    affine_backward(g_enc, enc, x, activation_backward(act, z, d_z));
  };
  auto cyc_term = [&](const Mat& x, const AffineMap& enc1, const AffineMap& dec2,
                      const AffineMap& enc2, const AffineMap& dec1,
                      AffineMap& g_enc1, AffineMap& g_dec2, AffineMap& g_enc2,
                      AffineMap& g_dec1) {
    const double n = static_cast<double>(x.cols());
    const Mat z1 = activate(act, affine_forward(enc1, x));
    const Mat y2 = affine_forward(dec2, z1);
    const Mat z2 = activate(act, affine_forward(enc2, y2));
    const Mat y1 = affine_forward(dec1, z2);
    const Mat d_y1 = (w.cyc * 2.0 / (p * n)) * (y1 - x);
    const Mat d_z2 = affine_backward(g_dec1, dec1, z2, d_y1);
    const Mat d_y2 =
        affine_backward(g_enc2, enc2, y2, activation_backward(act, z2, d_z2));
    const Mat d_z1 = affine_backward(g_dec2, dec2, z1, d_y2);
    affine_backward(g_enc1, enc1, x, activation_backward(act, z1, d_z1));
  };

  if (w.rec != 0.0) {
    rec_term(xa, model.enc_a, model.dec_a, g.enc_a, g.dec_a);
    rec_term(xb, model.enc_b, model.dec_b, g.enc_b, g.dec_b);
  }
  if (w.cyc != 0.0) {
    cyc_term(xa, model.enc_a, model.dec_b, model.enc_b, model.dec_a,
             g.enc_a, g.dec_b, g.enc_b, g.dec_a);
    cyc_term(xb, model.enc_b, model.dec_a, model.enc_a, model.dec_b,
             g.enc_b, g.dec_a, g.enc_a, g.dec_b);
  }
  if (w.se != 0.0) {
    const Mat za = activate(act, affine_forward(model.enc_a, xa));
    const Mat zb = activate(act, affine_forward(model.enc_b, xb));
    const Eigen::Index na = za.cols(), nb = zb.cols();
    if (c.rows() != c.cols() || c.rows() != na + nb)
      fail(ErrorCode::DimensionMismatch, "loss_gradient: C size mismatch");
    Mat z(za.rows(), na + nb);
    z << za, zb;
    const Mat r = z - z * c;
    const Mat d_z =
        (w.se * 2.0 / (d * static_cast<double>(na + nb))) * (r - r * c.transpose());
    affine_backward(g.enc_a, model.enc_a, xa,
                    activation_backward(act, za, d_z.leftCols(na)));
    affine_backward(g.enc_b, model.enc_b, xb,
                    activation_backward(act, zb, d_z.rightCols(nb)));
  }
  return g;
}

TranslatorModel init_model(const Mat& data_a, const Mat& data_b, int latent_dim,
                           Activation activation) {
  const Eigen::Index p = data_a.rows();
  if (data_b.rows() != p)
    fail(ErrorCode::DimensionMismatch, "init_model: domain patch sizes differ");
  if (latent_dim < 1 || latent_dim >= p)
    fail(ErrorCode::DimensionMismatch, "init_model: need 1 <= d < p");

  auto basis = [&](const Mat& data) -> Mat {
    const Eigen::Index sample = std::min<Eigen::Index>(512, data.cols());
    if (sample < latent_dim)
      fail(ErrorCode::DimensionMismatch, "init_model: too few data columns");
    return svd(data.leftCols(sample)).u.leftCols(latent_dim);
  };
  const Mat ua = basis(data_a);
  const Mat ub = basis(data_b);

  TranslatorModel m;
  m.activation = activation;
  m.enc_a = {ua.transpose(), Vec::Zero(latent_dim)};
  m.enc_b = {ub.transpose(), Vec::Zero(latent_dim)};
  m.dec_a = {ua, Vec::Zero(p)};
  m.dec_b = {ub, Vec::Zero(p)};
  return m;
}

namespace {

// Without-replacement batch sampler; reshuffles per epoch.
class BatchSampler {
 public:
  BatchSampler(Eigen::Index n, int batch, Rng& rng)
      : indices_(static_cast<size_t>(n)), batch_(batch), rng_(rng) {
    std::iota(indices_.begin(), indices_.end(), 0);
    rng_.shuffle(indices_.begin(), indices_.end());
  }

  Mat next(const Mat& data) {
    if (pos_ + static_cast<size_t>(batch_) > indices_.size()) {
      rng_.shuffle(indices_.begin(), indices_.end());
      pos_ = 0;
    }
    Mat out(data.rows(), batch_);
    for (int j = 0; j < batch_; ++j)
      out.col(j) = data.col(indices_[pos_ + static_cast<size_t>(j)]);
    pos_ += static_cast<size_t>(batch_);
    return out;
  }

 private:
  std::vector<Eigen::Index> indices_;
  size_t pos_ = 0;
  int batch_ = 0;
  Rng& rng_;
};

void apply_step(AffineMap& param, const AffineMap& grad, double lr) {
  param.weight.noalias() -= lr * grad.weight;
  param.bias.noalias() -= lr * grad.bias;
}

void accumulate(ModelGradient& into, const ModelGradient& from) {
  auto add = [](AffineMap& a, const AffineMap& b) {
    a.weight += b.weight;
    a.bias += b.bias;
  };
  add(into.enc_a, from.enc_a);
  add(into.enc_b, from.enc_b);
  add(into.dec_a, from.dec_a);
  add(into.dec_b, from.dec_b);
}

}  // namespace

TrainResult train(TranslatorModel model, const Mat& data_a, const Mat& data_b,
                  const TrainConfig& cfg) {
  check_patch_input(model, data_a);
  check_patch_input(model, data_b);
  if (cfg.steps < 1 || cfg.c_refresh_period < 1 || cfg.batch < 1 ||
      cfg.weights.rec < 0.0 || cfg.weights.cyc < 0.0 || cfg.weights.se < 0.0)
    fail(ErrorCode::DimensionMismatch, "train: invalid config");
  if (data_a.cols() < cfg.batch || data_b.cols() < cfg.batch)
    fail(ErrorCode::DimensionMismatch, "train: fewer data columns than batch");

  Rng rng(cfg.seed);
  BatchSampler sampler_a(data_a.cols(), cfg.batch, rng);
  BatchSampler sampler_b(data_b.cols(), cfg.batch, rng);

  const bool use_se = cfg.weights.se != 0.0;
  Mat anchor_a, anchor_b, coeff;

  TrainResult result;
  result.history.reserve(static_cast<size_t>(cfg.steps));

  for (int step = 1; step <= cfg.steps; ++step) {
    const Mat xa = sampler_a.next(data_a);
    const Mat xb = sampler_b.next(data_b);

    if (use_se && (step - 1) % cfg.c_refresh_period == 0) {
      // Refresh the coefficient matrix on this step's batch and keep both the
      // batch and C frozen as the self-expression anchor until the next
      // refresh. C is a constant during gradient steps.
      anchor_a = xa;
      anchor_b = xb;
      Mat z(model.latent_dim(), 2 * cfg.batch);
      z << encode(model, Domain::A, anchor_a), encode(model, Domain::B, anchor_b);
      coeff = solve_self_expressive(z, cfg.solver).first;
      ++result.solver_invocations;
    }

    const LossWeights recon_only{cfg.weights.rec, cfg.weights.cyc, 0.0};
    LossBreakdown loss = total_loss(model, xa, xb, Mat(), recon_only);
    ModelGradient grad = loss_gradient(model, xa, xb, Mat(), recon_only);
    if (use_se) {
      const LossWeights se_only{0.0, 0.0, cfg.weights.se};
      const LossBreakdown se_loss =
          total_loss(model, anchor_a, anchor_b, coeff, se_only);
      loss.se = se_loss.se;
      loss.total += se_loss.total;
      accumulate(grad, loss_gradient(model, anchor_a, anchor_b, coeff, se_only));
    }
    if (!std::isfinite(loss.total))
      fail(ErrorCode::NonFiniteLoss,
           "train: non-finite loss at step " + std::to_string(step));
    result.history.push_back(loss);

    apply_step(model.enc_a, grad.enc_a, cfg.learning_rate);
    apply_step(model.enc_b, grad.enc_b, cfg.learning_rate);
    apply_step(model.dec_a, grad.dec_a, cfg.learning_rate);
    apply_step(model.dec_b, grad.dec_b, cfg.learning_rate);
  }
  result.model = std::move(model);
  return result;
}

void write_model(std::ostream& os, const TranslatorModel& model) {
  const char* act = model.activation == Activation::Tanh ? "tanh" : "none";
  os << "USMMODEL1 " << model.patch_dim() << " " << model.latent_dim() << " "
     << act << "\n";
  write_usm1(os, model.enc_a.weight);
  write_usm1(os, model.enc_b.weight);
  write_usm1(os, model.dec_a.weight);
  write_usm1(os, model.dec_b.weight);
  write_usm1(os, model.enc_a.bias);
  write_usm1(os, model.enc_b.bias);
  write_usm1(os, model.dec_a.bias);
  write_usm1(os, model.dec_b.bias);
}

TranslatorModel read_model(std::istream& is) {
  std::string magic, act;
  int p = 0, d = 0;
  is >> magic >> p >> d >> act;
  if (!is || magic != "USMMODEL1" || p < 1 || d < 1 || d >= p)
    fail(ErrorCode::ParseError, "USMMODEL1: bad header");
  is.get();
  TranslatorModel m;
  if (act == "tanh")
    m.activation = Activation::Tanh;
  else if (act == "none")
    m.activation = Activation::None;
  else
    fail(ErrorCode::ParseError, "USMMODEL1: unknown activation " + act);
  auto read_bias = [&is]() {
    const Mat b = read_usm1(is);
    if (b.cols() != 1) fail(ErrorCode::ParseError, "USMMODEL1: bias not a column");
    return Vec(b.col(0));
  };
  m.enc_a.weight = read_usm1(is);
  m.enc_b.weight = read_usm1(is);
  m.dec_a.weight = read_usm1(is);
  m.dec_b.weight = read_usm1(is);
  m.enc_a.bias = read_bias();
  m.enc_b.bias = read_bias();
  m.dec_a.bias = read_bias();
  m.dec_b.bias = read_bias();
  if (m.enc_a.weight.rows() != d || m.enc_a.weight.cols() != p ||
      m.dec_a.weight.rows() != p || m.dec_a.weight.cols() != d ||
      m.enc_b.weight.rows() != d || m.dec_b.weight.rows() != p ||
      m.enc_a.bias.size() != d || m.dec_a.bias.size() != p)
    fail(ErrorCode::ParseError, "USMMODEL1: block dimensions inconsistent");
  return m;
}

void write_model_file(const std::string& path, const TranslatorModel& model) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
  write_model(os, model);
}

TranslatorModel read_model_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorCode::IoError, "cannot open " + path);
  return read_model(is);
}

}  // namespace usm
