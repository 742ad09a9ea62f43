#include "spkleak/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "binary_io.hpp"
#include "spkleak/errors.hpp"
#include "spkleak/rng.hpp"

namespace spkleak {

Matrix uniform_init(std::size_t rows, std::size_t cols, double bound,
                    std::uint64_t seed) {
  Matrix m(rows, cols);
  SplitMix64 rng(seed);
  for (double& v : m.values) {
    v = bound * (2.0 * rng.next_unit() - 1.0);
  }
  return m;
}

DenseLayer::DenseLayer(std::size_t in_dim, std::size_t out_dim,
                       std::uint64_t init_seed)
    : w_(uniform_init(out_dim, in_dim, 1.0 / std::sqrt(static_cast<double>(in_dim)),
                      init_seed)),
      b_(out_dim, 0.0) {}

DenseLayer::DenseLayer(Matrix w, std::vector<double> b)
    : w_(std::move(w)), b_(std::move(b)) {
  if (w_.rows != b_.size()) {
    throw ValidationError("dense layer: bias length " + std::to_string(b_.size()) +
                          " does not match output dim " + std::to_string(w_.rows));
  }
}

Matrix DenseLayer::forward(const Matrix& x) {
  if (x.cols != w_.cols) {
    throw ValidationError("dense forward: input has " + std::to_string(x.cols) +
                          " columns, layer expects " + std::to_string(w_.cols));
  }
  Matrix y(x.rows, w_.rows);
  for (std::size_t n = 0; n < x.rows; ++n) {
    for (std::size_t o = 0; o < w_.rows; ++o) {
      double acc = b_[o];
      for (std::size_t i = 0; i < w_.cols; ++i) {
        acc += x.at(n, i) * w_.at(o, i);
      }
      y.at(n, o) = acc;
    }
  }
  last_input_ = x;
  return y;
}

Matrix DenseLayer::backward(const Matrix& dy, DenseGrads& grads) const {
  const Matrix& x = last_input_;
  if (dy.rows != x.rows || dy.cols != w_.rows) {
    throw ValidationError("dense backward: upstream gradient shape mismatch");
  }
  grads.w = Matrix(w_.rows, w_.cols);
  grads.b.assign(w_.rows, 0.0);
  Matrix dx(x.rows, x.cols);
  for (std::size_t n = 0; n < x.rows; ++n) {
    for (std::size_t o = 0; o < w_.rows; ++o) {
      const double g = dy.at(n, o);
      grads.b[o] += g;
      for (std::size_t i = 0; i < w_.cols; ++i) {
        grads.w.at(o, i) += g * x.at(n, i);
        dx.at(n, i) += g * w_.at(o, i);
      }
    }
  }
  return dx;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix probs(logits.rows, logits.cols);
  for (std::size_t n = 0; n < logits.rows; ++n) {
    double max = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < logits.cols; ++c) {
      max = std::max(max, logits.at(n, c));
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < logits.cols; ++c) {
      double e = std::exp(logits.at(n, c) - max);
      probs.at(n, c) = e;
      sum += e;
    }
    for (std::size_t c = 0; c < logits.cols; ++c) {
      probs.at(n, c) /= sum;
    }
  }
  return probs;
}

SoftmaxXentResult softmax_xent(const Matrix& logits, std::span<const int> targets) {
  if (logits.rows == 0) throw ValidationError("softmax_xent: no rows");
  if (targets.size() != logits.rows) {
    throw ValidationError("softmax_xent: " + std::to_string(targets.size()) +
                          " targets for " + std::to_string(logits.rows) + " rows");
  }
  for (int t : targets) {
    if (t < 0 || static_cast<std::size_t>(t) >= logits.cols) {
      throw ValidationError("softmax_xent: target " + std::to_string(t) +
                            " outside [0, " + std::to_string(logits.cols) + ")");
    }
  }

  SoftmaxXentResult result;
  result.probs = softmax_rows(logits);
  const double inv_n = 1.0 / static_cast<double>(logits.rows);

  // Loss via log-sum-exp so near-certain rows keep precision.
  double loss = 0.0;
  for (std::size_t n = 0; n < logits.rows; ++n) {
    double max = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < logits.cols; ++c) {
      max = std::max(max, logits.at(n, c));
    }
    double sum = 0.0;
    for (std::size_t c = 0; c < logits.cols; ++c) {
      sum += std::exp(logits.at(n, c) - max);
    }
    loss += max + std::log(sum) - logits.at(n, static_cast<std::size_t>(targets[n]));
  }
  result.loss = loss * inv_n;

  result.dlogits = result.probs;
  for (std::size_t n = 0; n < logits.rows; ++n) {
    result.dlogits.at(n, static_cast<std::size_t>(targets[n])) -= 1.0;
  }
  for (double& v : result.dlogits.values) v *= inv_n;
  return result;
}

GradientReversal::GradientReversal(double lambda) { set_lambda(lambda); }

void GradientReversal::set_lambda(double lambda) {
  if (lambda < 0.0 || !std::isfinite(lambda)) {
    throw ValidationError("gradient reversal lambda must be finite and >= 0");
  }
  lambda_ = lambda;
}

Matrix GradientReversal::backward(const Matrix& dy) const {
  Matrix dx = dy;
  for (double& v : dx.values) v *= -lambda_;
  return dx;
}

ViewAggregator::ViewAggregator(std::size_t n_views) : logits_(n_views, 0.0) {
  if (n_views == 0) throw ValidationError("view aggregator needs at least one view");
}

ViewAggregator::ViewAggregator(std::vector<double> logits)
    : logits_(std::move(logits)) {
  if (logits_.empty()) {
    throw ValidationError("view aggregator needs at least one view");
  }
}

std::vector<double> ViewAggregator::weights() const {
  double max = *std::max_element(logits_.begin(), logits_.end());
  std::vector<double> w(logits_.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < logits_.size(); ++k) {
    w[k] = std::exp(logits_[k] - max);
    sum += w[k];
  }
  for (double& v : w) v /= sum;
  return w;
}

namespace {

void check_view_shapes(std::span<const Matrix> views, std::size_t expected) {
  if (views.size() != expected) {
    throw ValidationError("view aggregator: got " + std::to_string(views.size()) +
                          " views, expected " + std::to_string(expected));
  }
  for (std::size_t k = 1; k < views.size(); ++k) {
    if (views[k].rows != views[0].rows || views[k].cols != views[0].cols) {
      throw ValidationError("view aggregator: view " + std::to_string(k) +
                            " shape differs from view 0");
    }
  }
}

}  // namespace

Matrix ViewAggregator::forward(std::span<const Matrix> views) const {
  check_view_shapes(views, logits_.size());
  std::vector<double> w = weights();
  Matrix out(views[0].rows, views[0].cols);
  for (std::size_t k = 0; k < views.size(); ++k) {
    for (std::size_t i = 0; i < out.values.size(); ++i) {
      out.values[i] += w[k] * views[k].values[i];
    }
  }
  return out;
}

ViewAggregatorGrads ViewAggregator::backward(const Matrix& dy,
                                             std::span<const Matrix> views) const {
  check_view_shapes(views, logits_.size());
  std::vector<double> w = weights();

  ViewAggregatorGrads grads;
  grads.views.reserve(views.size());
  std::vector<double> s(views.size(), 0.0);  // s_k = <dY, view_k>
  for (std::size_t k = 0; k < views.size(); ++k) {
    Matrix dview = dy;
    for (double& v : dview.values) v *= w[k];
    grads.views.push_back(std::move(dview));
    for (std::size_t i = 0; i < dy.values.size(); ++i) {
      s[k] += dy.values[i] * views[k].values[i];
    }
  }
  double mean = 0.0;
  for (std::size_t k = 0; k < views.size(); ++k) mean += w[k] * s[k];
  grads.logits.resize(views.size());
  for (std::size_t k = 0; k < views.size(); ++k) {
    grads.logits[k] = w[k] * (s[k] - mean);
  }
  return grads;
}

Matrix relu(const Matrix& x) {
  Matrix y = x;
  for (double& v : y.values) v = v > 0.0 ? v : 0.0;
  return y;
}

Matrix relu_backward(const Matrix& dy, const Matrix& x) {
  if (dy.rows != x.rows || dy.cols != x.cols) {
    throw ValidationError("relu backward: shape mismatch");
  }
  Matrix dx = dy;
  for (std::size_t i = 0; i < dx.values.size(); ++i) {
    if (x.values[i] <= 0.0) dx.values[i] = 0.0;
  }
  return dx;
}

void validate(const SgdConfig& config) {
  if (!(config.learning_rate > 0.0) || !std::isfinite(config.learning_rate)) {
    throw ValidationError("sgd: learning_rate must be positive and finite");
  }
  if (config.batch_size < 1) throw ValidationError("sgd: batch_size must be >= 1");
  if (config.epochs < 1) throw ValidationError("sgd: epochs must be >= 1");
}

void sgd_step(std::span<double> params, std::span<const double> grads,
              double learning_rate, std::string_view name) {
  if (params.size() != grads.size()) {
    throw TrainingError("sgd_step: gradient size mismatch for tensor '" +
                        std::string(name) + "'");
  }
  for (double g : grads) {
    if (!std::isfinite(g)) {
      throw TrainingError("non-finite gradient in tensor '" + std::string(name) +
                          "'");
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] -= learning_rate * grads[i];
  }
}

void write_checkpoint(const std::vector<NamedTensor>& tensors,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint " + path.string());
  out.write("NNC1", 4);
  for (const NamedTensor& t : tensors) {
    detail::write_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.write(t.name.data(), static_cast<std::streamsize>(t.name.size()));
    detail::write_u32(out, static_cast<std::uint32_t>(t.value.rows));
    detail::write_u32(out, static_cast<std::uint32_t>(t.value.cols));
    for (double v : t.value.values) detail::write_f64(out, v);
  }
  if (!out) throw IoError("failed writing checkpoint " + path.string());
}

std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path.string());
  const std::string ctx = path.string();

  std::string magic = detail::read_bytes(in, 4, ctx);
  if (magic != "NNC1") throw ParseError(ctx + ": bad magic (not an NNC1 file)");

  std::vector<NamedTensor> tensors;
  while (true) {
    if (in.peek() == std::char_traits<char>::eof()) break;
    NamedTensor t;
    const std::uint32_t name_len = detail::read_u32(in, ctx);
    t.name = detail::read_bytes(in, name_len, ctx);
    const std::uint32_t rows = detail::read_u32(in, ctx);
    const std::uint32_t cols = detail::read_u32(in, ctx);
    t.value = Matrix(rows, cols);
    for (double& v : t.value.values) v = detail::read_f64(in, ctx);
    tensors.push_back(std::move(t));
  }
  return tensors;
}

}  // namespace spkleak
