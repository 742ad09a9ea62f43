#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spkleak/matrix.hpp"

namespace spkleak {

/// Weights uniform in [-1/sqrt(in_dim), +1/sqrt(in_dim)], seeded; used for
/// every dense layer so runs are pinned by their seeds.
Matrix uniform_init(std::size_t rows, std::size_t cols, double bound,
                    std::uint64_t seed);

struct DenseGrads {
  Matrix w;               // same shape as the layer's W
  std::vector<double> b;  // column sums of dY
};

/// Affine map Y = X W^T + b with hand-derived gradients.
/// forward() caches its input for the following backward(); one layer
/// instance therefore belongs to a single training thread at a time.
class DenseLayer {
 public:
  DenseLayer() = default;
  DenseLayer(std::size_t in_dim, std::size_t out_dim, std::uint64_t init_seed);
  DenseLayer(Matrix w, std::vector<double> b);  // adopt existing parameters

  std::size_t in_dim() const { return w_.cols; }
  std::size_t out_dim() const { return w_.rows; }
  Matrix& weights() { return w_; }
  const Matrix& weights() const { return w_; }
  std::vector<double>& bias() { return b_; }
  const std::vector<double>& bias() const { return b_; }

  Matrix forward(const Matrix& x);

  /// dX from dY, using the cached input; fills parameter gradients.
  ///   dW = dY^T X,  db[o] = sum_n dY[n][o],  dX = dY W.
  Matrix backward(const Matrix& dy, DenseGrads& grads) const;

 private:
  Matrix w_;  // out x in
  std::vector<double> b_;
  Matrix last_input_;
};

Matrix softmax_rows(const Matrix& logits);  // rows positive, summing to 1

struct SoftmaxXentResult {
  double loss = 0.0;   // mean over rows of -log softmax(logits)[target]
  Matrix dlogits;      // (softmax - onehot) / N
  Matrix probs;
};

/// Row-wise softmax cross entropy against integer class targets.
/// Numerically stable (log-sum-exp); throws on a target outside [0, C).
SoftmaxXentResult softmax_xent(const Matrix& logits, std::span<const int> targets);

/// Identity forward; backward multiplies the upstream gradient by -lambda.
/// The layer that couples the adversarial speaker head to the features.
class GradientReversal {
 public:
  explicit GradientReversal(double lambda);  // lambda < 0 rejected
  double lambda() const { return lambda_; }
  void set_lambda(double lambda);

  const Matrix& forward(const Matrix& x) const { return x; }
  Matrix backward(const Matrix& dy) const;

 private:
  double lambda_ = 0.0;
};

struct ViewAggregatorGrads {
  std::vector<Matrix> views;
  std::vector<double> logits;
};

/// Softmax-weighted summation of K same-shape views:
///   out = sum_k w_k view_k,  w = softmax(logits).
/// The learned analog of selecting which representation layers matter.
class ViewAggregator {
 public:
  explicit ViewAggregator(std::size_t n_views);  // logits zero-init: equal weights
  explicit ViewAggregator(std::vector<double> logits);

  std::size_t n_views() const { return logits_.size(); }
  const std::vector<double>& logits() const { return logits_; }
  std::vector<double>& logits() { return logits_; }
  std::vector<double> weights() const;  // positive, sums to 1

  Matrix forward(std::span<const Matrix> views) const;

  /// Gradients for the inputs (w_k dY) and the logits
  /// (dlogit_k = w_k (s_k - sum_j w_j s_j) with s_k = <dY, view_k>).
  ViewAggregatorGrads backward(const Matrix& dy, std::span<const Matrix> views) const;

 private:
  std::vector<double> logits_;
};

Matrix relu(const Matrix& x);
Matrix relu_backward(const Matrix& dy, const Matrix& x);

struct SgdConfig {
  double learning_rate = 0.0;
  std::size_t batch_size = 1;
  std::size_t epochs = 1;
  std::uint64_t shuffle_seed = 0;

  bool operator==(const SgdConfig&) const = default;
};

void validate(const SgdConfig& config);  // throws ValidationError

/// p -= lr * g. A non-finite gradient is a TrainingError naming `name`.
void sgd_step(std::span<double> params, std::span<const double> grads,
              double learning_rate, std::string_view name);

/// NNC1 parameter checkpoint, binary little-endian: magic "NNC1", then per
/// tensor: u32 name length, name bytes, u32 rows, u32 cols, float64 values
/// row-major. Read until end of file.
struct NamedTensor {
  std::string name;
  Matrix value;

  bool operator==(const NamedTensor&) const = default;
};

void write_checkpoint(const std::vector<NamedTensor>& tensors,
                      const std::filesystem::path& path);
std::vector<NamedTensor> read_checkpoint(const std::filesystem::path& path);

}  // namespace spkleak
