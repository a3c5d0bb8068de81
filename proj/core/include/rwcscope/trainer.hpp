#pragma once

// Desk-scale trainer: a ReLU multi-layer perceptron trained with Adam on
// Gaussian blobs, writing a WSNP snapshot after initialization and after every
// epoch. Everything is F64 and single-threaded so a seed fixes the whole run.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "rwcscope/manifest.hpp"
#include "rwcscope/matrix.hpp"
#include "rwcscope/snapshot.hpp"

namespace rwcscope {

struct MlpSpec {
  std::size_t input_dim = 16;
  std::vector<std::size_t> hidden_dims{64, 64, 64, 64};
  std::size_t num_classes = 3;

  /// Throws InvalidArgument unless there is >= 1 hidden layer and all dims > 0.
  void validate() const;
};

struct ForwardCache {
  std::vector<Matrix> inputs;  // input of every dense layer (post-ReLU for hidden ones)
  Matrix logits;               // batch x num_classes
};

struct LossAndGradient {
  double loss = 0.0;              // mean softmax cross-entropy
  std::vector<double> gradient;   // same layout as Mlp::parameters()
};

/// Dense layer i maps width in_i to out_i with weight (out_i x in_i, row-major)
/// and bias (out_i). Snapshot names are "layer{i}.weight" and "layer{i}.bias".
class Mlp {
 public:
  /// All parameters zero.
  explicit Mlp(MlpSpec spec);

  /// Weights and biases uniform in [-a, a], a = sqrt(6 / (fan_in + fan_out)).
  /// Nonzero biases keep every layer's first RWC transition defined.
  static Mlp glorot_uniform(MlpSpec spec, std::uint64_t seed);

  const MlpSpec& spec() const noexcept { return spec_; }
  std::size_t layer_count() const noexcept { return slices_.size(); }
  std::size_t in_dim(std::size_t layer) const { return slices_.at(layer).in; }
  std::size_t out_dim(std::size_t layer) const { return slices_.at(layer).out; }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> weight(std::size_t layer);
  std::span<double> bias(std::size_t layer);
  std::span<const double> weight(std::size_t layer) const;
  std::span<const double> bias(std::size_t layer) const;

  /// Throws ShapeMismatch when inputs.cols() != input_dim.
  ForwardCache forward(const Matrix& inputs) const;

  /// Mean softmax cross-entropy and its gradient for the cached batch.
  /// Throws LabelOutOfRange / ShapeMismatch.
  LossAndGradient backward(const ForwardCache& cache, std::span<const std::size_t> labels) const;

  double loss(const Matrix& inputs, std::span<const std::size_t> labels) const;
  std::vector<std::size_t> predict(const Matrix& inputs) const;
  double accuracy(const Matrix& inputs, std::span<const std::size_t> labels) const;

  WeightSnapshot snapshot(std::uint32_t epoch, DType dtype = DType::F64) const;

 private:
  struct Slice {
    std::size_t in;
    std::size_t out;
    std::size_t weight_offset;
    std::size_t bias_offset;
  };

  MlpSpec spec_;
  std::vector<Slice> slices_;
  std::vector<double> params_;
};

/// Mean softmax cross-entropy over rows of `logits`.
double softmax_cross_entropy(const Matrix& logits, std::span<const std::size_t> labels);

struct AdamConfig {
  double lr = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> m;
  std::vector<double> v;
  std::uint64_t step = 0;

  AdamState(std::size_t parameter_count, AdamConfig cfg = {})
      : config(cfg), m(parameter_count, 0.0), v(parameter_count, 0.0) {}
};

/// One bias-corrected Adam update in place. Throws ShapeMismatch when the
/// gradient or moment sizes differ from the parameters.
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

/// Isotropic Gaussian blobs: class centers uniform in [-spread, spread]^D,
/// samples center + noise * N(0, I). Rows are grouped by class.
struct SyntheticTask {
  std::size_t num_classes = 3;
  std::size_t samples_per_class = 300;
  std::size_t input_dim = 16;
  double center_spread = 2.0;
  double noise = 1.0;
  std::uint64_t seed = 42;
};

struct Dataset {
  Matrix inputs;
  std::vector<std::size_t> labels;
};

Dataset make_blobs(const SyntheticTask& task);

struct TrainConfig {
  std::size_t epochs = 25;
  std::size_t batch_size = 32;
  AdamConfig adam;
  std::uint64_t seed = 42;
  DType snapshot_dtype = DType::F64;
};

struct TrainResult {
  RunManifest manifest;
  std::filesystem::path manifest_path;
  std::vector<double> epoch_mean_loss;       // training loss averaged over each epoch
  std::vector<double> epoch_train_accuracy;  // full-set accuracy after each epoch
  double final_train_accuracy = 0.0;
};

/// Trains and writes epoch_{n}.wsnp for n = 0..epochs, training_log.csv and
/// manifest.json into `out_dir`.
TrainResult train_run(const SyntheticTask& task, const MlpSpec& spec, const TrainConfig& config,
                      const std::filesystem::path& out_dir);

}  // namespace rwcscope
