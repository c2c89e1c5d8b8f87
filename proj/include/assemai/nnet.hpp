#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "assemai/core.hpp"
#include "assemai/manifest.hpp"

namespace assemai {

// ---------------------------------------------------------------------------
// Tensors

struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  Tensor() = default;
  /// Zero-filled tensor. Every dimension must be positive.
  explicit Tensor(std::vector<int> dims);
  Tensor(std::vector<int> dims, std::vector<double> values);

  std::size_t size() const noexcept { return data.size(); }
  int dim(std::size_t i) const { return shape.at(i); }
  friend bool operator==(const Tensor&, const Tensor&) = default;
};

// ---------------------------------------------------------------------------
// Simple CNN
//
//   conv3x3(F1) -> ReLU -> maxpool2 -> conv3x3(F2) -> ReLU -> maxpool2
//   -> flatten -> dense(hidden) -> ReLU -> dense(classes)

struct ModelSpec {
  int in_channels = 1;
  int in_height = 64;
  int in_width = 64;
  int conv1_filters = 32;
  int conv2_filters = 64;
  int hidden = 512;
  int classes = kNumClasses;

  void validate() const;
  int pooled1_height() const noexcept { return in_height / 2; }
  int pooled1_width() const noexcept { return in_width / 2; }
  int pooled2_height() const noexcept { return in_height / 4; }
  int pooled2_width() const noexcept { return in_width / 4; }
  int flat_features() const noexcept { return conv2_filters * pooled2_height() * pooled2_width(); }
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

/// Parameter order used everywhere (gradients, optimizer state, container):
/// conv1.weight, conv1.bias, conv2.weight, conv2.bias, dense1.weight,
/// dense1.bias, dense2.weight, dense2.bias.
inline constexpr std::array<std::string_view, 8> kParamNames = {
    "conv1.weight", "conv1.bias", "conv2.weight", "conv2.bias",
    "dense1.weight", "dense1.bias", "dense2.weight", "dense2.bias"};

/// Conv layers addressable by name (for activation maps).
inline constexpr std::array<std::string_view, 2> kConvLayers = {"conv1", "conv2"};

class Model {
 public:
  /// All parameters zero.
  explicit Model(const ModelSpec& spec);

  /// He-uniform weights (bound sqrt(6 / fan_in)) for the conv layers and
  /// dense1; dense2 and all biases start at zero.
  static Model he_uniform(const ModelSpec& spec, std::uint64_t seed);

  const ModelSpec& spec() const noexcept { return spec_; }
  std::vector<Tensor>& params() noexcept { return params_; }
  const std::vector<Tensor>& params() const noexcept { return params_; }
  Tensor& param(std::string_view name);
  const Tensor& param(std::string_view name) const;

  friend bool operator==(const Model&, const Model&) = default;

 private:
  ModelSpec spec_;
  std::vector<Tensor> params_;
};

/// Activations kept by forward() for backward() and for activation maps.
/// conv1/conv2/hidden hold post-ReLU values.
struct ForwardCache {
  int batch = 0;
  std::vector<double> input;
  std::vector<double> conv1;
  std::vector<double> pool1;
  std::vector<std::int32_t> pool1_argmax;
  std::vector<double> conv2;
  std::vector<double> pool2;
  std::vector<std::int32_t> pool2_argmax;
  std::vector<double> hidden;
};

/// Logits [B, classes] for an input batch [B, C, H, W]. Throws InputError
/// naming the first layer whose expected shape does not match.
Tensor forward(const Model& model, const Tensor& batch, ForwardCache* cache = nullptr);

/// Exact parameter gradients, in kParamNames order, given dL/dlogits.
std::vector<Tensor> backward(const Model& model, const ForwardCache& cache, const Tensor& dlogits);

/// Row-wise softmax with max subtraction.
Tensor softmax(const Tensor& logits);

/// Index of the largest entry; ties resolve to the lowest index.
int argmax(std::span<const double> row);

// ---------------------------------------------------------------------------
// Objective

struct ClassWeights {
  std::vector<double> w;
};

/// w_c = N / (K * n_c). Throws InputError when any count is below 1.
ClassWeights class_weights(std::span<const std::int64_t> counts);

struct LossResult {
  double loss = 0.0;
  Tensor dlogits;
};

/// Mean over the batch of w_y * -log softmax(logits)[y], with its exact
/// gradient. Throws NumericError on non-finite logits.
LossResult weighted_ce(const Tensor& logits, std::span<const int> labels, const ClassWeights& weights);

// ---------------------------------------------------------------------------
// Adam

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

struct AdamState {
  std::int64_t step = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

/// One bias-corrected Adam update. Moments are created on the first call.
void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamState& state,
               const AdamConfig& cfg);

// ---------------------------------------------------------------------------
// Data

/// In-memory image set, NCHW, one label per image.
struct Dataset {
  int channels = 1;
  int height = 0;
  int width = 0;
  std::vector<double> pixels;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t image_size() const noexcept { return static_cast<std::size_t>(channels) * height * width; }
  /// Appends one image (channels * height * width values in NCHW order).
  void add(std::span<const double> image, int label);
  /// Batch tensor holding the listed images in order.
  Tensor batch(std::span<const std::size_t> indices) const;
};

/// Stratified split. Per class, floor(fraction * n_c) samples go to train and
/// the shortfall against round(fraction * N) is handed out by largest
/// remainder (lowest class first on ties). Which samples are chosen is a
/// seeded shuffle; both outputs keep manifest order. Classes with exactly one
/// sample are rejected; absent classes are ignored.
std::pair<DatasetManifest, DatasetManifest> split_train_test(const DatasetManifest& manifest, double fraction,
                                                             std::uint64_t seed);

// ---------------------------------------------------------------------------
// Training

struct TrainConfig {
  int epochs = 20;
  int batch_size = 32;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  int input_width = 64;
  int input_height = 64;
  double split_fraction = 0.8;

  void validate() const;
  AdamConfig adam() const { return {learning_rate, adam_beta1, adam_beta2, adam_eps}; }
};

struct EpochStats {
  int epoch = 0;
  double loss = 0.0;               // mean mini-batch loss
  double train_accuracy = 0.0;     // on the mini-batches as seen during the epoch
  double held_out_accuracy = 0.0;  // after the epoch
  double best_accuracy = 0.0;      // best held-out accuracy so far
};

struct TrainResult {
  Model model;  // snapshot with the best held-out accuracy
  std::vector<EpochStats> history;
  int best_epoch = 0;
};

/// Shuffled mini-batch training with Adam. After each epoch the model is
/// scored on `held_out` (the training set itself when `held_out` is empty)
/// and the best snapshot is kept; earlier epochs win ties.
TrainResult train(const Dataset& train_set, const Dataset& held_out, const TrainConfig& cfg,
                  const ClassWeights& weights, const ModelSpec& spec);

/// Softmax probabilities [N, classes], evaluated in fixed-size chunks.
Tensor predict_proba(const Model& model, const Dataset& data);
std::vector<int> predict(const Model& model, const Dataset& data);

// ---------------------------------------------------------------------------
// Metrics

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::int64_t support = 0;
};

struct MetricsReport {
  int classes = 0;
  std::vector<std::int64_t> confusion;  // row = truth, column = prediction
  std::vector<ClassMetrics> per_class;
  double weighted_precision = 0.0;
  double weighted_recall = 0.0;
  double weighted_f1 = 0.0;
  double accuracy = 0.0;
  std::int64_t support = 0;

  std::int64_t at(int truth, int predicted) const {
    return confusion[static_cast<std::size_t>(truth) * classes + predicted];
  }
  std::string to_json() const;
  /// Aligned table: per-class rows then WP / WR / WF1 / Accuracy / Support.
  std::string to_text() const;
};

MetricsReport metrics_from_predictions(std::span<const int> truth, std::span<const int> predicted, int classes);
MetricsReport evaluate(const Model& model, const Dataset& data);

// ---------------------------------------------------------------------------
// Model container
//
//   "ASSEMAI1"
//   u32 tensor count
//   per tensor: u32 name length, name bytes, u32 rank, u64 dims[rank],
//               f64 values (little endian)
//
// The first tensor, "model.spec", holds the ModelSpec fields as values.

std::vector<std::uint8_t> encode_model(const Model& model);
Model decode_model(std::span<const std::uint8_t> bytes);
void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

/// Short stable identifier: FNV-1a 64 of the container bytes, hex.
std::string model_id(const Model& model);

}  // namespace assemai
