#include <algorithm>
#include <cmath>
#include <sstream>

#include "assemai/kernels.hpp"
#include "assemai/nnet.hpp"
#include "assemai/rng.hpp"

namespace assemai {

namespace {

std::string shape_text(const std::vector<int>& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? ", " : "") << shape[i];
  os << ']';
  return os.str();
}

std::size_t product(const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) {
    if (d <= 0) throw InputError("tensor dimensions must be positive, got " + shape_text(dims));
    n *= static_cast<std::size_t>(d);
  }
  return n;
}

std::vector<std::vector<int>> param_shapes(const ModelSpec& s) {
  return {{s.conv1_filters, s.in_channels, 3, 3}, {s.conv1_filters},
          {s.conv2_filters, s.conv1_filters, 3, 3}, {s.conv2_filters},
          {s.hidden, s.flat_features()}, {s.hidden},
          {s.classes, s.hidden}, {s.classes}};
}

}  // namespace

Tensor::Tensor(std::vector<int> dims) : shape(std::move(dims)), data(product(shape), 0.0) {}

Tensor::Tensor(std::vector<int> dims, std::vector<double> values) : shape(std::move(dims)), data(std::move(values)) {
  if (data.size() != product(shape)) {
    throw InputError("tensor of shape " + shape_text(shape) + " needs " + std::to_string(product(shape)) +
                     " values, got " + std::to_string(data.size()));
  }
}

void ModelSpec::validate() const {
  if (in_channels < 1) throw InputError("model needs at least one input channel");
  if (in_height < 4 || in_width < 4) throw InputError("model input must be at least 4x4");
  if (conv1_filters < 1 || conv2_filters < 1 || hidden < 1) throw InputError("layer widths must be positive");
  if (classes < 2) throw InputError("model needs at least two classes");
}

Model::Model(const ModelSpec& spec) : spec_(spec) {
  spec_.validate();
  for (auto& dims : param_shapes(spec_)) params_.emplace_back(std::move(dims));
}

Model Model::he_uniform(const ModelSpec& spec, std::uint64_t seed) {
  Model m(spec);
  // The output layer starts at zero so the first logits are uniform.
  for (std::size_t p = 0; p + 2 < m.params_.size(); p += 2) {
    Tensor& w = m.params_[p];
    const int fan_in = static_cast<int>(w.size() / static_cast<std::size_t>(w.shape[0]));
    const double bound = std::sqrt(6.0 / fan_in);
    Rng rng(derive_seed(seed, p / 2));
    for (double& v : w.data) v = rng.uniform(-bound, bound);
  }
  return m;
}

Tensor& Model::param(std::string_view name) {
  for (std::size_t i = 0; i < kParamNames.size(); ++i)
    if (kParamNames[i] == name) return params_[i];
  throw InputError("no parameter named " + std::string(name));
}

const Tensor& Model::param(std::string_view name) const { return const_cast<Model*>(this)->param(name); }

Tensor forward(const Model& model, const Tensor& batch, ForwardCache* cache) {
  const ModelSpec& s = model.spec();
  if (batch.shape.size() != 4 || batch.shape[1] != s.in_channels || batch.shape[2] != s.in_height ||
      batch.shape[3] != s.in_width) {
    throw InputError("layer conv1 expects input [B, " + std::to_string(s.in_channels) + ", " +
                     std::to_string(s.in_height) + ", " + std::to_string(s.in_width) + "], got " +
                     shape_text(batch.shape));
  }
  const auto& P = model.params();
  const int b = batch.shape[0];
  const int h = s.in_height, w = s.in_width;
  const int h1 = s.pooled1_height(), w1 = s.pooled1_width();
  const int h2 = s.pooled2_height(), w2 = s.pooled2_width();

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c.batch = b;
  c.input = batch.data;
  c.conv1.assign(static_cast<std::size_t>(b) * s.conv1_filters * h * w, 0.0);
  kernels::conv3x3_forward({b, s.in_channels, h, w, s.conv1_filters}, c.input, P[0].data, P[1].data, c.conv1);
  kernels::relu_inplace(c.conv1);

  c.pool1.assign(static_cast<std::size_t>(b) * s.conv1_filters * h1 * w1, 0.0);
  c.pool1_argmax.assign(c.pool1.size(), 0);
  kernels::maxpool2_forward(b * s.conv1_filters, h, w, c.conv1, c.pool1, c.pool1_argmax);

  c.conv2.assign(static_cast<std::size_t>(b) * s.conv2_filters * h1 * w1, 0.0);
  kernels::conv3x3_forward({b, s.conv1_filters, h1, w1, s.conv2_filters}, c.pool1, P[2].data, P[3].data, c.conv2);
  kernels::relu_inplace(c.conv2);

  c.pool2.assign(static_cast<std::size_t>(b) * s.conv2_filters * h2 * w2, 0.0);
  c.pool2_argmax.assign(c.pool2.size(), 0);
  kernels::maxpool2_forward(b * s.conv2_filters, h1, w1, c.conv2, c.pool2, c.pool2_argmax);

  c.hidden.assign(static_cast<std::size_t>(b) * s.hidden, 0.0);
  kernels::dense_forward(b, s.flat_features(), s.hidden, c.pool2, P[4].data, P[5].data, c.hidden);
  kernels::relu_inplace(c.hidden);

  Tensor logits({b, s.classes});
  kernels::dense_forward(b, s.hidden, s.classes, c.hidden, P[6].data, P[7].data, logits.data);
  return logits;
}

std::vector<Tensor> backward(const Model& model, const ForwardCache& c, const Tensor& dlogits) {
  const ModelSpec& s = model.spec();
  const int b = c.batch;
  if (dlogits.shape != std::vector<int>{b, s.classes}) {
    throw InputError("layer dense2 expects gradient [" + std::to_string(b) + ", " + std::to_string(s.classes) +
                     "], got " + shape_text(dlogits.shape));
  }
  const auto& P = model.params();
  const int h = s.in_height, w = s.in_width;
  const int h1 = s.pooled1_height(), w1 = s.pooled1_width();
  std::vector<Tensor> g;
  for (const Tensor& p : P) g.emplace_back(p.shape);

  std::vector<double> dhidden(c.hidden.size());
  kernels::dense_backward(b, s.hidden, s.classes, c.hidden, P[6].data, dlogits.data, g[6].data, g[7].data, dhidden);
  kernels::relu_backward(c.hidden, dhidden);

  std::vector<double> dpool2(c.pool2.size());
  kernels::dense_backward(b, s.flat_features(), s.hidden, c.pool2, P[4].data, dhidden, g[4].data, g[5].data, dpool2);

  std::vector<double> dconv2(c.conv2.size());
  kernels::maxpool2_backward(b * s.conv2_filters, h1, w1, dpool2, c.pool2_argmax, dconv2);
  kernels::relu_backward(c.conv2, dconv2);

  std::vector<double> dpool1(c.pool1.size());
  kernels::conv3x3_backward({b, s.conv1_filters, h1, w1, s.conv2_filters}, c.pool1, P[2].data, dconv2, g[2].data,
                            g[3].data, dpool1);

  std::vector<double> dconv1(c.conv1.size());
  kernels::maxpool2_backward(b * s.conv1_filters, h, w, dpool1, c.pool1_argmax, dconv1);
  kernels::relu_backward(c.conv1, dconv1);
  kernels::conv3x3_backward({b, s.in_channels, h, w, s.conv1_filters}, c.input, P[0].data, dconv1, g[0].data,
                            g[1].data, {});
  return g;
}

Tensor softmax(const Tensor& logits) {
  if (logits.shape.size() != 2) throw InputError("softmax expects a [B, K] tensor");
  Tensor out(logits.shape);
  const int k = logits.shape[1];
  for (int i = 0; i < logits.shape[0]; ++i) {
    const double* row = &logits.data[static_cast<std::size_t>(i) * k];
    double* o = &out.data[static_cast<std::size_t>(i) * k];
    const double mx = *std::max_element(row, row + k);
    double z = 0.0;
    for (int j = 0; j < k; ++j) z += (o[j] = std::exp(row[j] - mx));
    for (int j = 0; j < k; ++j) o[j] /= z;
  }
  return out;
}

int argmax(std::span<const double> row) {
  int best = 0;
  for (std::size_t j = 1; j < row.size(); ++j)
    if (row[j] > row[static_cast<std::size_t>(best)]) best = static_cast<int>(j);
  return best;
}

ClassWeights class_weights(std::span<const std::int64_t> counts) {
  if (counts.empty()) throw InputError("class weights need at least one class");
  std::int64_t total = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] < 1) {
      throw InputError("class " + std::to_string(c) + " has no samples; its weight is undefined");
    }
    total += counts[c];
  }
  ClassWeights w;
  const double k = static_cast<double>(counts.size());
  for (std::int64_t n : counts) w.w.push_back(static_cast<double>(total) / (k * static_cast<double>(n)));
  return w;
}

LossResult weighted_ce(const Tensor& logits, std::span<const int> labels, const ClassWeights& weights) {
  if (logits.shape.size() != 2) throw InputError("weighted_ce expects [B, K] logits");
  const int b = logits.shape[0], k = logits.shape[1];
  if (labels.size() != static_cast<std::size_t>(b)) {
    throw InputError("weighted_ce got " + std::to_string(labels.size()) + " labels for a batch of " +
                     std::to_string(b));
  }
  if (weights.w.size() != static_cast<std::size_t>(k)) {
    throw InputError("weighted_ce got " + std::to_string(weights.w.size()) + " class weights for " +
                     std::to_string(k) + " classes");
  }
  for (double v : logits.data)
    if (!std::isfinite(v)) throw NumericError("non-finite logit");

  LossResult r;
  r.dlogits = Tensor(logits.shape);
  const double inv_b = 1.0 / b;
  for (int i = 0; i < b; ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y < 0 || y >= k) throw InputError("label " + std::to_string(y) + " out of range");
    const double* row = &logits.data[static_cast<std::size_t>(i) * k];
    double* d = &r.dlogits.data[static_cast<std::size_t>(i) * k];
    const double mx = *std::max_element(row, row + k);
    double z = 0.0;
    for (int j = 0; j < k; ++j) z += std::exp(row[j] - mx);
    const double log_z = std::log(z);
    const double wy = weights.w[static_cast<std::size_t>(y)];
    r.loss += wy * (log_z - (row[y] - mx));
    for (int j = 0; j < k; ++j) d[j] = wy * inv_b * std::exp(row[j] - mx - log_z);
    d[y] -= wy * inv_b;
  }
  r.loss *= inv_b;
  return r;
}

void adam_step(std::vector<Tensor>& params, const std::vector<Tensor>& grads, AdamState& state,
               const AdamConfig& cfg) {
  if (params.size() != grads.size()) throw InputError("adam_step: parameter and gradient counts differ");
  if (state.m.empty()) {
    for (const Tensor& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }
  ++state.step;
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
  for (std::size_t t = 0; t < params.size(); ++t) {
    if (grads[t].size() != params[t].size()) throw InputError("adam_step: gradient shape mismatch");
    auto& p = params[t].data;
    const auto& g = grads[t].data;
    auto& m = state.m[t];
    auto& v = state.v[t];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
      p[i] -= cfg.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + cfg.eps);
    }
  }
}

}  // namespace assemai
