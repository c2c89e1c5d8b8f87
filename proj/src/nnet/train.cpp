#include <algorithm>
#include <cmath>
#include <numeric>

#include "assemai/nnet.hpp"
#include "assemai/rng.hpp"

namespace assemai {

namespace {

constexpr std::uint64_t kInitStream = 0x696e6974;
constexpr std::uint64_t kShuffleStream = 0x73687566;
constexpr std::uint64_t kSplitStream = 0x73706c74;
constexpr std::size_t kPredictChunk = 64;

void check_matches(const Dataset& d, const ModelSpec& s, const char* what) {
  if (d.size() == 0) return;
  if (d.channels != s.in_channels || d.height != s.in_height || d.width != s.in_width) {
    throw InputError(std::string(what) + " images are " + std::to_string(d.channels) + "x" +
                     std::to_string(d.height) + "x" + std::to_string(d.width) + ", model expects " +
                     std::to_string(s.in_channels) + "x" + std::to_string(s.in_height) + "x" +
                     std::to_string(s.in_width));
  }
}

double accuracy_of(const Model& model, const Dataset& d) {
  const std::vector<int> pred = predict(model, d);
  std::size_t hit = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) hit += pred[i] == d.labels[i];
  return d.size() ? static_cast<double>(hit) / static_cast<double>(d.size()) : 0.0;
}

}  // namespace

void Dataset::add(std::span<const double> image, int label) {
  if (image.size() != image_size()) {
    throw InputError("dataset image has " + std::to_string(image.size()) + " values, expected " +
                     std::to_string(image_size()));
  }
  pixels.insert(pixels.end(), image.begin(), image.end());
  labels.push_back(label);
}

Tensor Dataset::batch(std::span<const std::size_t> indices) const {
  Tensor t({static_cast<int>(indices.size()), channels, height, width});
  const std::size_t n = image_size();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= size()) throw InputError("dataset index out of range");
    std::copy_n(pixels.begin() + static_cast<std::ptrdiff_t>(indices[i] * n), n,
                t.data.begin() + static_cast<std::ptrdiff_t>(i * n));
  }
  return t;
}

std::pair<DatasetManifest, DatasetManifest> split_train_test(const DatasetManifest& manifest, double fraction,
                                                             std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw InputError("split fraction must lie strictly between 0 and 1");
  std::array<std::vector<std::size_t>, kNumClasses> members;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i)
    members[static_cast<std::size_t>(to_index(manifest.samples[i].label))].push_back(i);

  std::array<std::int64_t, kNumClasses> quota{};
  std::array<double, kNumClasses> remainder{};
  std::int64_t assigned = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    const auto n = static_cast<std::int64_t>(members[c].size());
    if (n == 1) {
      throw InputError("class " + std::string(class_name(class_from_index(c))) +
                       " has a single sample and cannot be split");
    }
    const double exact = fraction * static_cast<double>(n);
    quota[c] = static_cast<std::int64_t>(std::floor(exact));
    remainder[c] = exact - static_cast<double>(quota[c]);
    assigned += quota[c];
  }
  const auto target =
      static_cast<std::int64_t>(std::floor(fraction * static_cast<double>(manifest.samples.size()) + 0.5));
  std::array<int, kNumClasses> order;
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return remainder[a] > remainder[b]; });
  for (int c : order) {
    if (assigned >= target) break;
    if (members[c].empty() || remainder[c] <= 0.0) continue;
    ++quota[c];
    ++assigned;
  }

  std::vector<char> in_train(manifest.samples.size(), 0);
  for (int c = 0; c < kNumClasses; ++c) {
    const auto n = static_cast<std::int64_t>(members[c].size());
    if (n == 0) continue;
    quota[c] = std::clamp<std::int64_t>(quota[c], 1, n - 1);
    std::vector<std::size_t> pool = members[c];
    Rng rng(derive_seed(seed, kSplitStream, static_cast<std::uint64_t>(c)));
    rng.shuffle(pool.begin(), pool.end());
    for (std::int64_t i = 0; i < quota[c]; ++i) in_train[pool[static_cast<std::size_t>(i)]] = 1;
  }

  DatasetManifest train_m, test_m;
  for (DatasetManifest* m : {&train_m, &test_m}) {
    m->seed = manifest.seed;
    m->generator_version = manifest.generator_version;
    m->provenance = manifest.provenance;
  }
  for (std::size_t i = 0; i < manifest.samples.size(); ++i)
    (in_train[i] ? train_m : test_m).samples.push_back(manifest.samples[i]);
  train_m.recount();
  test_m.recount();
  return {std::move(train_m), std::move(test_m)};
}

void TrainConfig::validate() const {
  if (epochs < 1) throw InputError("epochs must be >= 1");
  if (batch_size < 1) throw InputError("batch_size must be >= 1");
  if (!(learning_rate > 0.0)) throw InputError("learning_rate must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw InputError("Adam betas must lie in [0, 1)");
  }
  if (!(adam_eps > 0.0)) throw InputError("adam_eps must be positive");
  if (input_width < 4 || input_height < 4) throw InputError("input size must be at least 4x4");
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
    throw InputError("split_fraction must lie strictly between 0 and 1");
  }
}

TrainResult train(const Dataset& train_set, const Dataset& held_out, const TrainConfig& cfg,
                  const ClassWeights& weights, const ModelSpec& spec) {
  cfg.validate();
  if (train_set.size() == 0) throw InputError("training set is empty");
  check_matches(train_set, spec, "training");
  check_matches(held_out, spec, "held-out");
  const Dataset& scorer = held_out.size() ? held_out : train_set;

  TrainResult result{Model::he_uniform(spec, derive_seed(cfg.seed, kInitStream)), {}, 0};
  Model model = result.model;
  AdamState adam;
  const AdamConfig adam_cfg = cfg.adam();
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  double best = -1.0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    Rng rng(derive_seed(cfg.seed, kShuffleStream, static_cast<std::uint64_t>(epoch)));
    rng.shuffle(order.begin(), order.end());
    double loss_sum = 0.0;
    std::size_t batches = 0, hits = 0;
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch_size));
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      std::vector<int> labels;
      for (std::size_t i : idx) labels.push_back(train_set.labels[i]);
      ForwardCache cache;
      const Tensor logits = forward(model, train_set.batch(idx), &cache);
      const LossResult lr = weighted_ce(logits, labels, weights);
      for (std::size_t i = 0; i < labels.size(); ++i) {
        const std::span<const double> row(&logits.data[i * static_cast<std::size_t>(spec.classes)],
                                          static_cast<std::size_t>(spec.classes));
        hits += argmax(row) == labels[i];
      }
      adam_step(model.params(), backward(model, cache, lr.dlogits), adam, adam_cfg);
      loss_sum += lr.loss;
      ++batches;
    }
    EpochStats st;
    st.epoch = epoch;
    st.loss = loss_sum / static_cast<double>(batches);
    st.train_accuracy = static_cast<double>(hits) / static_cast<double>(train_set.size());
    st.held_out_accuracy = accuracy_of(model, scorer);
    if (st.held_out_accuracy > best) {
      best = st.held_out_accuracy;
      result.model = model;
      result.best_epoch = epoch;
    }
    st.best_accuracy = best;
    result.history.push_back(st);
  }
  return result;
}

Tensor predict_proba(const Model& model, const Dataset& data) {
  check_matches(data, model.spec(), "input");
  const int k = model.spec().classes;
  Tensor out({std::max<int>(1, static_cast<int>(data.size())), k});
  out.data.resize(data.size() * static_cast<std::size_t>(k));
  out.shape[0] = static_cast<int>(data.size());
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < data.size(); start += kPredictChunk) {
    const std::size_t end = std::min(data.size(), start + kPredictChunk);
    idx.resize(end - start);
    std::iota(idx.begin(), idx.end(), start);
    const Tensor p = softmax(forward(model, data.batch(idx)));
    std::copy(p.data.begin(), p.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(start * k));
  }
  return out;
}

std::vector<int> predict(const Model& model, const Dataset& data) {
  const Tensor p = predict_proba(model, data);
  const auto k = static_cast<std::size_t>(model.spec().classes);
  std::vector<int> out;
  for (std::size_t i = 0; i < data.size(); ++i) out.push_back(argmax(std::span(&p.data[i * k], k)));
  return out;
}

}  // namespace assemai
