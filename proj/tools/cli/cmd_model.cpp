#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "assemai/detlog.hpp"
#include "assemai/manifest.hpp"
#include "assemai/nnet.hpp"
#include "assemai/ontology.hpp"
#include "assemai/pipeline.hpp"
#include "assemai/raster_io.hpp"
#include "assemai/scorecam.hpp"
#include "commands.hpp"

namespace assemai::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

RoiMode roi_or_throw(const std::string& name) {
  const auto m = parse_roi_mode(name);
  if (!m) throw InputError("unknown roi mode '" + name + "'");
  return *m;
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

ordered_json counts_json(const ClassCounts& c) {
  ordered_json j = ordered_json::object();
  for (int k = 0; k < kNumClasses; ++k) j[std::string(class_name(class_from_index(k)))] = c[k];
  return j;
}

AnomalyClass class_from_json(const nlohmann::json& v, const char* key) {
  if (v.is_number_integer()) return class_from_index(v.get<int>());
  if (v.is_string()) {
    if (auto c = parse_class_name(v.get<std::string>())) return *c;
  }
  throw InputError(std::string("field '") + key + "' must be a class name or index");
}

}  // namespace

int run_train(const TrainOptions& o) {
  const RoiMode mode = roi_or_throw(o.roi);
  const fs::path out(o.out);
  const DatasetManifest m = read_manifest(o.manifest);
  const fs::path root = manifest_dir(o.manifest);

  TrainConfig cfg;
  cfg.epochs = o.epochs;
  cfg.batch_size = o.batch;
  cfg.learning_rate = o.lr;
  cfg.seed = o.seed;
  cfg.input_width = o.input;
  cfg.input_height = o.input;
  cfg.split_fraction = o.split;
  cfg.validate();
  ModelSpec spec;
  spec.in_channels = o.channels;
  spec.in_height = o.input;
  spec.in_width = o.input;
  spec.conv1_filters = o.conv1;
  spec.conv2_filters = o.conv2;
  spec.hidden = o.dense;
  spec.validate();
  ensure_dir(out / "test");

  auto [train_part, test_part] = split_train_test(m, cfg.split_fraction, cfg.seed);
  const InputPreparer prep(mode, o.input, o.input);
  const Dataset train_set = build_dataset(train_part, root, prep, o.channels);
  // The held-out split doubles as the model-selection set.
  const Dataset test_set = build_dataset(test_part, root, prep, o.channels);
  const ClassWeights weights = class_weights(train_part.class_counts);
  std::cout << "training on " << train_set.size() << " images, held out " << test_set.size() << "\n";

  const TrainResult res = train(train_set, test_set, cfg, weights, spec);
  for (const EpochStats& e : res.history) {
    std::printf("epoch %3d  loss %.5f  train %.4f  held-out %.4f\n", e.epoch, e.loss, e.train_accuracy,
                e.held_out_accuracy);
  }
  save_model(res.model, out / "model.assemai");

  // Test manifest with absolute image paths so eval/explain can run from anywhere.
  DatasetManifest test_abs = test_part;
  for (Sample& s : test_abs.samples) s.image_path = fs::absolute(root / s.image_path).lexically_normal().string();
  write_manifest(test_abs, out / "test");

  ordered_json hist = ordered_json::array();
  for (const EpochStats& e : res.history) {
    hist.push_back({{"epoch", e.epoch}, {"loss", e.loss}, {"train_accuracy", e.train_accuracy},
                    {"held_out_accuracy", e.held_out_accuracy}, {"best_accuracy", e.best_accuracy}});
  }
  ordered_json summary;
  summary["model_id"] = model_id(res.model);
  summary["best_epoch"] = res.best_epoch;
  summary["roi"] = o.roi;
  summary["seed"] = o.seed;
  summary["epochs"] = cfg.epochs;
  summary["batch_size"] = cfg.batch_size;
  summary["learning_rate"] = cfg.learning_rate;
  summary["input"] = o.input;
  summary["channels"] = o.channels;
  summary["split_fraction"] = cfg.split_fraction;
  summary["train_counts"] = counts_json(train_part.class_counts);
  summary["test_counts"] = counts_json(test_part.class_counts);
  summary["class_weights"] = weights.w;
  summary["history"] = hist;
  write_text(out / "train.json", summary.dump(2) + "\n");

  std::cout << "best epoch " << res.best_epoch << ", model " << model_id(res.model) << "\n";
  announce(out / "model.assemai");
  announce(out / "train.json");
  announce(out / "test" / kManifestFile);
  return 0;
}

int run_eval(const EvalOptions& o) {
  const fs::path out(o.out);
  ensure_dir(out);
  MetricsReport report;
  if (!o.predictions.empty()) {
    std::istringstream in(read_text(o.predictions));
    std::vector<int> truth, pred;
    std::string line;
    std::int64_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw FormatError("predictions line " + std::to_string(lineno) + " is not JSON", e.byte);
      }
      if (!j.contains("label") || !j.contains("predicted")) {
        throw InputError("predictions line " + std::to_string(lineno) + " needs label and predicted");
      }
      truth.push_back(to_index(class_from_json(j["label"], "label")));
      pred.push_back(to_index(class_from_json(j["predicted"], "predicted")));
    }
    report = metrics_from_predictions(truth, pred, kNumClasses);
  } else {
    const Model model = load_model(o.model);
    const ModelSpec& spec = model.spec();
    const std::string mid = model_id(model);
    const OntologySpec onto = load_ontology(o.ontology.empty() ? default_ontology_path() : fs::path(o.ontology));
    const DatasetManifest m = read_manifest(o.manifest);
    const fs::path root = manifest_dir(o.manifest);
    const InputPreparer prep(roi_or_throw(o.roi), spec.in_width, spec.in_height);
    Dataset data;
    data.channels = spec.in_channels;
    data.width = spec.in_width;
    data.height = spec.in_height;
    std::vector<BoundingBox> boxes;
    for (const Sample& s : m.samples) {
      PreparedInput in = prep.prepare(read_raster(root / s.image_path), s.state);
      data.add(image_to_batch(model, in.image).data, to_index(s.label));
      boxes.push_back(in.bbox);
    }
    const Tensor probs = predict_proba(model, data);
    std::vector<int> pred(data.size());
    std::ostringstream lines, detections;
    for (std::size_t i = 0; i < data.size(); ++i) {
      const Sample& s = m.samples[i];
      const std::span<const double> row(probs.data.data() + i * spec.classes, spec.classes);
      pred[i] = argmax(row);
      ordered_json j;
      j["image_path"] = s.image_path;
      j["label"] = std::string(class_name(s.label));
      j["predicted"] = std::string(class_name(class_from_index(pred[i])));
      j["probs"] = std::vector<double>(row.begin(), row.end());
      lines << j.dump() << "\n";
      if (spec.classes == kNumClasses) {
        DetectionRecord r;
        r.ts_ms = s.timestamp_ms;
        r.cycle_index = s.cycle_index;
        r.cycle_state = s.state;
        r.predicted_class = class_from_index(pred[i]);
        std::copy(row.begin(), row.end(), r.probs.begin());
        r.bbox = boxes[i];
        r.verdict = verify(s.state, r.predicted_class, onto);
        r.model_id = mid;
        detections << record_to_json_line(r) << "\n";
      }
    }
    report = metrics_from_predictions(data.labels, pred, spec.classes);
    write_text(out / "predictions.jsonl", lines.str());
    announce(out / "predictions.jsonl");
    if (spec.classes == kNumClasses) {
      // Offline detection log in the gateway's format, for `verify`.
      write_text(out / "detections.jsonl", detections.str());
      announce(out / "detections.jsonl");
    }
  }
  write_text(out / "metrics.json", report.to_json());
  write_text(out / "metrics.txt", report.to_text());
  std::cout << report.to_text();
  announce(out / "metrics.json");
  announce(out / "metrics.txt");
  return 0;
}

int run_explain(const ExplainOptions& o) {
  const fs::path out(o.out);
  ensure_dir(out / "heatmaps");
  const Model model = load_model(o.model);
  const ModelSpec& spec = model.spec();
  const DatasetManifest m = read_manifest(o.manifest);
  const fs::path root = manifest_dir(o.manifest);
  const InputPreparer prep(roi_or_throw(o.roi), spec.in_width, spec.in_height);

  ordered_json images = ordered_json::array();
  std::vector<double> fractions, areas;
  std::int64_t misclassified = 0, no_box = 0, degenerate = 0;
  int written = 0;
  for (const Sample& s : m.samples) {
    if (static_cast<int>(fractions.size()) >= o.limit) break;
    const PreparedInput in = prep.prepare(read_raster(root / s.image_path), s.state);
    const Tensor probs = softmax(forward(model, image_to_batch(model, in.image)));
    const int pred = argmax(probs.data);
    if (pred != to_index(s.label)) {
      ++misclassified;
      if (!o.all) continue;
    }
    const auto box = map_box_to_input(s.truth_box, in.window, spec.in_width, spec.in_height);
    if (!box) {
      ++no_box;
      continue;
    }
    const SaliencyMap sal = score_cam(model, o.layer, in.image, pred);
    if (sal.degenerate) ++degenerate;
    const double frac = saliency_in_box_fraction(sal, *box);
    const double area = static_cast<double>(box->area()) / (static_cast<double>(spec.in_width) * spec.in_height);
    fractions.push_back(frac);
    areas.push_back(area);
    ordered_json j;
    j["image_path"] = s.image_path;
    j["label"] = std::string(class_name(s.label));
    j["predicted"] = std::string(class_name(class_from_index(pred)));
    j["box"] = {box->x_min, box->y_min, box->x_max, box->y_max};
    j["in_box_fraction"] = frac;
    j["box_area_fraction"] = area;
    if (written < o.heatmaps) {
      const fs::path hp = out / "heatmaps" / (fs::path(s.image_path).stem().string() + ".ppm");
      write_raster(render_heatmap(sal, in.image), hp);
      j["heatmap"] = hp.filename().string();
      ++written;
    }
    images.push_back(std::move(j));
  }

  ordered_json summary;
  summary["layer"] = o.layer;
  summary["roi"] = o.roi;
  summary["explained"] = fractions.size();
  summary["skipped_misclassified"] = o.all ? 0 : misclassified;
  summary["skipped_no_box"] = no_box;
  summary["degenerate_maps"] = degenerate;
  summary["median_in_box_fraction"] = median(fractions);
  summary["median_box_area_fraction"] = median(areas);
  summary["images"] = images;
  write_text(out / "explain.json", summary.dump(2) + "\n");

  std::printf("explained %zu images; median in-box saliency %.4f vs median box area %.4f\n", fractions.size(),
              median(fractions), median(areas));
  announce(out / "explain.json");
  if (written > 0) announce(out / "heatmaps");
  return 0;
}

}  // namespace assemai::cli
