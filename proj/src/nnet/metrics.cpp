#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "assemai/nnet.hpp"

namespace assemai {

namespace {

std::string label_of(int c, int classes) {
  if (classes == kNumClasses) return std::string(class_name(class_from_index(c)));
  return "class" + std::to_string(c);
}

std::string fixed(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, v);
  return buf;
}

}  // namespace

MetricsReport metrics_from_predictions(std::span<const int> truth, std::span<const int> predicted, int classes) {
  if (truth.size() != predicted.size()) throw InputError("truth and prediction lists differ in length");
  if (classes < 1) throw InputError("metrics need at least one class");
  MetricsReport r;
  r.classes = classes;
  r.confusion.assign(static_cast<std::size_t>(classes) * classes, 0);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] < 0 || truth[i] >= classes || predicted[i] < 0 || predicted[i] >= classes) {
      throw InputError("class index out of range at position " + std::to_string(i));
    }
    ++r.confusion[static_cast<std::size_t>(truth[i]) * classes + predicted[i]];
  }
  r.support = static_cast<std::int64_t>(truth.size());
  std::int64_t correct = 0;
  for (int c = 0; c < classes; ++c) {
    std::int64_t row = 0, col = 0;
    for (int j = 0; j < classes; ++j) {
      row += r.at(c, j);
      col += r.at(j, c);
    }
    const std::int64_t tp = r.at(c, c);
    correct += tp;
    ClassMetrics m;
    m.support = row;
    m.precision = col ? static_cast<double>(tp) / static_cast<double>(col) : 0.0;
    m.recall = row ? static_cast<double>(tp) / static_cast<double>(row) : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    r.per_class.push_back(m);
  }
  if (r.support > 0) {
    const double n = static_cast<double>(r.support);
    for (const ClassMetrics& m : r.per_class) {
      const double share = static_cast<double>(m.support) / n;
      r.weighted_precision += share * m.precision;
      r.weighted_recall += share * m.recall;
      r.weighted_f1 += share * m.f1;
    }
    r.accuracy = static_cast<double>(correct) / n;
  }
  return r;
}

MetricsReport evaluate(const Model& model, const Dataset& data) {
  if (data.size() == 0) throw InputError("cannot evaluate on an empty set");
  const std::vector<int> pred = predict(model, data);
  return metrics_from_predictions(data.labels, pred, model.spec().classes);
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["accuracy"] = accuracy;
  j["weighted_precision"] = weighted_precision;
  j["weighted_recall"] = weighted_recall;
  j["weighted_f1"] = weighted_f1;
  j["support"] = support;
  auto rows = nlohmann::ordered_json::array();
  for (int c = 0; c < classes; ++c) {
    const ClassMetrics& m = per_class[static_cast<std::size_t>(c)];
    rows.push_back({{"class", label_of(c, classes)},
                    {"precision", m.precision},
                    {"recall", m.recall},
                    {"f1", m.f1},
                    {"support", m.support}});
  }
  j["per_class"] = rows;
  auto cm = nlohmann::ordered_json::array();
  for (int t = 0; t < classes; ++t) {
    auto row = nlohmann::ordered_json::array();
    for (int p = 0; p < classes; ++p) row.push_back(at(t, p));
    cm.push_back(row);
  }
  j["confusion"] = cm;
  return j.dump(2) + "\n";
}

std::string MetricsReport::to_text() const {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-24s %10s %10s %10s %8s\n", "Class", "Precision", "Recall", "F1", "Support");
  os << line;
  for (int c = 0; c < classes; ++c) {
    const ClassMetrics& m = per_class[static_cast<std::size_t>(c)];
    std::snprintf(line, sizeof line, "%-24s %10.4f %10.4f %10.4f %8lld\n", label_of(c, classes).c_str(),
                  m.precision, m.recall, m.f1, static_cast<long long>(m.support));
    os << line;
  }
  os << '\n';
  std::snprintf(line, sizeof line, "%10s %10s %10s %10s %8s\n", "WP", "WR", "WF1", "Accuracy", "Support");
  os << line;
  std::snprintf(line, sizeof line, "%10s %10s %10s %10s %8lld\n", fixed("%.2f%%", 100 * weighted_precision).c_str(),
                fixed("%.2f%%", 100 * weighted_recall).c_str(), fixed("%.2f%%", 100 * weighted_f1).c_str(),
                fixed("%.2f%%", 100 * accuracy).c_str(), static_cast<long long>(support));
  os << line;
  return os.str();
}

}  // namespace assemai
