#include "assemai/ontology.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "assemai/detlog.hpp"

#ifndef ASSEMAI_DATA_DIR
#define ASSEMAI_DATA_DIR "data"
#endif

namespace assemai {

namespace {

using nlohmann::json;

std::string join_lines(const std::vector<std::string>& v) {
  std::string s = "ontology schema violations:";
  for (const auto& line : v) s += "\n  " + line;
  return s;
}

// Collects every violation instead of stopping at the first.
class Checker {
 public:
  void fail(const std::string& path, const std::string& msg) { problems.push_back(path + ": " + msg); }

  void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    for (const auto& [key, _] : obj.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        fail(path + "." + key, "unknown field");
      }
    }
  }

  const json* field(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) {
      fail(path + "." + key, "missing required field");
      return nullptr;
    }
    return &obj.at(key);
  }

  std::optional<std::string> string_at(const json& obj, const std::string& path, const char* key) {
    const json* v = field(obj, path, key);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      fail(path + "." + key, "expected a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<AnomalyClass> class_at(const json& v, const std::string& path) {
    if (!v.is_string()) {
      fail(path, "expected an anomaly class name");
      return std::nullopt;
    }
    const auto c = parse_class_name(v.get<std::string>());
    if (!c) fail(path, "unknown anomaly class '" + v.get<std::string>() + "'");
    return c;
  }

  std::vector<std::string> problems;
};

StateSpec parse_state(const json& js, const std::string& path, int expected_id, Checker& ck) {
  StateSpec st;
  if (!js.is_object()) {
    ck.fail(path, "expected an object");
    return st;
  }
  ck.only_keys(js, path, {"id", "equipment", "sensors", "valid_anomalies"});
  if (const json* id = ck.field(js, path, "id")) {
    if (!id->is_number_integer() || id->get<int>() < 1 || id->get<int>() > kNumCycleStates) {
      ck.fail(path + ".id", "expected an integer cycle state in 1..21");
    } else if (id->get<int>() != expected_id) {
      ck.fail(path + ".id", "expected state " + std::to_string(expected_id) + " at this position, found " +
                                std::to_string(id->get<int>()));
    } else {
      st.id = CycleState(id->get<int>());
    }
  }
  if (const json* eq = ck.field(js, path, "equipment")) {
    if (!eq->is_array()) {
      ck.fail(path + ".equipment", "expected an array of strings");
    } else {
      for (std::size_t i = 0; i < eq->size(); ++i) {
        if ((*eq)[i].is_string()) {
          st.equipment.push_back((*eq)[i].get<std::string>());
        } else {
          ck.fail(path + ".equipment[" + std::to_string(i) + "]", "expected a string");
        }
      }
    }
  }
  if (const json* ss = ck.field(js, path, "sensors")) {
    if (!ss->is_array()) {
      ck.fail(path + ".sensors", "expected an array");
    } else {
      std::set<std::string> seen;
      for (std::size_t i = 0; i < ss->size(); ++i) {
        const std::string sp = path + ".sensors[" + std::to_string(i) + "]";
        const json& s = (*ss)[i];
        if (!s.is_object()) {
          ck.fail(sp, "expected an object");
          continue;
        }
        ck.only_keys(s, sp, {"id", "unit", "expected_range"});
        SensorSpec sensor;
        if (auto id = ck.string_at(s, sp, "id")) {
          sensor.id = *id;
          if (!seen.insert(*id).second) ck.fail(sp + ".id", "duplicate sensor id '" + *id + "'");
        }
        if (auto unit = ck.string_at(s, sp, "unit")) sensor.unit = *unit;
        if (const json* r = ck.field(s, sp, "expected_range")) {
          if (!r->is_array() || r->size() != 2 || !(*r)[0].is_number() || !(*r)[1].is_number()) {
            ck.fail(sp + ".expected_range", "expected [lo, hi]");
          } else {
            sensor.lo = (*r)[0].get<double>();
            sensor.hi = (*r)[1].get<double>();
            if (sensor.lo > sensor.hi) ck.fail(sp + ".expected_range", "lo must not exceed hi");
          }
        }
        st.sensors.push_back(std::move(sensor));
      }
    }
  }
  if (const json* va = ck.field(js, path, "valid_anomalies")) {
    if (!va->is_array()) {
      ck.fail(path + ".valid_anomalies", "expected an array of class names");
    } else {
      for (std::size_t i = 0; i < va->size(); ++i) {
        const auto c = ck.class_at((*va)[i], path + ".valid_anomalies[" + std::to_string(i) + "]");
        if (c && std::find(st.valid_anomalies.begin(), st.valid_anomalies.end(), *c) == st.valid_anomalies.end()) {
          st.valid_anomalies.push_back(*c);
        }
      }
      if (!st.admits(AnomalyClass::NoAnomaly)) ck.fail(path + ".valid_anomalies", "must include NoAnomaly");
    }
  }
  return st;
}

std::string class_list(const std::vector<AnomalyClass>& cs) {
  std::string s;
  for (std::size_t i = 0; i < cs.size(); ++i) s += (i ? ", " : "") + std::string(class_name(cs[i]));
  return s;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

bool StateSpec::admits(AnomalyClass c) const noexcept {
  return std::find(valid_anomalies.begin(), valid_anomalies.end(), c) != valid_anomalies.end();
}

OntologyError::OntologyError(std::vector<std::string> violations)
    : InputError(join_lines(violations)), violations_(std::move(violations)) {}

OntologySpec parse_ontology(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw OntologyError({std::string("$: not valid JSON (") + e.what() + ")"});
  }
  Checker ck;
  OntologySpec spec;
  if (!doc.is_object()) throw OntologyError({"$: expected an object"});
  ck.only_keys(doc, "$", {"version", "states", "rules"});
  if (auto v = ck.string_at(doc, "$", "version")) spec.version = *v;
  if (const json* states = ck.field(doc, "$", "states")) {
    if (!states->is_array()) {
      ck.fail("$.states", "expected an array");
    } else {
      if (states->size() != kNumCycleStates) {
        ck.fail("$.states", "expected 21 states, found " + std::to_string(states->size()));
      }
      for (std::size_t i = 0; i < states->size(); ++i) {
        spec.states.push_back(
            parse_state((*states)[i], "$.states[" + std::to_string(i) + "]", static_cast<int>(i) + 1, ck));
      }
    }
  }
  if (doc.contains("rules")) {
    const json& rules = doc.at("rules");
    if (!rules.is_array()) {
      ck.fail("$.rules", "expected an array");
    } else {
      std::set<std::string> ids;
      for (std::size_t i = 0; i < rules.size(); ++i) {
        const std::string rp = "$.rules[" + std::to_string(i) + "]";
        const json& r = rules[i];
        if (!r.is_object()) {
          ck.fail(rp, "expected an object");
          continue;
        }
        ck.only_keys(r, rp, {"id", "text", "classes"});
        OntologyRule rule;
        if (auto id = ck.string_at(r, rp, "id")) {
          rule.id = *id;
          if (!ids.insert(*id).second) ck.fail(rp + ".id", "duplicate rule id '" + *id + "'");
        }
        if (auto text = ck.string_at(r, rp, "text")) rule.text = *text;
        if (const json* cs = ck.field(r, rp, "classes")) {
          if (!cs->is_array()) {
            ck.fail(rp + ".classes", "expected an array of class names");
          } else {
            for (std::size_t k = 0; k < cs->size(); ++k)
              if (auto c = ck.class_at((*cs)[k], rp + ".classes[" + std::to_string(k) + "]")) rule.classes.push_back(*c);
          }
        }
        spec.rules.push_back(std::move(rule));
      }
    }
  }
  if (!ck.problems.empty()) throw OntologyError(ck.problems);
  return spec;
}

OntologySpec load_ontology(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open ontology " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_ontology(ss.str());
}

std::filesystem::path default_ontology_path() {
  return std::filesystem::path(ASSEMAI_DATA_DIR) / "ontology_default.json";
}

std::string_view verdict_status_name(VerdictStatus s) noexcept {
  return s == VerdictStatus::Consistent ? "Consistent" : "Inconsistent";
}

Verdict verify(CycleState state, AnomalyClass predicted, const OntologySpec& spec) {
  Verdict v;
  v.state = state;
  v.predicted = predicted;
  const StateSpec& st = spec.state(state);
  const std::string name(class_name(predicted));
  if (st.admits(predicted)) {
    v.status = VerdictStatus::Consistent;
    v.reason = name + " is admissible in cycle state " + std::to_string(state.value());
    return v;
  }
  v.status = VerdictStatus::Inconsistent;
  for (const OntologyRule& r : spec.rules) {
    if (std::find(r.classes.begin(), r.classes.end(), predicted) == r.classes.end()) continue;
    v.rule_id = r.id;
    v.reason = "rule " + r.id + ": " + r.text + " (predicted " + name + " in cycle state " +
               std::to_string(state.value()) + ")";
    return v;
  }
  v.rule_id = "state-" + std::to_string(state.value()) + ".valid_anomalies";
  v.reason = "cycle state " + std::to_string(state.value()) + " admits only " + class_list(st.valid_anomalies) +
             "; predicted " + name;
  return v;
}

const std::vector<SensorSpec>& expected_sensors(CycleState state, const OntologySpec& spec) {
  return spec.state(state).sensors;
}

std::string explain_prediction(CycleState state, AnomalyClass predicted, const OntologySpec& spec) {
  const Verdict v = verify(state, predicted, spec);
  std::string s = "Predicted " + std::string(class_name(predicted)) + " in cycle state " +
                  std::to_string(state.value()) + ": " + std::string(verdict_status_name(v.status)) + ". " + v.reason +
                  ".";
  const StateSpec& st = spec.state(state);
  if (!st.equipment.empty()) {
    s += " Equipment:";
    for (std::size_t i = 0; i < st.equipment.size(); ++i) s += (i ? ", " : " ") + st.equipment[i];
    s += ".";
  }
  if (!st.sensors.empty()) {
    s += " Expected sensor values:";
    for (std::size_t i = 0; i < st.sensors.size(); ++i) {
      const SensorSpec& x = st.sensors[i];
      s += (i ? "; " : " ") + x.id + " in [" + format_number(x.lo) + ", " + format_number(x.hi) + "] " + x.unit;
    }
    s += ".";
  }
  return s;
}

AuditTable audit(const std::vector<StatePrediction>& predictions, const OntologySpec& spec) {
  AuditTable t;
  for (AnomalyClass c : kAllClasses) t.rows.push_back({c, 0, 0});
  for (const StatePrediction& p : predictions) {
    AuditRow& row = t.rows[static_cast<std::size_t>(to_index(p.predicted))];
    ++row.total;
    if (!verify(p.state, p.predicted, spec).consistent()) ++row.inconsistent;
    ++t.records;
  }
  return t;
}

AuditTable audit(const std::filesystem::path& detection_log, const OntologySpec& spec) {
  const LogContents log = read_log(detection_log);
  std::vector<StatePrediction> preds;
  for (const DetectionRecord& r : log.records) preds.push_back({r.cycle_state, r.predicted_class});
  AuditTable t = audit(preds, spec);
  t.skipped_lines = log.skipped;
  t.warnings = log.warnings;
  return t;
}

std::string AuditTable::to_json() const {
  nlohmann::ordered_json j;
  j["records"] = records;
  j["skipped_lines"] = skipped_lines;
  auto arr = nlohmann::ordered_json::array();
  for (const AuditRow& r : rows) {
    arr.push_back({{"class", class_name(r.cls)}, {"inconsistent", r.inconsistent}, {"total", r.total}});
  }
  j["classes"] = arr;
  return j.dump(2) + "\n";
}

std::string AuditTable::to_text() const {
  std::ostringstream os;
  char line[128];
  for (const AuditRow& r : rows) {
    std::snprintf(line, sizeof line, "%s: %lld out of %lld inconsistent\n", std::string(class_name(r.cls)).c_str(),
                  static_cast<long long>(r.inconsistent), static_cast<long long>(r.total));
    os << line;
  }
  os << "records: " << records << ", skipped lines: " << skipped_lines << '\n';
  return os.str();
}

}  // namespace assemai
