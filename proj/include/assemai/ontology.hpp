#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "assemai/core.hpp"

namespace assemai {

struct SensorSpec {
  std::string id;
  std::string unit;
  double lo = 0.0;
  double hi = 0.0;
  friend bool operator==(const SensorSpec&, const SensorSpec&) = default;
};

struct StateSpec {
  CycleState id{1};
  std::vector<std::string> equipment;
  std::vector<SensorSpec> sensors;
  std::vector<AnomalyClass> valid_anomalies;

  bool admits(AnomalyClass c) const noexcept;
};

/// Human-readable rule cited when a prediction is rejected. `classes` lists
/// the anomaly classes the rule talks about.
struct OntologyRule {
  std::string id;
  std::string text;
  std::vector<AnomalyClass> classes;
};

/// Process knowledge for the 21 cycle states.
struct OntologySpec {
  std::string version;
  std::vector<StateSpec> states;  // states[i].id == i + 1
  std::vector<OntologyRule> rules;

  const StateSpec& state(CycleState s) const { return states.at(static_cast<std::size_t>(s.value() - 1)); }
};

/// Schema violation report; `violations` holds one "path: message" entry per problem.
class OntologyError : public InputError {
 public:
  explicit OntologyError(std::vector<std::string> violations);
  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

/// Parses and validates an ontology document. Unknown fields, missing
/// fields, wrong types, a state count other than 21, states out of order,
/// duplicate sensor ids, lo > hi and a missing NoAnomaly are all reported
/// together in one OntologyError.
OntologySpec parse_ontology(const std::string& json_text);
OntologySpec load_ontology(const std::filesystem::path& path);

/// Path of the ontology shipped with the project.
std::filesystem::path default_ontology_path();

enum class VerdictStatus { Consistent, Inconsistent };

struct Verdict {
  VerdictStatus status = VerdictStatus::Consistent;
  std::string rule_id;  // empty for consistent verdicts
  std::string reason;
  CycleState state{1};
  AnomalyClass predicted = AnomalyClass::NoAnomaly;

  bool consistent() const noexcept { return status == VerdictStatus::Consistent; }
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

std::string_view verdict_status_name(VerdictStatus s) noexcept;

/// Membership test against the state's valid anomalies. Inconsistent
/// verdicts cite the first rule covering the predicted class, or the state's
/// membership list when no rule does.
Verdict verify(CycleState state, AnomalyClass predicted, const OntologySpec& spec);

const std::vector<SensorSpec>& expected_sensors(CycleState state, const OntologySpec& spec);

/// One-paragraph explanation: verdict plus the state's expected sensor ranges.
std::string explain_prediction(CycleState state, AnomalyClass predicted, const OntologySpec& spec);

struct AuditRow {
  AnomalyClass cls = AnomalyClass::NoAnomaly;
  std::int64_t inconsistent = 0;
  std::int64_t total = 0;
};

struct AuditTable {
  std::vector<AuditRow> rows;  // one per class, canonical order
  std::int64_t records = 0;
  std::int64_t skipped_lines = 0;
  std::vector<std::string> warnings;

  std::string to_json() const;
  /// One "<class>: X out of Y inconsistent" line per class, then totals.
  std::string to_text() const;
};

struct StatePrediction {
  CycleState state;
  AnomalyClass predicted;
};

AuditTable audit(const std::vector<StatePrediction>& predictions, const OntologySpec& spec);
/// Reads a detection log (see detlog.hpp) and audits every parsed record.
AuditTable audit(const std::filesystem::path& detection_log, const OntologySpec& spec);

}  // namespace assemai
