#ifndef ETAMIX_SCENARIOS_H_
#define ETAMIX_SCENARIOS_H_

#include <functional>
#include <span>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "etamix/inference.h"
#include "etamix/process_model.h"

namespace etamix {

// An arbitrary hidden measure observed through per-position emissions.
struct HiddenJointModel {
  JointLaw hidden;
  std::vector<EmissionKernel> emissions;
  Alphabet observed;
};

using ScenarioModel = std::variant<ProcessModel, HiddenJointModel>;

struct AssertionOutcome {
  bool passed = false;
  nlohmann::json values;
  std::string detail;
};

struct ScenarioAssertion {
  std::string name;
  // Where the expected value comes from: "published-table",
  // "published-claim", "exact-computation" or "by-construction".
  std::string provenance;
  std::function<AssertionOutcome(const ScenarioModel&)> check;
};

struct Scenario {
  std::string name;
  std::string description;
  ScenarioModel model;
  std::vector<ScenarioAssertion> assertions;
};

struct AssertionResult {
  std::string name;
  std::string provenance;
  bool passed = false;
  nlohmann::json values;
  std::string detail;
};

struct ScenarioReport {
  std::string name;
  std::string description;
  std::vector<AssertionResult> results;
  nlohmann::json summary;

  bool all_passed() const;
};

// Figure values as printed, six decimals, in sequence order.
struct PublishedEntry {
  const char* sequence;
  const char* probability;
};
std::span<const PublishedEntry> figure1_table();

// n = 4 binary hidden measure from the published table, observed through
// q(x|xbar) = 1/4 [x = xbar] + 3/4 [x != xbar] at every position.
Scenario counterexample_figure1();
Scenario iid_uniform_n4();
Scenario deterministic_copy_n4();
Scenario contracting_chain_n6();

std::vector<std::string> scenario_names();
std::optional<Scenario> find_scenario(const std::string& name);

// Assertion failures are recorded in the report; only infrastructure errors
// throw.
ScenarioReport run_scenario(const Scenario& scenario);

nlohmann::json to_json(const ScenarioReport& report);

}  // namespace etamix

#endif  // ETAMIX_SCENARIOS_H_
