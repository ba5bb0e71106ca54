#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "smate/coding_plan.hpp"
#include "smate/simnet.hpp"

namespace smate {

inline constexpr int kScenarioSchemaVersion = 1;

// Raised for unreadable or invalid scenario files. The message names the
// offending section and key (or line, for syntax errors).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct FieldConfig {
  unsigned degree = FieldContext::kDefaultDegree;
  std::uint32_t polynomial = FieldContext::kDefaultPolynomial;
  std::uint32_t generator = FieldContext::kDefaultGenerator;

  friend bool operator==(const FieldConfig&, const FieldConfig&) = default;
};

// One simulation job. Paths are 0-based.
struct Scenario {
  std::string name;
  Scheme scheme = Scheme::kRotatingSingle;
  std::size_t paths = 0;
  std::size_t budget = 1;
  std::size_t rounds = 1;                 // dedicated only
  std::vector<PathIndex> parity_paths;    // dedicated, two_dedicated
  std::vector<std::uint32_t> qos_protection;
  std::vector<std::int32_t> qos_priority;
  std::uint64_t session_seed = 0;
  FieldConfig field;
  std::size_t payload_size = 1024;
  std::uint64_t payload_seed = 1;
  FailureModel failure;
  std::size_t chunk_size = 64;
  std::size_t repetitions = 1;
  bool encrypt = false;

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

// A scenario template whose `paths` and `budget` range over value lists.
struct SweepSpec {
  Scenario base;
  std::vector<std::size_t> paths_values;
  std::vector<std::size_t> budget_values;
};

struct ScenarioFile {
  int schema_version = kScenarioSchemaVersion;
  std::vector<Scenario> scenarios;
  std::vector<SweepSpec> sweeps;
};

ScenarioFile parse_scenarios(std::istream& in, const std::string& source = "<input>");
ScenarioFile load_scenarios(const std::filesystem::path& path);

// Throws PlanError/FieldError when the parameters are infeasible.
CodingPlan build_plan(const Scenario& scenario);

// Deterministic pseudo-random payload of scenario.payload_size bytes.
std::vector<std::uint8_t> make_payload(std::size_t size, std::uint64_t seed);

// Writes a [scenario.<name>] section describing the plan; parsing it back and
// calling build_plan reproduces the plan.
std::string plan_to_config(const CodingPlan& plan, const std::string& name);

}  // namespace smate
