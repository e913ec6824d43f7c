#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "decoherence/errors.hpp"
#include "decoherence/table.hpp"

namespace decoherence::cli {

using Json = nlohmann::ordered_json;

/// Bad config, unknown key, or a parameter outside its module's domain.
class ValidationError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

enum class ParamKind { Real, Integer, Text };

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::Real;
  /// null marks an optional parameter whose value is derived when unset.
  Json default_value;
};

/// Known scenarios, in CLI order.
const std::vector<std::string>& scenario_names();

/// Declared parameters of a scenario, in output order.
const std::vector<ParamSpec>& scenario_parameters(const std::string& scenario);

struct ScenarioConfig {
  std::string scenario;
  Json parameters = Json::object();
  std::string output_path;
  TableFormat format = TableFormat::Csv;
  std::optional<std::uint64_t> seed;
};

/// Parse a JSON config document:
///   {"scenario": ..., "seed": N, "parameters": {...}, "output": {"path": ..., "format": ...}}
/// Every key is optional; unknown keys are rejected.
ScenarioConfig parse_config(const std::string& scenario, const std::string& text);
ScenarioConfig load_config(const std::string& scenario, const std::string& path);

/// Apply a "key=value" override. The value is read as JSON when it parses,
/// otherwise as a string.
void apply_override(ScenarioConfig& config, const std::string& assignment);

struct ScenarioOutput {
  std::string scenario;
  std::vector<std::string> equations;
  std::optional<std::uint64_t> seed;
  /// Every declared parameter after defaults and derivations.
  Json parameters = Json::object();
  /// Scenario-level results worth recording next to the table.
  Json derived = Json::object();
  Table table;
};

struct RunOptions {
  /// Worker cap; 0 means default_thread_count().
  std::size_t threads = 0;
};

/// Validate and run. Throws ValidationError (or another ArgumentError) before
/// any computation on bad input, NumericalError on numerical failure.
ScenarioOutput run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Metadata header followed by the table. CSV headers are '#'-prefixed
/// "key: value" lines; JSON wraps {"metadata": ..., "records": [...]}.
std::string render_output(const ScenarioOutput& output, TableFormat format);

/// 0 success, 2 validation error, 3 numerical failure, 1 anything else.
inline constexpr int kExitSuccess = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

}  // namespace decoherence::cli
