#ifndef ETAMIX_TOOLS_CONFIG_H_
#define ETAMIX_TOOLS_CONFIG_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "etamix/errors.h"
#include "etamix/scenarios.h"

namespace etamix::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

// A parsed model configuration. Either a hidden Markov model or an explicit
// joint table (optionally observed through emissions).
struct LoadedConfig {
  ScenarioModel model;
  nlohmann::json resolved;         // the model as used, after expansion
  nlohmann::json renormalization;  // sums before and after renormalization

  const ProcessModel* process() const { return std::get_if<ProcessModel>(&model); }
};

// Accepts probabilities as JSON numbers or decimal strings. Throws
// ConfigError; JSON syntax errors carry line and column.
LoadedConfig parse_config(const std::string& text);
LoadedConfig load_config(const std::filesystem::path& path);

// Parses a probability given as a number or decimal string.
double parse_probability(const nlohmann::json& value, const std::string& where);

// Splits a joint-table key into symbols: one character per symbol when every
// label is a single character, otherwise labels separated by spaces or commas.
Sequence parse_sequence_key(const std::string& key, const Alphabet& alphabet,
                            std::size_t n);

// Serializable description of a model as used (expanded, renormalized).
nlohmann::json describe_model(const ScenarioModel& model);

std::string read_file(const std::filesystem::path& path);

// ETAMIX_SIZE_GUARD, when set, overrides the default table cap.
SizeGuard size_guard_from_env();

}  // namespace etamix::cli

#endif  // ETAMIX_TOOLS_CONFIG_H_
