#ifndef ETAMIX_TOOLS_COMMANDS_H_
#define ETAMIX_TOOLS_COMMANDS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace etamix::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
// A proven inequality failed numerically; indicates a bug.
inline constexpr int kExitViolation = 2;

enum class Method { kBrute, kFilter, kBoth };

struct MixingOptions {
  std::filesystem::path config;
  std::optional<std::size_t> i;
  std::optional<std::size_t> j;
  Method method = Method::kBrute;
  std::string out = "-";  // "-" is stdout
};

struct BoundsOptions {
  std::filesystem::path config;
  std::vector<double> thresholds;  // empty: defaults
  std::string out = "-";
};

struct MonteCarloOptions {
  std::filesystem::path config;
  std::string function = "hamming";
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
  std::vector<double> thresholds;  // empty: defaults
  std::string out = "-";
  std::string csv;  // empty: no CSV
};

struct ScenarioOptions {
  std::string name;
  bool list = false;
  std::string out = "-";
};

// Each command writes its report and returns an exit code. Input errors are
// printed to `err` and return kExitInputError.
int run_mixing(const MixingOptions& options, std::ostream& out, std::ostream& err);
int run_bounds(const BoundsOptions& options, std::ostream& out, std::ostream& err);
int run_montecarlo(const MonteCarloOptions& options, std::ostream& out, std::ostream& err);
int run_scenario_command(const ScenarioOptions& options, std::ostream& out,
                         std::ostream& err);

// Full command line: etamix <mixing|bounds|montecarlo|scenario> ...
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace etamix::cli

#endif  // ETAMIX_TOOLS_COMMANDS_H_
