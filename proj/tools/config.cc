#include "config.h"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "etamix/process_model.h"
#include "etamix/report_json.h"

namespace etamix::cli {

using nlohmann::json;

namespace {

const std::set<std::string> kModelKeys = {
    "n", "hidden_alphabet", "observed_alphabet", "initial", "kernels",
    "emissions", "homogeneous", "description"};
const std::set<std::string> kJointKeys = {
    "n", "alphabet", "joint_table", "emissions", "observed_alphabet",
    "homogeneous", "description"};

void reject_unknown_keys(const json& doc, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : doc.items()) {
    if (!allowed.contains(key)) throw ConfigError(fmt::format("unknown key '{}'", key));
  }
}

const json& require(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw ConfigError(fmt::format("missing key '{}'", key));
  return doc.at(key);
}

std::size_t parse_length(const json& doc) {
  const json& n = require(doc, "n");
  if (!n.is_number_integer() || n.get<long long>() < 1)
    throw ConfigError("'n' must be an integer >= 1");
  return n.get<std::size_t>();
}

Alphabet parse_alphabet(const json& value, const std::string& where) {
  if (!value.is_array() || value.empty())
    throw ConfigError(fmt::format("'{}' must be a non-empty array of labels", where));
  Alphabet a;
  for (const auto& label : value) {
    if (!label.is_string())
      throw ConfigError(fmt::format("'{}' labels must be strings", where));
    a.labels.push_back(label.get<std::string>());
  }
  std::set<std::string> seen(a.labels.begin(), a.labels.end());
  if (seen.size() != a.labels.size())
    throw ConfigError(fmt::format("'{}' has duplicate labels", where));
  return a;
}

std::vector<double> parse_vector(const json& value, const std::string& where) {
  if (!value.is_array()) throw ConfigError(fmt::format("'{}' must be an array", where));
  std::vector<double> out;
  for (std::size_t k = 0; k < value.size(); ++k)
    out.push_back(parse_probability(value[k], fmt::format("{}[{}]", where, k)));
  return out;
}

bool is_matrix(const json& value) {
  return value.is_array() && !value.empty() && value[0].is_array() &&
         !value[0].empty() && !value[0][0].is_array();
}

Matrix parse_matrix(const json& value, const std::string& where) {
  if (!is_matrix(value))
    throw ConfigError(fmt::format("'{}' must be a matrix (array of rows)", where));
  const std::size_t cols = value[0].size();
  Matrix m(value.size(), cols);
  for (std::size_t r = 0; r < value.size(); ++r) {
    const auto row = parse_vector(value[r], fmt::format("{}[{}]", where, r));
    if (row.size() != cols) throw ConfigError(fmt::format("'{}' has ragged rows", where));
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
  }
  return m;
}

// A single matrix replicated `count` times when homogeneous, else a list of
// exactly `count` matrices.
std::vector<Matrix> parse_matrix_list(const json& value, std::size_t count,
                                      bool homogeneous, const std::string& where) {
  if (homogeneous && is_matrix(value))
    return std::vector<Matrix>(count, parse_matrix(value, where));
  if (!value.is_array() || (is_matrix(value) && count > 0)) {
    throw ConfigError(fmt::format(
        "'{}' must be a list of {} matrices (or one matrix with \"homogeneous\": true)",
        where, count));
  }
  if (value.size() != count) {
    throw ConfigError(
        fmt::format("'{}' has {} matrices, expected {}", where, value.size(), count));
  }
  std::vector<Matrix> out;
  for (std::size_t k = 0; k < value.size(); ++k)
    out.push_back(parse_matrix(value[k], fmt::format("{}[{}]", where, k)));
  return out;
}

bool parse_homogeneous(const json& doc) {
  if (!doc.contains("homogeneous")) return false;
  if (!doc["homogeneous"].is_boolean()) throw ConfigError("'homogeneous' must be a boolean");
  return doc["homogeneous"].get<bool>();
}

json sums_record(const std::vector<double>& pre, const std::vector<double>& post) {
  return {{"pre", pre}, {"post", post}};
}

json matrix_sums(const std::vector<Matrix>& pre, const std::vector<Matrix>& post) {
  json out = json::array();
  for (std::size_t k = 0; k < pre.size(); ++k)
    out.push_back(sums_record(row_sums(pre[k]), row_sums(post[k])));
  return out;
}

LoadedConfig parse_model_form(const json& doc) {
  reject_unknown_keys(doc, kModelKeys);
  const bool homogeneous = parse_homogeneous(doc);

  ProcessModel raw;
  raw.n = parse_length(doc);
  raw.hidden = parse_alphabet(require(doc, "hidden_alphabet"), "hidden_alphabet");
  raw.initial = parse_vector(require(doc, "initial"), "initial");
  raw.kernels = parse_matrix_list(require(doc, "kernels"), raw.n - 1, homogeneous, "kernels");
  if (doc.contains("emissions")) {
    raw.observed =
        parse_alphabet(require(doc, "observed_alphabet"), "observed_alphabet");
    raw.emissions = parse_matrix_list(doc["emissions"], raw.n, homogeneous, "emissions");
  } else {
    // Plain Markov chain: every state is observed as itself.
    raw.observed = doc.contains("observed_alphabet")
                       ? parse_alphabet(doc["observed_alphabet"], "observed_alphabet")
                       : raw.hidden;
    if (!(raw.observed == raw.hidden)) {
      throw ConfigError(
          "'emissions' omitted: observed_alphabet must equal hidden_alphabet");
    }
    raw.emissions.assign(raw.n, identity_emission(raw.hidden.size()));
  }

  const ValidationResult validation = validate(raw);
  if (!validation.ok()) {
    std::string message = "invalid model:";
    for (const auto& v : validation.violations) message += "\n  " + v.describe();
    throw ConfigError(message);
  }
  ProcessModel model = normalize_model(raw);

  LoadedConfig out;
  out.resolved = to_json(model);
  out.renormalization = {
      {"initial", sums_record({pairwise_sum(raw.initial)}, {pairwise_sum(model.initial)})},
      {"kernels", matrix_sums(raw.kernels, model.kernels)},
      {"emissions", matrix_sums(raw.emissions, model.emissions)}};
  out.model = std::move(model);
  return out;
}

LoadedConfig parse_joint_form(const json& doc) {
  reject_unknown_keys(doc, kJointKeys);
  const bool homogeneous = parse_homogeneous(doc);
  const std::size_t n = parse_length(doc);
  const Alphabet alphabet = parse_alphabet(require(doc, "alphabet"), "alphabet");
  const json& entries = require(doc, "joint_table");
  if (!entries.is_object()) throw ConfigError("'joint_table' must be an object");

  const std::size_t size = checked_power(alphabet.size(), n, size_guard_from_env(),
                                         "joint_table");
  const SequenceCodec codec(alphabet.size(), n);
  std::vector<double> table(size, 0.0);
  for (const auto& [key, value] : entries.items()) {
    const Sequence seq = parse_sequence_key(key, alphabet, n);
    table[codec.encode(seq)] = parse_probability(value, "joint_table." + key);
  }
  JointLaw law = [&] {
    try {
      return JointLaw(n, alphabet, std::move(table));
    } catch (const Error& e) {
      throw ConfigError(fmt::format("invalid joint_table: {}", e.what()));
    }
  }();

  Alphabet observed = alphabet;
  std::vector<EmissionKernel> emissions;
  std::vector<EmissionKernel> raw_emissions;
  if (doc.contains("emissions")) {
    if (doc.contains("observed_alphabet"))
      observed = parse_alphabet(doc["observed_alphabet"], "observed_alphabet");
    raw_emissions = parse_matrix_list(doc["emissions"], n, homogeneous, "emissions");
    for (std::size_t l = 0; l < raw_emissions.size(); ++l) {
      const auto& e = raw_emissions[l];
      if (e.rows() != alphabet.size() || e.cols() != observed.size()) {
        throw ConfigError(fmt::format("emissions[{}] has shape {}x{}, expected {}x{}", l,
                                      e.rows(), e.cols(), alphabet.size(),
                                      observed.size()));
      }
      for (std::size_t r = 0; r < e.rows(); ++r) {
        const double s = pairwise_sum(e.row(r));
        for (double v : e.row(r)) {
          if (!(v >= 0.0)) throw ConfigError(fmt::format("emissions[{}][{}] has a negative entry", l, r));
        }
        if (!(std::abs(s - 1.0) <= kStochasticTolerance)) {
          throw ConfigError(fmt::format("emissions[{}][{}]: row sum {:.10g}, tolerance 1e-9",
                                        l, r, s));
        }
      }
      emissions.push_back(renormalized_rows(e));
    }
  } else {
    if (doc.contains("observed_alphabet"))
      throw ConfigError("'observed_alphabet' requires 'emissions'");
    raw_emissions.assign(n, identity_emission(alphabet.size()));
    emissions = raw_emissions;
  }

  LoadedConfig out;
  out.model = HiddenJointModel{std::move(law), std::move(emissions), std::move(observed)};
  const auto& built = std::get<HiddenJointModel>(out.model);
  out.resolved = describe_model(out.model);
  out.renormalization = {
      {"joint_table",
       {{"pre", built.hidden.input_sum()}, {"post", pairwise_sum(built.hidden.table())}}},
      {"emissions", matrix_sums(raw_emissions, built.emissions)}};
  return out;
}

std::pair<std::size_t, std::size_t> line_and_column(const std::string& text,
                                                    std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace

json describe_model(const ScenarioModel& model) {
  if (const auto* m = std::get_if<ProcessModel>(&model)) return to_json(*m);
  const auto& h = std::get<HiddenJointModel>(model);
  const Alphabet& alphabet = h.hidden.alphabet();
  const std::size_t n = h.hidden.n();
  json support = json::object();
  Sequence x(n);
  for (std::size_t idx = 0; idx < h.hidden.table().size(); ++idx) {
    if (h.hidden.table()[idx] == 0.0) continue;
    h.hidden.codec().decode_into(idx, x);
    std::string key;
    for (std::size_t k = 0; k < n; ++k) {
      if (!alphabet.all_single_char() && k > 0) key += ' ';
      key += alphabet.labels[x[k]];
    }
    support[key] = h.hidden.table()[idx];
  }
  json emissions = json::array();
  for (const auto& e : h.emissions) emissions.push_back(to_json(e));
  return {{"n", n},
          {"alphabet", alphabet.labels},
          {"observed_alphabet", h.observed.labels},
          {"joint_table", support},
          {"emissions", emissions}};
}

double parse_probability(const json& value, const std::string& where) {
  if (value.is_number()) return value.get<double>();
  if (value.is_string()) {
    const std::string s = value.get<std::string>();
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec == std::errc() && ptr == s.data() + s.size() && !s.empty()) return out;
    throw ConfigError(fmt::format("'{}': '{}' is not a decimal number", where, s));
  }
  throw ConfigError(fmt::format("'{}' must be a number or decimal string", where));
}

Sequence parse_sequence_key(const std::string& key, const Alphabet& alphabet,
                            std::size_t n) {
  std::vector<std::string> tokens;
  if (alphabet.all_single_char()) {
    for (char c : key) tokens.emplace_back(1, c);
  } else {
    std::string token;
    for (char c : key + " ") {
      if (c == ' ' || c == ',' || c == '\t') {
        if (!token.empty()) tokens.push_back(std::move(token));
        token.clear();
      } else {
        token += c;
      }
    }
  }
  if (tokens.size() != n) {
    throw ConfigError(fmt::format("joint_table key '{}' has {} symbols, expected {}", key,
                                  tokens.size(), n));
  }
  Sequence seq;
  for (const auto& t : tokens) {
    const auto index = alphabet.index_of(t);
    if (!index)
      throw ConfigError(fmt::format("joint_table key '{}': unknown label '{}'", key, t));
    seq.push_back(*index);
  }
  return seq;
}

LoadedConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_and_column(text, e.byte);
    throw ConfigError(
        fmt::format("malformed JSON at line {}, column {}: {}", line, column, e.what()));
  }
  if (!doc.is_object()) throw ConfigError("configuration must be a JSON object");
  try {
    return doc.contains("joint_table") ? parse_joint_form(doc) : parse_model_form(doc);
  } catch (const json::exception& e) {
    throw ConfigError(fmt::format("bad configuration value: {}", e.what()));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot open '{}'", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

LoadedConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path));
}

SizeGuard size_guard_from_env() {
  SizeGuard guard;
  const char* raw = std::getenv("ETAMIX_SIZE_GUARD");
  if (raw == nullptr || *raw == '\0') return guard;
  const std::string_view s(raw);
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || value == 0)
    throw ConfigError(fmt::format("ETAMIX_SIZE_GUARD='{}' is not a positive integer", s));
  guard.max_entries = value;
  return guard;
}

}  // namespace etamix::cli
