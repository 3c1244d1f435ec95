#include "commands.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "config.h"
#include "etamix/bounds.h"
#include "etamix/mixing.h"
#include "etamix/montecarlo.h"
#include "etamix/report_json.h"
#include "etamix/scenarios.h"

namespace etamix::cli {

using nlohmann::json;

namespace {

JointLaw observed_of(const LoadedConfig& cfg, const SizeGuard& guard) {
  if (const ProcessModel* m = cfg.process())
    return observed_law(*m, ObservedLawMethod::kForward, guard);
  const auto& h = std::get<HiddenJointModel>(cfg.model);
  return observed_law_from_joint(h.hidden, h.emissions, h.observed, guard);
}

struct NormSummary {
  CouplingMatrices coupling;
  double delta_inf = 1.0;
  double gamma_2 = 1.0;
};

NormSummary summarize(const MixingMatrix& eta) {
  NormSummary s;
  s.coupling = build_matrices(eta);
  s.delta_inf = delta_inf_norm(s.coupling.delta);
  s.gamma_2 = gamma_2_norm(s.coupling.gamma);
  return s;
}

json report_header(const std::string& command, const std::filesystem::path& config_path,
                   const LoadedConfig& cfg) {
  return {{"schema_version", kReportSchemaVersion},
          {"command", command},
          {"config_path", config_path.string()},
          {"resolved_config", cfg.resolved},
          {"renormalization", cfg.renormalization}};
}

void write_text(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw ConfigError(fmt::format("cannot write '{}'", path));
  file << text;
}

void write_report(const json& report, const std::string& path, std::ostream& out) {
  write_text(report.dump(2) + "\n", path, out);
}

std::vector<double> thresholds_or_default(const std::vector<double>& t) {
  return t.empty() ? default_thresholds() : t;
}

json violation_json(std::size_t i, std::size_t j, double eta, double bound,
                    const std::string& method) {
  return {{"i", i}, {"j", j}, {"eta_bar", eta}, {"bound", bound}, {"method", method}};
}

template <typename Body>
int guarded(std::ostream& err, Body&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

LipschitzFunction parse_function(const std::string& spec, const ProcessModel& model) {
  const std::size_t n = model.n;
  const Alphabet& alphabet = model.observed;
  auto symbol = [&](const std::string& label) {
    const auto s = alphabet.index_of(label);
    if (!s) throw ConfigError(fmt::format("--f: unknown label '{}'", label));
    return *s;
  };
  if (spec == "hamming") return LipschitzFunction::NormalizedHammingWeight(n, alphabet.size());
  if (spec.starts_with("hamming:")) {
    return LipschitzFunction::NormalizedHammingWeight(n, alphabet.size(),
                                                      symbol(spec.substr(8)));
  }
  if (spec.starts_with("const:")) {
    return LipschitzFunction::Constant(n, parse_probability(json(spec.substr(6)), "--f"));
  }
  if (spec.starts_with("coord:")) {
    const auto parts = split(spec.substr(6), ':');
    if (parts.size() != 2) throw ConfigError("--f coord:<w1,...,wn>:<label,...>");
    std::vector<double> weights;
    for (const auto& w : split(parts[0], ','))
      weights.push_back(parse_probability(json(w), "--f weight"));
    if (weights.size() != n)
      throw ConfigError(fmt::format("--f coord needs {} weights, got {}", n, weights.size()));
    std::vector<Symbol> symbols;
    for (const auto& l : split(parts[1], ',')) symbols.push_back(symbol(l));
    try {
      return LipschitzFunction::CoordinateAverage(std::move(weights), std::move(symbols), spec);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  if (spec.starts_with("table:")) {
    const std::string path = spec.substr(6);
    json doc;
    try {
      doc = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
      throw ConfigError(fmt::format("--f table '{}': {}", path, e.what()));
    }
    if (!doc.is_object() || !doc.contains("values") || !doc["values"].is_object())
      throw ConfigError("--f table file must be {\"values\": {sequence: number}}");
    const SequenceCodec codec(alphabet.size(), n);
    checked_power(alphabet.size(), n, size_guard_from_env(), "--f table");
    std::vector<double> values(codec.size(), std::nan(""));
    for (const auto& [key, value] : doc["values"].items()) {
      if (!value.is_number()) throw ConfigError("--f table values must be numbers");
      values[codec.encode(parse_sequence_key(key, alphabet, n))] = value.get<double>();
    }
    if (std::any_of(values.begin(), values.end(), [](double v) { return std::isnan(v); }))
      throw ConfigError("--f table must give a value for every sequence");
    try {
      return LipschitzFunction::FromTable(n, alphabet.size(), std::move(values), spec);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  throw ConfigError(fmt::format(
      "--f '{}' not recognized (hamming, hamming:<label>, const:<c>, "
      "coord:<w1,...,wn>:<labels>, table:<path>)",
      spec));
}

}  // namespace

int run_mixing(const MixingOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SizeGuard guard = size_guard_from_env();
    const LoadedConfig cfg = load_config(options.config);
    if (options.i.has_value() != options.j.has_value())
      throw ConfigError("--i and --j must be given together");
    const ProcessModel* model = cfg.process();
    if (options.method != Method::kBrute && model == nullptr)
      throw ConfigError("--method filter/both needs a hidden Markov model configuration");
    const bool use_brute = options.method != Method::kFilter;
    const bool use_filter = options.method != Method::kBrute;

    json report = report_header("mixing", options.config, cfg);
    report["method"] = options.method == Method::kBrute    ? "brute"
                       : options.method == Method::kFilter ? "filter"
                                                           : "both";
    json violations = json::array();
    const JointLaw law = observed_of(cfg, guard);
    const ThetaVector th = model ? thetas(*model) : ThetaVector{};
    if (model) report["thetas"] = th;

    if (options.i) {
      const std::size_t i = *options.i;
      const std::size_t j = *options.j;
      json entry = {{"i", i}, {"j", j}};
      std::vector<std::pair<std::string, double>> values;
      if (use_brute) {
        const EtaBarResult r = eta_bar(law, i, j, guard);
        entry["eta_bar_bruteforce"] = r.value;
        entry["admissible_pairs"] = r.admissible_pairs;
        entry["skipped_pairs"] = r.skipped_pairs;
        values.emplace_back("bruteforce", r.value);
      }
      if (use_filter) {
        const FilteredEtaResult r = eta_bar_filtered(*model, i, j, guard);
        entry["eta_bar_filter"] = r.value;
        entry["filter_diagnostics"] = {{"max_h_tv", r.max_h_tv},
                                       {"max_h_imbalance", r.max_h_imbalance},
                                       {"max_z_tv", r.max_z_tv},
                                       {"admissible_pairs", r.admissible_pairs},
                                       {"skipped_pairs", r.skipped_pairs}};
        values.emplace_back("filter", r.value);
      }
      if (values.size() == 2)
        entry["max_abs_difference"] = std::abs(values[0].second - values[1].second);
      if (model) {
        const double bound = theorem_bound(th, i, j);
        entry["theorem_bound"] = bound;
        entry["slack"] = bound - values.front().second;
        for (const auto& [method, v] : values)
          if (v > bound + kTheoremTolerance)
            violations.push_back(violation_json(i, j, v, bound, method));
      }
      report["entry"] = entry;
    } else {
      std::optional<MixingMatrix> brute;
      std::optional<MixingMatrix> filtered;
      json eta = json::object();
      if (use_brute) {
        brute = eta_bar_matrix(law, guard);
        eta["bruteforce"] = to_json(*brute);
      }
      if (use_filter) {
        filtered = eta_bar_matrix_filtered(*model, guard);
        eta["filter"] = to_json(*filtered);
      }
      report["eta_bar"] = eta;
      const MixingMatrix& primary = brute ? *brute : *filtered;
      const std::size_t n = primary.n();
      if (brute && filtered) {
        double diff = 0.0;
        for (std::size_t i = 1; i <= n; ++i)
          for (std::size_t j = i + 1; j <= n; ++j)
            diff = std::max(diff, std::abs((*brute)(i, j) - (*filtered)(i, j)));
        report["max_abs_difference"] = diff;
      }
      const NormSummary norms = summarize(primary);
      report["gamma"] = to_json(norms.coupling.gamma);
      report["delta"] = to_json(norms.coupling.delta);
      report["delta_inf_norm"] = norms.delta_inf;
      report["gamma_2_norm"] = norms.gamma_2;
      if (model) {
        const MixingMatrix bound = theorem_bound_matrix(th);
        Matrix slack(n, n);
        for (std::size_t i = 1; i <= n; ++i) {
          for (std::size_t j = i + 1; j <= n; ++j) {
            slack(i - 1, j - 1) = bound(i, j) - primary(i, j);
            if (brute && (*brute)(i, j) > bound(i, j) + kTheoremTolerance)
              violations.push_back(violation_json(i, j, (*brute)(i, j), bound(i, j), "bruteforce"));
            if (filtered && (*filtered)(i, j) > bound(i, j) + kTheoremTolerance)
              violations.push_back(violation_json(i, j, (*filtered)(i, j), bound(i, j), "filter"));
          }
        }
        const NormSummary bound_norms = summarize(bound);
        report["theorem_bound"] = to_json(bound);
        report["slack"] = to_json(slack);
        report["theorem_bound_delta_inf_norm"] = bound_norms.delta_inf;
        report["theorem_bound_gamma_2_norm"] = bound_norms.gamma_2;
      }
    }
    report["violation_tolerance"] = kTheoremTolerance;
    report["violations"] = violations;
    write_report(report, options.out, out);
    return violations.empty() ? kExitOk : kExitViolation;
  });
}

int run_bounds(const BoundsOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const SizeGuard guard = size_guard_from_env();
    const LoadedConfig cfg = load_config(options.config);
    const ProcessModel* model = cfg.process();
    const JointLaw law = observed_of(cfg, guard);
    const std::size_t n = law.n();
    const NormSummary norms = summarize(eta_bar_matrix(law, guard));
    std::optional<NormSummary> bound_norms;
    if (model) bound_norms = summarize(theorem_bound_matrix(thetas(*model)));

    json report = report_header("bounds", options.config, cfg);
    report["delta_inf_norm"] = norms.delta_inf;
    report["gamma_2_norm"] = norms.gamma_2;
    report["samson_applicability"] =
        "convex f only: the Euclidean-metric bound assumes f convex and 1-Lipschitz on "
        "[0,1]^n";
    if (bound_norms) {
      report["theorem_bound_delta_inf_norm"] = bound_norms->delta_inf;
      report["theorem_bound_gamma_2_norm"] = bound_norms->gamma_2;
    }
    json rows = json::array();
    for (double t : thresholds_or_default(options.thresholds)) {
      const TailBound k = kontram_tail(t, n, norms.delta_inf);
      const TailBound s = samson_tail(t, norms.gamma_2);
      json row = {{"t", t},
                  {"kontram_raw", k.raw},
                  {"kontram_capped", k.capped},
                  {"samson_raw", s.raw},
                  {"samson_capped", s.capped}};
      if (bound_norms) {
        const TailBound kb = kontram_tail(t, n, bound_norms->delta_inf);
        const TailBound sb = samson_tail(t, bound_norms->gamma_2);
        row["kontram_theorem_raw"] = kb.raw;
        row["kontram_theorem_capped"] = kb.capped;
        row["samson_theorem_raw"] = sb.raw;
        row["samson_theorem_capped"] = sb.capped;
      }
      rows.push_back(row);
    }
    report["rows"] = rows;

    if (model && model->n >= 2 && has_homogeneous_kernels(*model)) {
      const double th = theta(model->kernels.front());
      json closed = {{"theta", th}};
      if (th < 1.0) {
        const ContractingNormBounds c = contracting_norm_bounds(th);
        closed["contracting"] = true;
        closed["delta_inf_bound"] = c.delta_inf;
        closed["gamma_2_bound"] = c.gamma_2;
        closed["delta_inf_within_bound"] = norms.delta_inf <= c.delta_inf + kTheoremTolerance;
      } else {
        closed["contracting"] = false;
      }
      report["contracting_closed_forms"] = closed;
    }
    write_report(report, options.out, out);
    return kExitOk;
  });
}

int run_montecarlo(const MonteCarloOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (options.samples == 0) throw ConfigError("--N must be positive");
    const SizeGuard guard = size_guard_from_env();
    const LoadedConfig cfg = load_config(options.config);
    const ProcessModel* model = cfg.process();
    if (model == nullptr)
      throw ConfigError("montecarlo needs a hidden Markov model configuration");
    const LipschitzFunction f = parse_function(options.function, *model);
    const std::vector<double> thresholds = thresholds_or_default(options.thresholds);
    const TailReport tail =
        tail_experiment(*model, f, thresholds, options.samples, options.seed, guard);

    json report = report_header("montecarlo", options.config, cfg);
    report["tail"] = to_json(tail);
    write_report(report, options.out, out);
    if (!options.csv.empty()) write_text(to_csv(tail), options.csv, out);
    return tail.dominance_holds() ? kExitOk : kExitViolation;
  });
}

int run_scenario_command(const ScenarioOptions& options, std::ostream& out,
                         std::ostream& err) {
  return guarded(err, [&] {
    if (options.list) {
      for (const auto& name : scenario_names()) out << name << "\n";
      return kExitOk;
    }
    const auto scenario = find_scenario(options.name);
    if (!scenario) {
      err << "error: unknown scenario '" << options.name << "'; available:";
      for (const auto& name : scenario_names()) err << " " << name;
      err << "\n";
      return kExitInputError;
    }
    const ScenarioReport result = run_scenario(*scenario);
    json report = {{"schema_version", kReportSchemaVersion},
                   {"command", "scenario"},
                   {"resolved_config", describe_model(scenario->model)}};
    report.update(to_json(result));
    write_report(report, options.out, out);
    return result.all_passed() ? kExitOk : kExitViolation;
  });
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{
      "etamix: exact eta-mixing coefficients, contraction coefficients and "
      "concentration bounds for finite hidden Markov processes"};
  app.require_subcommand(1);

  MixingOptions mixing;
  std::size_t mi = 0;
  std::size_t mj = 0;
  std::string method = "brute";
  auto* mixing_cmd = app.add_subcommand("mixing", "eta_bar matrix, norms and theorem check");
  mixing_cmd->add_option("config", mixing.config, "model configuration (JSON)")->required();
  auto* opt_i = mixing_cmd->add_option("-i,--i", mi, "single entry: row index (1-based)");
  auto* opt_j = mixing_cmd->add_option("-j,--j", mj, "single entry: column index (1-based)");
  mixing_cmd->add_option("--method", method, "brute, filter or both")
      ->check(CLI::IsMember({"brute", "filter", "both"}));
  mixing_cmd->add_option("-o,--out", mixing.out, "report path ('-' for stdout)");

  BoundsOptions bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "concentration tail bounds per threshold");
  bounds_cmd->add_option("config", bounds.config, "model configuration (JSON)")->required();
  bounds_cmd->add_option("-t,--t", bounds.thresholds, "thresholds, comma separated")
      ->delimiter(',');
  bounds_cmd->add_option("-o,--out", bounds.out, "report path ('-' for stdout)");

  MonteCarloOptions mc;
  auto* mc_cmd = app.add_subcommand("montecarlo", "empirical tail check against the bound");
  mc_cmd->add_option("config", mc.config, "model configuration (JSON)")->required();
  mc_cmd->add_option("-f,--f", mc.function,
                     "hamming | hamming:<label> | const:<c> | coord:<w1,..,wn>:<labels> | "
                     "table:<path>");
  mc_cmd->add_option("-N,--N", mc.samples, "number of trajectories");
  mc_cmd->add_option("--seed", mc.seed, "master seed");
  mc_cmd->add_option("-t,--t", mc.thresholds, "thresholds, comma separated")->delimiter(',');
  mc_cmd->add_option("-o,--out", mc.out, "JSON report path ('-' for stdout)");
  mc_cmd->add_option("--csv", mc.csv, "CSV tail table path");

  ScenarioOptions sc;
  auto* sc_cmd = app.add_subcommand("scenario", "run a built-in scenario");
  sc_cmd->add_option("name", sc.name, "scenario name");
  sc_cmd->add_flag("--list", sc.list, "list available scenarios");
  sc_cmd->add_option("-o,--out", sc.out, "report path ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInputError;
  }

  if (mixing_cmd->parsed()) {
    if (*opt_i) mixing.i = mi;
    if (*opt_j) mixing.j = mj;
    mixing.method = method == "filter" ? Method::kFilter
                    : method == "both" ? Method::kBoth
                                       : Method::kBrute;
    return run_mixing(mixing, out, err);
  }
  if (bounds_cmd->parsed()) return run_bounds(bounds, out, err);
  if (mc_cmd->parsed()) return run_montecarlo(mc, out, err);
  if (!sc.list && sc.name.empty()) {
    err << "error: scenario needs a name or --list\n";
    return kExitInputError;
  }
  return run_scenario_command(sc, out, err);
}

}  // namespace etamix::cli
