#include "etamix/report_json.h"

#include <fmt/format.h>

namespace etamix {

using nlohmann::json;

std::string format_double(double v) { return fmt::format("{}", v); }

json to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto row = m.row(r);
    rows.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return rows;
}

json to_json(const MixingMatrix& m) {
  json empty = json::array();
  for (const auto& [i, j] : m.empty_sups) empty.push_back({i, j});
  return {{"n", m.n()}, {"values", to_json(m.values())}, {"empty_sups", empty}};
}

json to_json(const ProcessModel& model) {
  json kernels = json::array();
  for (const auto& k : model.kernels) kernels.push_back(to_json(k));
  json emissions = json::array();
  for (const auto& e : model.emissions) emissions.push_back(to_json(e));
  return {{"n", model.n},
          {"hidden_alphabet", model.hidden.labels},
          {"observed_alphabet", model.observed.labels},
          {"initial", model.initial},
          {"kernels", kernels},
          {"emissions", emissions}};
}

json to_json(const TheoremReport& report) {
  json violations = json::array();
  for (const auto& v : report.violations)
    violations.push_back({{"i", v.i}, {"j", v.j}, {"eta_bar", v.eta}, {"bound", v.bound}});
  return {{"eta_bar", to_json(report.eta)},
          {"thetas", report.thetas},
          {"theorem_bound", to_json(report.bound)},
          {"slack", to_json(report.slack)},
          {"gamma", to_json(report.coupling.gamma)},
          {"delta", to_json(report.coupling.delta)},
          {"delta_inf_norm", report.delta_inf},
          {"gamma_2_norm", report.gamma_2},
          {"theorem_bound_delta_inf_norm", report.bound_delta_inf},
          {"theorem_bound_gamma_2_norm", report.bound_gamma_2},
          {"violations", violations}};
}

json to_json(const TailReport& report) {
  json rows = json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"t", r.t},
                    {"empirical", r.empirical},
                    {"stderr", r.standard_error},
                    {"bound_bruteforce_raw", r.bound_bruteforce.raw},
                    {"bound_bruteforce_capped", r.bound_bruteforce.capped},
                    {"bound_theorem_raw", r.bound_theorem.raw},
                    {"bound_theorem_capped", r.bound_theorem.capped},
                    {"dominated", r.dominated}});
  }
  return {{"function", report.function_label},
          {"n", report.n},
          {"sample_count", report.sample_count},
          {"seed", report.seed},
          {"exact_mean", report.exact_mean},
          {"sample_mean", report.sample_mean},
          {"sample_mean_stderr", report.sample_mean_stderr},
          {"delta_inf_norm_bruteforce", report.delta_inf_bruteforce},
          {"delta_inf_norm_theorem", report.delta_inf_theorem},
          {"dominance_sigmas", kDominanceSigmas},
          {"dominance_holds", report.dominance_holds()},
          {"rows", rows}};
}

std::string to_csv(const TailReport& report) {
  std::string out =
      "t,empirical,stderr,bound_bruteforce_raw,bound_bruteforce_capped,"
      "bound_theorem_raw,bound_theorem_capped\n";
  for (const auto& r : report.rows) {
    out += fmt::format("{},{},{},{},{},{},{}\n", format_double(r.t),
                       format_double(r.empirical), format_double(r.standard_error),
                       format_double(r.bound_bruteforce.raw),
                       format_double(r.bound_bruteforce.capped),
                       format_double(r.bound_theorem.raw),
                       format_double(r.bound_theorem.capped));
  }
  return out;
}

}  // namespace etamix
