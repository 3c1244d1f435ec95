#include "etamix/scenarios.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "etamix/mixing.h"
#include "etamix/report_json.h"

namespace etamix {

using nlohmann::json;

namespace {

constexpr std::array<PublishedEntry, 16> kFigure1 = {{
    {"0000", "0.000000"}, {"0001", "0.000000"}, {"0010", "0.288413"},
    {"0011", "0.000000"}, {"0100", "0.000000"}, {"0101", "0.000000"},
    {"0110", "0.176290"}, {"0111", "0.000000"}, {"1000", "0.000000"},
    {"1001", "0.010514"}, {"1010", "0.000000"}, {"1011", "0.139447"},
    {"1100", "0.000000"}, {"1101", "0.024783"}, {"1110", "0.000000"},
    {"1111", "0.360553"},
}};

// Printed precision of the table.
constexpr double kFigure1SumTolerance = 1e-6;
constexpr double kFigure1ObservedThreshold = 0.06;
constexpr double kExactTolerance = 1e-12;

double parse_decimal(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw std::invalid_argument(fmt::format("bad decimal '{}'", text));
  return value;
}

JointLaw observed_of(const ScenarioModel& model) {
  if (const auto* m = std::get_if<ProcessModel>(&model)) return observed_law(*m);
  const auto& h = std::get<HiddenJointModel>(model);
  return observed_law_from_joint(h.hidden, h.emissions, h.observed);
}

JointLaw hidden_of(const ScenarioModel& model) {
  if (const auto* m = std::get_if<ProcessModel>(&model)) return hidden_law(*m);
  return std::get<HiddenJointModel>(model).hidden;
}

const ProcessModel& process_of(const ScenarioModel& model) {
  return std::get<ProcessModel>(model);
}

// Largest |eta(i,j) - target| over i < j.
double max_offset(const MixingMatrix& eta, double target) {
  double worst = 0.0;
  for (std::size_t i = 1; i <= eta.n(); ++i)
    for (std::size_t j = i + 1; j <= eta.n(); ++j)
      worst = std::max(worst, std::abs(eta(i, j) - target));
  return worst;
}

ScenarioAssertion theorem_holds_assertion() {
  return {"theorem-bound-holds", "proven-inequality", [](const ScenarioModel& m) {
            const TheoremReport r = verify_theorem(process_of(m));
            return AssertionOutcome{r.violations.empty(),
                                    {{"violations", r.violations.size()}},
                                    "eta_bar(i,j) <= theta_i...theta_{j-1} + 1e-9"};
          }};
}

ScenarioAssertion dual_path_assertion() {
  return {"brute-force-matches-filter", "exact-computation", [](const ScenarioModel& m) {
            const ProcessModel& model = process_of(m);
            const MixingMatrix brute = eta_bar_matrix(observed_law(model));
            const MixingMatrix filtered = eta_bar_matrix_filtered(model);
            double diff = 0.0;
            for (std::size_t i = 1; i <= model.n; ++i)
              for (std::size_t j = i + 1; j <= model.n; ++j)
                diff = std::max(diff, std::abs(brute(i, j) - filtered(i, j)));
            return AssertionOutcome{diff <= 1e-10,
                                    {{"max_abs_difference", diff}},
                                    "brute-force and filter eta_bar agree within 1e-10"};
          }};
}

ProcessModel binary_chain(std::size_t n, const Matrix& kernel) {
  return markov_as_hmm(n, Alphabet::Numbered(2), {0.5, 0.5},
                       std::vector<TransitionKernel>(n - 1, kernel));
}

}  // namespace

std::span<const PublishedEntry> figure1_table() { return kFigure1; }

Scenario counterexample_figure1() {
  const Alphabet binary = Alphabet::Numbered(2);
  std::vector<double> table(kFigure1.size());
  const SequenceCodec codec(2, 4);
  for (const auto& entry : kFigure1) {
    Sequence seq;
    for (const char* c = entry.sequence; *c != '\0'; ++c)
      seq.push_back(static_cast<Symbol>(*c - '0'));
    table[codec.encode(seq)] = parse_decimal(entry.probability);
  }
  // q(x | xbar) = 1/4 if x == xbar, 3/4 otherwise.
  const Matrix q{{0.25, 0.75}, {0.75, 0.25}};

  Scenario s;
  s.name = "figure1-counterexample";
  s.description =
      "Non-Markov hidden measure on {0,1}^4 observed through a symmetric noisy "
      "channel: the observed process has eta_bar(2,4) > 0.06 while the hidden "
      "process has a smaller one, so eta_bar(X) is not bounded by c * eta_bar(Xbar).";
  s.model = HiddenJointModel{JointLaw(4, binary, std::move(table), kFigure1SumTolerance),
                             std::vector<EmissionKernel>(4, q), binary};

  s.assertions.push_back(
      {"published-table-sums-to-one", "published-table", [](const ScenarioModel& m) {
         const double sum = std::get<HiddenJointModel>(m).hidden.input_sum();
         return AssertionOutcome{std::abs(sum - 1.0) <= kFigure1SumTolerance,
                                 {{"input_sum", sum}},
                                 "table sums to 1 within 1e-6 before renormalization"};
       }});
  s.assertions.push_back(
      {"observed-eta24-exceeds-0.06", "published-claim", [](const ScenarioModel& m) {
         const EtaBarResult r = eta_bar(observed_of(m), 2, 4);
         return AssertionOutcome{r.value > kFigure1ObservedThreshold,
                                 {{"eta_bar_24_observed", r.value},
                                  {"threshold", kFigure1ObservedThreshold},
                                  {"admissible_pairs", r.admissible_pairs},
                                  {"skipped_pairs", r.skipped_pairs}},
                                 "eta_bar(2,4) of the observed process > 0.06"};
       }});
  s.assertions.push_back(
      {"hidden-eta24-below-observed", "exact-computation", [](const ScenarioModel& m) {
         const EtaBarResult observed = eta_bar(observed_of(m), 2, 4);
         const EtaBarResult hidden = eta_bar(hidden_of(m), 2, 4);
         json values = {{"eta_bar_24_observed", observed.value},
                        {"eta_bar_24_hidden", hidden.value},
                        {"hidden_admissible_pairs", hidden.admissible_pairs},
                        {"hidden_skipped_pairs", hidden.skipped_pairs}};
         // No finite c satisfies observed <= c * hidden when hidden is zero.
         values["ratio_observed_over_hidden"] =
             hidden.value > 0.0 ? json(observed.value / hidden.value) : json("unbounded");
         return AssertionOutcome{hidden.value < observed.value, values,
                                 "eta_bar(2,4) of the hidden process < observed"};
       }});
  return s;
}

Scenario iid_uniform_n4() {
  Scenario s;
  s.name = "iid-uniform-n4";
  s.description = "Fair coin flips, n = 4: every mixing coefficient vanishes.";
  s.model = binary_chain(4, Matrix{{0.5, 0.5}, {0.5, 0.5}});
  s.assertions.push_back({"eta-bar-identically-zero", "by-construction",
                          [](const ScenarioModel& m) {
                            const double worst = max_offset(eta_bar_matrix(observed_of(m)), 0.0);
                            return AssertionOutcome{worst <= kExactTolerance,
                                                    {{"max_abs_eta_bar", worst}},
                                                    "eta_bar(i,j) = 0 within 1e-12"};
                          }});
  s.assertions.push_back(
      {"norms-trivial", "by-construction", [](const ScenarioModel& m) {
         const CouplingMatrices c = build_matrices(eta_bar_matrix(observed_of(m)));
         const double d = delta_inf_norm(c.delta);
         const double g = gamma_2_norm(c.gamma);
         return AssertionOutcome{
             std::abs(d - 1.0) <= kExactTolerance && std::abs(g - 1.0) <= kExactTolerance,
             {{"delta_inf_norm", d}, {"gamma_2_norm", g}},
             "both operator norms equal 1, so the tail bounds reduce to the product case"};
       }});
  s.assertions.push_back(theorem_holds_assertion());
  return s;
}

Scenario deterministic_copy_n4() {
  Scenario s;
  s.name = "deterministic-copy-n4";
  s.description =
      "Uniform start, identity kernels, n = 4: the first symbol is copied forever.";
  s.model = binary_chain(4, Matrix::Identity(2));
  s.assertions.push_back(
      {"first-row-eta-bar-one", "by-construction", [](const ScenarioModel& m) {
         const MixingMatrix eta = eta_bar_matrix(observed_of(m));
         double worst = 0.0;
         for (std::size_t j = 2; j <= eta.n(); ++j)
           worst = std::max(worst, std::abs(eta(1, j) - 1.0));
         return AssertionOutcome{worst <= kExactTolerance,
                                 {{"max_abs_offset_from_one", worst}},
                                 "eta_bar(1,j) = 1: the two starting symbols have "
                                 "disjoint futures"};
       }});
  s.assertions.push_back(
      {"later-rows-have-no-admissible-pairs", "by-construction", [](const ScenarioModel& m) {
         const MixingMatrix eta = eta_bar_matrix(observed_of(m));
         const std::size_t n = eta.n();
         const std::size_t expected = (n - 1) * (n - 2) / 2;
         bool all_zero = true;
         for (const auto& [i, j] : eta.empty_sups) all_zero = all_zero && eta(i, j) == 0.0;
         json pairs = json::array();
         for (const auto& [i, j] : eta.empty_sups) pairs.push_back({i, j});
         return AssertionOutcome{
             eta.empty_sups.size() == expected && all_zero,
             {{"empty_sups", pairs}},
             "for i >= 2 the prefix forces X_i, so every symbol pair has a null "
             "conditioning and eta_bar(i,j) is reported as 0"};
       }});
  s.assertions.push_back(
      {"delta-inf-norm-equals-n", "exact-computation", [](const ScenarioModel& m) {
         const double d = delta_inf_norm(build_matrices(eta_bar_matrix(observed_of(m))).delta);
         return AssertionOutcome{std::abs(d - 4.0) <= kExactTolerance,
                                 {{"delta_inf_norm", d}, {"expected", 4.0}},
                                 "row 1 sums to 1 + 1 + 1 + 1"};
       }});
  s.assertions.push_back(
      {"theorem-bound-tight-on-first-row", "exact-computation", [](const ScenarioModel& m) {
         const TheoremReport r = verify_theorem(process_of(m));
         double worst = 0.0;
         for (std::size_t j = 2; j <= r.eta.n(); ++j)
           worst = std::max(worst, std::abs(r.bound(1, j) - r.eta(1, j)));
         return AssertionOutcome{r.violations.empty() && worst <= kExactTolerance,
                                 {{"max_abs_slack_first_row", worst},
                                  {"violations", r.violations.size()}},
                                 "eta_bar(1,j) equals the theta product (= 1)"};
       }});
  return s;
}

Scenario contracting_chain_n6() {
  Scenario s;
  s.name = "contracting-chain-n6";
  s.description = "Homogeneous chain with rows (0.9, 0.1), (0.2, 0.8), theta = 0.7, n = 6.";
  s.model = binary_chain(6, Matrix{{0.9, 0.1}, {0.2, 0.8}});
  s.assertions.push_back(theorem_holds_assertion());
  s.assertions.push_back(dual_path_assertion());
  s.assertions.push_back(
      {"delta-inf-within-geometric-bound", "proven-inequality", [](const ScenarioModel& m) {
         const ProcessModel& model = process_of(m);
         const double th = theta(model.kernels.front());
         const double d = delta_inf_norm(build_matrices(eta_bar_matrix(observed_of(m))).delta);
         const double closed = contracting_norm_bounds(th).delta_inf;
         return AssertionOutcome{d <= closed + kTheoremTolerance,
                                 {{"theta", th}, {"delta_inf_norm", d}, {"closed_form", closed}},
                                 "||Delta||_inf <= 1 / (1 - theta)"};
       }});
  return s;
}

std::vector<std::string> scenario_names() {
  return {"figure1-counterexample", "iid-uniform-n4", "deterministic-copy-n4",
          "contracting-chain-n6"};
}

std::optional<Scenario> find_scenario(const std::string& name) {
  if (name == "figure1-counterexample") return counterexample_figure1();
  if (name == "iid-uniform-n4") return iid_uniform_n4();
  if (name == "deterministic-copy-n4") return deterministic_copy_n4();
  if (name == "contracting-chain-n6") return contracting_chain_n6();
  return std::nullopt;
}

bool ScenarioReport::all_passed() const {
  return std::all_of(results.begin(), results.end(),
                     [](const AssertionResult& r) { return r.passed; });
}

ScenarioReport run_scenario(const Scenario& scenario) {
  ScenarioReport report;
  report.name = scenario.name;
  report.description = scenario.description;
  for (const auto& a : scenario.assertions) {
    AssertionOutcome outcome = a.check(scenario.model);
    report.results.push_back(
        {a.name, a.provenance, outcome.passed, std::move(outcome.values), outcome.detail});
  }

  const MixingMatrix observed = eta_bar_matrix(observed_of(scenario.model));
  const MixingMatrix hidden = eta_bar_matrix(hidden_of(scenario.model));
  const CouplingMatrices coupling = build_matrices(observed);
  report.summary = {
      {"eta_bar_observed", to_json(observed)},
      {"eta_bar_hidden", to_json(hidden)},
      {"delta_inf_norm", delta_inf_norm(coupling.delta)},
      {"gamma_2_norm", gamma_2_norm(coupling.gamma)},
      {"null_event_convention",
       "conditionings with probability zero are excluded from the supremum; an empty "
       "supremum is reported as 0 and listed under empty_sups"},
  };
  if (const auto* model = std::get_if<ProcessModel>(&scenario.model)) {
    report.summary["model"] = to_json(*model);
    report.summary["thetas"] = thetas(*model);
  }
  return report;
}

json to_json(const ScenarioReport& report) {
  json assertions = json::array();
  for (const auto& r : report.results) {
    assertions.push_back({{"name", r.name},
                          {"provenance", r.provenance},
                          {"passed", r.passed},
                          {"values", r.values},
                          {"detail", r.detail}});
  }
  return {{"scenario", report.name},
          {"description", report.description},
          {"passed", report.all_passed()},
          {"assertions", assertions},
          {"summary", report.summary}};
}

}  // namespace etamix
