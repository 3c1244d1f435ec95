#include "etamix/process_model.h"

#include <cmath>
#include <set>

#include <fmt/format.h>

#include "etamix/errors.h"

namespace etamix {

Alphabet Alphabet::Numbered(std::size_t k) {
  Alphabet a;
  a.labels.reserve(k);
  for (std::size_t i = 0; i < k; ++i) a.labels.push_back(std::to_string(i));
  return a;
}

std::optional<Symbol> Alphabet::index_of(const std::string& label) const {
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == label) return static_cast<Symbol>(i);
  return std::nullopt;
}

bool Alphabet::all_single_char() const {
  for (const auto& l : labels)
    if (l.size() != 1) return false;
  return true;
}

std::string Violation::describe() const {
  if (index) return fmt::format("{}[{}]: {}", component, *index, invariant);
  return fmt::format("{}: {}", component, invariant);
}

namespace {

void check_alphabet(const Alphabet& a, const std::string& name,
                    std::vector<Violation>& out) {
  if (a.size() == 0) {
    out.push_back({name, std::nullopt, "alphabet is empty", 0.0});
    return;
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!seen.insert(a.labels[i]).second) {
      out.push_back({name, i, fmt::format("duplicate label '{}'", a.labels[i]), 0.0});
    }
  }
}

void check_distribution(std::span<const double> d, const std::string& component,
                        std::optional<std::size_t> index, std::vector<Violation>& out) {
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (!std::isfinite(d[k]) || d[k] < 0.0) {
      out.push_back({component, index,
                     fmt::format("entry {} = {} is not a nonnegative finite number", k,
                                 d[k]),
                     std::isfinite(d[k]) ? -d[k] : HUGE_VAL});
      return;
    }
  }
  const double sum = pairwise_sum(d);
  const double residual = std::abs(sum - 1.0);
  if (!(residual <= kStochasticTolerance)) {
    out.push_back({component, index,
                   fmt::format("row sum {:.10g}, tolerance 1e-9", sum),
                   residual});
  }
}

void check_stochastic_matrix(const Matrix& m, std::size_t rows, std::size_t cols,
                             const std::string& component,
                             std::vector<Violation>& out) {
  if (m.rows() != rows || m.cols() != cols) {
    out.push_back({component, std::nullopt,
                   fmt::format("shape {}x{}, expected {}x{}", m.rows(), m.cols(), rows,
                               cols),
                   0.0});
    return;
  }
  for (std::size_t r = 0; r < rows; ++r) check_distribution(m.row(r), component, r, out);
}

}  // namespace

ValidationResult validate(const ProcessModel& model) {
  std::vector<Violation> out;
  if (model.n < 1) out.push_back({"n", std::nullopt, "length must be at least 1", 0.0});
  const std::size_t expected_kernels = model.n >= 1 ? model.n - 1 : 0;
  if (model.kernels.size() != expected_kernels) {
    out.push_back({"kernels", std::nullopt,
                   fmt::format("kernels length {}, expected n-1 = {}",
                               model.kernels.size(), expected_kernels),
                   0.0});
  }
  if (model.emissions.size() != model.n) {
    out.push_back({"emissions", std::nullopt,
                   fmt::format("emissions length {}, expected n = {}",
                               model.emissions.size(), model.n),
                   0.0});
  }
  check_alphabet(model.hidden, "hidden_alphabet", out);
  check_alphabet(model.observed, "observed_alphabet", out);

  const std::size_t h = model.hidden.size();
  const std::size_t o = model.observed.size();
  if (model.initial.size() != h) {
    out.push_back({"initial", std::nullopt,
                   fmt::format("size {}, expected {}", model.initial.size(), h), 0.0});
  } else {
    check_distribution(model.initial, "initial", std::nullopt, out);
  }
  for (std::size_t k = 0; k < model.kernels.size(); ++k) {
    check_stochastic_matrix(model.kernels[k], h, h, fmt::format("kernels[{}]", k), out);
  }
  for (std::size_t l = 0; l < model.emissions.size(); ++l) {
    check_stochastic_matrix(model.emissions[l], h, o, fmt::format("emissions[{}]", l),
                            out);
  }
  return {std::move(out)};
}

Distribution renormalized(Distribution d) {
  const double sum = pairwise_sum(d);
  if (!(sum > 0.0)) throw InvalidModel("cannot renormalize a distribution with zero mass");
  for (double& v : d) v /= sum;
  return d;
}

Matrix renormalized_rows(Matrix m) {
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    const double sum = pairwise_sum(row);
    if (!(sum > 0.0)) throw InvalidModel("cannot renormalize a row with zero mass");
    for (double& v : row) v /= sum;
  }
  return m;
}

std::vector<double> row_sums(const Matrix& m) {
  std::vector<double> sums(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) sums[r] = pairwise_sum(m.row(r));
  return sums;
}

ProcessModel normalize_model(ProcessModel model) {
  const ValidationResult result = validate(model);
  if (!result.ok()) {
    std::string message = "invalid process model:";
    for (const auto& v : result.violations) message += "\n  " + v.describe();
    throw InvalidModel(message);
  }
  model.initial = renormalized(std::move(model.initial));
  for (auto& k : model.kernels) k = renormalized_rows(std::move(k));
  for (auto& e : model.emissions) e = renormalized_rows(std::move(e));
  return model;
}

EmissionKernel identity_emission(std::size_t states) { return Matrix::Identity(states); }

ProcessModel markov_as_hmm(std::size_t n, const Alphabet& alphabet,
                           const Distribution& initial,
                           const std::vector<TransitionKernel>& kernels) {
  const std::size_t h = alphabet.size();
  if (initial.size() != h) throw DimensionMismatch("initial distribution size mismatch");
  if (n < 1 || kernels.size() != n - 1)
    throw DimensionMismatch(fmt::format("expected {} kernels, got {}",
                                        n >= 1 ? n - 1 : 0, kernels.size()));
  for (const auto& k : kernels) {
    if (k.rows() != h || k.cols() != h)
      throw DimensionMismatch("kernel shape does not match the alphabet");
  }
  ProcessModel model;
  model.n = n;
  model.hidden = alphabet;
  model.observed = alphabet;
  model.initial = initial;
  model.kernels = kernels;
  model.emissions.assign(n, identity_emission(h));
  return normalize_model(std::move(model));
}

ProcessModel markov_as_hmm(std::size_t n, const Distribution& initial,
                           const std::vector<TransitionKernel>& kernels) {
  return markov_as_hmm(n, Alphabet::Numbered(initial.size()), initial, kernels);
}

bool has_homogeneous_kernels(const ProcessModel& model) {
  for (const auto& k : model.kernels)
    if (!(k == model.kernels.front())) return false;
  return true;
}

}  // namespace etamix
