#include "etamix/mixing.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "etamix/errors.h"

namespace etamix {

namespace {

constexpr double kRoundingSlack = 1e-12;

void check_pair(std::size_t i, std::size_t j, std::size_t n) {
  if (i < 1 || j <= i || j > n) {
    throw std::out_of_range(
        fmt::format("need 1 <= i < j <= n, got i={}, j={}, n={}", i, j, n));
  }
}

}  // namespace

MixingMatrix::MixingMatrix(std::size_t n) : values_(Matrix::Identity(n)) {
  if (n < 1) throw std::invalid_argument("mixing matrix needs n >= 1");
}

double MixingMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i < 1 || j < 1 || i > n() || j > n()) throw std::out_of_range("mixing index");
  return values_(i - 1, j - 1);
}

void MixingMatrix::set(std::size_t i, std::size_t j, double value) {
  check_pair(i, j, n());
  if (value < -kRoundingSlack || value > 1.0 + kRoundingSlack || std::isnan(value)) {
    throw std::domain_error(fmt::format("eta_bar({}, {}) = {} outside [0, 1]", i, j, value));
  }
  values_(i - 1, j - 1) = std::clamp(value, 0.0, 1.0);
}

double eta_ij(const JointLaw& law, std::size_t i, std::size_t j,
              std::span<const Symbol> y, Symbol w, Symbol w2) {
  check_pair(i, j, law.n());
  if (y.size() != i - 1) throw DimensionMismatch("prefix y must have length i-1");
  Sequence prefix(y.begin(), y.end());
  prefix.push_back(w);
  const ConditionalLaw first = conditional_law(law, prefix, j);
  prefix.back() = w2;
  const ConditionalLaw second = conditional_law(law, prefix, j);
  return tv_distance(first.tail_law, second.tail_law);
}

EtaBarResult eta_bar(const JointLaw& law, std::size_t i, std::size_t j,
                     const SizeGuard& guard) {
  check_pair(i, j, law.n());
  const std::size_t radix = law.alphabet().size();
  checked_power(radix, i + 1, guard, fmt::format("eta_bar({}, {}) tuples", i, j));
  const SequenceCodec prefix_codec(radix, i - 1);

  EtaBarResult result;
  Sequence prefix(i);
  std::vector<std::optional<ConditionalLaw>> tails(radix);
  for (std::size_t yi = 0; yi < prefix_codec.size(); ++yi) {
    prefix_codec.decode_into(yi, std::span<Symbol>(prefix).first(i - 1));
    for (Symbol w = 0; w < radix; ++w) {
      prefix.back() = w;
      tails[w].reset();
      if (prefix_probability(law, prefix) > 0.0) tails[w] = conditional_law(law, prefix, j);
    }
    for (Symbol w = 0; w < radix; ++w) {
      for (Symbol w2 = w + 1; w2 < radix; ++w2) {
        if (!tails[w] || !tails[w2]) {
          ++result.skipped_pairs;
          continue;
        }
        ++result.admissible_pairs;
        result.value =
            std::max(result.value, tv_distance(tails[w]->tail_law, tails[w2]->tail_law));
      }
    }
  }
  return result;
}

MixingMatrix eta_bar_matrix(const JointLaw& law, const SizeGuard& guard) {
  MixingMatrix m(law.n());
  for (std::size_t i = 1; i <= law.n(); ++i) {
    for (std::size_t j = i + 1; j <= law.n(); ++j) {
      const EtaBarResult r = eta_bar(law, i, j, guard);
      m.set(i, j, r.value);
      if (r.admissible_pairs == 0) m.empty_sups.emplace_back(i, j);
    }
  }
  return m;
}

double theta(const TransitionKernel& kernel) {
  double best = 0.0;
  for (std::size_t a = 0; a < kernel.rows(); ++a)
    for (std::size_t b = a + 1; b < kernel.rows(); ++b)
      best = std::max(best, tv_distance(kernel.row(a), kernel.row(b)));
  return best;
}

ThetaVector thetas(const ProcessModel& model) {
  ThetaVector out;
  out.reserve(model.kernels.size());
  for (const auto& k : model.kernels) out.push_back(theta(k));
  return out;
}

double theorem_bound(std::span<const double> thetas, std::size_t i, std::size_t j) {
  check_pair(i, j, thetas.size() + 1);
  double product = 1.0;
  for (std::size_t k = i; k < j; ++k) product *= thetas[k - 1];
  return product;
}

MixingMatrix theorem_bound_matrix(std::span<const double> thetas) {
  const std::size_t n = thetas.size() + 1;
  MixingMatrix m(n);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i + 1; j <= n; ++j) m.set(i, j, theorem_bound(thetas, i, j));
  return m;
}

namespace {

// P[X_{1..i-1} = y, Xbar_i = v] for every hidden v, with i = y.size() + 1.
std::vector<double> prefix_filter(const ProcessModel& model, std::span<const Symbol> y) {
  const std::size_t h = model.hidden.size();
  std::vector<double> f(model.initial.begin(), model.initial.end());
  std::vector<double> weighted(h);
  for (std::size_t k = 0; k < y.size(); ++k) {
    for (std::size_t v = 0; v < h; ++v) weighted[v] = f[v] * model.emissions[k](v, y[k]);
    f = model.kernels[k].multiply_transposed(weighted);
  }
  return f;
}

std::optional<FilterVector> filter_from_prefix(const ProcessModel& model,
                                               std::span<const double> f, std::size_t i,
                                               Symbol w, Symbol w2) {
  const Matrix& q = model.emissions[i - 1];
  const std::size_t h = model.hidden.size();
  FilterVector out;
  for (std::size_t v = 0; v < h; ++v) {
    out.rho_w += f[v] * q(v, w);
    out.rho_w2 += f[v] * q(v, w2);
  }
  if (!(out.rho_w > 0.0) || !(out.rho_w2 > 0.0)) return std::nullopt;
  out.h.values.resize(h);
  for (std::size_t v = 0; v < h; ++v)
    out.h.values[v] = (q(v, w) / out.rho_w - q(v, w2) / out.rho_w2) * f[v];
  return out;
}

// channel(v, x) = P[X_{j..n} = x | Xbar_j = v].
Matrix future_channel(const ProcessModel& model, std::size_t j, const SizeGuard& guard) {
  const std::size_t h = model.hidden.size();
  const std::size_t o = model.observed.size();
  const std::size_t tail = checked_power(o, model.n - j + 1, guard, "future channel");
  if (tail > guard.max_entries / h) {
    throw SizeGuardError(fmt::format("future channel: {} x {} exceeds the table cap of {}",
                                     h, tail, guard.max_entries));
  }
  Matrix channel = model.emissions[model.n - 1];
  for (std::size_t pos = model.n - 1; pos >= j; --pos) {
    // Prepend position `pos` (1-based) to a channel that starts at pos + 1.
    const Matrix& kernel = model.kernels[pos - 1];
    const Matrix& q = model.emissions[pos - 1];
    const std::size_t rest = channel.cols();
    Matrix next(h, o * rest);
    for (std::size_t v = 0; v < h; ++v) {
      for (std::size_t r = 0; r < rest; ++r) {
        double s = 0.0;
        for (std::size_t v2 = 0; v2 < h; ++v2) s += kernel(v, v2) * channel(v2, r);
        for (std::size_t sym = 0; sym < o; ++sym) next(v, sym * rest + r) = q(v, sym) * s;
      }
    }
    channel = std::move(next);
  }
  return channel;
}

}  // namespace

std::optional<FilterVector> filter_vector(const ProcessModel& model,
                                          std::span<const Symbol> y, Symbol w,
                                          Symbol w2) {
  const std::size_t i = y.size() + 1;
  if (i > model.n) throw std::out_of_range("prefix longer than the model");
  const std::vector<double> f = prefix_filter(model, y);
  return filter_from_prefix(model, f, i, w, w2);
}

FilteredEtaResult eta_bar_filtered(const ProcessModel& model, std::size_t i, std::size_t j,
                                   const SizeGuard& guard) {
  check_pair(i, j, model.n);
  const std::size_t o = model.observed.size();
  checked_power(o, i + 1, guard, fmt::format("eta_bar({}, {}) tuples", i, j));

  std::vector<ColumnStochasticMatrix> steps;
  for (std::size_t k = i; k < j; ++k)
    steps.push_back(ColumnStochasticMatrix::FromKernel(model.kernels[k - 1]));
  const Matrix channel = future_channel(model, j, guard);

  FilteredEtaResult result;
  const SequenceCodec prefix_codec(o, i - 1);
  Sequence y(i - 1);
  for (std::size_t yi = 0; yi < prefix_codec.size(); ++yi) {
    prefix_codec.decode_into(yi, y);
    const std::vector<double> f = prefix_filter(model, y);
    for (Symbol w = 0; w < o; ++w) {
      for (Symbol w2 = w + 1; w2 < o; ++w2) {
        const auto filter = filter_from_prefix(model, f, i, w, w2);
        if (!filter) {
          ++result.skipped_pairs;
          continue;
        }
        ++result.admissible_pairs;
        result.max_h_tv = std::max(result.max_h_tv, filter->h.tv_norm());
        result.max_h_imbalance = std::max(result.max_h_imbalance, std::abs(filter->h.sum()));
        const ChainResult chain = chain_apply(steps, filter->h);
        result.max_z_tv = std::max(result.max_z_tv, chain.step_tv.back());
        const std::vector<double> tail_difference =
            channel.multiply_transposed(chain.z.values);
        result.value = std::max(result.value, tv_norm(tail_difference));
      }
    }
  }
  return result;
}

MixingMatrix eta_bar_matrix_filtered(const ProcessModel& model, const SizeGuard& guard) {
  MixingMatrix m(model.n);
  for (std::size_t i = 1; i <= model.n; ++i) {
    for (std::size_t j = i + 1; j <= model.n; ++j) {
      const FilteredEtaResult r = eta_bar_filtered(model, i, j, guard);
      m.set(i, j, r.value);
      if (r.admissible_pairs == 0) m.empty_sups.emplace_back(i, j);
    }
  }
  return m;
}

CouplingMatrices build_matrices(const MixingMatrix& eta) {
  const std::size_t n = eta.n();
  CouplingMatrices out{Matrix::Identity(n), Matrix::Identity(n)};
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      out.delta(i - 1, j - 1) = eta(i, j);
      out.gamma(i - 1, j - 1) = std::sqrt(eta(i, j));
    }
  }
  return out;
}

double delta_inf_norm(const Matrix& delta) {
  if (!delta.square()) throw DimensionMismatch("Delta must be square");
  double best = 1.0;
  for (std::size_t i = 0; i < delta.rows(); ++i) {
    if (delta(i, i) != 1.0) throw std::invalid_argument("Delta must have a unit diagonal");
    double row = 1.0;
    for (std::size_t j = i + 1; j < delta.cols(); ++j) {
      if (delta(i, j) < 0.0) throw std::invalid_argument("Delta entries must be nonnegative");
      row += delta(i, j);
    }
    best = std::max(best, row);
  }
  return best;
}

double gamma_2_norm(const Matrix& gamma, const PowerIterationOptions& options) {
  const std::size_t n = gamma.cols();
  if (n == 0) return 0.0;
  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  double previous = -1.0;
  for (std::size_t iter = 0; iter < options.max_iterations; ++iter) {
    const std::vector<double> image = gamma.multiply(v);
    double rayleigh = 0.0;
    for (double x : image) rayleigh += x * x;
    if (previous >= 0.0 &&
        std::abs(rayleigh - previous) < options.relative_tolerance * rayleigh) {
      return std::sqrt(rayleigh);
    }
    previous = rayleigh;
    std::vector<double> next = gamma.multiply_transposed(image);
    double norm = 0.0;
    for (double x : next) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    for (std::size_t k = 0; k < n; ++k) v[k] = next[k] / norm;
  }
  const std::vector<double> image = gamma.multiply(v);
  double last = 0.0;
  for (double x : image) last += x * x;
  throw NonConvergence(
      fmt::format("power iteration did not converge in {} iterations (last estimates "
                  "{:.17g}, {:.17g})",
                  options.max_iterations, std::sqrt(previous), std::sqrt(last)),
      std::sqrt(previous), std::sqrt(last));
}

TheoremReport verify_theorem(const ProcessModel& model, const SizeGuard& guard) {
  const JointLaw law = observed_law(model, ObservedLawMethod::kForward, guard);
  TheoremReport report;
  report.eta = eta_bar_matrix(law, guard);
  report.thetas = thetas(model);
  report.bound = theorem_bound_matrix(report.thetas);
  const std::size_t n = model.n;
  report.slack = Matrix(n, n);
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = i + 1; j <= n; ++j) {
      const double eta = report.eta(i, j);
      const double bound = report.bound(i, j);
      report.slack(i - 1, j - 1) = bound - eta;
      if (eta > bound + kTheoremTolerance) report.violations.push_back({i, j, eta, bound});
    }
  }
  report.coupling = build_matrices(report.eta);
  report.delta_inf = delta_inf_norm(report.coupling.delta);
  report.gamma_2 = gamma_2_norm(report.coupling.gamma);
  const CouplingMatrices bound_coupling = build_matrices(report.bound);
  report.bound_delta_inf = delta_inf_norm(bound_coupling.delta);
  report.bound_gamma_2 = gamma_2_norm(bound_coupling.gamma);
  return report;
}

}  // namespace etamix
