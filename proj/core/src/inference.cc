#include "etamix/inference.h"

#include <cmath>

#include <fmt/format.h>

#include "etamix/errors.h"

namespace etamix {

JointLaw::JointLaw(std::size_t n, Alphabet alphabet, std::vector<double> table,
                   double tolerance)
    : alphabet_(std::move(alphabet)),
      codec_(alphabet_.size(), n),
      table_(std::move(table)) {
  if (n < 1) throw InvalidModel("joint law needs length at least 1");
  if (table_.size() != codec_.size()) {
    throw DimensionMismatch(fmt::format("joint table has {} entries, expected {}^{}",
                                        table_.size(), alphabet_.size(), n));
  }
  for (std::size_t k = 0; k < table_.size(); ++k) {
    if (!std::isfinite(table_[k]) || table_[k] < 0.0)
      throw InvalidModel(fmt::format("joint table entry {} = {} is invalid", k, table_[k]));
  }
  input_sum_ = pairwise_sum(table_);
  if (!(std::abs(input_sum_ - 1.0) <= tolerance)) {
    throw InvalidModel(fmt::format("joint table sums to {:.12g}, tolerance {:g}",
                                   input_sum_, tolerance));
  }
  for (double& v : table_) v /= input_sum_;
}

double JointLaw::probability(std::span<const Symbol> seq) const {
  return table_[codec_.encode(seq)];
}

JointLaw hidden_law(const ProcessModel& model, const SizeGuard& guard) {
  const std::size_t h = model.hidden.size();
  checked_power(h, model.n, guard, "hidden law");
  std::vector<double> current(model.initial.begin(), model.initial.end());
  for (std::size_t k = 0; k + 1 < model.n; ++k) {
    const Matrix& kernel = model.kernels[k];
    std::vector<double> next(current.size() * h);
    for (std::size_t idx = 0; idx < current.size(); ++idx) {
      const std::size_t last = idx % h;
      for (std::size_t b = 0; b < h; ++b) next[idx * h + b] = current[idx] * kernel(last, b);
    }
    current = std::move(next);
  }
  return JointLaw(model.n, model.hidden, std::move(current));
}

namespace {

JointLaw observed_law_forward(const ProcessModel& model, const SizeGuard& guard) {
  const std::size_t h = model.hidden.size();
  const std::size_t o = model.observed.size();
  const std::size_t table_size = checked_power(o, model.n, guard, "observed law");
  if (table_size > guard.max_entries / h) {
    throw SizeGuardError(fmt::format(
        "observed law: forward table {}^{} x {} exceeds the table cap of {}", o,
        model.n, h, guard.max_entries));
  }
  // alpha[x * h + v] = P[X_{1..k} = x, Xbar_k = v]
  std::vector<double> alpha(o * h);
  for (std::size_t x = 0; x < o; ++x)
    for (std::size_t v = 0; v < h; ++v)
      alpha[x * h + v] = model.initial[v] * model.emissions[0](v, x);

  std::vector<double> predicted(h);
  for (std::size_t k = 1; k < model.n; ++k) {
    const Matrix& kernel = model.kernels[k - 1];
    const Matrix& emission = model.emissions[k];
    const std::size_t prefixes = alpha.size() / h;
    std::vector<double> next(prefixes * o * h);
    for (std::size_t x = 0; x < prefixes; ++x) {
      for (std::size_t b = 0; b < h; ++b) {
        double s = 0.0;
        for (std::size_t a = 0; a < h; ++a) s += alpha[x * h + a] * kernel(a, b);
        predicted[b] = s;
      }
      for (std::size_t sym = 0; sym < o; ++sym)
        for (std::size_t b = 0; b < h; ++b)
          next[(x * o + sym) * h + b] = predicted[b] * emission(b, sym);
    }
    alpha = std::move(next);
  }

  std::vector<double> table(table_size);
  for (std::size_t x = 0; x < table_size; ++x) {
    double s = 0.0;
    for (std::size_t v = 0; v < h; ++v) s += alpha[x * h + v];
    table[x] = s;
  }
  return JointLaw(model.n, model.observed, std::move(table));
}

}  // namespace

JointLaw observed_law(const ProcessModel& model, ObservedLawMethod method,
                      const SizeGuard& guard) {
  if (method == ObservedLawMethod::kEnumeration) {
    return observed_law_from_joint(hidden_law(model, guard), model.emissions,
                                   model.observed, guard);
  }
  return observed_law_forward(model, guard);
}

JointLaw observed_law_from_joint(const JointLaw& hidden,
                                 std::span<const EmissionKernel> emissions,
                                 const Alphabet& observed, const SizeGuard& guard) {
  const std::size_t n = hidden.n();
  const std::size_t h = hidden.alphabet().size();
  const std::size_t o = observed.size();
  if (emissions.size() != n) {
    throw DimensionMismatch(
        fmt::format("expected {} emission kernels, got {}", n, emissions.size()));
  }
  for (const auto& e : emissions) {
    if (e.rows() != h || e.cols() != o)
      throw DimensionMismatch("emission kernel shape does not match the alphabets");
  }
  const std::size_t table_size = checked_power(o, n, guard, "observed law");

  // Support of the hidden measure, decoded once.
  std::vector<double> weights;
  std::vector<Symbol> paths;
  {
    Sequence buf(n);
    const auto table = hidden.table();
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
      if (table[idx] == 0.0) continue;
      hidden.codec().decode_into(idx, buf);
      weights.push_back(table[idx]);
      paths.insert(paths.end(), buf.begin(), buf.end());
    }
  }

  const SequenceCodec out_codec(o, n);
  std::vector<double> result(table_size);
  Sequence x(n);
  for (std::size_t xi = 0; xi < table_size; ++xi) {
    out_codec.decode_into(xi, x);
    result[xi] = pairwise_sum_of(0, weights.size(), [&](std::size_t s) {
      double p = weights[s];
      const Symbol* path = paths.data() + s * n;
      for (std::size_t l = 0; l < n; ++l) p *= emissions[l](path[l], x[l]);
      return p;
    });
  }
  return JointLaw(n, observed, std::move(result));
}

namespace {

std::size_t prefix_block_start(const JointLaw& law, std::span<const Symbol> prefix) {
  const std::size_t radix = law.alphabet().size();
  std::size_t index = 0;
  for (Symbol s : prefix) {
    if (s >= radix) throw DimensionMismatch("prefix symbol out of range");
    index = index * radix + s;
  }
  return index * saturating_power(radix, law.n() - prefix.size());
}

}  // namespace

double prefix_probability(const JointLaw& law, std::span<const Symbol> prefix) {
  if (prefix.size() > law.n()) throw std::out_of_range("prefix longer than the law");
  const std::size_t block = saturating_power(law.alphabet().size(), law.n() - prefix.size());
  const std::size_t start = prefix_block_start(law, prefix);
  const auto table = law.table();
  return pairwise_sum_of(start, start + block, [&](std::size_t k) { return table[k]; });
}

ConditionalLaw conditional_law(const JointLaw& law, std::span<const Symbol> prefix,
                               std::size_t j) {
  const std::size_t n = law.n();
  const std::size_t i = prefix.size();
  if (i < 1 || j <= i || j > n) {
    throw std::out_of_range(
        fmt::format("conditional law needs 1 <= i < j <= n (i={}, j={}, n={})", i, j, n));
  }
  const std::size_t radix = law.alphabet().size();
  const std::size_t tail_size = saturating_power(radix, n - j + 1);
  const std::size_t middle_size = saturating_power(radix, j - i - 1);
  const std::size_t start = prefix_block_start(law, prefix);
  const auto table = law.table();

  ConditionalLaw result;
  result.prefix.assign(prefix.begin(), prefix.end());
  result.tail_start = j;
  result.prefix_probability = pairwise_sum_of(
      start, start + tail_size * middle_size, [&](std::size_t k) { return table[k]; });
  if (!(result.prefix_probability > 0.0)) {
    throw ZeroProbabilityPrefix(
        fmt::format("conditioning event X_1..X_{} has probability zero", i));
  }
  result.tail_law.resize(tail_size);
  for (std::size_t t = 0; t < tail_size; ++t) {
    const double mass = pairwise_sum_of(0, middle_size, [&](std::size_t m) {
      return table[start + m * tail_size + t];
    });
    result.tail_law[t] = mass / result.prefix_probability;
  }
  return result;
}

std::vector<Distribution> position_marginals(const JointLaw& law) {
  const std::size_t n = law.n();
  std::vector<Distribution> marginals(n, Distribution(law.alphabet().size(), 0.0));
  Sequence x(n);
  const auto table = law.table();
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    law.codec().decode_into(idx, x);
    for (std::size_t k = 0; k < n; ++k) marginals[k][x[k]] += table[idx];
  }
  return marginals;
}

double tv_norm(std::span<const double> v) {
  return 0.5 * pairwise_sum_of(0, v.size(), [&](std::size_t k) { return std::abs(v[k]); });
}

double tv_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DimensionMismatch(
        fmt::format("tv_distance over {} vs {} points", a.size(), b.size()));
  }
  return 0.5 * pairwise_sum_of(0, a.size(),
                               [&](std::size_t k) { return std::abs(a[k] - b[k]); });
}

double expectation(const JointLaw& law, const SequenceFunction& f) {
  const auto table = law.table();
  Sequence x(law.n());
  return pairwise_sum_of(0, table.size(), [&](std::size_t idx) {
    if (table[idx] == 0.0) return 0.0;
    law.codec().decode_into(idx, x);
    return table[idx] * f(x);
  });
}

}  // namespace etamix
