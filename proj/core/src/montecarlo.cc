#include "etamix/montecarlo.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "etamix/errors.h"
#include "etamix/inference.h"
#include "etamix/mixing.h"

namespace etamix {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t SplitMix64::next() {
  state_ += kGoldenGamma;
  return mix64(state_);
}

double SplitMix64::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

std::uint64_t trajectory_seed(std::uint64_t seed, std::uint64_t index) {
  return mix64(mix64(seed) + index * kGoldenGamma);
}

Symbol sample_index(std::span<const double> weights, double u) {
  double cumulative = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (weights[k] <= 0.0) continue;
    cumulative += weights[k];
    last_positive = k;
    if (u < cumulative) return static_cast<Symbol>(k);
  }
  // u landed in the rounding gap above the cumulative sum.
  return static_cast<Symbol>(last_positive);
}

TrajectoryBatch sample_trajectories(const ProcessModel& model, std::size_t count,
                                    std::uint64_t seed, bool keep_hidden) {
  const std::size_t n = model.n;
  TrajectoryBatch batch;
  batch.n = n;
  batch.count = count;
  batch.observed.resize(count * n);
  if (keep_hidden) batch.hidden.resize(count * n);

  auto draw_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t t = begin; t < end; ++t) {
      SplitMix64 rng(trajectory_seed(seed, t));
      Symbol state = sample_index(model.initial, rng.uniform());
      for (std::size_t k = 0; k < n; ++k) {
        if (k > 0) state = sample_index(model.kernels[k - 1].row(state), rng.uniform());
        batch.observed[t * n + k] = sample_index(model.emissions[k].row(state), rng.uniform());
        if (keep_hidden) batch.hidden[t * n + k] = state;
      }
    }
  };

  constexpr std::size_t kMinPerWorker = 8192;
  const std::size_t workers = std::clamp<std::size_t>(
      std::min<std::size_t>(std::thread::hardware_concurrency(), count / kMinPerWorker), 1,
      64);
  if (workers == 1) {
    draw_range(0, count);
    return batch;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(count, begin + chunk);
    if (begin < end) pool.emplace_back(draw_range, begin, end);
  }
  pool.clear();
  return batch;
}

LipschitzFunction LipschitzFunction::CoordinateAverage(std::vector<double> weights,
                                                       std::vector<Symbol> symbols,
                                                       std::string label) {
  if (weights.empty()) throw std::invalid_argument("coordinate average needs n >= 1");
  for (double w : weights) {
    if (!(w >= -1.0 && w <= 1.0))
      throw std::invalid_argument(fmt::format("coordinate weight {} outside [-1, 1]", w));
  }
  LipschitzFunction f;
  f.kind_ = Kind::kCoordinateAverage;
  f.n_ = weights.size();
  f.label_ = std::move(label);
  f.weights_ = std::move(weights);
  for (Symbol s : symbols) {
    if (s >= f.indicator_.size()) f.indicator_.resize(s + 1, false);
    f.indicator_[s] = true;
  }
  return f;
}

LipschitzFunction LipschitzFunction::NormalizedHammingWeight(std::size_t n,
                                                             std::size_t alphabet_size,
                                                             Symbol reference) {
  std::vector<Symbol> others;
  for (std::size_t s = 0; s < alphabet_size; ++s)
    if (s != reference) others.push_back(static_cast<Symbol>(s));
  return CoordinateAverage(std::vector<double>(n, 1.0), std::move(others),
                           "normalized-hamming-weight");
}

LipschitzFunction LipschitzFunction::Constant(std::size_t n, double value) {
  LipschitzFunction f =
      CoordinateAverage(std::vector<double>(n, 0.0), {}, fmt::format("constant {}", value));
  f.offset_ = value;
  return f;
}

LipschitzFunction LipschitzFunction::FromTable(std::size_t n, std::size_t alphabet_size,
                                               std::vector<double> values,
                                               std::string label) {
  if (n < 1 || alphabet_size < 1) throw std::invalid_argument("empty function domain");
  const SequenceCodec codec(alphabet_size, n);
  if (values.size() != codec.size()) {
    throw DimensionMismatch(fmt::format("function table has {} entries, expected {}^{}",
                                        values.size(), alphabet_size, n));
  }
  const double step = 1.0 / static_cast<double>(n);
  Sequence x(n);
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    codec.decode_into(idx, x);
    std::size_t place = values.size();
    for (std::size_t k = 0; k < n; ++k) {
      place /= alphabet_size;
      for (std::size_t b = x[k] + 1; b < alphabet_size; ++b) {
        const std::size_t neighbour = idx + (b - x[k]) * place;
        if (std::abs(values[idx] - values[neighbour]) > step + 1e-12) {
          throw std::invalid_argument(fmt::format(
              "function is not 1-Lipschitz: sequences {} and {} differ in one position "
              "but |f| changes by {}",
              idx, neighbour, std::abs(values[idx] - values[neighbour])));
        }
      }
    }
  }
  LipschitzFunction f;
  f.kind_ = Kind::kTable;
  f.n_ = n;
  f.label_ = std::move(label);
  f.radix_ = alphabet_size;
  f.table_ = std::move(values);
  return f;
}

double LipschitzFunction::operator()(std::span<const Symbol> x) const {
  if (x.size() != n_) throw DimensionMismatch("function applied to wrong length");
  if (kind_ == Kind::kTable) {
    std::size_t idx = 0;
    for (Symbol s : x) idx = idx * radix_ + s;
    return table_[idx];
  }
  double s = 0.0;
  for (std::size_t k = 0; k < n_; ++k)
    if (x[k] < indicator_.size() && indicator_[x[k]]) s += weights_[k];
  return offset_ + s / static_cast<double>(n_);
}

std::vector<double> default_thresholds() {
  std::vector<double> t;
  for (int k = 1; k <= 10; ++k) t.push_back(k / 20.0);
  return t;
}

bool TailReport::dominance_holds() const {
  return std::all_of(rows.begin(), rows.end(), [](const TailRow& r) { return r.dominated; });
}

TailReport tail_experiment(const ProcessModel& model, const LipschitzFunction& f,
                           std::span<const double> thresholds, std::size_t count,
                           std::uint64_t seed, const SizeGuard& guard) {
  if (count == 0) throw std::invalid_argument("sample count must be positive");
  if (f.n() != model.n) {
    throw DimensionMismatch(
        fmt::format("function length {} does not match model length {}", f.n(), model.n));
  }
  for (double t : thresholds)
    if (!(t >= 0.0)) throw std::invalid_argument("thresholds must be >= 0");

  const JointLaw law = observed_law(model, ObservedLawMethod::kForward, guard);
  TailReport report;
  report.function_label = f.label();
  report.n = model.n;
  report.sample_count = count;
  report.seed = seed;
  report.exact_mean = expectation(law, [&](std::span<const Symbol> x) { return f(x); });

  report.delta_inf_bruteforce =
      delta_inf_norm(build_matrices(eta_bar_matrix(law, guard)).delta);
  report.delta_inf_theorem =
      delta_inf_norm(build_matrices(theorem_bound_matrix(thetas(model))).delta);

  const TrajectoryBatch batch = sample_trajectories(model, count, seed);
  std::vector<double> values(count);
  for (std::size_t t = 0; t < count; ++t) values[t] = f(batch.observed_at(t));

  const double nd = static_cast<double>(count);
  report.sample_mean = pairwise_sum(values) / nd;
  const double sq = pairwise_sum_of(0, count, [&](std::size_t k) {
    const double d = values[k] - report.sample_mean;
    return d * d;
  });
  report.sample_mean_stderr = count > 1 ? std::sqrt(sq / (nd - 1.0) / nd) : 0.0;

  for (double t : thresholds) {
    std::size_t exceed = 0;
    for (double v : values)
      if (std::abs(v - report.exact_mean) > t) ++exceed;
    TailRow row;
    row.t = t;
    row.empirical = static_cast<double>(exceed) / nd;
    row.standard_error = std::sqrt(row.empirical * (1.0 - row.empirical) / nd);
    row.bound_bruteforce = kontram_tail(t, model.n, report.delta_inf_bruteforce);
    row.bound_theorem = kontram_tail(t, model.n, report.delta_inf_theorem);
    row.dominated =
        row.empirical <= row.bound_bruteforce.raw + kDominanceSigmas * row.standard_error;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace etamix
