#ifndef ETAMIX_MONTECARLO_H_
#define ETAMIX_MONTECARLO_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "etamix/bounds.h"
#include "etamix/process_model.h"
#include "etamix/sequence.h"

namespace etamix {

// SplitMix64: a counter-based generator. Each trajectory gets its own
// stream keyed by (seed, index), so results do not depend on the order in
// which trajectories are drawn.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();
  // Uniform on [0, 1) with 53 random bits.
  double uniform();

 private:
  std::uint64_t state_;
};

std::uint64_t trajectory_seed(std::uint64_t seed, std::uint64_t index);

// Draws an index from a distribution by inverse CDF.
Symbol sample_index(std::span<const double> weights, double u);

struct TrajectoryBatch {
  std::size_t n = 0;
  std::size_t count = 0;
  std::vector<Symbol> observed;  // count * n, row-major
  std::vector<Symbol> hidden;    // empty unless requested

  std::span<const Symbol> observed_at(std::size_t k) const {
    return {observed.data() + k * n, n};
  }
  std::span<const Symbol> hidden_at(std::size_t k) const {
    return {hidden.data() + k * n, n};
  }
};

// Deterministic in (model, count, seed).
TrajectoryBatch sample_trajectories(const ProcessModel& model, std::size_t count,
                                    std::uint64_t seed, bool keep_hidden = false);

// A function on S^n that is 1-Lipschitz for d(x,y) = (1/n) #{k : x_k != y_k}.
class LipschitzFunction {
 public:
  // f(x) = (1/n) sum_k weights[k] * [x_k in symbols]; weights in [-1, 1].
  static LipschitzFunction CoordinateAverage(std::vector<double> weights,
                                             std::vector<Symbol> symbols,
                                             std::string label);

  // Fraction of positions whose symbol differs from `reference`.
  static LipschitzFunction NormalizedHammingWeight(std::size_t n,
                                                   std::size_t alphabet_size,
                                                   Symbol reference = 0);

  static LipschitzFunction Constant(std::size_t n, double value);

  // Explicit values over all |S|^n sequences. The Lipschitz condition is
  // checked on every pair of sequences at Hamming distance one, which for a
  // path metric is equivalent to checking all pairs. Throws
  // std::invalid_argument when it fails.
  static LipschitzFunction FromTable(std::size_t n, std::size_t alphabet_size,
                                     std::vector<double> values, std::string label);

  double operator()(std::span<const Symbol> x) const;

  std::size_t n() const { return n_; }
  const std::string& label() const { return label_; }

 private:
  enum class Kind { kCoordinateAverage, kTable };

  LipschitzFunction() = default;

  Kind kind_ = Kind::kCoordinateAverage;
  std::size_t n_ = 0;
  std::string label_;
  std::vector<double> weights_;
  std::vector<bool> indicator_;  // membership per symbol
  double offset_ = 0.0;
  std::size_t radix_ = 0;
  std::vector<double> table_;
};

// Dominance slack in units of the standard error.
inline constexpr double kDominanceSigmas = 3.0;

std::vector<double> default_thresholds();
inline constexpr std::size_t kDefaultSampleCount = 100000;

struct TailRow {
  double t = 0.0;
  double empirical = 0.0;
  double standard_error = 0.0;
  TailBound bound_bruteforce;  // ||Delta||_inf from computed eta_bar
  TailBound bound_theorem;     // ||Delta||_inf from theta products
  bool dominated = true;       // empirical <= bound_bruteforce.raw + 3 SE
};

struct TailReport {
  std::string function_label;
  std::size_t n = 0;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  double exact_mean = 0.0;
  double sample_mean = 0.0;
  double sample_mean_stderr = 0.0;
  double delta_inf_bruteforce = 1.0;
  double delta_inf_theorem = 1.0;
  std::vector<TailRow> rows;

  bool dominance_holds() const;
};

// Estimates P(|f(X) - E f(X)| > t) with E f computed exactly, and sets it
// against the Hamming-metric tail bound.
TailReport tail_experiment(const ProcessModel& model, const LipschitzFunction& f,
                           std::span<const double> thresholds, std::size_t count,
                           std::uint64_t seed, const SizeGuard& guard = {});

}  // namespace etamix

#endif  // ETAMIX_MONTECARLO_H_
