#ifndef ETAMIX_PROCESS_MODEL_H_
#define ETAMIX_PROCESS_MODEL_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "etamix/matrix.h"
#include "etamix/sequence.h"

namespace etamix {

// Absolute tolerance for "sums to one" on every distribution the library
// accepts as input.
inline constexpr double kStochasticTolerance = 1e-9;

// Ordered set of symbol labels. The ordering defines the integer index of
// every symbol used by the numeric code.
struct Alphabet {
  std::vector<std::string> labels;

  // Labels "0", "1", ..., "k-1".
  static Alphabet Numbered(std::size_t k);

  std::size_t size() const { return labels.size(); }
  std::optional<Symbol> index_of(const std::string& label) const;
  bool all_single_char() const;

  friend bool operator==(const Alphabet&, const Alphabet&) = default;
};

using Distribution = std::vector<double>;

// Row-stochastic: row r is the law of the next hidden state given state r.
using TransitionKernel = Matrix;

// Row-stochastic: row r is the law of the observation given hidden state r.
using EmissionKernel = Matrix;

// A finite-state hidden Markov process of length n. kernels[k] governs the
// step from position k+1 to k+2 (1-based), emissions[l] the observation at
// position l+1. Homogeneous models are stored with the kernel repeated.
struct ProcessModel {
  std::size_t n = 0;
  Alphabet hidden;
  Alphabet observed;
  Distribution initial;
  std::vector<TransitionKernel> kernels;
  std::vector<EmissionKernel> emissions;

  friend bool operator==(const ProcessModel&, const ProcessModel&) = default;
};

struct Violation {
  std::string component;        // e.g. "kernels[1]", "initial"
  std::optional<std::size_t> index;  // row or entry, when applicable
  std::string invariant;        // e.g. "row sum 0.98, tolerance 1e-9"
  double residual = 0.0;

  std::string describe() const;
};

struct ValidationResult {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

// Checks every structural and stochasticity invariant. Violations are
// reported in a fixed order: shape, alphabets, initial, kernels, emissions.
ValidationResult validate(const ProcessModel& model);

// Validates, then divides every distribution by its own sum. Throws
// InvalidModel listing the violations when validation fails.
ProcessModel normalize_model(ProcessModel model);

// Divides each entry by the (pairwise) sum. Requires a positive sum.
Distribution renormalized(Distribution d);
Matrix renormalized_rows(Matrix m);
std::vector<double> row_sums(const Matrix& m);

// Identity emission kernel: every hidden symbol is observed as itself.
EmissionKernel identity_emission(std::size_t states);

// Wraps a Markov chain as a hidden Markov process with point-mass emissions
// (observed alphabet = hidden alphabet). Throws DimensionMismatch when the
// kernel list or distribution sizes disagree, InvalidModel when the chain is
// not stochastic.
ProcessModel markov_as_hmm(std::size_t n, const Alphabet& alphabet,
                           const Distribution& initial,
                           const std::vector<TransitionKernel>& kernels);
ProcessModel markov_as_hmm(std::size_t n, const Distribution& initial,
                           const std::vector<TransitionKernel>& kernels);

// True when every transition kernel is bitwise equal to the first.
bool has_homogeneous_kernels(const ProcessModel& model);

}  // namespace etamix

#endif  // ETAMIX_PROCESS_MODEL_H_
