#ifndef ETAMIX_INFERENCE_H_
#define ETAMIX_INFERENCE_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "etamix/process_model.h"
#include "etamix/sequence.h"

namespace etamix {

// Explicit probability table over all length-n sequences of an alphabet,
// indexed by SequenceCodec. Construction validates the table and divides it
// by its own sum, so the stored entries sum to one at machine precision.
class JointLaw {
 public:
  JointLaw(std::size_t n, Alphabet alphabet, std::vector<double> table,
           double tolerance = kStochasticTolerance);

  std::size_t n() const { return codec_.length(); }
  const Alphabet& alphabet() const { return alphabet_; }
  const SequenceCodec& codec() const { return codec_; }
  std::span<const double> table() const { return table_; }

  // Sum of the table as supplied, before renormalization.
  double input_sum() const { return input_sum_; }

  double probability(std::span<const Symbol> seq) const;

 private:
  Alphabet alphabet_;
  SequenceCodec codec_;
  std::vector<double> table_;
  double input_sum_ = 1.0;
};

// Law of X_{j..n} given X_{1..i} = prefix (1-based j, i = prefix length).
struct ConditionalLaw {
  Sequence prefix;
  std::size_t tail_start = 0;
  double prefix_probability = 0.0;
  std::vector<double> tail_law;  // indexed by SequenceCodec(|S|, n-j+1)
};

enum class ObservedLawMethod {
  kForward,      // sum-product over the hidden state, one step at a time
  kEnumeration,  // literal sum over all hidden sequences
};

// mu(x) = p0(x_1) prod_k p_k(x_{k+1} | x_k) over hidden sequences.
JointLaw hidden_law(const ProcessModel& model, const SizeGuard& guard = {});

// rho(x) = sum over hidden xbar of mu(xbar) prod_l q_l(x_l | xbar_l).
JointLaw observed_law(const ProcessModel& model,
                      ObservedLawMethod method = ObservedLawMethod::kForward,
                      const SizeGuard& guard = {});

// Same as the enumeration route of observed_law, for an arbitrary (not
// necessarily Markov) hidden measure.
JointLaw observed_law_from_joint(const JointLaw& hidden,
                                 std::span<const EmissionKernel> emissions,
                                 const Alphabet& observed,
                                 const SizeGuard& guard = {});

// P[X_{1..i} = prefix].
double prefix_probability(const JointLaw& law, std::span<const Symbol> prefix);

// Requires 1 <= prefix.size() < j <= n. Throws ZeroProbabilityPrefix when the
// conditioning event is null.
ConditionalLaw conditional_law(const JointLaw& law, std::span<const Symbol> prefix,
                               std::size_t j);

// Marginal law of each single coordinate.
std::vector<Distribution> position_marginals(const JointLaw& law);

// Half the l1 norm.
double tv_norm(std::span<const double> v);
double tv_distance(std::span<const double> a, std::span<const double> b);

using SequenceFunction = std::function<double(std::span<const Symbol>)>;

double expectation(const JointLaw& law, const SequenceFunction& f);

}  // namespace etamix

#endif  // ETAMIX_INFERENCE_H_
