#ifndef ETAMIX_CONTRACTION_H_
#define ETAMIX_CONTRACTION_H_

#include <cstddef>
#include <span>
#include <vector>

#include "etamix/matrix.h"
#include "etamix/process_model.h"

namespace etamix {

// Tolerance on |sum| for a vector to count as balanced (zero-sum).
inline constexpr double kBalanceTolerance = 1e-12;

struct SignedVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  double sum() const;
  double tv_norm() const;
  bool balanced(double tolerance = kBalanceTolerance) const;
};

// Square, nonnegative, every column sums to one. Entry (x, y) is the
// probability of moving to x from y.
class ColumnStochasticMatrix {
 public:
  explicit ColumnStochasticMatrix(Matrix entries,
                                  double tolerance = kStochasticTolerance);

  // The only place where the row-stochastic storage convention is flipped.
  static ColumnStochasticMatrix FromKernel(const TransitionKernel& kernel);

  const Matrix& entries() const { return entries_; }
  std::size_t size() const { return entries_.rows(); }

 private:
  Matrix entries_;
};

// Half the largest l1 distance between two columns.
double theta_of_matrix(const ColumnStochasticMatrix& a);

SignedVector apply(const ColumnStochasticMatrix& a, const SignedVector& u);

struct ChainResult {
  SignedVector z;
  // step_tv[0] is the input norm; step_tv[k] the norm after k applications.
  std::vector<double> step_tv;
};

// z = A_last ... A_1 A_0 h. Throws UnbalancedInput if h is not balanced.
ChainResult chain_apply(std::span<const ColumnStochasticMatrix> matrices,
                        const SignedVector& h);

}  // namespace etamix

#endif  // ETAMIX_CONTRACTION_H_
