#include "etamix/contraction.h"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "etamix/errors.h"
#include "etamix/inference.h"

namespace etamix {

double SignedVector::sum() const { return pairwise_sum(values); }

double SignedVector::tv_norm() const { return etamix::tv_norm(values); }

bool SignedVector::balanced(double tolerance) const {
  return std::abs(sum()) <= tolerance;
}

ColumnStochasticMatrix::ColumnStochasticMatrix(Matrix entries, double tolerance)
    : entries_(std::move(entries)) {
  if (!entries_.square()) throw DimensionMismatch("column-stochastic matrix must be square");
  for (std::size_t c = 0; c < entries_.cols(); ++c) {
    double sum = 0.0;
    for (std::size_t r = 0; r < entries_.rows(); ++r) {
      const double v = entries_(r, c);
      if (!std::isfinite(v) || v < 0.0)
        throw InvalidModel(fmt::format("entry ({}, {}) = {} is not nonnegative", r, c, v));
      sum += v;
    }
    if (!(std::abs(sum - 1.0) <= tolerance))
      throw InvalidModel(fmt::format("column {} sums to {:.12g}", c, sum));
  }
}

ColumnStochasticMatrix ColumnStochasticMatrix::FromKernel(const TransitionKernel& kernel) {
  return ColumnStochasticMatrix(kernel.transposed());
}

double theta_of_matrix(const ColumnStochasticMatrix& a) {
  const Matrix& m = a.entries();
  const std::size_t size = m.rows();
  double best = 0.0;
  for (std::size_t y = 0; y < size; ++y) {
    for (std::size_t y2 = y + 1; y2 < size; ++y2) {
      double l1 = 0.0;
      for (std::size_t x = 0; x < size; ++x) l1 += std::abs(m(x, y) - m(x, y2));
      best = std::max(best, 0.5 * l1);
    }
  }
  return best;
}

SignedVector apply(const ColumnStochasticMatrix& a, const SignedVector& u) {
  if (u.size() != a.size()) {
    throw DimensionMismatch(
        fmt::format("applying a {}x{} matrix to a vector of size {}", a.size(), a.size(),
                    u.size()));
  }
  return SignedVector{a.entries().multiply(u.values)};
}

ChainResult chain_apply(std::span<const ColumnStochasticMatrix> matrices,
                        const SignedVector& h) {
  if (!h.balanced()) {
    throw UnbalancedInput(fmt::format("input vector sums to {:.3e}", h.sum()));
  }
  ChainResult result{h, {h.tv_norm()}};
  for (const auto& a : matrices) {
    result.z = apply(a, result.z);
    result.step_tv.push_back(result.z.tv_norm());
  }
  return result;
}

}  // namespace etamix
