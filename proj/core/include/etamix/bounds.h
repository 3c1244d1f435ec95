#ifndef ETAMIX_BOUNDS_H_
#define ETAMIX_BOUNDS_H_

#include <cstddef>

namespace etamix {

// A tail bound as evaluated (raw, may exceed 1) and as a probability.
struct TailBound {
  double raw = 0.0;
  double capped = 0.0;
};

// 2 exp(-n t^2 / (2 ||Delta||_inf^2)), Hamming metric, any 1-Lipschitz f.
TailBound kontram_tail(double t, std::size_t n, double delta_inf);

// 2 exp(-t^2 / (2 ||Gamma||_2^2)), Euclidean metric on [0,1]^n; holds for
// convex 1-Lipschitz f only.
TailBound samson_tail(double t, double gamma_2);

enum class BoundKind { kHammingInf, kEuclidean2 };

struct BoundSpec {
  std::size_t n = 1;
  double norm_value = 1.0;
  BoundKind kind = BoundKind::kHammingInf;

  // The K in P(|f - Ef| > t) <= 2 exp(-K t^2).
  double concentration_constant() const;
  TailBound evaluate(double t) const;
};

struct ContractingNormBounds {
  double delta_inf = 1.0;  // 1 / (1 - theta)
  double gamma_2 = 1.0;    // 1 / (1 - sqrt(theta))
};

// Closed forms for a chain with every theta_k <= theta < 1. Throws
// ThetaNotContracting for theta >= 1.
ContractingNormBounds contracting_norm_bounds(double theta);

}  // namespace etamix

#endif  // ETAMIX_BOUNDS_H_
