#include "etamix/bounds.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "etamix/errors.h"

namespace etamix {

namespace {

TailBound make_bound(double raw) { return {raw, std::min(raw, 1.0)}; }

void check_threshold(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument(fmt::format("threshold {} must be >= 0", t));
}

void check_norm(double norm) {
  if (!(norm >= 1.0))
    throw std::invalid_argument(fmt::format("operator norm {} must be >= 1", norm));
}

}  // namespace

TailBound kontram_tail(double t, std::size_t n, double delta_inf) {
  check_threshold(t);
  check_norm(delta_inf);
  if (n < 1) throw std::invalid_argument("length must be >= 1");
  const double nd = static_cast<double>(n);
  return make_bound(2.0 * std::exp(-nd * t * t / (2.0 * delta_inf * delta_inf)));
}

TailBound samson_tail(double t, double gamma_2) {
  check_threshold(t);
  check_norm(gamma_2);
  return make_bound(2.0 * std::exp(-t * t / (2.0 * gamma_2 * gamma_2)));
}

double BoundSpec::concentration_constant() const {
  check_norm(norm_value);
  const double sq = norm_value * norm_value;
  return kind == BoundKind::kHammingInf ? static_cast<double>(n) / (2.0 * sq)
                                        : 1.0 / (2.0 * sq);
}

TailBound BoundSpec::evaluate(double t) const {
  return kind == BoundKind::kHammingInf ? kontram_tail(t, n, norm_value)
                                        : samson_tail(t, norm_value);
}

ContractingNormBounds contracting_norm_bounds(double theta) {
  if (theta < 0.0 || std::isnan(theta))
    throw std::invalid_argument(fmt::format("theta {} must be in [0, 1)", theta));
  if (theta >= 1.0) {
    throw ThetaNotContracting(
        fmt::format("theta = {} is not contracting (need theta < 1)", theta));
  }
  return {1.0 / (1.0 - theta), 1.0 / (1.0 - std::sqrt(theta))};
}

}  // namespace etamix
