#ifndef ETAMIX_MIXING_H_
#define ETAMIX_MIXING_H_

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "etamix/contraction.h"
#include "etamix/inference.h"
#include "etamix/matrix.h"
#include "etamix/process_model.h"

// Positions i, j and kernel indices k are 1-based throughout this header,
// matching the usual statement 1 <= i < j <= n.

namespace etamix {

// Slack allowed before eta_bar(i,j) > theta_i ... theta_{j-1} counts as a
// violation.
inline constexpr double kTheoremTolerance = 1e-9;

// Upper-triangular eta-bar values with unit diagonal.
class MixingMatrix {
 public:
  explicit MixingMatrix(std::size_t n);

  std::size_t n() const { return values_.rows(); }
  double operator()(std::size_t i, std::size_t j) const;
  // Requires i < j; values in [0, 1] (rounding overshoot up to 1e-12 is
  // clamped).
  void set(std::size_t i, std::size_t j, double value);

  // 0-based dense view, lower triangle zero.
  const Matrix& values() const { return values_; }

  // (i, j) pairs whose supremum ranged over no admissible conditioning.
  std::vector<std::pair<std::size_t, std::size_t>> empty_sups;

 private:
  Matrix values_;
};

// theta_k for k = 1..n-1 stored at index k-1.
using ThetaVector = std::vector<double>;

// TV distance between the tails X_{j..n} conditioned on [y w] and [y w2].
double eta_ij(const JointLaw& law, std::size_t i, std::size_t j,
              std::span<const Symbol> y, Symbol w, Symbol w2);

struct EtaBarResult {
  double value = 0.0;
  std::size_t admissible_pairs = 0;  // (y, {w, w2}) with both events non-null
  std::size_t skipped_pairs = 0;
};

// Supremum of eta_ij over prefixes y and symbol pairs, restricted to
// conditioning events of positive probability. 0 when nothing is admissible.
EtaBarResult eta_bar(const JointLaw& law, std::size_t i, std::size_t j,
                     const SizeGuard& guard = {});

MixingMatrix eta_bar_matrix(const JointLaw& law, const SizeGuard& guard = {});

// Largest TV distance between two rows of a row-stochastic kernel.
double theta(const TransitionKernel& kernel);

ThetaVector thetas(const ProcessModel& model);

// theta_i * ... * theta_{j-1}.
double theorem_bound(std::span<const double> thetas, std::size_t i, std::size_t j);

// Matrix of theorem_bound values for all i < j.
MixingMatrix theorem_bound_matrix(std::span<const double> thetas);

// The balanced vector over hidden states built from the observed prefix
// [y w] versus [y w2]:
//   h_v = (q_i(w|v)/rho[y w] - q_i(w2|v)/rho[y w2]) * P[X_{1..i-1}=y, Xbar_i=v]
struct FilterVector {
  SignedVector h;
  double rho_w = 0.0;   // rho([y w])
  double rho_w2 = 0.0;  // rho([y w2])
};

// nullopt when either conditioning event is null.
std::optional<FilterVector> filter_vector(const ProcessModel& model,
                                          std::span<const Symbol> y, Symbol w,
                                          Symbol w2);

struct FilteredEtaResult {
  double value = 0.0;
  std::size_t admissible_pairs = 0;
  std::size_t skipped_pairs = 0;
  double max_h_tv = 0.0;
  double max_h_imbalance = 0.0;
  double max_z_tv = 0.0;
};

// eta_bar(observed_law(model), i, j) computed through the hidden-state
// filter: h is pushed through the transposed kernels i..j-1 and then through
// the future observation channel. Never enumerates the middle block.
FilteredEtaResult eta_bar_filtered(const ProcessModel& model, std::size_t i,
                                   std::size_t j, const SizeGuard& guard = {});

MixingMatrix eta_bar_matrix_filtered(const ProcessModel& model,
                                     const SizeGuard& guard = {});

struct CouplingMatrices {
  Matrix gamma;  // sqrt(eta_bar) off the diagonal
  Matrix delta;  // eta_bar off the diagonal
};

CouplingMatrices build_matrices(const MixingMatrix& eta);

// max_i (1 + eta_{i,i+1} + ... + eta_{i,n}).
double delta_inf_norm(const Matrix& delta);

struct PowerIterationOptions {
  double relative_tolerance = 1e-12;
  std::size_t max_iterations = 100000;
};

// Largest singular value via power iteration on Gamma^T Gamma started from
// the all-ones vector. Throws NonConvergence at the iteration cap.
double gamma_2_norm(const Matrix& gamma, const PowerIterationOptions& options = {});

struct TheoremViolation {
  std::size_t i = 0;
  std::size_t j = 0;
  double eta = 0.0;
  double bound = 0.0;
};

struct TheoremReport {
  MixingMatrix eta{1};
  ThetaVector thetas;
  MixingMatrix bound{1};
  Matrix slack;  // bound - eta, upper triangle
  CouplingMatrices coupling;
  double delta_inf = 1.0;
  double gamma_2 = 1.0;
  double bound_delta_inf = 1.0;
  double bound_gamma_2 = 1.0;
  std::vector<TheoremViolation> violations;
};

// Brute-force eta_bar on the observed law against theta products, for every
// i < j.
TheoremReport verify_theorem(const ProcessModel& model, const SizeGuard& guard = {});

}  // namespace etamix

#endif  // ETAMIX_MIXING_H_
