#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "etamix/errors.h"
#include "etamix/inference.h"
#include "etamix/matrix.h"
#include "etamix/mixing.h"
#include "test_util.h"

namespace etamix {
namespace {

ProcessModel chain(std::size_t n, const Matrix& k, Distribution initial = {0.5, 0.5}) {
  return markov_as_hmm(n, initial, std::vector<TransitionKernel>(n - 1, k));
}

const Matrix kSticky{{0.9, 0.1}, {0.2, 0.8}};

TEST(EtaIj, TwoStepExample) {
  const auto law = hidden_law(chain(3, kSticky));
  EXPECT_NEAR(eta_ij(law, 1, 3, {}, 0, 1), 0.49, 1e-15);
  EXPECT_EQ(eta_ij(law, 1, 3, {}, 1, 1), 0.0);
}

TEST(EtaIj, ProductLawIsZero) {
  const Matrix r{{0.3, 0.7}, {0.3, 0.7}};
  const auto law = hidden_law(chain(4, r, {0.3, 0.7}));
  for (Symbol y : {0u, 1u}) EXPECT_NEAR(eta_ij(law, 2, 3, Sequence{y}, 0, 1), 0.0, 1e-15);
}

TEST(EtaBar, AgreesWithOracle) {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 80; ++trial) {
    const auto m = testing::random_model(rng, {.max_n = 5, .sparsity = trial % 3 == 0 ? 0.4 : 0.0});
    const auto law = observed_law(m);
    const std::vector<double> table(law.table().begin(), law.table().end());
    const auto eta = eta_bar_matrix(law);
    for (std::size_t i = 1; i <= m.n; ++i) {
      for (std::size_t j = i + 1; j <= m.n; ++j) {
        const double expected =
            testing::oracle_eta_bar(table, m.observed.size(), m.n, i, j);
        EXPECT_NEAR(eta(i, j), std::max(expected, 0.0), 1e-12) << i << "," << j;
      }
    }
  }
}

TEST(EtaBar, IidIsZero) {
  const Matrix r{{0.2, 0.8}, {0.2, 0.8}};
  const auto eta = eta_bar_matrix(hidden_law(chain(5, r, {0.2, 0.8})));
  for (std::size_t i = 1; i <= 5; ++i)
    for (std::size_t j = i + 1; j <= 5; ++j) EXPECT_NEAR(eta(i, j), 0.0, 1e-12);
  EXPECT_TRUE(eta.empty_sups.empty());
}

TEST(EtaBar, DeterministicCopyFirstRowAndEmptySups) {
  const std::size_t n = 4;
  const auto law = hidden_law(chain(n, Matrix::Identity(2)));
  const auto eta = eta_bar_matrix(law);
  for (std::size_t j = 2; j <= n; ++j) EXPECT_EQ(eta(1, j), 1.0);
  // For i >= 2 the prefix pins X_i, so one of [y w], [y w2] is always null.
  const auto r = eta_bar(law, 2, 3);
  EXPECT_EQ(r.admissible_pairs, 0u);
  EXPECT_EQ(r.value, 0.0);
  EXPECT_EQ(eta.empty_sups.size(), (n - 1) * (n - 2) / 2);
}

TEST(Theta, Examples) {
  EXPECT_EQ(theta(Matrix{{0.4, 0.6}, {0.4, 0.6}}), 0.0);
  EXPECT_EQ(theta(Matrix::Identity(3)), 1.0);
  EXPECT_NEAR(theta(kSticky), 0.7, 1e-15);
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 200; ++trial) {
    const auto k = testing::random_stochastic(rng, 1 + trial % 4, 1 + trial % 5);
    EXPECT_NEAR(theta(k), testing::oracle_theta(k), 1e-15);
  }
}

TEST(TheoremBound, Examples) {
  const std::vector<double> th{0.7, 0.7, 0.2};
  EXPECT_EQ(theorem_bound(th, 2, 3), 0.7);
  EXPECT_NEAR(theorem_bound(th, 1, 3), 0.49, 1e-15);
  EXPECT_NEAR(theorem_bound(th, 1, 4), 0.098, 1e-15);
  const std::vector<double> zeros{0.0, 0.0};
  EXPECT_EQ(theorem_bound(zeros, 1, 3), 0.0);
  const auto bm = theorem_bound_matrix(th);
  EXPECT_EQ(bm.n(), 4u);
  EXPECT_EQ(bm(3, 4), 0.2);
  EXPECT_EQ(bm(2, 2), 1.0);
}

TEST(TheoremBound, HoldsOnRandomModels) {
  std::mt19937_64 rng(8080);
  for (int trial = 0; trial < 60; ++trial) {
    const auto m = testing::random_model(rng, {.max_n = 5});
    const auto report = verify_theorem(m);
    EXPECT_TRUE(report.violations.empty());
  }
}

TEST(EtaBarFiltered, MatchesBruteForceOnIdentityEmissions) {
  const auto m = chain(5, kSticky, {0.3, 0.7});
  const auto brute = eta_bar_matrix(observed_law(m));
  const auto filtered = eta_bar_matrix_filtered(m);
  for (std::size_t i = 1; i <= 5; ++i)
    for (std::size_t j = i + 1; j <= 5; ++j)
      EXPECT_NEAR(filtered(i, j), brute(i, j), 1e-10);
}

TEST(EtaBarFiltered, MatchesBruteForceOnRandomHmms) {
  std::mt19937_64 rng(99991);
  for (int trial = 0; trial < 60; ++trial) {
    const auto m = testing::random_model(rng, {.max_n = 5, .sparsity = trial % 2 ? 0.35 : 0.0});
    const auto law = observed_law(m);
    for (std::size_t i = 1; i <= m.n; ++i) {
      for (std::size_t j = i + 1; j <= m.n; ++j) {
        const auto b = eta_bar(law, i, j);
        const auto f = eta_bar_filtered(m, i, j);
        EXPECT_NEAR(f.value, b.value, 1e-10);
        EXPECT_EQ(f.admissible_pairs, b.admissible_pairs);
        EXPECT_LE(f.max_h_imbalance, 1e-12);
        EXPECT_LE(f.value, f.max_z_tv + 1e-12);
      }
    }
  }
}

TEST(EtaBarFiltered, IidHiddenChainAnnihilates) {
  ProcessModel m = chain(4, Matrix{{0.5, 0.5}, {0.5, 0.5}});
  m.observed = Alphabet::Numbered(3);
  m.emissions.assign(4, Matrix{{0.2, 0.3, 0.5}, {0.6, 0.1, 0.3}});
  for (std::size_t j = 2; j <= 4; ++j) {
    const auto f = eta_bar_filtered(m, 1, j);
    EXPECT_NEAR(f.value, 0.0, 1e-15);
    EXPECT_NEAR(f.max_z_tv, 0.0, 1e-15);
  }
}

TEST(FilterVector, BalancedAndNullOnZeroEvents) {
  std::mt19937_64 rng(3);
  const auto m = testing::random_model(rng, {.max_n = 4, .max_hidden = 3, .max_observed = 3});
  if (m.n >= 2 && m.observed.size() >= 2) {
    const auto fv = filter_vector(m, Sequence{0}, 0, 1);
    ASSERT_TRUE(fv.has_value());
    EXPECT_NEAR(fv->h.sum(), 0.0, 1e-12);
  }
  ProcessModel blocked = chain(3, kSticky);
  blocked.observed = Alphabet::Numbered(2);
  blocked.emissions.assign(3, Matrix{{1.0, 0.0}, {1.0, 0.0}});
  EXPECT_FALSE(filter_vector(blocked, Sequence{}, 0, 1).has_value());
}

TEST(BuildMatrices, Examples) {
  MixingMatrix zero(3);
  const auto id = build_matrices(zero);
  EXPECT_EQ(id.gamma, Matrix::Identity(3));
  EXPECT_EQ(id.delta, Matrix::Identity(3));
  MixingMatrix e(2);
  e.set(1, 2, 0.49);
  const auto c = build_matrices(e);
  EXPECT_NEAR(c.gamma(0, 1), 0.7, 1e-15);
  EXPECT_EQ(c.delta(0, 1), 0.49);
  EXPECT_EQ(c.gamma(1, 0), 0.0);
}

TEST(MixingMatrix, SetClampsAndRejects) {
  MixingMatrix e(3);
  e.set(1, 2, 1.0 + 5e-13);
  EXPECT_EQ(e(1, 2), 1.0);
  EXPECT_THROW(e.set(1, 3, 1.1), std::domain_error);
  EXPECT_THROW(e.set(2, 1, 0.5), std::out_of_range);
}

TEST(DeltaInfNorm, Examples) {
  EXPECT_EQ(delta_inf_norm(Matrix::Identity(4)), 1.0);
  EXPECT_NEAR(delta_inf_norm(Matrix{{1.0, 0.3}, {0.0, 1.0}}), 1.3, 1e-15);
  const std::size_t n = 4;
  Matrix geo = Matrix::Identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) geo(i, j) = std::pow(0.5, double(j - i));
  EXPECT_EQ(delta_inf_norm(geo), 1.875);
  EXPECT_EQ(delta_inf_norm(geo), inf_operator_norm(geo));
  EXPECT_THROW(delta_inf_norm(Matrix{{0.5, 0.0}, {0.0, 1.0}}), std::invalid_argument);
}

TEST(Gamma2Norm, Examples) {
  EXPECT_NEAR(gamma_2_norm(Matrix::Identity(5)), 1.0, 1e-12);
  EXPECT_NEAR(gamma_2_norm(Matrix{{1.0, 1.0}, {0.0, 1.0}}), (1.0 + std::sqrt(5.0)) / 2.0,
              1e-9);
  EXPECT_NEAR(gamma_2_norm(Matrix{{1.0, 1.0}, {0.0, 1.0}}), 1.618034, 1e-6);
}

TEST(Gamma2Norm, CapRaisesNonConvergence) {
  EXPECT_THROW(gamma_2_norm(Matrix{{1.0, 1.0, 1.0}, {0, 1.0, 1.0}, {0, 0, 1.0}},
                            {.relative_tolerance = 0.0, .max_iterations = 3}),
               NonConvergence);
}

TEST(Norms, SandwichOnRandomMatrices) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + trial % 7;
    MixingMatrix eta(n);
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = i + 1; j <= n; ++j) eta.set(i, j, unit(rng));
    const auto c = build_matrices(eta);
    const double g2 = gamma_2_norm(c.gamma);
    EXPECT_GE(g2, max_column_norm(c.gamma) - 1e-9);
    EXPECT_LE(g2, frobenius_norm(c.gamma) + 1e-9);
    EXPECT_GE(g2, 1.0 - 1e-12);
    EXPECT_NEAR(delta_inf_norm(c.delta), inf_operator_norm(c.delta), 1e-12);
  }
}

TEST(VerifyTheorem, ContractingChainReport) {
  const auto m = chain(4, kSticky);
  const auto r = verify_theorem(m);
  ASSERT_EQ(r.thetas.size(), 3u);
  EXPECT_TRUE(r.violations.empty());
  for (std::size_t i = 1; i <= 4; ++i)
    for (std::size_t j = i + 1; j <= 4; ++j)
      EXPECT_NEAR(r.slack(i - 1, j - 1), r.bound(i, j) - r.eta(i, j), 1e-15);
  EXPECT_LE(r.delta_inf, r.bound_delta_inf + 1e-12);
  EXPECT_LE(r.gamma_2, r.bound_gamma_2 + 1e-9);
}

TEST(VerifyTheorem, DeterministicCopyTightOnFirstRow) {
  const auto r = verify_theorem(chain(4, Matrix::Identity(2)));
  EXPECT_TRUE(r.violations.empty());
  for (std::size_t j = 2; j <= 4; ++j) EXPECT_EQ(r.slack(0, j - 1), 0.0);
}

}  // namespace
}  // namespace etamix
