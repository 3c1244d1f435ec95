#ifndef ETAMIX_TESTS_TEST_UTIL_H_
#define ETAMIX_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "etamix/matrix.h"
#include "etamix/process_model.h"

namespace etamix::testing {

// Random probability vector. With `sparsity` > 0 each entry is zeroed with
// that probability (at least one entry stays positive).
inline std::vector<double> random_row(std::mt19937_64& rng, std::size_t k,
                                      double sparsity = 0.0) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> w(k);
  double sum = 0.0;
  for (auto& v : w) {
    v = -std::log(1.0 - unit(rng));
    if (sparsity > 0.0 && unit(rng) < sparsity) v = 0.0;
    sum += v;
  }
  if (sum == 0.0) {
    w[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)] = 1.0;
    sum = 1.0;
  }
  for (auto& v : w) v /= sum;
  return w;
}

inline Matrix random_stochastic(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                double sparsity = 0.0) {
  Matrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = random_row(rng, cols, sparsity);
    std::copy(row.begin(), row.end(), m.row(r).begin());
  }
  return m;
}

struct ModelShape {
  std::size_t max_n = 6;
  std::size_t max_hidden = 3;
  std::size_t max_observed = 3;
  double sparsity = 0.0;
  bool identity_emissions = false;
};

inline ProcessModel random_model(std::mt19937_64& rng, const ModelShape& shape) {
  auto pick = [&](std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(1, hi)(rng);
  };
  ProcessModel m;
  m.n = pick(shape.max_n);
  const std::size_t h = pick(shape.max_hidden);
  const std::size_t o = shape.identity_emissions ? h : pick(shape.max_observed);
  m.hidden = Alphabet::Numbered(h);
  m.observed = Alphabet::Numbered(o);
  m.initial = random_row(rng, h, shape.sparsity);
  for (std::size_t k = 0; k + 1 < m.n; ++k) {
    m.kernels.push_back(random_stochastic(rng, h, h, shape.sparsity));
  }
  for (std::size_t l = 0; l < m.n; ++l) {
    m.emissions.push_back(shape.identity_emissions
                              ? Matrix::Identity(h)
                              : random_stochastic(rng, h, o, shape.sparsity));
  }
  return m;
}

// Symbol at `pos` of sequence `index` in base `radix`, position 0 leading.
inline std::size_t digit(std::size_t index, std::size_t radix, std::size_t n,
                         std::size_t pos) {
  for (std::size_t k = n - 1; k > pos; --k) index /= radix;
  return index % radix;
}

inline std::size_t ipow(std::size_t b, std::size_t e) {
  std::size_t r = 1;
  while (e-- > 0) r *= b;
  return r;
}

// Observed law by literal double sum over hidden and observed sequences.
inline std::vector<double> oracle_observed_law(const ProcessModel& m) {
  const std::size_t h = m.hidden.size();
  const std::size_t o = m.observed.size();
  const std::size_t hs = ipow(h, m.n);
  const std::size_t os = ipow(o, m.n);
  std::vector<double> rho(os, 0.0);
  for (std::size_t xb = 0; xb < hs; ++xb) {
    double mu = m.initial[digit(xb, h, m.n, 0)];
    for (std::size_t k = 0; k + 1 < m.n; ++k) {
      mu *= m.kernels[k](digit(xb, h, m.n, k), digit(xb, h, m.n, k + 1));
    }
    if (mu == 0.0) continue;
    for (std::size_t x = 0; x < os; ++x) {
      double p = mu;
      for (std::size_t l = 0; l < m.n; ++l) {
        p *= m.emissions[l](digit(xb, h, m.n, l), digit(x, o, m.n, l));
      }
      rho[x] += p;
    }
  }
  return rho;
}

// sup over (y, w, w2) of the TV distance between tails from position j given
// [y w] and [y w2], skipping null conditioning events. Returns -1 when no
// tuple is admissible. Positions are 1-based.
inline double oracle_eta_bar(const std::vector<double>& table, std::size_t radix,
                             std::size_t n, std::size_t i, std::size_t j) {
  const std::size_t tails = ipow(radix, n - j + 1);
  const std::size_t prefixes = ipow(radix, i - 1);
  double best = -1.0;
  for (std::size_t y = 0; y < prefixes; ++y) {
    std::vector<std::vector<double>> cond(radix, std::vector<double>(tails, 0.0));
    std::vector<double> mass(radix, 0.0);
    for (std::size_t x = 0; x < table.size(); ++x) {
      std::size_t head = 0;
      for (std::size_t p = 0; p + 1 < i; ++p) head = head * radix + digit(x, radix, n, p);
      if (head != y) continue;
      const std::size_t w = digit(x, radix, n, i - 1);
      std::size_t tail = 0;
      for (std::size_t p = j - 1; p < n; ++p) tail = tail * radix + digit(x, radix, n, p);
      cond[w][tail] += table[x];
      mass[w] += table[x];
    }
    for (std::size_t w = 0; w < radix; ++w) {
      for (std::size_t w2 = w + 1; w2 < radix; ++w2) {
        if (mass[w] <= 0.0 || mass[w2] <= 0.0) continue;
        double l1 = 0.0;
        for (std::size_t t = 0; t < tails; ++t) {
          l1 += std::abs(cond[w][t] / mass[w] - cond[w2][t] / mass[w2]);
        }
        best = std::max(best, 0.5 * l1);
      }
    }
  }
  return best;
}

inline double oracle_theta(const Matrix& k) {
  double best = 0.0;
  for (std::size_t a = 0; a < k.rows(); ++a) {
    for (std::size_t b = a + 1; b < k.rows(); ++b) {
      double l1 = 0.0;
      for (std::size_t c = 0; c < k.cols(); ++c) l1 += std::abs(k(a, c) - k(b, c));
      best = std::max(best, 0.5 * l1);
    }
  }
  return best;
}

}  // namespace etamix::testing

#endif  // ETAMIX_TESTS_TEST_UTIL_H_
