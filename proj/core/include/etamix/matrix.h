#ifndef ETAMIX_MATRIX_H_
#define ETAMIX_MATRIX_H_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace etamix {

// Dense row-major matrix of doubles. Small by construction (alphabet-sized
// kernels, n x n coupling matrices), so no expression templates.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix Identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::span<const double> data() const { return data_; }

  Matrix transposed() const;

  // y = A x
  std::vector<double> multiply(std::span<const double> x) const;
  // y = A^T x
  std::vector<double> multiply_transposed(std::span<const double> x) const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Maximum absolute row sum: the operator norm induced by l-infinity.
double inf_operator_norm(const Matrix& m);

double frobenius_norm(const Matrix& m);

// Largest l2 norm over columns.
double max_column_norm(const Matrix& m);

// Sums with pairwise (tree) reduction; error grows as O(log n) ulps.
double pairwise_sum(std::span<const double> values);

// Pairwise sum of at(k) for k in [begin, end).
template <typename Accessor>
double pairwise_sum_of(std::size_t begin, std::size_t end, const Accessor& at) {
  constexpr std::size_t kLeaf = 16;
  if (end - begin <= kLeaf) {
    double s = 0.0;
    for (std::size_t k = begin; k < end; ++k) s += at(k);
    return s;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum_of(begin, mid, at) + pairwise_sum_of(mid, end, at);
}

}  // namespace etamix

#endif  // ETAMIX_MATRIX_H_
