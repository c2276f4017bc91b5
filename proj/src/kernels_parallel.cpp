#include <algorithm>
#include <cassert>
#include <cstddef>

#include "genepy/kernels.hpp"

// Loops are parallel over output elements only; each element's sum runs in
// ascending index order exactly as in kernels_serial.cpp. No reductions.

namespace genepy::kernels::parallel {

namespace {

using Index = std::ptrdiff_t;

Index as_index(std::size_t n) { return static_cast<Index>(n); }

// Below this many multiply-adds a parallel region costs more than it saves.
constexpr std::size_t kMinParallelWork = 1 << 14;

bool worth_parallel(std::size_t work) { return work >= kMinParallelWork; }

// Column sums in row order, parallel over blocks of columns so each thread
// reads contiguous row segments. Every column still accumulates s = 0, 1, ...
constexpr std::size_t kColumnBlock = 64;

template <typename Term>
std::vector<double> column_sums(const Matrix& I, Term term) {
  std::vector<double> acc(I.cols(), 0.0);
  const Index blocks = as_index((I.cols() + kColumnBlock - 1) / kColumnBlock);
#pragma omp parallel for schedule(static) if (worth_parallel(I.rows() * I.cols()))
  for (Index b = 0; b < blocks; ++b) {
    const std::size_t g0 = static_cast<std::size_t>(b) * kColumnBlock;
    const std::size_t g1 = std::min(g0 + kColumnBlock, I.cols());
    for (std::size_t s = 0; s < I.rows(); ++s) {
      const auto r = I.row(s);
      for (std::size_t g = g0; g < g1; ++g) acc[g] += term(r[g], s);
    }
  }
  return acc;
}

}  // namespace

std::vector<double> row_sums(const Matrix& I) {
  std::vector<double> k(I.rows(), 0.0);
  const Index rows = as_index(I.rows());
#pragma omp parallel for schedule(static) if (worth_parallel(I.rows() * I.cols()))
  for (Index s = 0; s < rows; ++s) {
    double acc = 0.0;
    for (double v : I.row(static_cast<std::size_t>(s))) acc += v;
    k[static_cast<std::size_t>(s)] = acc;
  }
  return k;
}

std::vector<double> adjusted_column_sums(const Matrix& I, std::span<const double> k_s) {
  assert(k_s.size() == I.rows());
  return column_sums(I, [k_s](double v, std::size_t s) { return v / k_s[s]; });
}

Matrix proximity(const Matrix& I, std::span<const double> k_s, std::span<const double> k_prime) {
  Matrix N(I.rows(), I.cols());
  const Index rows = as_index(I.rows());
#pragma omp parallel for schedule(static) if (worth_parallel(I.rows() * I.cols()))
  for (Index s = 0; s < rows; ++s) {
    const auto su = static_cast<std::size_t>(s);
    for (std::size_t g = 0; g < I.cols(); ++g) N(su, g) = I(su, g) / (k_s[su] * k_prime[g]);
  }
  return N;
}

namespace {

// Fills the upper triangle and mirrors it. The averaging step of the serial
// reference is a no-op here because a*b == b*a in IEEE arithmetic.
template <typename Entry>
Matrix symmetric_product(std::size_t n, std::size_t inner, Entry entry) {
  Matrix M(n, n);
  const Index ni = as_index(n);
#pragma omp parallel for schedule(dynamic, 4) if (worth_parallel(n * n * inner))
  for (Index i = 0; i < ni; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    for (std::size_t j = iu; j < n; ++j) {
      const double v = entry(iu, j);
      M(iu, j) = v;
      M(j, iu) = v;
    }
  }
  return M;
}

}  // namespace

Matrix gram_rows(const Matrix& N) {
  return symmetric_product(N.rows(), N.cols(), [&N](std::size_t i, std::size_t j) {
    const auto a = N.row(i);
    const auto b = N.row(j);
    double acc = 0.0;
    for (std::size_t g = 0; g < a.size(); ++g) acc += a[g] * b[g];
    return acc;
  });
}

Matrix gram_cols(const Matrix& N) {
  // Same s-ordered sums as the reference, over contiguous rows of N^T.
  return gram_rows(N.transposed());
}

void matvec(const Matrix& M, std::span<const double> x, std::span<double> y) {
  assert(x.size() == M.cols() && y.size() == M.rows());
  const Index rows = as_index(M.rows());
#pragma omp parallel for schedule(static) if (worth_parallel(M.rows() * M.cols()))
  for (Index i = 0; i < rows; ++i) {
    const auto r = M.row(static_cast<std::size_t>(i));
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * x[j];
    y[static_cast<std::size_t>(i)] = acc;
  }
}

void inverse_column_harmonic(const Matrix& I, std::span<const double> x, std::span<double> y) {
  assert(x.size() == I.rows() && y.size() == I.cols());
  const auto acc = column_sums(I, [x](double v, std::size_t s) { return v / x[s]; });
  for (std::size_t g = 0; g < acc.size(); ++g) y[g] = 1.0 / acc[g];
}

}  // namespace genepy::kernels::parallel
