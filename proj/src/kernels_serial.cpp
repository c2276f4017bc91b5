#include <cassert>

#include "genepy/kernels.hpp"

namespace genepy::kernels::serial {

std::vector<double> row_sums(const Matrix& I) {
  std::vector<double> k(I.rows(), 0.0);
  for (std::size_t s = 0; s < I.rows(); ++s)
    for (std::size_t g = 0; g < I.cols(); ++g) k[s] += I(s, g);
  return k;
}

std::vector<double> adjusted_column_sums(const Matrix& I, std::span<const double> k_s) {
  assert(k_s.size() == I.rows());
  std::vector<double> kp(I.cols(), 0.0);
  for (std::size_t s = 0; s < I.rows(); ++s)
    for (std::size_t g = 0; g < I.cols(); ++g) kp[g] += I(s, g) / k_s[s];
  return kp;
}

Matrix proximity(const Matrix& I, std::span<const double> k_s, std::span<const double> k_prime) {
  Matrix N(I.rows(), I.cols());
  for (std::size_t s = 0; s < I.rows(); ++s)
    for (std::size_t g = 0; g < I.cols(); ++g) N(s, g) = I(s, g) / (k_s[s] * k_prime[g]);
  return N;
}

namespace {

void symmetrise(Matrix& M) {
  for (std::size_t i = 0; i < M.rows(); ++i)
    for (std::size_t j = i + 1; j < M.cols(); ++j) {
      const double avg = 0.5 * (M(i, j) + M(j, i));
      M(i, j) = avg;
      M(j, i) = avg;
    }
}

}  // namespace

Matrix gram_rows(const Matrix& N) {
  const std::size_t n = N.rows();
  Matrix U(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t g = 0; g < N.cols(); ++g) U(i, j) += N(i, g) * N(j, g);
  symmetrise(U);
  return U;
}

Matrix gram_cols(const Matrix& N) {
  const std::size_t n = N.cols();
  Matrix V(n, n);
  for (std::size_t s = 0; s < N.rows(); ++s)
    for (std::size_t g = 0; g < n; ++g)
      for (std::size_t h = 0; h < n; ++h) V(g, h) += N(s, g) * N(s, h);
  symmetrise(V);
  return V;
}

void matvec(const Matrix& M, std::span<const double> x, std::span<double> y) {
  assert(x.size() == M.cols() && y.size() == M.rows());
  for (std::size_t i = 0; i < M.rows(); ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < M.cols(); ++j) acc += M(i, j) * x[j];
    y[i] = acc;
  }
}

void inverse_column_harmonic(const Matrix& I, std::span<const double> x, std::span<double> y) {
  assert(x.size() == I.rows() && y.size() == I.cols());
  std::vector<double> acc(I.cols(), 0.0);
  for (std::size_t s = 0; s < I.rows(); ++s)
    for (std::size_t g = 0; g < I.cols(); ++g) acc[g] += I(s, g) / x[s];
  for (std::size_t g = 0; g < I.cols(); ++g) y[g] = 1.0 / acc[g];
}

}  // namespace genepy::kernels::serial
