#pragma once

#include <span>
#include <vector>

#include "genepy/matrix.hpp"

// Dense kernels behind the complexity computations.
//
// Every kernel exists twice: `genepy::kernels::serial` is the straightforward
// reference, `genepy::kernels::parallel` distributes output elements over
// OpenMP threads. Each output element is accumulated in the same order in
// both versions, so they agree bit for bit at any thread count. The library
// always calls the parallel versions; the serial ones are kept for tests and
// the benchmark.
namespace genepy::kernels {

namespace serial {

/// k_s = sum_g I_sg
std::vector<double> row_sums(const Matrix& I);
/// k'_g = sum_s I_sg / k_s
std::vector<double> adjusted_column_sums(const Matrix& I, std::span<const double> k_s);
/// N_sg = I_sg / (k_s k'_g)
Matrix proximity(const Matrix& I, std::span<const double> k_s, std::span<const double> k_prime);
/// N N^T, symmetrised.
Matrix gram_rows(const Matrix& N);
/// N^T N, symmetrised.
Matrix gram_cols(const Matrix& N);
/// y = M x
void matvec(const Matrix& M, std::span<const double> x, std::span<double> y);
/// y_g = 1 / sum_s I_sg / x_s
void inverse_column_harmonic(const Matrix& I, std::span<const double> x, std::span<double> y);

}  // namespace serial

namespace parallel {

std::vector<double> row_sums(const Matrix& I);
std::vector<double> adjusted_column_sums(const Matrix& I, std::span<const double> k_s);
Matrix proximity(const Matrix& I, std::span<const double> k_s, std::span<const double> k_prime);
Matrix gram_rows(const Matrix& N);
Matrix gram_cols(const Matrix& N);
void matvec(const Matrix& M, std::span<const double> x, std::span<double> y);
void inverse_column_harmonic(const Matrix& I, std::span<const double> x, std::span<double> y);

}  // namespace parallel

}  // namespace genepy::kernels
