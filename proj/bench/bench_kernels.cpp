// Serial reference vs OpenMP kernels on synthetic panels.
//
//   ./bench_kernels --benchmark_filter=Gram
//   OMP_NUM_THREADS=8 ./bench_kernels

#include <benchmark/benchmark.h>

#include <random>

#include "genepy/complexity.hpp"
#include "genepy/kernels.hpp"

namespace {

using genepy::Matrix;
namespace serial = genepy::kernels::serial;
namespace parallel = genepy::kernels::parallel;

Matrix random_panel(std::size_t rows, std::size_t cols) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(1.0, 100.0);
  Matrix I(rows, cols);
  for (double& v : I.data()) v = dist(rng);
  return I;
}

Matrix proximity_of(const Matrix& I) {
  const auto k = serial::row_sums(I);
  const auto kp = serial::adjusted_column_sums(I, k);
  return serial::proximity(I, k, kp);
}

template <bool Parallel>
void BM_GramRows(benchmark::State& state) {
  const Matrix N = proximity_of(random_panel(state.range(0), state.range(1)));
  for (auto _ : state) {
    Matrix U = Parallel ? parallel::gram_rows(N) : serial::gram_rows(N);
    benchmark::DoNotOptimize(U.data().data());
  }
}

template <bool Parallel>
void BM_GramCols(benchmark::State& state) {
  const Matrix N = proximity_of(random_panel(state.range(0), state.range(1)));
  for (auto _ : state) {
    Matrix V = Parallel ? parallel::gram_cols(N) : serial::gram_cols(N);
    benchmark::DoNotOptimize(V.data().data());
  }
}

template <bool Parallel>
void BM_Matvec(benchmark::State& state) {
  const Matrix M = random_panel(state.range(0), state.range(0));
  std::vector<double> x(M.cols(), 1.0), y(M.rows());
  for (auto _ : state) {
    if (Parallel) parallel::matvec(M, x, y);
    else serial::matvec(M, x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

template <bool Parallel>
void BM_FitnessSweep(benchmark::State& state) {
  // One full update: D~ = I C and C~ = 1 / (I^T (1/D)).
  const Matrix I = random_panel(state.range(0), state.range(1));
  std::vector<double> D(I.rows(), 1.0), C(I.cols(), 1.0), Dn(I.rows()), Cn(I.cols());
  for (auto _ : state) {
    if (Parallel) {
      parallel::matvec(I, C, Dn);
      parallel::inverse_column_harmonic(I, D, Cn);
    } else {
      serial::matvec(I, C, Dn);
      serial::inverse_column_harmonic(I, D, Cn);
    }
    benchmark::DoNotOptimize(Dn.data());
    benchmark::DoNotOptimize(Cn.data());
  }
}

void BM_GenepyScores(benchmark::State& state) {
  const Matrix I = random_panel(state.range(0), state.range(1));
  std::vector<std::string> ents(I.rows()), cats(I.cols());
  for (std::size_t i = 0; i < ents.size(); ++i) ents[i] = "E" + std::to_string(i);
  for (std::size_t g = 0; g < cats.size(); ++g) cats[g] = "G" + std::to_string(g);
  const auto panel = genepy::make_panel("bench", ents, cats, I);
  for (auto _ : state) {
    auto scores = genepy::genepy_scores(panel);
    benchmark::DoNotOptimize(scores.D.data());
  }
}

}  // namespace

BENCHMARK(BM_GramRows<false>)->Name("GramRows/serial")->Args({36, 15})->Args({1000, 200})->Args({2000, 400});
BENCHMARK(BM_GramRows<true>)->Name("GramRows/parallel")->Args({36, 15})->Args({1000, 200})->Args({2000, 400});
BENCHMARK(BM_GramCols<false>)->Name("GramCols/serial")->Args({36, 15})->Args({1000, 200})->Args({4000, 400});
BENCHMARK(BM_GramCols<true>)->Name("GramCols/parallel")->Args({36, 15})->Args({1000, 200})->Args({4000, 400});
BENCHMARK(BM_Matvec<false>)->Name("Matvec/serial")->Arg(256)->Arg(2048);
BENCHMARK(BM_Matvec<true>)->Name("Matvec/parallel")->Arg(256)->Arg(2048);
BENCHMARK(BM_FitnessSweep<false>)->Name("FitnessSweep/serial")->Args({36, 15})->Args({5000, 1000});
BENCHMARK(BM_FitnessSweep<true>)->Name("FitnessSweep/parallel")->Args({36, 15})->Args({5000, 1000});
BENCHMARK(BM_GenepyScores)->Args({36, 15})->Args({1000, 200});

BENCHMARK_MAIN();
