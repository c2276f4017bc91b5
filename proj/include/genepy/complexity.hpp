#pragma once

#include <cstddef>
#include <string_view>
#include <utility>
#include <vector>

#include "genepy/matrix.hpp"
#include "genepy/panel.hpp"

namespace genepy {

/// Weighted degree of each entity node: its total score, and the mean over
/// the categories it reports (the equal-weight composite index).
struct DegreeIndex {
  std::vector<double> k_s;
  std::vector<std::size_t> applicable_count;
  std::vector<double> composite_mean;
};

/// Throws DegenerateError naming the first entity whose total score is zero.
DegreeIndex degree_index(const ScorePanel& panel);

/// k'_g = sum_s I_sg / k_s.
struct AdjustedUbiquity {
  std::vector<double> k_prime;
};

/// Throws DegenerateError naming the first category with k'_g == 0.
AdjustedUbiquity adjusted_ubiquity(const ScorePanel& panel, const DegreeIndex& degree);

/// N_sg = I_sg / (k_s k'_g): the score matrix with both degree effects divided out.
struct ProximityMatrix {
  Matrix N;
};

ProximityMatrix proximity(const ScorePanel& panel, const DegreeIndex& degree,
                          const AdjustedUbiquity& ubiquity);

/// U = N N^T (entity similarity) and V = N^T N (category similarity).
struct SimilarityPair {
  Matrix U;
  Matrix V;
};

SimilarityPair similarity(const ProximityMatrix& proximity);

struct SolverOptions {
  double tol = 1e-10;
  std::size_t max_steps = 1000;
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;  // unit 2-norm, positive entry sum
  std::size_t steps = 0;
  double residual = 0.0;  // ||M v - lambda v||_inf / lambda
};

/// Power iteration from the uniform positive vector.
///
/// Stops once the Rayleigh-quotient residual drops to `tol`. When the top
/// eigenvalue is degenerate the result is the limit reached from the uniform
/// start, which makes ties deterministic. Throws InputError for an all-zero or
/// non-square matrix and ConvergenceError (carrying the last residual) after
/// `max_steps` iterations.
EigenPair principal_eigenvector(const Matrix& M, const SolverOptions& options = {});

/// The `count` leading eigenpairs by deflated power iteration (each iterate is
/// re-orthogonalised against the pairs already found). The first pair equals
/// principal_eigenvector(M). Diagnostic output only.
std::vector<EigenPair> leading_eigenpairs(const Matrix& M, std::size_t count,
                                          const SolverOptions& options = {});

enum class Method { spectral, iterative };
enum class Normalization { mean_one };

std::string_view to_string(Method method);

struct ComplexityScores {
  std::vector<double> D;  // entities, mean 1
  std::vector<double> C;  // categories, mean 1
  double lambda_U = 0.0;  // NaN for the iterative method
  double lambda_V = 0.0;
  Normalization normalization = Normalization::mean_one;
  Method method = Method::spectral;
};

/// Everything the spectral route produces, for callers that need the
/// intermediates (weights need k'_g, reports need k_s).
struct SpectralResult {
  DegreeIndex degree;
  AdjustedUbiquity ubiquity;
  ProximityMatrix proximity;
  SimilarityPair similarity;
  ComplexityScores scores;
};

SpectralResult genepy_analysis(const ScorePanel& panel, const SolverOptions& options = {});

/// D from the principal eigenvector of U, C from that of V, both rescaled to mean 1.
ComplexityScores genepy_scores(const ScorePanel& panel, const SolverOptions& options = {});

struct FitnessState {
  std::vector<double> D;
  std::vector<double> C;
};

/// One simultaneous application of the nonlinear map
///   D~_s = sum_g I_sg C_g,           D = D~ / mean(D~)
///   C~_g = 1 / sum_s (I_sg / D_s),   C = C~ / mean(C~)
/// Both updates read the previous iterate. Throws DegenerateError if any
/// D_s is zero.
FitnessState fitness_step(const ScorePanel& panel, const FitnessState& current);

struct IterationTrace {
  std::vector<FitnessState> iterates;  // iterates[0] is the start point
  std::vector<double> residuals;       // residuals[n-1] is the change made by step n
  bool converged = false;
  std::size_t steps = 0;
  double final_residual = 0.0;
};

/// Largest elementwise relative change max_i |x_i - y_i| / |x_i| over both vectors.
double relative_change(const FitnessState& next, const FitnessState& previous);

/// Iterates fitness_step from D = C = 1 until relative_change <= tol or
/// max_steps. Non-convergence is reported in the trace, not thrown.
std::pair<ComplexityScores, IterationTrace> run_fitness(const ScorePanel& panel,
                                                        const SolverOptions& options = {});

}  // namespace genepy
