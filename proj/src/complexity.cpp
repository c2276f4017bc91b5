#include "genepy/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "genepy/errors.hpp"
#include "genepy/kernels.hpp"

namespace genepy {

namespace kern = kernels::parallel;

namespace {

double mean(std::span<const double> v) {
  double total = 0.0;
  for (double x : v) total += x;
  return total / static_cast<double>(v.size());
}

void rescale_mean_one(std::vector<double>& v) {
  const double m = mean(v);
  for (double& x : v) x /= m;
}

double norm2(std::span<const double> v) {
  double total = 0.0;
  for (double x : v) total += x * x;
  return std::sqrt(total);
}

double dot(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) total += a[i] * b[i];
  return total;
}

// Perron vectors are only defined up to sign; pick the one with positive sum,
// falling back to the largest-magnitude entry when the sum vanishes.
void orient(std::vector<double>& v) {
  const double sum = std::accumulate(v.begin(), v.end(), 0.0);
  double pivot = sum;
  if (std::abs(sum) <= 1e-12 * norm2(v)) {
    pivot = *std::max_element(v.begin(), v.end(),
                              [](double a, double b) { return std::abs(a) < std::abs(b); });
  }
  if (pivot < 0.0)
    for (double& x : v) x = -x;
}

void check_square(const Matrix& M) {
  if (M.rows() != M.cols() || M.rows() == 0) throw InputError("eigen solver needs a non-empty square matrix");
  bool all_zero = true;
  for (double x : M.data()) {
    if (!std::isfinite(x)) throw InputError("eigen solver input contains a non-finite entry");
    if (x != 0.0) all_zero = false;
  }
  if (all_zero) throw InputError("eigen solver input is the zero matrix");
}

void orthogonalise(std::vector<double>& v, const std::vector<EigenPair>& basis) {
  // Two passes of classical Gram-Schmidt.
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) {
      const double c = dot(v, b.vector);
      for (std::size_t i = 0; i < v.size(); ++i) v[i] -= c * b.vector[i];
    }
}

// Power iteration restricted to the orthogonal complement of `found`.
// `scale` normalises the residual; it is the dominant eigenvalue once known.
EigenPair power_iterate(const Matrix& M, std::vector<double> v, const std::vector<EigenPair>& found,
                        double scale, const SolverOptions& options) {
  const std::size_t n = M.rows();
  orthogonalise(v, found);
  double len = norm2(v);
  if (len == 0.0) throw ConvergenceError("start vector lies in the span of earlier eigenvectors", 0.0, 0);
  for (double& x : v) x /= len;

  std::vector<double> w(n);
  double residual = std::numeric_limits<double>::infinity();
  for (std::size_t step = 1; step <= options.max_steps; ++step) {
    kern::matvec(M, v, w);
    orthogonalise(w, found);
    const double lambda = dot(v, w);
    const double denom = scale > 0.0 ? scale : lambda;
    if (!(denom > 0.0)) {
      if (!found.empty() && norm2(w) == 0.0) return {0.0, v, step, 0.0};
      throw ConvergenceError("power iteration reached a non-positive Rayleigh quotient", residual, step);
    }
    residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual = std::max(residual, std::abs(w[i] - lambda * v[i]));
    residual /= denom;
    if (residual <= options.tol) {
      orient(v);
      return {lambda, std::move(v), step, residual};
    }
    len = norm2(w);
    if (len == 0.0) {
      if (!found.empty()) return {0.0, v, step, 0.0};
      throw ConvergenceError("power iteration collapsed to the zero vector", residual, step);
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / len;
  }
  throw ConvergenceError("power iteration did not converge in " + std::to_string(options.max_steps) +
                             " steps (last residual " + std::to_string(residual) + ")",
                         residual, options.max_steps);
}

}  // namespace

DegreeIndex degree_index(const ScorePanel& panel) {
  DegreeIndex deg;
  deg.k_s = kern::row_sums(panel.scores);
  const std::size_t ng = panel.category_count();
  deg.applicable_count.assign(panel.entity_count(), 0);
  deg.composite_mean.assign(panel.entity_count(), 0.0);
  for (std::size_t s = 0; s < panel.entity_count(); ++s) {
    for (std::size_t g = 0; g < ng; ++g)
      if (!panel.is_missing(s, g)) ++deg.applicable_count[s];
    if (!(deg.k_s[s] > 0.0)) {
      throw DegenerateError("entity '" + panel.entities[s] + "' has zero total score", panel.entities[s]);
    }
    deg.composite_mean[s] = deg.k_s[s] / static_cast<double>(deg.applicable_count[s]);
  }
  return deg;
}

AdjustedUbiquity adjusted_ubiquity(const ScorePanel& panel, const DegreeIndex& degree) {
  AdjustedUbiquity ubiq{kern::adjusted_column_sums(panel.scores, degree.k_s)};
  for (std::size_t g = 0; g < ubiq.k_prime.size(); ++g) {
    if (!(ubiq.k_prime[g] > 0.0)) {
      throw DegenerateError("category '" + panel.categories[g] + "' has zero total score", panel.categories[g]);
    }
  }
  return ubiq;
}

ProximityMatrix proximity(const ScorePanel& panel, const DegreeIndex& degree, const AdjustedUbiquity& ubiquity) {
  return {kern::proximity(panel.scores, degree.k_s, ubiquity.k_prime)};
}

SimilarityPair similarity(const ProximityMatrix& proximity) {
  return {kern::gram_rows(proximity.N), kern::gram_cols(proximity.N)};
}

EigenPair principal_eigenvector(const Matrix& M, const SolverOptions& options) {
  check_square(M);
  return power_iterate(M, std::vector<double>(M.rows(), 1.0), {}, 0.0, options);
}

std::vector<EigenPair> leading_eigenpairs(const Matrix& M, std::size_t count, const SolverOptions& options) {
  check_square(M);
  count = std::min(count, M.rows());
  std::vector<EigenPair> pairs;
  if (count == 0) return pairs;
  pairs.push_back(principal_eigenvector(M, options));
  const double scale = pairs.front().value;
  for (std::size_t k = 1; k < count; ++k) {
    // A fixed non-uniform start keeps the result deterministic and avoids
    // starting inside the span of the Perron vector.
    std::vector<double> start(M.rows());
    for (std::size_t i = 0; i < start.size(); ++i) start[i] = 1.0 / static_cast<double>(i + 1 + k);
    pairs.push_back(power_iterate(M, std::move(start), pairs, scale, options));
  }
  return pairs;
}

std::string_view to_string(Method method) {
  return method == Method::spectral ? "spectral" : "iterative";
}

SpectralResult genepy_analysis(const ScorePanel& panel, const SolverOptions& options) {
  SpectralResult r;
  r.degree = degree_index(panel);
  r.ubiquity = adjusted_ubiquity(panel, r.degree);
  r.proximity = proximity(panel, r.degree, r.ubiquity);
  r.similarity = similarity(r.proximity);

  EigenPair entity = principal_eigenvector(r.similarity.U, options);
  EigenPair category = principal_eigenvector(r.similarity.V, options);
  rescale_mean_one(entity.vector);
  rescale_mean_one(category.vector);
  r.scores.D = std::move(entity.vector);
  r.scores.C = std::move(category.vector);
  r.scores.lambda_U = entity.value;
  r.scores.lambda_V = category.value;
  r.scores.method = Method::spectral;
  return r;
}

ComplexityScores genepy_scores(const ScorePanel& panel, const SolverOptions& options) {
  return genepy_analysis(panel, options).scores;
}

FitnessState fitness_step(const ScorePanel& panel, const FitnessState& current) {
  const Matrix& I = panel.scores;
  if (current.D.size() != I.rows() || current.C.size() != I.cols()) {
    throw InputError("fitness iterate does not match the panel shape");
  }
  for (std::size_t s = 0; s < current.D.size(); ++s) {
    if (current.D[s] == 0.0) {
      throw DegenerateError("singular fitness update: D is zero for entity '" + panel.entities[s] + "'",
                            panel.entities[s]);
    }
  }
  FitnessState next{std::vector<double>(I.rows()), std::vector<double>(I.cols())};
  kern::matvec(I, current.C, next.D);
  kern::inverse_column_harmonic(I, current.D, next.C);
  rescale_mean_one(next.D);
  rescale_mean_one(next.C);
  return next;
}

double relative_change(const FitnessState& next, const FitnessState& previous) {
  double worst = 0.0;
  auto scan = [&worst](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double denom = a[i] != 0.0 ? std::abs(a[i]) : 1.0;
      worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
    }
  };
  scan(next.D, previous.D);
  scan(next.C, previous.C);
  return worst;
}

std::pair<ComplexityScores, IterationTrace> run_fitness(const ScorePanel& panel, const SolverOptions& options) {
  IterationTrace trace;
  trace.iterates.push_back({std::vector<double>(panel.entity_count(), 1.0),
                            std::vector<double>(panel.category_count(), 1.0)});
  for (std::size_t step = 1; step <= options.max_steps; ++step) {
    FitnessState next = fitness_step(panel, trace.iterates.back());
    const double change = relative_change(next, trace.iterates.back());
    trace.iterates.push_back(std::move(next));
    trace.residuals.push_back(change);
    trace.steps = step;
    trace.final_residual = change;
    if (change <= options.tol) {
      trace.converged = true;
      break;
    }
  }

  ComplexityScores scores;
  scores.D = trace.iterates.back().D;
  scores.C = trace.iterates.back().C;
  scores.lambda_U = std::numeric_limits<double>::quiet_NaN();
  scores.lambda_V = std::numeric_limits<double>::quiet_NaN();
  scores.method = Method::iterative;
  return {std::move(scores), std::move(trace)};
}

}  // namespace genepy
