// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "app.hpp"
#include "genepy/analytics.hpp"
#include "genepy/complexity.hpp"
#include "oracles.hpp"
#include "xml_check.hpp"

namespace fs = std::filesystem;
using namespace genepy;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void report(const char* id, const char* name, const Outcome& o, double seconds) {
  std::printf("[%s] %-3s %-34s %s (%.3f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), seconds);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

double run_timed(const char* id, const char* name, const std::function<Outcome()>& body, double limit = 0.0) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit > 0.0 && secs >= limit) {
    o.pass = false;
    o.detail += "; runtime over " + std::to_string(limit) + " s";
  }
  report(id, name, o, secs);
  return secs;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> mean_one(std::vector<double> v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x /= m;
  return v;
}

// ---------------------------------------------------------------------------

Outcome worked_panel() {
  const auto p = oracle::panel_from({{2, 0}, {1, 1}, {0, 2}});
  const auto r = genepy_analysis(p);
  const auto w = goal_weights(p, r.scores, r.ubiquity);
  // By hand: U has eigenvector (1,1,1) with eigenvalue 2/3, V has (1,1) with 2/3.
  const double err = std::max({std::abs(r.scores.lambda_U - 2.0 / 3), std::abs(r.scores.lambda_V - 2.0 / 3),
                               max_abs_diff(r.scores.D, {1, 1, 1}), max_abs_diff(r.scores.C, {1, 1}),
                               max_abs_diff(w.W, {2.0 / 3, 2.0 / 3})});
  return {err <= 1e-9, fmt("max error %.2e (tol 1e-9)", err)};
}

Outcome closed_form_2x2() {
  // U for [[1,1],[1,0]] written out from the definitions.
  const auto ref = oracle::reference({{1, 1}, {1, 0}});
  const auto closed = oracle::symmetric_2x2(ref.U[0][0], ref.U[0][1], ref.U[1][1]);
  const auto expect_D = mean_one(closed.vector_max);
  const auto s = genepy_scores(oracle::panel_from({{1, 1}, {1, 0}}));
  const double lam_err = std::abs(s.lambda_U - closed.lambda_max);
  const double d_err = max_abs_diff(s.D, expect_D);
  const double pinned = std::max(std::abs(s.lambda_U - 1.17839) / 1e-5, max_abs_diff(s.D, {1.5352, 0.4648}) / 1e-4);
  const bool pass = lam_err <= 1e-5 && d_err <= 1e-4 && pinned <= 1.0;
  return {pass, fmt("lambda_U %.8f (closed form err %.1e, tol 1e-5), D err %.1e (tol 1e-4)", s.lambda_U, lam_err, d_err)};
}

Outcome dense_oracle() {
  std::mt19937_64 rng(2024);
  double worst_value = 0, worst_dir = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t rows = 2 + rng() % 5, cols = 2 + rng() % 4;
    const auto p = oracle::panel_from(oracle::random_scores(rng, rows, cols));
    const auto r = genepy_analysis(p);
    const auto ju = oracle::jacobi(oracle::to_dense(r.similarity.U));
    const auto jv = oracle::jacobi(oracle::to_dense(r.similarity.V));
    worst_value = std::max({worst_value, std::abs(r.scores.lambda_U - ju.values[0]) / ju.values[0],
                            std::abs(r.scores.lambda_V - jv.values[0]) / jv.values[0]});
    worst_dir = std::max({worst_dir, oracle::direction_distance(r.scores.D, ju.vectors[0]),
                          oracle::direction_distance(r.scores.C, jv.vectors[0])});
  }
  return {worst_value <= 1e-8 && worst_dir <= 1e-6,
          fmt("200 panels: eigenvalue rel err %.1e (tol 1e-8), direction err %.1e (tol 1e-6)", worst_value, worst_dir)};
}

Outcome invariance() {
  std::mt19937_64 rng(7);
  std::size_t scale_bits = 0, scale_close = 0, perm_ok = 0, perron_ok = 0, lambda_ok = 0;
  double worst_perm = 0, worst_lambda = 0, worst_scale = 0;
  const double pow2[] = {0.5, 0.25, 0.125, 0.0625};
  std::uniform_real_distribution<double> any_c(0.05, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = 3 + rng() % 20, cols = 2 + rng() % 14;
    const auto I = oracle::random_scores(rng, rows, cols);
    const auto base = genepy_analysis(oracle::panel_from(I));

    // Scale: a power-of-two factor is exact, so everything downstream is too.
    auto scaled = I;
    const double c = pow2[trial % 4];
    for (auto& row : scaled)
      for (double& v : row) v *= c;
    const auto s = genepy_analysis(oracle::panel_from(scaled));
    if (s.proximity.N == base.proximity.N && s.scores.D == base.scores.D && s.scores.C == base.scores.C) ++scale_bits;
    // A general factor rounds I, so only near-identity is possible.
    auto rounded = I;
    const double c2 = any_c(rng);
    for (auto& row : rounded)
      for (double& v : row) v *= c2;
    const auto s2 = genepy_scores(oracle::panel_from(rounded));
    const double e2 = std::max(max_abs_diff(s2.D, base.scores.D), max_abs_diff(s2.C, base.scores.C));
    worst_scale = std::max(worst_scale, e2);
    if (e2 <= 1e-12) ++scale_close;

    // Permutation of rows and columns.
    std::vector<std::size_t> pr(rows), pc(cols);
    std::iota(pr.begin(), pr.end(), 0);
    std::iota(pc.begin(), pc.end(), 0);
    std::shuffle(pr.begin(), pr.end(), rng);
    std::shuffle(pc.begin(), pc.end(), rng);
    oracle::Dense P(rows, std::vector<double>(cols));
    for (std::size_t i = 0; i < rows; ++i)
      for (std::size_t j = 0; j < cols; ++j) P[i][j] = I[pr[i]][pc[j]];
    const auto sp = genepy_scores(oracle::panel_from(P));
    double e = 0;
    for (std::size_t i = 0; i < rows; ++i) e = std::max(e, std::abs(sp.D[i] - base.scores.D[pr[i]]));
    for (std::size_t j = 0; j < cols; ++j) e = std::max(e, std::abs(sp.C[j] - base.scores.C[pc[j]]));
    worst_perm = std::max(worst_perm, e);
    if (e <= 1e-12) ++perm_ok;

    const bool nonneg = std::all_of(base.scores.D.begin(), base.scores.D.end(), [](double x) { return x >= 0; }) &&
                        std::all_of(base.scores.C.begin(), base.scores.C.end(), [](double x) { return x >= 0; });
    if (nonneg) ++perron_ok;

    const double dl = std::abs(base.scores.lambda_U - base.scores.lambda_V);
    worst_lambda = std::max(worst_lambda, dl);
    if (dl <= 1e-9) ++lambda_ok;
  }
  const bool pass = scale_bits == 100 && scale_close == 100 && perm_ok == 100 && perron_ok == 100 && lambda_ok == 100;
  std::ostringstream d;
  d << "100 panels: scale bit-identical " << scale_bits << "/100 (general c " << scale_close << "/100, max "
    << fmt("%.1e", worst_scale) << "), permutation " << perm_ok << "/100 (max " << fmt("%.1e", worst_perm)
    << "), non-negative " << perron_ok << "/100, |lambda_U - lambda_V| " << fmt("%.1e", worst_lambda) << " (tol 1e-9)";
  return {pass, d.str()};
}

Outcome fitness_convergence() {
  std::mt19937_64 rng(11);
  const SolverOptions opts{1e-10, 1000};
  std::size_t converged = 0, max_steps = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = 2 + rng() % 39, cols = 2 + rng() % 15;
    const auto [scores, trace] = run_fitness(oracle::panel_from(oracle::random_scores(rng, rows, cols)), opts);
    if (trace.converged && trace.steps <= opts.max_steps && trace.final_residual <= opts.tol) ++converged;
    max_steps = std::max(max_steps, trace.steps);
  }
  return {converged == 100, "100 panels up to 40x16: converged " + std::to_string(converged) +
                                "/100, worst " + std::to_string(max_steps) + " steps (cap 1000, tol 1e-10)"};
}

Outcome fitness_vs_spectral() {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  const double eps = 0.01;
  double min_rho = 1.0, sum_rho = 0.0;
  const int panels = 50;
  for (int trial = 0; trial < panels; ++trial) {
    oracle::Dense I(36, std::vector<double>(15));
    for (auto& row : I)
      for (double& v : row) v = 1.0 + eps * noise(rng);
    const auto p = oracle::panel_from(I);
    const auto spectral = genepy_scores(p);
    const auto [iterative, trace] = run_fitness(p);
    if (!trace.converged) return {false, "fitness iteration did not converge on a perturbed-uniform panel"};
    const double rho = rank_correlation(rank_entities(p.entities, iterative.D, RankBasis::D_s),
                                        rank_entities(p.entities, spectral.D, RankBasis::D_s));
    min_rho = std::min(min_rho, rho);
    sum_rho += rho;
  }
  return {min_rho >= 0.99, fmt("eps 0.01, 50 panels 36x15: min rho %.3f, mean rho %.3f (need >= 0.99)", min_rho,
                               sum_rho / panels)};
}

Outcome mean_score_ranking() {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> score(0, 100);
  std::size_t equal = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t rows = 3 + rng() % 34, cols = 2 + rng() % 15;
    oracle::Dense I(rows, std::vector<double>(cols));
    for (auto& row : I)
      for (double& v : row) v = score(rng) + 1;  // integers, so ties are common
    const auto p = oracle::panel_from(I);
    const auto d = degree_index(p);
    const auto a = rank_entities(p.entities, d.k_s, RankBasis::k_s);
    const auto b = rank_entities(p.entities, d.composite_mean, RankBasis::composite_mean);
    bool same = a.rows.size() == b.rows.size();
    for (std::size_t i = 0; same && i < a.rows.size(); ++i)
      same = a.rows[i].entity == b.rows[i].entity && a.rows[i].rank == b.rows[i].rank;
    if (same) ++equal;
  }
  return {equal == 100, "k_s ranking == per-row mean ranking on " + std::to_string(equal) + "/100 complete panels"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  return files;
}

Outcome pipeline_determinism() {
  const fs::path fixtures = GENEPY_FIXTURE_DIR;
  const fs::path tmp = fs::temp_directory_path() / ("genepy-acceptance-" + std::to_string(std::random_device{}()));
  auto compute = [&](const fs::path& out) {
    std::vector<std::string> args{"genepy", "compute",
                                  "--panel", "2018=" + (fixtures / "panel_2018.csv").string(),
                                  "--panel", "2019=" + (fixtures / "panel_2019.csv").string(),
                                  "--panel", "2020=" + (fixtures / "panel_2020.csv").string(),
                                  "--panel", "2024=" + (fixtures / "panel_2024.csv").string(),
                                  "--entity-map", "2018->2019=" + (fixtures / "map_2018_2019.json").string(),
                                  "--entity-map", "2019->2020=" + (fixtures / "map_2019_2020.json").string(),
                                  "--format", "both", "--out", out.string()};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream sink_out, sink_err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), sink_out, sink_err);
    if (code != 0) throw std::runtime_error("compute exited " + std::to_string(code) + ": " + sink_err.str());
  };
  struct Cleanup {
    fs::path p;
    ~Cleanup() {
      std::error_code ec;
      fs::remove_all(p, ec);
    }
  } cleanup{tmp};
  compute(tmp / "a");
  compute(tmp / "b");
  const auto a = snapshot(tmp / "a");
  const auto b = snapshot(tmp / "b");
  const bool identical = a == b && !a.empty();

  const std::string bump = a.at("rank_bump_D_s.svg");
  const std::size_t ticks = xml::count(bump, "class=\"xtick\"");
  const std::string bars = a.at("grouped_bars.svg");
  // G12 and G13 are absent from the 2018 panel: three bars each, none for 2018.
  bool gaps = xml::check(bars).ok && xml::check(bump).ok;
  for (const char* cat : {"G12", "G13"}) {
    const std::string tag = std::string("data-category=\"") + cat + "\" data-year=\"";
    gaps = gaps && xml::count(bars, tag) == 3 && xml::count(bars, tag + "2018\"") == 0;
  }
  gaps = gaps && xml::count(bars, "data-category=\"G1\" data-year=\"") == 4;

  std::ostringstream d;
  d << a.size() << " files " << (identical ? "byte-identical" : "DIFFER") << " across runs, " << ticks
    << " year ticks, first-year gaps " << (gaps ? "present" : "MISSING");
  return {identical && ticks == 4 && gaps, d.str()};
}

}  // namespace

int main() {
  std::printf("genepy acceptance\n");
  run_timed("1", "worked-panel oracle", worked_panel, 1.0);
  run_timed("2", "2x2 closed-form oracle", closed_form_2x2);
  run_timed("3", "dense-oracle equivalence", dense_oracle, 10.0);
  run_timed("4", "invariance suite", invariance);
  run_timed("5a", "iterative convergence", fitness_convergence);
  run_timed("5b", "iterative vs spectral agreement", fitness_vs_spectral);
  run_timed("6", "k_s / mean-score ranking", mean_score_ranking);
  run_timed("7", "pipeline determinism", pipeline_determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
