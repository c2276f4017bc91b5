#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "genepy/analytics.hpp"
#include "genepy/complexity.hpp"
#include "genepy/errors.hpp"
#include "genepy/panel.hpp"
#include "genepy/report.hpp"
#include "genepy/table.hpp"

namespace genepy::cli {

namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::vector<std::string> panel_args;    // <year>=<path>
  std::string indicator_arg;              // [<year>=]<path>
  std::vector<std::string> map_args;      // <a>-><b>=<path>
  std::string method = "both";
  double tol = 1e-10;
  std::size_t max_steps = 1000;
  std::string out_dir;
  std::string charts = "all";
  std::string format = "csv";
  std::string subset;
  bool allow_nonconverged = false;
};

struct Inputs {
  std::vector<ScorePanel> panels;
  std::map<std::pair<std::string, std::string>, EntityMap> maps;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << content;
}

std::pair<std::string, std::string> split_assignment(const std::string& arg, const char* flag) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size()) {
    throw InputError(std::string(flag) + " expects <label>=<path>, got '" + arg + "'");
  }
  return {arg.substr(0, eq), arg.substr(eq + 1)};
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ','))
    if (!item.empty()) items.push_back(item);
  return items;
}

std::string fmt(double v, int digits = 6) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v == 0.0 ? 0.0 : v);
  return buf;
}

Inputs load_inputs(const RunConfig& cfg, bool validate) {
  Inputs in;
  std::set<std::string> years;
  auto add = [&](ScorePanel p) {
    if (!years.insert(p.year).second) throw InputError("year label '" + p.year + "' given twice");
    in.panels.push_back(std::move(p));
  };
  for (const auto& arg : cfg.panel_args) {
    auto [year, path] = split_assignment(arg, "--panel");
    const std::string text = read_file(path);
    add(validate ? parse_panel(text, year) : read_panel_csv(text, year));
  }
  if (!cfg.indicator_arg.empty()) {
    std::string year = "indicators";
    std::string path = cfg.indicator_arg;
    if (const auto eq = path.find('='); eq != std::string::npos) {
      year = path.substr(0, eq);
      path = path.substr(eq + 1);
    }
    add(aggregate_indicators(parse_indicator_csv(read_file(path), year)));
  }
  if (in.panels.empty()) throw InputError("no input panels; pass --panel <year>=<path> or --indicators <path>");

  for (const auto& arg : cfg.map_args) {
    auto [pair, path] = split_assignment(arg, "--entity-map");
    const auto arrow = pair.find("->");
    if (arrow == std::string::npos || arrow == 0 || arrow + 2 == pair.size()) {
      throw InputError("--entity-map expects <a>-><b>=<path>, got '" + arg + "'");
    }
    std::string from = pair.substr(0, arrow), to = pair.substr(arrow + 2);
    if (!years.count(from) || !years.count(to)) {
      throw InputError("--entity-map " + pair + " refers to a year without a panel");
    }
    in.maps[{from, to}] = parse_entity_map(read_file(path));
  }
  return in;
}

std::optional<EntityMap> find_map(const Inputs& in, const std::string& a, const std::string& b) {
  auto it = in.maps.find({a, b});
  if (it == in.maps.end()) return std::nullopt;
  return it->second;
}

void add_table(std::map<fs::path, std::string>& files, const fs::path& stem, const Table& table,
               const std::string& format) {
  if (format == "csv" || format == "both") files[fs::path(stem).concat(".csv")] = emit_table(table, TableFormat::csv);
  if (format == "json" || format == "both") files[fs::path(stem).concat(".json")] = emit_table(table, TableFormat::json);
}

std::set<ChartKind> requested_charts(const std::string& list) {
  std::set<ChartKind> kinds;
  if (list == "none") return kinds;
  if (list == "all") return {all_chart_kinds().begin(), all_chart_kinds().end()};
  for (const auto& item : split_list(list)) {
    auto kind = parse_chart_kind(item);
    if (!kind) throw InputError("unknown chart kind '" + item + "'");
    kinds.insert(*kind);
  }
  return kinds;
}

struct YearResult {
  const ScorePanel* panel = nullptr;
  DegreeIndex degree;
  AdjustedUbiquity ubiquity;
  std::optional<ComplexityScores> spectral;
  std::optional<std::pair<ComplexityScores, IterationTrace>> iterative;
  GoalWeights weights;

  const ComplexityScores& primary() const { return spectral ? *spectral : iterative->first; }
};

YearResult analyse(const ScorePanel& panel, const RunConfig& cfg) {
  const SolverOptions options{cfg.tol, cfg.max_steps};
  YearResult r;
  r.panel = &panel;
  if (cfg.method != "iterative") {
    SpectralResult s = genepy_analysis(panel, options);
    r.degree = std::move(s.degree);
    r.ubiquity = std::move(s.ubiquity);
    r.spectral = std::move(s.scores);
  } else {
    r.degree = degree_index(panel);
    r.ubiquity = adjusted_ubiquity(panel, r.degree);
  }
  if (cfg.method != "spectral") {
    r.iterative = run_fitness(panel, options);
    const IterationTrace& trace = r.iterative->second;
    if (!trace.converged && !cfg.allow_nonconverged) {
      throw ConvergenceError("fitness iteration for " + panel.year + " did not converge in " +
                                 std::to_string(trace.steps) + " steps (last change " +
                                 std::to_string(trace.final_residual) + ")",
                             trace.final_residual, trace.steps);
    }
  }
  r.weights = goal_weights(panel, r.primary(), r.ubiquity);
  return r;
}

RankTable rank_by(const YearResult& r, RankBasis basis) {
  const ScorePanel& p = *r.panel;
  switch (basis) {
    case RankBasis::k_s: return rank_entities(p.entities, r.degree.k_s, basis, p.year);
    case RankBasis::composite_mean: return rank_entities(p.entities, r.degree.composite_mean, basis, p.year);
    case RankBasis::D_s: return rank_entities(p.entities, r.primary().D, basis, p.year);
  }
  throw InputError("unknown rank basis");
}

// Evenly spaced positions along the D_s ranking, at most eight entities.
std::vector<std::string> default_subset(const RankTable& ranks) {
  const std::size_t n = ranks.rows.size();
  const std::size_t m = std::min<std::size_t>(8, n);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t pos = m == 1 ? 0 : (i * (n - 1) + (m - 1) / 2) / (m - 1);
    ids.push_back(ranks.rows[pos].entity);
  }
  return ids;
}

int cmd_compute(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.out_dir.empty()) throw InputError("compute needs --out <dir>");
  const Inputs in = load_inputs(cfg, true);
  const auto charts = requested_charts(cfg.charts);
  const fs::path root(cfg.out_dir);
  std::map<fs::path, std::string> files;

  std::vector<YearResult> results;
  for (const auto& panel : in.panels) results.push_back(analyse(panel, cfg));

  std::vector<RankTable> ks_tables, ds_tables;
  std::vector<GoalWeights> weights;
  for (const auto& r : results) {
    const ScorePanel& p = *r.panel;
    const fs::path dir = root / p.year;
    const bool both = r.spectral && r.iterative;

    Table entities{{"entity", "k_s", "applicable_count", "composite_mean", "D_s"}, {}};
    if (both) entities.columns.push_back("D_s_iterative");
    for (std::size_t s = 0; s < p.entity_count(); ++s) {
      std::vector<Cell> row{p.entities[s], r.degree.k_s[s], static_cast<std::int64_t>(r.degree.applicable_count[s]),
                            r.degree.composite_mean[s], r.primary().D[s]};
      if (both) row.push_back(r.iterative->first.D[s]);
      entities.rows.push_back(std::move(row));
    }
    add_table(files, dir / "entities", entities, cfg.format);

    Table categories{{"category", "k_prime", "C_g", "W_g"}, {}};
    if (both) categories.columns.push_back("C_g_iterative");
    for (std::size_t g = 0; g < p.category_count(); ++g) {
      std::vector<Cell> row{p.categories[g], r.ubiquity.k_prime[g], r.primary().C[g], r.weights.W[g]};
      if (both) row.push_back(r.iterative->first.C[g]);
      categories.rows.push_back(std::move(row));
    }
    add_table(files, dir / "categories", categories, cfg.format);

    const RankTable ks = rank_by(r, RankBasis::k_s);
    const RankTable cm = rank_by(r, RankBasis::composite_mean);
    const RankTable ds = rank_by(r, RankBasis::D_s);
    add_table(files, dir / "ranks_k_s", to_table(ks), cfg.format);
    add_table(files, dir / "ranks_composite_mean", to_table(cm), cfg.format);
    add_table(files, dir / "ranks_D_s", to_table(ds), cfg.format);
    add_table(files, dir / "weights", to_table(r.weights), cfg.format);

    nlohmann::ordered_json summary;
    summary["year"] = p.year;
    summary["method"] = cfg.method;
    summary["entities"] = p.entity_count();
    summary["categories"] = p.category_count();
    if (r.spectral) {
      summary["lambda_U"] = fmt(r.spectral->lambda_U, 12);
      summary["lambda_V"] = fmt(r.spectral->lambda_V, 12);
    }
    if (r.iterative) {
      const IterationTrace& trace = r.iterative->second;
      summary["iterative_converged"] = trace.converged;
      summary["iterative_steps"] = trace.steps;
      summary["iterative_final_change"] = fmt(trace.final_residual, 17);
      Table steps{{"step", "relative_change"}, {}};
      for (std::size_t n = 0; n < trace.residuals.size(); ++n) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.6e", trace.residuals[n]);
        steps.rows.push_back({static_cast<std::int64_t>(n + 1), std::string(buf)});
      }
      add_table(files, dir / "iterative_trace", steps, cfg.format);
      if (!trace.converged) err << "warning: fitness iteration for " << p.year << " did not converge\n";
    }
    if (both) {
      const RankTable dsi = rank_entities(p.entities, r.iterative->first.D, RankBasis::D_s, p.year);
      const double rho = rank_correlation(ds, dsi);
      summary["spearman_iterative_vs_spectral"] = fmt(rho);
      out << p.year << ": Spearman rho (iterative vs spectral D_s) = " << fmt(rho) << "\n";
    }
    summary["spearman_k_s_vs_D_s"] = fmt(rank_correlation(ks, ds));
    files[dir / "summary.json"] = summary.dump(2) + "\n";

    if (charts.count(ChartKind::heatmap))
      files[dir / "heatmap.svg"] = emit_heatmap(p, default_spec(ChartKind::heatmap, "Scores " + p.year));
    if (charts.count(ChartKind::bipartite)) {
      const auto subset = cfg.subset.empty() ? default_subset(ds) : split_list(cfg.subset);
      files[dir / "bipartite.svg"] =
          emit_bipartite(p, subset, default_spec(ChartKind::bipartite, "Entity-category network " + p.year));
    }
    if (charts.count(ChartKind::weight_bars))
      files[dir / "weight_bars.svg"] =
          emit_weight_bars(r.weights, default_spec(ChartKind::weight_bars, "Category weights " + p.year));
    if (charts.count(ChartKind::weighted_lines) && p.entity_count() >= 3)
      files[dir / "weighted_lines.svg"] = emit_weighted_lines(
          tertile_groups(ks, p, r.weights), default_spec(ChartKind::weighted_lines, "Weighted performance " + p.year));

    ks_tables.push_back(ks);
    ds_tables.push_back(ds);
    weights.push_back(r.weights);
  }

  std::vector<std::optional<EntityMap>> maps;
  for (std::size_t i = 1; i < in.panels.size(); ++i)
    maps.push_back(find_map(in, in.panels[i - 1].year, in.panels[i].year));
  const RankSeries ks_series = rank_evolution(ks_tables, maps);
  const RankSeries ds_series = rank_evolution(ds_tables, maps);
  const WeightsEvolution evolution = weights_evolution(weights);
  add_table(files, root / "rank_evolution_k_s", to_table(ks_series), cfg.format);
  add_table(files, root / "rank_evolution_D_s", to_table(ds_series), cfg.format);
  add_table(files, root / "weights_evolution", to_table(evolution), cfg.format);
  if (charts.count(ChartKind::rank_bump)) {
    files[root / "rank_bump_k_s.svg"] = emit_rank_bump(ks_series, default_spec(ChartKind::rank_bump, "Rank evolution (k_s)"));
    files[root / "rank_bump_D_s.svg"] = emit_rank_bump(ds_series, default_spec(ChartKind::rank_bump, "Rank evolution (D_s)"));
  }
  if (charts.count(ChartKind::grouped_bars))
    files[root / "grouped_bars.svg"] = emit_grouped_bars(evolution, default_spec(ChartKind::grouped_bars, "Category weights by year"));

  for (const auto& [path, content] : files) write_file(path, content);
  out << "wrote " << files.size() << " files to " << root.string() << "\n";
  return kOk;
}

struct BasisTable {
  RankTable table;
  std::vector<std::string> ids;
  std::vector<double> values;
};

BasisTable basis_table(const YearResult& r, RankBasis basis) {
  BasisTable b{rank_by(r, basis), r.panel->entities, {}};
  switch (basis) {
    case RankBasis::k_s: b.values = r.degree.k_s; break;
    case RankBasis::composite_mean: b.values = r.degree.composite_mean; break;
    case RankBasis::D_s: b.values = r.primary().D; break;
  }
  return b;
}

int cmd_compare(const RunConfig& cfg, const std::string& basis_a_text, const std::string& basis_b_text,
                std::string year_a, std::string year_b, std::ostream& out) {
  const auto basis_a = parse_rank_basis(basis_a_text);
  const auto basis_b = parse_rank_basis(basis_b_text);
  if (!basis_a || !basis_b) throw InputError("rank basis must be one of k_s, composite_mean, D_s");
  const Inputs in = load_inputs(cfg, true);
  if (year_a.empty()) year_a = in.panels.back().year;
  if (year_b.empty()) year_b = in.panels.back().year;
  auto panel_for = [&](const std::string& year) -> const ScorePanel& {
    for (const auto& p : in.panels)
      if (p.year == year) return p;
    throw InputError("no panel for year '" + year + "'");
  };
  const YearResult ra = analyse(panel_for(year_a), cfg);
  const YearResult rb = analyse(panel_for(year_b), cfg);
  const BasisTable a = basis_table(ra, *basis_a);
  const BasisTable b = basis_table(rb, *basis_b);

  // Pairs (id in a, id in b) that can be compared.
  std::vector<std::pair<std::string, std::string>> pairs;
  if (year_a == year_b || std::set<std::string>(a.ids.begin(), a.ids.end()) == std::set<std::string>(b.ids.begin(), b.ids.end())) {
    for (const auto& id : a.ids) pairs.emplace_back(id, id);
  } else {
    auto map = find_map(in, year_a, year_b);
    if (!map) throw AlignmentError("rosters of " + year_a + " and " + year_b + " differ; pass --entity-map " + year_a + "->" + year_b + "=<file>");
    for (const auto& e : align_rosters(a.ids, b.ids, *map).entities)
      if (e.lineage == Lineage::identity || e.lineage == Lineage::renamed) pairs.emplace_back(e.sources.front(), e.id);
  }

  auto value_of = [](const BasisTable& t, const std::string& id) {
    for (std::size_t i = 0; i < t.ids.size(); ++i)
      if (t.ids[i] == id) return t.values[i];
    throw InputError("entity '" + id + "' missing");
  };
  std::vector<std::string> ids;
  std::vector<double> va, vb;
  for (const auto& [ida, idb] : pairs) {
    ids.push_back(ida);
    va.push_back(value_of(a, ida));
    vb.push_back(value_of(b, idb));
  }
  const RankTable ta = rank_entities(ids, va, *basis_a, year_a);
  const RankTable tb = rank_entities(ids, vb, *basis_b, year_b);
  const double rho = rank_correlation(ta, tb);

  const std::string col_a = std::string(to_string(*basis_a)) + "@" + year_a;
  const std::string col_b = std::string(to_string(*basis_b)) + "@" + year_b;
  Table side{{"entity", "score_a", "rank_a", "score_b", "rank_b"}, {}};
  for (const auto& row : ta.rows) {
    const RankRow* other = tb.find(row.entity);
    side.rows.push_back({row.entity, row.score, static_cast<std::int64_t>(row.rank), other->score,
                         static_cast<std::int64_t>(other->rank)});
  }

  out << "a = " << col_a << ", b = " << col_b << ", n = " << ids.size() << "\n";
  out << "Spearman rho = " << fmt(rho) << "\n";
  out << emit_table(side, TableFormat::csv);
  if (!cfg.out_dir.empty()) {
    const fs::path root(cfg.out_dir);
    std::map<fs::path, std::string> files;
    add_table(files, root / "compare", side, cfg.format);
    nlohmann::ordered_json j;
    j["basis_a"] = col_a;
    j["basis_b"] = col_b;
    j["entities"] = ids.size();
    j["spearman_rho"] = fmt(rho);
    files[root / "compare_summary.json"] = j.dump(2) + "\n";
    for (const auto& [path, content] : files) write_file(path, content);
  }
  return kOk;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out) {
  const Inputs in = load_inputs(cfg, false);
  bool errors = false;
  for (const auto& p : in.panels) {
    const auto findings = validate_panel(p);
    errors = errors || has_errors(findings);
    for (const auto& f : findings) {
      out << p.year << ": " << (f.severity == Severity::error ? "error" : "warning") << " [" << f.code << "] "
          << f.message << "\n";
    }
    if (findings.empty()) out << p.year << ": ok\n";
    if (!cfg.out_dir.empty()) {
      std::map<fs::path, std::string> files;
      add_table(files, fs::path(cfg.out_dir) / p.year / "findings", to_table(findings), cfg.format);
      for (const auto& [path, content] : files) write_file(path, content);
    }
  }
  return errors ? kInputError : kOk;
}

void add_input_options(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--panel", cfg.panel_args, "Score panel CSV for one year, <year>=<path> (repeatable, chronological)")
      ->allow_extra_args(false);
  sub.add_option("--indicators", cfg.indicator_arg, "Long-form indicator CSV, [<year>=]<path>");
  sub.add_option("--entity-map", cfg.map_args, "Entity map JSON between two years, <a>-><b>=<path> (repeatable)")
      ->allow_extra_args(false);
  sub.add_option("--format", cfg.format, "Table format")->check(CLI::IsMember({"csv", "json", "both"}));
  sub.add_option("--out", cfg.out_dir, "Output directory");
}

void add_solver_options(CLI::App& sub, RunConfig& cfg) {
  sub.add_option("--method", cfg.method, "Scoring method")->check(CLI::IsMember({"spectral", "iterative", "both"}));
  sub.add_option("--tol", cfg.tol, "Convergence tolerance")->check(CLI::PositiveNumber);
  sub.add_option("--max-steps", cfg.max_steps, "Iteration cap")->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
  sub.add_flag("--allow-nonconverged", cfg.allow_nonconverged, "Keep iterative results that did not converge");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Complexity rankings of entities and weights of categories from a bipartite score panel"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string basis_a = "k_s", basis_b = "D_s", year_a, year_b;

  auto* compute = app.add_subcommand("compute", "Compute scores, rankings, weights and charts");
  add_input_options(*compute, cfg);
  add_solver_options(*compute, cfg);
  compute->add_option("--charts", cfg.charts, "Comma list of chart kinds, 'all' or 'none'");
  compute->add_option("--subset", cfg.subset, "Comma list of entities for the bipartite chart");

  auto* compare = app.add_subcommand("compare", "Spearman correlation between two rankings");
  add_input_options(*compare, cfg);
  add_solver_options(*compare, cfg);
  compare->add_option("--basis-a", basis_a, "First ranking basis (k_s, composite_mean, D_s)");
  compare->add_option("--basis-b", basis_b, "Second ranking basis");
  compare->add_option("--year-a", year_a, "Year of the first ranking (default: last panel)");
  compare->add_option("--year-b", year_b, "Year of the second ranking (default: last panel)");

  auto* validate = app.add_subcommand("validate", "Check panels and report findings");
  add_input_options(*validate, cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (compute->parsed()) return cmd_compute(cfg, out, err);
    if (compare->parsed()) return cmd_compare(cfg, basis_a, basis_b, year_a, year_b, out);
    return cmd_validate(cfg, out);
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kNotConverged;
  } catch (const DegenerateError& e) {
    err << "error: degenerate panel: " << e.what() << "\n";
    return kDegeneratePanel;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
}

}  // namespace genepy::cli
