#include "genepy/table.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "csv.hpp"

namespace genepy {

namespace {

std::string fixed6(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

bool is_empty(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return true;
  if (const double* d = std::get_if<double>(&c)) return !std::isfinite(*d);
  return false;
}

std::string csv_cell(const Cell& c) {
  if (is_empty(c)) return {};
  if (const auto* s = std::get_if<std::string>(&c)) return detail::csv_field(*s);
  if (const auto* d = std::get_if<double>(&c)) return fixed6(*d);
  return std::to_string(std::get<std::int64_t>(c));
}

std::string json_string(std::string_view s) { return nlohmann::json(std::string(s)).dump(); }

std::string json_cell(const Cell& c) {
  if (is_empty(c)) return "null";
  if (const auto* s = std::get_if<std::string>(&c)) return json_string(*s);
  if (const auto* d = std::get_if<double>(&c)) return fixed6(*d);
  return std::to_string(std::get<std::int64_t>(c));
}

Cell optional_cell(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

Cell size_cell(std::size_t v) { return Cell{static_cast<std::int64_t>(v)}; }

}  // namespace

std::string emit_table(const Table& table, TableFormat format) {
  std::string out;
  if (format == TableFormat::csv) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out += ',';
      out += detail::csv_field(table.columns[c]);
    }
    out += '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c) out += ',';
        out += csv_cell(row[c]);
      }
      out += '\n';
    }
    return out;
  }

  out += '[';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out += r ? ",\n  {" : "\n  {";
    const auto& row = table.rows[r];
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
      if (c) out += ", ";
      out += json_string(table.columns[c]) + ": " + (c < row.size() ? json_cell(row[c]) : "null");
    }
    out += '}';
  }
  out += table.rows.empty() ? "]\n" : "\n]\n";
  return out;
}

Table to_table(const RankTable& ranks) {
  Table t{{"year", "entity", "basis", "score", "rank"}, {}};
  for (const auto& r : ranks.rows) {
    t.rows.push_back({ranks.year, r.entity, std::string(to_string(ranks.basis)), r.score, size_cell(r.rank)});
  }
  return t;
}

Table to_table(const GoalWeights& weights) {
  Table t{{"year", "category", "W"}, {}};
  for (std::size_t g = 0; g < weights.categories.size(); ++g) {
    t.rows.push_back({weights.year, weights.categories[g], weights.W[g]});
  }
  return t;
}

Table to_table(const std::vector<Finding>& findings) {
  Table t{{"severity", "code", "row", "column", "value", "message"}, {}};
  for (const auto& f : findings) {
    t.rows.push_back({std::string(f.severity == Severity::error ? "error" : "warning"), f.code,
                      f.row ? size_cell(*f.row + 1) : Cell{}, f.col ? size_cell(*f.col + 1) : Cell{},
                      optional_cell(f.value), f.message});
  }
  return t;
}

Table to_table(const WeightsEvolution& evolution) {
  Table t{{"category"}, {}};
  for (const auto& y : evolution.years) t.columns.push_back(y);
  for (std::size_t g = 0; g < evolution.categories.size(); ++g) {
    std::vector<Cell> row{evolution.categories[g]};
    for (const auto& v : evolution.values[g]) row.push_back(optional_cell(v));
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table to_table(const RankSeries& series) {
  Table t{{"entity", "lineage", "inherited_from", "final_rank"}, {}};
  for (const auto& y : series.years) t.columns.push_back(y);
  for (const auto& traj : series.trajectories) {
    std::string lineage, parents;
    for (Lineage l : traj.lineage) lineage += (lineage.empty() ? "" : ";") + std::string(to_string(l));
    for (const auto& p : traj.inherited_from) parents += (parents.empty() ? "" : ";") + p;
    std::vector<Cell> row{traj.entity, lineage, parents, traj.final_rank ? size_cell(*traj.final_rank) : Cell{}};
    for (const auto& y : series.years) {
      Cell cell;
      for (const auto& p : traj.points)
        if (p.year == y) cell = size_cell(p.rank);
      row.push_back(cell);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace genepy
