#include "genepy/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "csv.hpp"
#include "genepy/errors.hpp"

namespace genepy {

namespace detail {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return std::string(s.substr(first, last - first + 1));
}

}  // namespace

std::vector<CsvRow> read_csv(std::string_view text) {
  std::vector<CsvRow> rows;
  // Strip a UTF-8 byte order mark.
  if (text.starts_with("\xEF\xBB\xBF")) text.remove_prefix(3);

  std::size_t line = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    CsvRow row;
    row.line = line;
    std::string field;
    bool quoted = false;
    bool any_content = false;
    bool end_of_row = false;
    while (i < n && !end_of_row) {
      const char c = text[i];
      if (c == '"' && trim(field).empty() && !quoted) {
        quoted = true;
        field.clear();
        any_content = true;
        ++i;
        while (i < n) {
          if (text[i] == '"') {
            if (i + 1 < n && text[i + 1] == '"') {
              field.push_back('"');
              i += 2;
              continue;
            }
            ++i;
            break;
          }
          if (text[i] == '\n') ++line;
          field.push_back(text[i++]);
        }
        continue;
      }
      if (c == ',') {
        row.fields.push_back(quoted ? field : trim(field));
        field.clear();
        quoted = false;
        any_content = true;
        ++i;
      } else if (c == '\r' || c == '\n') {
        if (c == '\r' && i + 1 < n && text[i + 1] == '\n') ++i;
        ++i;
        ++line;
        end_of_row = true;
      } else {
        if (!quoted) field.push_back(c);
        if (c != ' ' && c != '\t') any_content = true;
        ++i;
      }
    }
    if (any_content || !row.fields.empty()) {
      row.fields.push_back(quoted ? field : trim(field));
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::string csv_field(std::string_view value) {
  const bool needs_quotes = value.find_first_of(",\"\r\n") != std::string_view::npos ||
                            (!value.empty() && (value.front() == ' ' || value.back() == ' '));
  if (!needs_quotes) return std::string(value);
  std::string out = "\"";
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace detail

namespace {

std::string location(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column + 1);
}

std::optional<double> parse_number(const std::string& field) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return value;
}

std::string format_value(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string format_fraction(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

}  // namespace

ScorePanel make_panel(std::string year, std::vector<std::string> entities,
                      std::vector<std::string> categories, Matrix scores) {
  ScorePanel p;
  p.year = std::move(year);
  p.entities = std::move(entities);
  p.categories = std::move(categories);
  p.scores = std::move(scores);
  p.missing.assign(p.scores.rows() * p.scores.cols(), 0);
  return p;
}

ScorePanel read_panel_csv(std::string_view csv_text, std::string year) {
  const auto rows = detail::read_csv(csv_text);
  if (rows.empty()) throw InputError("panel CSV is empty");
  const auto& header = rows.front().fields;
  if (header.size() < 2) throw InputError("panel CSV header needs an entity column and at least one category");

  ScorePanel p;
  p.year = std::move(year);
  p.categories.assign(header.begin() + 1, header.end());
  const std::size_t ncat = p.categories.size();
  const std::size_t nent = rows.size() - 1;
  p.scores = Matrix(nent, ncat);
  p.missing.assign(nent * ncat, 0);
  p.entities.reserve(nent);

  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() != header.size()) {
      throw InputError("ragged row at line " + std::to_string(row.line) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(row.fields.size()));
    }
    const std::size_t s = r - 1;
    p.entities.push_back(row.fields.front());
    for (std::size_t g = 0; g < ncat; ++g) {
      const std::string& cell = row.fields[g + 1];
      if (cell.empty()) {
        p.missing[s * ncat + g] = 1;
        continue;
      }
      const auto value = parse_number(cell);
      if (!value) {
        throw InputError("non-numeric cell '" + cell + "' at " + location(row.line, g + 1));
      }
      p.scores(s, g) = *value;
    }
  }
  return p;
}

std::vector<Finding> validate_panel(const ScorePanel& panel) {
  std::vector<Finding> errors;
  std::vector<Finding> warnings;
  auto error = [&](std::string code, std::string message, std::optional<std::size_t> row = {},
                   std::optional<std::size_t> col = {}, std::optional<double> value = {}) {
    errors.push_back({Severity::error, std::move(code), std::move(message), row, col, value});
  };

  const std::size_t ns = panel.entities.size();
  const std::size_t ng = panel.categories.size();
  if (panel.scores.rows() != ns || panel.scores.cols() != ng || panel.missing.size() != ns * ng) {
    error("shape", "score matrix shape does not match the entity/category rosters");
    return errors;
  }
  if (ns < 2) error("too-few-entities", "panel needs at least 2 entities, found " + std::to_string(ns));
  if (ng < 2) error("too-few-categories", "panel needs at least 2 categories, found " + std::to_string(ng));

  auto check_unique = [&](const std::vector<std::string>& ids, const char* what) {
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (ids[i].empty()) error(std::string("empty-") + what, std::string("empty ") + what + " id at position " + std::to_string(i + 1));
      else if (!seen.insert(ids[i]).second)
        error(std::string("duplicate-") + what, std::string("duplicate ") + what + " id '" + ids[i] + "'");
    }
  };
  check_unique(panel.entities, "entity");
  check_unique(panel.categories, "category");

  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t g = 0; g < ng; ++g) {
      if (panel.is_missing(s, g)) continue;
      const double v = panel.scores(s, g);
      if (!std::isfinite(v) || v < 0.0 || v > 100.0) {
        error("out-of-range",
              "score " + format_value(v) + " outside [0,100] at entity '" + panel.entities[s] +
                  "' (row " + std::to_string(s + 1) + "), category '" + panel.categories[g] +
                  "' (column " + std::to_string(g + 1) + ")",
              s, g, v);
      }
    }
  }

  for (std::size_t s = 0; s < ns; ++s) {
    std::size_t present = 0;
    double total = 0.0;
    for (std::size_t g = 0; g < ng; ++g) {
      if (panel.is_missing(s, g)) continue;
      ++present;
      total += panel.scores(s, g);
    }
    if (present == 0) {
      error("all-missing-entity", "entity '" + panel.entities[s] + "' has no reported scores", s);
    } else if (total == 0.0) {
      error("degenerate-entity", "entity '" + panel.entities[s] + "' has zero total score", s);
    }
  }

  std::vector<std::string> constant_columns;
  for (std::size_t g = 0; g < ng; ++g) {
    std::size_t present = 0;
    double total = 0.0;
    double lo = 0.0, hi = 0.0;
    for (std::size_t s = 0; s < ns; ++s) {
      if (panel.is_missing(s, g)) continue;
      const double v = panel.scores(s, g);
      lo = present == 0 ? v : std::min(lo, v);
      hi = present == 0 ? v : std::max(hi, v);
      ++present;
      total += v;
    }
    if (present == 0) {
      error("all-missing-category", "category '" + panel.categories[g] + "' has no reported scores", {}, g);
      continue;
    }
    if (total == 0.0) {
      error("degenerate-category", "category '" + panel.categories[g] + "' has zero total score", {}, g);
    }
    const double missing_fraction = static_cast<double>(ns - present) / static_cast<double>(ns);
    if (missing_fraction > kHighMissingFraction) {
      warnings.push_back({Severity::warning, "high-missingness",
                          "category '" + panel.categories[g] + "' is missing in " +
                              std::to_string(ns - present) + " of " + std::to_string(ns) +
                              " entities (fraction " + format_fraction(missing_fraction) + ")",
                          {}, g, missing_fraction});
    }
    if (present >= 2 && lo == hi) constant_columns.push_back(panel.categories[g]);
  }
  if (!constant_columns.empty()) {
    std::string names;
    for (const auto& c : constant_columns) names += (names.empty() ? "" : ", ") + c;
    warnings.push_back({Severity::warning, "constant-columns", "constant columns: " + names, {}, {},
                        static_cast<double>(constant_columns.size())});
  }

  errors.insert(errors.end(), warnings.begin(), warnings.end());
  return errors;
}

bool has_errors(const std::vector<Finding>& findings) {
  return std::any_of(findings.begin(), findings.end(),
                     [](const Finding& f) { return f.severity == Severity::error; });
}

namespace {

void throw_first_error(const ScorePanel& panel, const std::vector<Finding>& findings) {
  // Degeneracy outranks other errors only when nothing else is wrong, so the
  // caller can tell "bad file" from "valid file, undefined complexity".
  const Finding* degenerate = nullptr;
  for (const auto& f : findings) {
    if (f.severity != Severity::error) continue;
    if (f.code == "degenerate-entity" || f.code == "degenerate-category") {
      if (!degenerate) degenerate = &f;
      continue;
    }
    throw InputError("panel " + panel.year + ": " + f.message);
  }
  if (degenerate) {
    const std::string label = degenerate->row ? panel.entities[*degenerate->row]
                                              : panel.categories[*degenerate->col];
    throw DegenerateError("panel " + panel.year + ": " + degenerate->message, label);
  }
}

}  // namespace

ScorePanel parse_panel(std::string_view csv_text, std::string year) {
  ScorePanel panel = read_panel_csv(csv_text, std::move(year));
  throw_first_error(panel, validate_panel(panel));
  return panel;
}

std::string emit_panel_csv(const ScorePanel& panel) {
  std::string out = "entity";
  for (const auto& c : panel.categories) out += "," + detail::csv_field(c);
  out += "\n";
  for (std::size_t s = 0; s < panel.entities.size(); ++s) {
    out += detail::csv_field(panel.entities[s]);
    for (std::size_t g = 0; g < panel.categories.size(); ++g) {
      out += ",";
      if (!panel.is_missing(s, g)) out += format_value(panel.scores(s, g));
    }
    out += "\n";
  }
  return out;
}

IndicatorTable parse_indicator_csv(std::string_view csv_text, std::string year) {
  const auto rows = detail::read_csv(csv_text);
  if (rows.empty()) throw InputError("indicator CSV is empty");
  const std::vector<std::string> expected{"entity", "category", "indicator", "value"};
  if (rows.front().fields != expected) {
    throw InputError("indicator CSV header must be 'entity,category,indicator,value'");
  }
  IndicatorTable table;
  table.year = std::move(year);
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& f = rows[r].fields;
    if (f.size() != 4) {
      throw InputError("ragged row at line " + std::to_string(rows[r].line) + ": expected 4 fields");
    }
    IndicatorRecord rec{f[0], f[1], f[2], std::nullopt};
    if (!f[3].empty()) {
      rec.value = parse_number(f[3]);
      if (!rec.value) throw InputError("non-numeric value '" + f[3] + "' at " + location(rows[r].line, 3));
    }
    table.rows.push_back(std::move(rec));
  }
  return table;
}

ScorePanel aggregate_indicators(const IndicatorTable& table) {
  if (table.rows.empty()) throw InputError("indicator table is empty");

  std::vector<std::string> entities, categories;
  std::unordered_map<std::string, std::size_t> entity_index, category_index;
  auto intern = [](std::vector<std::string>& ids, std::unordered_map<std::string, std::size_t>& index,
                   const std::string& id) {
    auto [it, inserted] = index.emplace(id, ids.size());
    if (inserted) ids.push_back(id);
    return it->second;
  };

  struct Cell {
    double sum = 0.0;
    std::size_t count = 0;
    bool not_applicable = false;
    bool seen = false;
  };
  std::map<std::pair<std::size_t, std::size_t>, Cell> cells;
  std::set<std::tuple<std::string, std::string, std::string>> triples;

  for (const auto& rec : table.rows) {
    if (!triples.emplace(rec.entity, rec.category, rec.indicator).second) {
      throw InputError("duplicate indicator record (" + rec.entity + ", " + rec.category + ", " +
                       rec.indicator + ")");
    }
    const std::size_t s = intern(entities, entity_index, rec.entity);
    const std::size_t g = intern(categories, category_index, rec.category);
    Cell& cell = cells[{s, g}];
    cell.seen = true;
    if (!rec.value) {
      cell.not_applicable = true;
      continue;
    }
    const double v = *rec.value;
    if (!std::isfinite(v) || v < 0.0 || v > 100.0) {
      throw InputError("indicator value " + format_value(v) + " outside [0,100] for (" + rec.entity +
                       ", " + rec.category + ", " + rec.indicator + ")");
    }
    cell.sum += v;
    ++cell.count;
  }

  ScorePanel panel;
  panel.year = table.year;
  panel.entities = entities;
  panel.categories = categories;
  panel.scores = Matrix(entities.size(), categories.size());
  panel.missing.assign(entities.size() * categories.size(), 0);
  for (std::size_t s = 0; s < entities.size(); ++s) {
    for (std::size_t g = 0; g < categories.size(); ++g) {
      auto it = cells.find({s, g});
      if (it == cells.end()) {
        throw InputError("no indicators for entity '" + entities[s] + "', category '" + categories[g] +
                         "' (leave value empty to declare it not applicable)");
      }
      const Cell& cell = it->second;
      if (cell.count == 0) {
        panel.missing[s * categories.size() + g] = 1;
      } else {
        panel.scores(s, g) = cell.sum / static_cast<double>(cell.count);
      }
    }
  }
  throw_first_error(panel, validate_panel(panel));
  return panel;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Lineage lineage) {
  switch (lineage) {
    case Lineage::identity: return "identity";
    case Lineage::renamed: return "renamed";
    case Lineage::split_derived: return "split-derived";
    case Lineage::merged: return "merged";
    case Lineage::introduced: return "introduced";
  }
  return "unknown";
}

std::vector<std::string> Alignment::comparable() const {
  std::vector<std::string> ids;
  for (const auto& e : entities)
    if (e.lineage == Lineage::identity || e.lineage == Lineage::renamed) ids.push_back(e.id);
  return ids;
}

EntityMap parse_entity_map(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("entity map is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("entity map must be a JSON object");

  auto read_rules = [&](const char* key) {
    std::vector<MapRule> rules;
    if (!doc.contains(key)) return rules;
    const json& arr = doc.at(key);
    if (!arr.is_array()) throw InputError(std::string("entity map '") + key + "' must be an array");
    for (const auto& entry : arr) {
      if (!entry.is_object() || !entry.contains("from") || !entry.contains("to")) {
        throw InputError(std::string("entity map '") + key + "' entries need 'from' and 'to'");
      }
      MapRule rule;
      for (const char* side : {"from", "to"}) {
        const json& ids = entry.at(side);
        if (!ids.is_array()) throw InputError(std::string("entity map '") + side + "' must be an array");
        auto& dst = std::string_view(side) == "from" ? rule.from : rule.to;
        for (const auto& id : ids) {
          if (!id.is_string()) throw InputError("entity map ids must be strings");
          dst.push_back(id.get<std::string>());
        }
      }
      rules.push_back(std::move(rule));
    }
    return rules;
  };

  for (const auto& [key, _] : doc.items()) {
    if (key != "renames" && key != "splits" && key != "merges") {
      throw InputError("unknown entity map key '" + key + "'");
    }
  }
  EntityMap map;
  map.renames = read_rules("renames");
  map.splits = read_rules("splits");
  map.merges = read_rules("merges");

  for (const auto& r : map.renames)
    if (r.from.size() != 1 || r.to.size() != 1) throw InputError("rename rules map exactly one id to one id");
  for (const auto& r : map.splits)
    if (r.from.size() != 1 || r.to.size() < 2) throw InputError("split rules map one id to two or more ids");
  for (const auto& r : map.merges)
    if (r.from.size() < 2 || r.to.size() != 1) throw InputError("merge rules map two or more ids to one id");
  return map;
}

Alignment align_rosters(const std::vector<std::string>& earlier, const std::vector<std::string>& later,
                        const EntityMap& map) {
  const std::unordered_set<std::string> in_earlier(earlier.begin(), earlier.end());
  const std::unordered_set<std::string> in_later(later.begin(), later.end());

  std::unordered_map<std::string, std::pair<const MapRule*, Lineage>> by_target;
  std::unordered_set<std::string> consumed;

  auto add = [&](const std::vector<MapRule>& rules, Lineage lineage) {
    for (const auto& rule : rules) {
      for (const auto& id : rule.from) {
        if (!in_earlier.count(id)) throw AlignmentError("entity map source '" + id + "' is not in the earlier roster");
        if (!consumed.insert(id).second) throw AlignmentError("entity '" + id + "' is the source of more than one rule");
      }
      for (const auto& id : rule.to) {
        if (!in_later.count(id)) throw AlignmentError("entity map target '" + id + "' is not in the later roster");
        if (!by_target.emplace(id, std::make_pair(&rule, lineage)).second) {
          throw AlignmentError("entity '" + id + "' is the target of more than one rule");
        }
      }
    }
  };
  add(map.renames, Lineage::renamed);
  add(map.splits, Lineage::split_derived);
  add(map.merges, Lineage::merged);

  Alignment out;
  for (const auto& id : later) {
    if (auto it = by_target.find(id); it != by_target.end()) {
      out.entities.push_back({id, it->second.first->from, it->second.second});
    } else if (in_earlier.count(id)) {
      if (consumed.count(id)) {
        throw AlignmentError("entity '" + id + "' is carried over unchanged but is also the source of a rule");
      }
      out.entities.push_back({id, {id}, Lineage::identity});
    } else {
      out.entities.push_back({id, {}, Lineage::introduced});
    }
  }
  for (const auto& id : earlier) {
    if (!consumed.count(id) && !in_later.count(id)) out.retired.push_back(id);
  }
  return out;
}

}  // namespace genepy
