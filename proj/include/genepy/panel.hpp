#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genepy/matrix.hpp"

namespace genepy {

/// One year of entity x category scores in [0, 100].
///
/// Missing cells are stored as 0 in `scores` and flagged in `missing`, so
/// every dense kernel can treat them as non-contributing.
struct ScorePanel {
  std::string year;
  std::vector<std::string> entities;
  std::vector<std::string> categories;
  Matrix scores;
  std::vector<char> missing;  // row-major, same shape as scores

  std::size_t entity_count() const { return entities.size(); }
  std::size_t category_count() const { return categories.size(); }
  bool is_missing(std::size_t s, std::size_t g) const {
    return missing[s * categories.size() + g] != 0;
  }

  friend bool operator==(const ScorePanel&, const ScorePanel&) = default;
};

/// Builds a panel with no missing cells. Does not validate.
ScorePanel make_panel(std::string year, std::vector<std::string> entities,
                      std::vector<std::string> categories, Matrix scores);

struct IndicatorRecord {
  std::string entity;
  std::string category;
  std::string indicator;
  std::optional<double> value;  // nullopt declares the pair not applicable
};

struct IndicatorTable {
  std::string year;
  std::vector<IndicatorRecord> rows;
};

enum class Severity { warning, error };

struct Finding {
  Severity severity;
  std::string code;
  std::string message;
  std::optional<std::size_t> row;
  std::optional<std::size_t> col;
  std::optional<double> value;
};

/// Missing fraction above which a column draws a warning.
inline constexpr double kHighMissingFraction = 0.5;

/// Reads the panel CSV without checking value invariants. Throws InputError
/// on syntax problems only: empty input, bad header, ragged rows,
/// non-numeric cells.
ScorePanel read_panel_csv(std::string_view csv_text, std::string year);

/// Reads and validates. Throws DegenerateError for zero rows/columns and
/// InputError for every other error finding.
ScorePanel parse_panel(std::string_view csv_text, std::string year);

/// Writes the panel CSV; `parse_panel(emit_panel_csv(p), p.year) == p`.
std::string emit_panel_csv(const ScorePanel& panel);

IndicatorTable parse_indicator_csv(std::string_view csv_text, std::string year);

/// Averages indicators into goal scores: I_sg = sum_k I_sgk / count_k.
ScorePanel aggregate_indicators(const IndicatorTable& table);

/// Errors first (in row-major order of discovery), then warnings.
std::vector<Finding> validate_panel(const ScorePanel& panel);

bool has_errors(const std::vector<Finding>& findings);

// ---------------------------------------------------------------------------
// Entity alignment across years

struct MapRule {
  std::vector<std::string> from;
  std::vector<std::string> to;
};

struct EntityMap {
  std::vector<MapRule> renames;  // 1 -> 1
  std::vector<MapRule> splits;   // 1 -> many
  std::vector<MapRule> merges;   // many -> 1
};

EntityMap parse_entity_map(std::string_view json_text);

enum class Lineage { identity, renamed, split_derived, merged, introduced };

std::string_view to_string(Lineage lineage);

struct AlignedEntity {
  std::string id;                    // id in the later panel
  std::vector<std::string> sources;  // ids in the earlier panel it descends from
  Lineage lineage;
};

struct Alignment {
  std::vector<AlignedEntity> entities;  // later-panel order
  std::vector<std::string> retired;     // earlier ids with no descendant

  /// Entities whose trajectory continues (identity or rename).
  std::vector<std::string> comparable() const;
};

Alignment align_rosters(const std::vector<std::string>& earlier,
                        const std::vector<std::string>& later, const EntityMap& map);

inline Alignment align_panels(const ScorePanel& earlier, const ScorePanel& later,
                              const EntityMap& map) {
  return align_rosters(earlier.entities, later.entities, map);
}

}  // namespace genepy
