#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genepy/complexity.hpp"
#include "genepy/matrix.hpp"
#include "genepy/panel.hpp"

namespace genepy {

/// W_g = C_g / k'_g for one panel year.
struct GoalWeights {
  std::string year;
  std::vector<std::string> categories;
  std::vector<double> W;
};

GoalWeights goal_weights(const ScorePanel& panel, const ComplexityScores& scores,
                         const AdjustedUbiquity& ubiquity);

/// I_sg * W_g with the panel's missing mask carried over. Throws InputError
/// when the category rosters differ.
struct WeightedPerformance {
  std::vector<std::string> entities;
  std::vector<std::string> categories;
  Matrix values;
  std::vector<char> missing;

  bool is_missing(std::size_t s, std::size_t g) const { return missing[s * categories.size() + g] != 0; }
};

WeightedPerformance weighted_performance(const ScorePanel& panel, const GoalWeights& weights);

enum class RankBasis { k_s, composite_mean, D_s };

std::string_view to_string(RankBasis basis);
std::optional<RankBasis> parse_rank_basis(std::string_view text);

struct RankRow {
  std::string entity;
  double score = 0.0;
  std::size_t rank = 0;
};

/// Rows in rank order; rank 1 is the highest score. Equal scores are broken by
/// ascending entity id.
struct RankTable {
  std::string year;
  RankBasis basis = RankBasis::D_s;
  std::vector<RankRow> rows;

  const RankRow* find(std::string_view entity) const;
};

RankTable rank_entities(const std::vector<std::string>& entities, const std::vector<double>& values,
                        RankBasis basis, std::string year = {});

/// Spearman's rho from average (mid) ranks of the scores, so ties count
/// properly. NaN when either side has no rank variance. Throws InputError if
/// the entity sets differ.
double rank_correlation(const RankTable& a, const RankTable& b);

/// Average ranks (1 = highest) with ties sharing the mean of their positions.
std::vector<double> average_ranks(const std::vector<double>& values);

struct GroupProfile {
  std::vector<std::string> categories;
  std::vector<std::vector<std::string>> groups;  // entity ids, best group first
  WeightedPerformance performance;               // per-entity curves
  std::vector<std::vector<std::optional<double>>> group_curves;  // [group][category]
  std::vector<std::optional<double>> national_curve;

  /// Index into `groups` for an entity, or nullopt.
  std::optional<std::size_t> group_of(std::string_view entity) const;
};

/// Group curves for an explicit partition. Each curve point is the mean over
/// the group's present cells; nullopt when the group has none.
GroupProfile group_profile(const WeightedPerformance& performance,
                           std::vector<std::vector<std::string>> groups);

/// Sizes of `count` rank-ordered groups over n entities; earlier groups take
/// the remainder (4 -> 2/1/1).
std::vector<std::size_t> balanced_group_sizes(std::size_t n, std::size_t count);

/// Thirds of the ranking (top, middle, bottom) with their weighted-performance
/// curves and the national mean curve. Needs at least 3 entities.
GroupProfile tertile_groups(const RankTable& table, const ScorePanel& panel, const GoalWeights& weights);

// ---------------------------------------------------------------------------
// Multi-year evolution

struct RankPoint {
  std::string year;
  std::string entity;  // id used in that year
  std::size_t rank = 0;
};

struct Trajectory {
  std::string entity;  // id in the latest year the trajectory reaches
  std::vector<RankPoint> points;
  std::vector<Lineage> lineage;  // split-derived / merged / introduced / renamed events
  std::vector<std::string> inherited_from;  // parents for split-derived and merged entities
  std::optional<std::size_t> final_rank;    // rank in the last table, colour key
};

struct RankSeries {
  std::vector<std::string> years;
  RankBasis basis = RankBasis::D_s;
  std::size_t final_year_size = 0;  // entities ranked in the last year
  std::vector<Trajectory> trajectories;  // by final rank, then ended ones by id
};

/// `maps[i]` aligns `tables[i]` with `tables[i + 1]`; a missing map means the
/// rosters must already match (identity plus introductions/retirements are
/// not inferred, to avoid silent misalignment).
RankSeries rank_evolution(const std::vector<RankTable>& tables, const std::vector<std::optional<EntityMap>>& maps);

struct WeightsEvolution {
  std::vector<std::string> years;
  std::vector<std::string> categories;  // first-appearance order over the years
  std::vector<std::vector<std::optional<double>>> values;  // [category][year]
};

WeightsEvolution weights_evolution(const std::vector<GoalWeights>& series);

}  // namespace genepy
