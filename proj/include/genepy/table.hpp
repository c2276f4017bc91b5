#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "genepy/analytics.hpp"
#include "genepy/panel.hpp"

namespace genepy {

/// Empty cells serialise as "" in CSV and null in JSON; so do non-finite doubles.
using Cell = std::variant<std::monostate, std::string, double, std::int64_t>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class TableFormat { csv, json };

/// Fixed column order, doubles with 6 decimals and '.' separator.
std::string emit_table(const Table& table, TableFormat format);

Table to_table(const RankTable& ranks);
Table to_table(const GoalWeights& weights);
Table to_table(const std::vector<Finding>& findings);
Table to_table(const WeightsEvolution& evolution);
Table to_table(const RankSeries& series);

}  // namespace genepy
