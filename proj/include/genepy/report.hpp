#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genepy/analytics.hpp"
#include "genepy/panel.hpp"

namespace genepy {

enum class ChartKind { heatmap, bipartite, weight_bars, weighted_lines, rank_bump, grouped_bars };

std::string_view to_string(ChartKind kind);
std::optional<ChartKind> parse_chart_kind(std::string_view text);
const std::vector<ChartKind>& all_chart_kinds();

struct Color {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Color&, const Color&) = default;
};

std::string to_hex(Color c);

inline constexpr Color kLowColor{0xfa, 0xdc, 0x28};   // yellow
inline constexpr Color kHighColor{0x1a, 0x96, 0x42};  // green

struct ChartSpec {
  ChartKind kind = ChartKind::heatmap;
  std::string title;
  Color low = kLowColor;
  Color high = kHighColor;
  int width = 960;
  int height = 640;
};

ChartSpec default_spec(ChartKind kind, std::string title = {});

/// Linear interpolation low -> high over [0, 100], clamped, channels rounded.
Color ramp(double score, Color low, Color high);
inline Color ramp(double score, const ChartSpec& spec) { return ramp(score, spec.low, spec.high); }

// All emitters return a standalone SVG 1.1 document and throw InputError when
// the chart spec is for another kind or a dimension is not positive.

/// One rect per cell coloured by score; missing cells get a hatch pattern.
std::string emit_heatmap(const ScorePanel& panel, const ChartSpec& spec);

/// Entities on the left, categories on the right, one edge per present cell.
/// Stroke width and colour grow with the score.
std::string emit_bipartite(const ScorePanel& panel, const std::vector<std::string>& subset, const ChartSpec& spec);

/// Horizontal bars with length proportional to W_g and a 3-decimal label.
std::string emit_weight_bars(const GoalWeights& weights, const ChartSpec& spec);

/// Thin per-entity curves coloured by group, thick group means, thick
/// national mean, and best/worst labels per category.
std::string emit_weighted_lines(const GroupProfile& profile, const ChartSpec& spec);

/// Rank (1 at the top) against year, coloured by final-year rank.
std::string emit_rank_bump(const RankSeries& series, const ChartSpec& spec);

/// One group per category, one bar per year that has a value.
std::string emit_grouped_bars(const WeightsEvolution& evolution, const ChartSpec& spec);

}  // namespace genepy
