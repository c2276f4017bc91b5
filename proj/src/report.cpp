#include "genepy/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_map>

#include "genepy/errors.hpp"

namespace genepy {

namespace {

std::string num(double v) {
  if (v == 0.0) v = 0.0;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string label3(double v) {
  if (v == 0.0) v = 0.0;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string escape(std::string_view text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

// Accumulates an SVG document; every element goes on its own line.
class Svg {
public:
  Svg(int width, int height, std::string_view title) {
    out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + std::to_string(width) +
            "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " +
            std::to_string(height) + "\" font-family=\"sans-serif\">\n";
    line("<rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" fill=\"#ffffff\"/>");
    if (!title.empty()) {
      line("<title>" + escape(title) + "</title>");
      text(width / 2.0, 22, title, "title", "middle", 16);
    }
  }

  void line(const std::string& element) { out_ += "  " + element + "\n"; }

  void text(double x, double y, std::string_view content, std::string_view cls, std::string_view anchor = "start",
            int size = 11, std::string_view extra = {}) {
    line("<text class=\"" + std::string(cls) + "\" x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
         std::to_string(size) + "\" text-anchor=\"" + std::string(anchor) + "\"" +
         (extra.empty() ? "" : " " + std::string(extra)) + ">" + escape(content) + "</text>");
  }

  void rect(double x, double y, double w, double h, std::string_view cls, std::string_view fill,
            std::string_view extra = {}) {
    line("<rect class=\"" + std::string(cls) + "\" x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
         "\" height=\"" + num(h) + "\" fill=\"" + std::string(fill) + "\"" +
         (extra.empty() ? "" : " " + std::string(extra)) + "/>");
  }

  void segment(double x1, double y1, double x2, double y2, std::string_view cls, std::string_view stroke,
               double width, std::string_view extra = {}) {
    line("<line class=\"" + std::string(cls) + "\" x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
         "\" y2=\"" + num(y2) + "\" stroke=\"" + std::string(stroke) + "\" stroke-width=\"" + num(width) + "\"" +
         (extra.empty() ? "" : " " + std::string(extra)) + "/>");
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, std::string_view cls, std::string_view stroke,
                double width, std::string_view extra = {}) {
    std::string points;
    for (const auto& [x, y] : pts) points += (points.empty() ? "" : " ") + num(x) + "," + num(y);
    line("<polyline class=\"" + std::string(cls) + "\" points=\"" + points + "\" fill=\"none\" stroke=\"" +
         std::string(stroke) + "\" stroke-width=\"" + num(width) + "\"" +
         (extra.empty() ? "" : " " + std::string(extra)) + "/>");
  }

  void circle(double x, double y, double r, std::string_view cls, std::string_view fill) {
    line("<circle class=\"" + std::string(cls) + "\" cx=\"" + num(x) + "\" cy=\"" + num(y) + "\" r=\"" + num(r) +
         "\" fill=\"" + std::string(fill) + "\"/>");
  }

  std::string finish() {
    out_ += "</svg>\n";
    return std::move(out_);
  }

private:
  std::string out_;
};

void check_spec(const ChartSpec& spec, ChartKind expected) {
  if (spec.kind != expected) {
    throw InputError("chart spec is for '" + std::string(to_string(spec.kind)) + "', expected '" +
                     std::string(to_string(expected)) + "'");
  }
  if (spec.width <= 0 || spec.height <= 0) throw InputError("chart dimensions must be positive");
}

std::string attr(std::string_view name, std::string_view value) {
  return std::string(name) + "=\"" + escape(value) + "\"";
}

// Round maximum for value axes: 1, 2 or 5 times a power of ten.
double nice_ceiling(double v) {
  if (!(v > 0.0)) return 1.0;
  const double p = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (v <= m * p * (1.0 + 1e-12)) return m * p;
  return 10.0 * p;
}

constexpr const char* kYearPalette[] = {"#4575b4", "#91bfdb", "#fdae61", "#d73027",
                                        "#1a9850", "#762a83", "#8c510a", "#01665e"};

void value_axis(Svg& svg, double left, double right, double top, double bottom, double max_value, int ticks) {
  svg.segment(left, bottom, right, bottom, "axis", "#333333", 1);
  svg.segment(left, top, left, bottom, "axis", "#333333", 1);
  for (int k = 0; k <= ticks; ++k) {
    const double v = max_value * k / ticks;
    const double y = bottom - (bottom - top) * k / ticks;
    svg.segment(left - 4, y, left, y, "ytick", "#333333", 1);
    svg.text(left - 6, y + 4, label3(v), "ylabel", "end", 10);
  }
}

}  // namespace

std::string_view to_string(ChartKind kind) {
  switch (kind) {
    case ChartKind::heatmap: return "heatmap";
    case ChartKind::bipartite: return "bipartite";
    case ChartKind::weight_bars: return "weight_bars";
    case ChartKind::weighted_lines: return "weighted_lines";
    case ChartKind::rank_bump: return "rank_bump";
    case ChartKind::grouped_bars: return "grouped_bars";
  }
  return "unknown";
}

const std::vector<ChartKind>& all_chart_kinds() {
  static const std::vector<ChartKind> kinds{ChartKind::heatmap,        ChartKind::bipartite, ChartKind::weight_bars,
                                            ChartKind::weighted_lines, ChartKind::rank_bump, ChartKind::grouped_bars};
  return kinds;
}

std::optional<ChartKind> parse_chart_kind(std::string_view text) {
  for (ChartKind k : all_chart_kinds())
    if (to_string(k) == text) return k;
  return std::nullopt;
}

std::string to_hex(Color c) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

ChartSpec default_spec(ChartKind kind, std::string title) {
  ChartSpec spec;
  spec.kind = kind;
  spec.title = std::move(title);
  return spec;
}

Color ramp(double score, Color low, Color high) {
  const double t = std::clamp(std::isfinite(score) ? score / 100.0 : 0.0, 0.0, 1.0);
  auto mix = [t](std::uint8_t a, std::uint8_t b) {
    return static_cast<std::uint8_t>(std::lround(a + (static_cast<double>(b) - a) * t));
  };
  return {mix(low.r, high.r), mix(low.g, high.g), mix(low.b, high.b)};
}

std::string emit_heatmap(const ScorePanel& panel, const ChartSpec& spec) {
  check_spec(spec, ChartKind::heatmap);
  const std::size_t ns = panel.entity_count();
  const std::size_t ng = panel.category_count();
  const double left = 110, top = 60, right = 90, bottom = 20;
  const double cw = (spec.width - left - right) / static_cast<double>(std::max<std::size_t>(ng, 1));
  const double ch = (spec.height - top - bottom) / static_cast<double>(std::max<std::size_t>(ns, 1));

  Svg svg(spec.width, spec.height, spec.title);
  svg.line("<defs>");
  svg.line("<pattern id=\"hatch\" patternUnits=\"userSpaceOnUse\" width=\"6\" height=\"6\" "
           "patternTransform=\"rotate(45)\"><rect width=\"6\" height=\"6\" fill=\"#eeeeee\"/>"
           "<line x1=\"0\" y1=\"0\" x2=\"0\" y2=\"6\" stroke=\"#888888\" stroke-width=\"2\"/></pattern>");
  svg.line("<linearGradient id=\"ramp\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\"><stop offset=\"0\" stop-color=\"" +
           to_hex(spec.low) + "\"/><stop offset=\"1\" stop-color=\"" + to_hex(spec.high) + "\"/></linearGradient>");
  svg.line("</defs>");

  for (std::size_t g = 0; g < ng; ++g) {
    svg.text(left + (g + 0.5) * cw, top - 6, panel.categories[g], "collabel", "middle", 10);
  }
  for (std::size_t s = 0; s < ns; ++s) {
    svg.text(left - 6, top + (s + 0.5) * ch + 4, panel.entities[s], "rowlabel", "end", 10);
    for (std::size_t g = 0; g < ng; ++g) {
      const std::string where = attr("data-entity", panel.entities[s]) + " " + attr("data-category", panel.categories[g]);
      if (panel.is_missing(s, g)) {
        svg.rect(left + g * cw, top + s * ch, cw, ch, "cell missing", "url(#hatch)", where);
      } else {
        svg.rect(left + g * cw, top + s * ch, cw, ch, "cell", to_hex(ramp(panel.scores(s, g), spec)),
                 where + " " + attr("data-value", label3(panel.scores(s, g))));
      }
    }
  }
  const double lx = spec.width - right + 20;
  svg.rect(lx, top, 16, spec.height - top - bottom, "legend", "url(#ramp)");
  svg.text(lx + 20, top + 10, "100", "legendlabel", "start", 10);
  svg.text(lx + 20, spec.height - bottom, "0", "legendlabel", "start", 10);
  return svg.finish();
}

std::string emit_bipartite(const ScorePanel& panel, const std::vector<std::string>& subset, const ChartSpec& spec) {
  check_spec(spec, ChartKind::bipartite);
  if (subset.empty()) throw InputError("bipartite chart needs at least one entity");
  std::vector<std::size_t> rows;
  for (const auto& id : subset) {
    auto it = std::find(panel.entities.begin(), panel.entities.end(), id);
    if (it == panel.entities.end()) throw InputError("entity '" + id + "' is not in panel " + panel.year);
    rows.push_back(static_cast<std::size_t>(it - panel.entities.begin()));
  }
  const std::size_t ng = panel.category_count();
  const double top = 50, bottom = spec.height - 20.0;
  const double xl = spec.width * 0.25, xr = spec.width * 0.75;
  auto slot = [&](std::size_t i, std::size_t n) {
    return n == 1 ? (top + bottom) / 2.0 : top + (bottom - top) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  constexpr double kMinStroke = 0.5, kMaxStroke = 6.0;

  Svg svg(spec.width, spec.height, spec.title);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t s = rows[i];
    for (std::size_t g = 0; g < ng; ++g) {
      if (panel.is_missing(s, g)) continue;
      const double v = panel.scores(s, g);
      const double t = std::clamp(v / 100.0, 0.0, 1.0);
      svg.segment(xl, slot(i, rows.size()), xr, slot(g, ng), "edge", to_hex(ramp(v, spec)),
                  kMinStroke + (kMaxStroke - kMinStroke) * t,
                  attr("data-entity", panel.entities[s]) + " " + attr("data-category", panel.categories[g]) + " " +
                      attr("data-value", label3(v)));
    }
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    svg.circle(xl, slot(i, rows.size()), 6, "entity-node", "#555555");
    svg.text(xl - 10, slot(i, rows.size()) + 4, panel.entities[rows[i]], "entity-label", "end");
  }
  for (std::size_t g = 0; g < ng; ++g) {
    svg.circle(xr, slot(g, ng), 6, "category-node", "#555555");
    svg.text(xr + 10, slot(g, ng) + 4, panel.categories[g], "category-label", "start");
  }
  return svg.finish();
}

std::string emit_weight_bars(const GoalWeights& weights, const ChartSpec& spec) {
  check_spec(spec, ChartKind::weight_bars);
  if (weights.W.empty()) throw InputError("weight bar chart needs at least one category");
  const double left = 90, right = 70, top = 45, bottom = 15;
  const double plot_w = spec.width - left - right;
  const double slot = (spec.height - top - bottom) / static_cast<double>(weights.W.size());
  const double max_w = *std::max_element(weights.W.begin(), weights.W.end());
  const double scale = max_w > 0.0 ? plot_w / max_w : 0.0;

  Svg svg(spec.width, spec.height, spec.title);
  svg.segment(left, top, left, spec.height - bottom, "axis", "#333333", 1);
  for (std::size_t g = 0; g < weights.W.size(); ++g) {
    const double y = top + g * slot;
    const double len = std::max(0.0, weights.W[g]) * scale;
    // Colour follows the bar's share of the largest weight.
    const double share = max_w > 0.0 ? 100.0 * weights.W[g] / max_w : 0.0;
    svg.rect(left, y + slot * 0.15, len, slot * 0.7, "bar", to_hex(ramp(share, spec)),
             attr("data-category", weights.categories[g]) + " " + attr("data-value", label3(weights.W[g])));
    svg.text(left - 6, y + slot * 0.5 + 4, weights.categories[g], "category-label", "end");
    svg.text(left + len + 4, y + slot * 0.5 + 4, label3(weights.W[g]), "value", "start", 10);
  }
  return svg.finish();
}

std::string emit_weighted_lines(const GroupProfile& profile, const ChartSpec& spec) {
  check_spec(spec, ChartKind::weighted_lines);
  const auto& perf = profile.performance;
  const std::size_t ng = profile.categories.size();
  if (perf.categories != profile.categories || profile.national_curve.size() != ng) {
    throw InputError("weighted-performance curves do not share the category axis");
  }
  for (const auto& c : profile.group_curves)
    if (c.size() != ng) throw InputError("group curve does not share the category axis");

  double max_v = 0.0;
  for (std::size_t s = 0; s < perf.entities.size(); ++s)
    for (std::size_t g = 0; g < ng; ++g)
      if (!perf.is_missing(s, g)) max_v = std::max(max_v, perf.values(s, g));
  max_v = nice_ceiling(max_v);

  const double left = 60, right = 30, top = 45, bottom = 50;
  const double plot_bottom = spec.height - bottom;
  auto x_of = [&](std::size_t g) {
    return ng == 1 ? (left + spec.width - right) / 2.0
                   : left + (spec.width - left - right) * static_cast<double>(g) / static_cast<double>(ng - 1);
  };
  auto y_of = [&](double v) { return plot_bottom - (plot_bottom - top) * v / max_v; };
  const std::size_t ngroups = profile.groups.size();
  auto group_color = [&](std::size_t k) {
    const double t = ngroups <= 1 ? 100.0 : 100.0 * (1.0 - static_cast<double>(k) / static_cast<double>(ngroups - 1));
    return to_hex(ramp(t, spec));
  };
  auto curve_points = [&](const std::vector<std::optional<double>>& c) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t g = 0; g < ng; ++g)
      if (c[g]) pts.emplace_back(x_of(g), y_of(*c[g]));
    return pts;
  };

  Svg svg(spec.width, spec.height, spec.title);
  value_axis(svg, left, spec.width - right, top, plot_bottom, max_v, 5);
  for (std::size_t g = 0; g < ng; ++g) {
    svg.text(x_of(g), plot_bottom + 16, profile.categories[g], "xlabel", "middle", 10);
  }

  for (std::size_t s = 0; s < perf.entities.size(); ++s) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t g = 0; g < ng; ++g)
      if (!perf.is_missing(s, g)) pts.emplace_back(x_of(g), y_of(perf.values(s, g)));
    const auto group = profile.group_of(perf.entities[s]);
    svg.polyline(pts, "entity", group ? group_color(*group) : "#bbbbbb", 0.8,
                 attr("data-entity", perf.entities[s]) + " opacity=\"0.6\"");
  }
  for (std::size_t k = 0; k < ngroups; ++k) {
    svg.polyline(curve_points(profile.group_curves[k]), "group", group_color(k), 3.0,
                 attr("data-group", std::to_string(k + 1)));
  }
  svg.polyline(curve_points(profile.national_curve), "national", "#222222", 3.0, attr("data-group", "national"));

  for (std::size_t g = 0; g < ng; ++g) {
    std::optional<std::size_t> best, worst;
    for (std::size_t s = 0; s < perf.entities.size(); ++s) {
      if (perf.is_missing(s, g)) continue;
      if (!best || perf.values(s, g) > perf.values(*best, g)) best = s;
      if (!worst || perf.values(s, g) < perf.values(*worst, g)) worst = s;
    }
    if (!best) continue;
    svg.text(x_of(g), y_of(perf.values(*best, g)) - 6, perf.entities[*best] + " " + label3(perf.values(*best, g)),
             "best", "middle", 9);
    svg.text(x_of(g), y_of(perf.values(*worst, g)) + 12, perf.entities[*worst] + " " + label3(perf.values(*worst, g)),
             "worst", "middle", 9);
  }
  return svg.finish();
}

std::string emit_rank_bump(const RankSeries& series, const ChartSpec& spec) {
  check_spec(spec, ChartKind::rank_bump);
  if (series.years.empty() || series.trajectories.empty()) throw InputError("rank chart needs a non-empty series");
  std::size_t max_rank = 1;
  for (const auto& t : series.trajectories)
    for (const auto& p : t.points) max_rank = std::max(max_rank, p.rank);

  const double left = 50, right = 90, top = 50, bottom = 40;
  const double plot_bottom = spec.height - bottom;
  const std::size_t ny = series.years.size();
  auto x_of = [&](std::size_t y) {
    return ny == 1 ? (left + spec.width - right) / 2.0
                   : left + (spec.width - left - right) * static_cast<double>(y) / static_cast<double>(ny - 1);
  };
  auto y_of = [&](std::size_t rank) {
    return max_rank == 1 ? (top + plot_bottom) / 2.0
                         : top + (plot_bottom - top) * static_cast<double>(rank - 1) / static_cast<double>(max_rank - 1);
  };
  std::unordered_map<std::string, std::size_t> year_index;
  for (std::size_t y = 0; y < ny; ++y) year_index.emplace(series.years[y], y);

  Svg svg(spec.width, spec.height, spec.title);
  for (std::size_t y = 0; y < ny; ++y) {
    svg.segment(x_of(y), top, x_of(y), plot_bottom, "gridline", "#dddddd", 1);
    svg.text(x_of(y), plot_bottom + 20, series.years[y], "xtick", "middle", 12);
  }
  for (std::size_t r = 1; r <= max_rank; ++r) svg.text(left - 8, y_of(r) + 4, std::to_string(r), "ytick", "end", 9);

  const std::size_t n_final = std::max<std::size_t>(series.final_year_size, 1);
  for (const auto& t : series.trajectories) {
    std::string color = "#999999";
    if (t.final_rank) {
      const double share = n_final == 1 ? 100.0
                                        : 100.0 * (1.0 - static_cast<double>(*t.final_rank - 1) /
                                                             static_cast<double>(n_final - 1));
      color = to_hex(ramp(share, spec));
    }
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : t.points) pts.emplace_back(x_of(year_index.at(p.year)), y_of(p.rank));
    std::string lineage;
    for (Lineage l : t.lineage) lineage += (lineage.empty() ? "" : " ") + std::string(to_string(l));
    svg.polyline(pts, "trajectory", color, 2.0,
                 attr("data-entity", t.entity) + (lineage.empty() ? "" : " " + attr("data-lineage", lineage)));
    for (const auto& [x, y] : pts) svg.circle(x, y, 3, "marker", color);
    svg.text(pts.back().first + 8, pts.back().second + 4, t.entity, "entity-label", "start", 10);
  }
  return svg.finish();
}

std::string emit_grouped_bars(const WeightsEvolution& evolution, const ChartSpec& spec) {
  check_spec(spec, ChartKind::grouped_bars);
  if (evolution.categories.empty() || evolution.years.empty()) throw InputError("grouped bar chart needs data");
  double max_v = 0.0;
  for (const auto& row : evolution.values)
    for (const auto& v : row)
      if (v) max_v = std::max(max_v, *v);
  max_v = nice_ceiling(max_v);

  const double left = 60, right = 20, top = 70, bottom = 40;
  const double plot_bottom = spec.height - bottom;
  const std::size_t ng = evolution.categories.size();
  const std::size_t ny = evolution.years.size();
  const double group_w = (spec.width - left - right) / static_cast<double>(ng);
  const double bar_w = group_w * 0.8 / static_cast<double>(ny);
  constexpr std::size_t kPalette = sizeof kYearPalette / sizeof kYearPalette[0];

  Svg svg(spec.width, spec.height, spec.title);
  value_axis(svg, left, spec.width - right, top, plot_bottom, max_v, 5);
  for (std::size_t y = 0; y < ny; ++y) {
    const double lx = left + 10 + 90.0 * static_cast<double>(y);
    svg.rect(lx, 36, 12, 12, "legend", kYearPalette[y % kPalette], attr("data-year", evolution.years[y]));
    svg.text(lx + 16, 46, evolution.years[y], "legend-label", "start", 11);
  }
  for (std::size_t g = 0; g < ng; ++g) {
    const double gx = left + g * group_w + group_w * 0.1;
    svg.text(left + (g + 0.5) * group_w, plot_bottom + 16, evolution.categories[g], "xlabel", "middle", 10);
    for (std::size_t y = 0; y < ny; ++y) {
      const auto& v = evolution.values[g][y];
      if (!v) continue;
      const double h = (plot_bottom - top) * std::max(0.0, *v) / max_v;
      svg.rect(gx + y * bar_w, plot_bottom - h, bar_w, h, "bar", kYearPalette[y % kPalette],
               attr("data-category", evolution.categories[g]) + " " + attr("data-year", evolution.years[y]) + " " +
                   attr("data-value", label3(*v)));
    }
  }
  return svg.finish();
}

}  // namespace genepy
