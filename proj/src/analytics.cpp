#include "genepy/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "genepy/errors.hpp"

namespace genepy {

GoalWeights goal_weights(const ScorePanel& panel, const ComplexityScores& scores, const AdjustedUbiquity& ubiquity) {
  const std::size_t ng = panel.category_count();
  if (scores.C.size() != ng || ubiquity.k_prime.size() != ng) {
    throw InputError("category scores do not match the panel's category roster");
  }
  GoalWeights w{panel.year, panel.categories, std::vector<double>(ng)};
  for (std::size_t g = 0; g < ng; ++g) w.W[g] = scores.C[g] / ubiquity.k_prime[g];
  return w;
}

WeightedPerformance weighted_performance(const ScorePanel& panel, const GoalWeights& weights) {
  if (panel.categories != weights.categories) {
    throw InputError("weights for year " + weights.year + " do not match the category roster of panel " + panel.year);
  }
  WeightedPerformance out{panel.entities, panel.categories, Matrix(panel.entity_count(), panel.category_count()),
                          panel.missing};
  for (std::size_t s = 0; s < panel.entity_count(); ++s)
    for (std::size_t g = 0; g < panel.category_count(); ++g)
      if (!panel.is_missing(s, g)) out.values(s, g) = panel.scores(s, g) * weights.W[g];
  return out;
}

std::string_view to_string(RankBasis basis) {
  switch (basis) {
    case RankBasis::k_s: return "k_s";
    case RankBasis::composite_mean: return "composite_mean";
    case RankBasis::D_s: return "D_s";
  }
  return "unknown";
}

std::optional<RankBasis> parse_rank_basis(std::string_view text) {
  for (RankBasis b : {RankBasis::k_s, RankBasis::composite_mean, RankBasis::D_s})
    if (to_string(b) == text) return b;
  return std::nullopt;
}

const RankRow* RankTable::find(std::string_view entity) const {
  for (const auto& r : rows)
    if (r.entity == entity) return &r;
  return nullptr;
}

RankTable rank_entities(const std::vector<std::string>& entities, const std::vector<double>& values, RankBasis basis,
                        std::string year) {
  if (entities.size() != values.size()) throw InputError("rank_entities: ids and values differ in length");
  for (double v : values)
    if (!std::isfinite(v)) throw InputError("rank_entities: non-finite score");

  std::vector<std::size_t> order(entities.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] > values[b];
    return entities[a] < entities[b];
  });

  RankTable t{std::move(year), basis, {}};
  t.rows.reserve(order.size());
  for (std::size_t r = 0; r < order.size(); ++r) t.rows.push_back({entities[order[r]], values[order[r]], r + 1});
  return t;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
    i = j + 1;
  }
  return ranks;
}

double rank_correlation(const RankTable& a, const RankTable& b) {
  if (a.rows.size() != b.rows.size()) throw InputError("rank_correlation: tables rank different entity sets");
  std::vector<double> xa, xb;
  xa.reserve(a.rows.size());
  xb.reserve(a.rows.size());
  for (const auto& row : a.rows) {
    const RankRow* other = b.find(row.entity);
    if (!other) throw InputError("rank_correlation: entity '" + row.entity + "' missing from the second table");
    xa.push_back(row.score);
    xb.push_back(other->score);
  }
  const auto ra = average_ranks(xa);
  const auto rb = average_ranks(xb);
  const double n = static_cast<double>(ra.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

std::optional<std::size_t> GroupProfile::group_of(std::string_view entity) const {
  for (std::size_t k = 0; k < groups.size(); ++k)
    if (std::find(groups[k].begin(), groups[k].end(), entity) != groups[k].end()) return k;
  return std::nullopt;
}

GroupProfile group_profile(const WeightedPerformance& performance, std::vector<std::vector<std::string>> groups) {
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t s = 0; s < performance.entities.size(); ++s) row_of.emplace(performance.entities[s], s);

  const std::size_t ng = performance.categories.size();
  auto curve = [&](const std::vector<std::size_t>& rows) {
    std::vector<std::optional<double>> out(ng);
    for (std::size_t g = 0; g < ng; ++g) {
      double total = 0.0;
      std::size_t count = 0;
      for (std::size_t s : rows) {
        if (performance.is_missing(s, g)) continue;
        total += performance.values(s, g);
        ++count;
      }
      if (count > 0) out[g] = total / static_cast<double>(count);
    }
    return out;
  };

  GroupProfile p;
  p.categories = performance.categories;
  std::set<std::string> seen;
  for (const auto& group : groups) {
    std::vector<std::size_t> rows;
    for (const auto& id : group) {
      auto it = row_of.find(id);
      if (it == row_of.end()) throw InputError("group member '" + id + "' is not in the panel");
      if (!seen.insert(id).second) throw InputError("entity '" + id + "' is assigned to more than one group");
      rows.push_back(it->second);
    }
    p.group_curves.push_back(curve(rows));
  }
  std::vector<std::size_t> all(performance.entities.size());
  std::iota(all.begin(), all.end(), 0);
  p.national_curve = curve(all);
  p.groups = std::move(groups);
  p.performance = performance;
  return p;
}

std::vector<std::size_t> balanced_group_sizes(std::size_t n, std::size_t count) {
  std::vector<std::size_t> sizes(count, count == 0 ? 0 : n / count);
  for (std::size_t k = 0; k < count && k < n % count; ++k) ++sizes[k];
  return sizes;
}

GroupProfile tertile_groups(const RankTable& table, const ScorePanel& panel, const GoalWeights& weights) {
  if (table.rows.size() < 3) throw InputError("tertile groups need at least 3 entities");
  const std::set<std::string> ranked = [&] {
    std::set<std::string> ids;
    for (const auto& r : table.rows) ids.insert(r.entity);
    return ids;
  }();
  if (ranked != std::set<std::string>(panel.entities.begin(), panel.entities.end())) {
    throw InputError("rank table and panel " + panel.year + " cover different entities");
  }

  std::vector<std::vector<std::string>> groups;
  std::size_t next = 0;
  for (std::size_t size : balanced_group_sizes(table.rows.size(), 3)) {
    std::vector<std::string> group;
    for (std::size_t k = 0; k < size; ++k) group.push_back(table.rows[next++].entity);
    groups.push_back(std::move(group));
  }
  return group_profile(weighted_performance(panel, weights), std::move(groups));
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> roster(const RankTable& t) {
  std::vector<std::string> ids;
  ids.reserve(t.rows.size());
  for (const auto& r : t.rows) ids.push_back(r.entity);
  return ids;
}

Alignment align_tables(const RankTable& earlier, const RankTable& later, const std::optional<EntityMap>& map) {
  const auto a = roster(earlier);
  const auto b = roster(later);
  if (map) return align_rosters(a, b, *map);
  if (std::set<std::string>(a.begin(), a.end()) != std::set<std::string>(b.begin(), b.end())) {
    throw AlignmentError("rosters of " + earlier.year + " and " + later.year + " differ and no entity map was given");
  }
  return align_rosters(a, b, EntityMap{});
}

}  // namespace

RankSeries rank_evolution(const std::vector<RankTable>& tables, const std::vector<std::optional<EntityMap>>& maps) {
  if (tables.empty()) throw InputError("rank_evolution needs at least one year");
  if (maps.size() + 1 != tables.size() && !(maps.empty() && tables.size() == 1)) {
    throw InputError("rank_evolution needs one (possibly empty) map per consecutive pair of years");
  }

  RankSeries series;
  series.basis = tables.front().basis;
  std::vector<Trajectory> all;
  std::vector<char> replaced;
  std::unordered_map<std::string, std::size_t> active;

  auto start = [&](Trajectory t) {
    all.push_back(std::move(t));
    replaced.push_back(0);
    return all.size() - 1;
  };

  for (const auto& row : tables.front().rows) {
    active[row.entity] = start({row.entity, {{tables.front().year, row.entity, row.rank}}, {}, {}, {}});
  }
  series.years.push_back(tables.front().year);

  for (std::size_t t = 1; t < tables.size(); ++t) {
    const RankTable& later = tables[t];
    const Alignment alignment = align_tables(tables[t - 1], later, maps[t - 1]);
    std::unordered_map<std::string, std::size_t> next_active;
    for (const auto& e : alignment.entities) {
      const RankRow* row = later.find(e.id);
      const RankPoint point{later.year, e.id, row->rank};
      std::size_t idx = 0;
      switch (e.lineage) {
        case Lineage::identity:
        case Lineage::renamed:
          idx = active.at(e.sources.front());
          if (e.lineage == Lineage::renamed) all[idx].lineage.push_back(Lineage::renamed);
          break;
        case Lineage::split_derived: {
          const std::size_t parent = active.at(e.sources.front());
          Trajectory child = all[parent];
          child.lineage.push_back(Lineage::split_derived);
          child.inherited_from.push_back(e.sources.front());
          replaced[parent] = 1;
          idx = start(std::move(child));
          break;
        }
        case Lineage::merged:
          idx = start({e.id, {}, {Lineage::merged}, e.sources, {}});
          break;
        case Lineage::introduced:
          idx = start({e.id, {}, {Lineage::introduced}, {}, {}});
          break;
      }
      all[idx].entity = e.id;
      all[idx].points.push_back(point);
      next_active[e.id] = idx;
    }
    active = std::move(next_active);
    series.years.push_back(later.year);
  }

  series.final_year_size = tables.back().rows.size();
  for (const auto& [id, idx] : active) all[idx].final_rank = all[idx].points.back().rank;

  for (std::size_t i = 0; i < all.size(); ++i)
    if (!replaced[i]) series.trajectories.push_back(std::move(all[i]));
  std::stable_sort(series.trajectories.begin(), series.trajectories.end(), [](const Trajectory& a, const Trajectory& b) {
    if (a.final_rank && b.final_rank) return *a.final_rank < *b.final_rank;
    if (a.final_rank.has_value() != b.final_rank.has_value()) return a.final_rank.has_value();
    return a.entity < b.entity;
  });
  return series;
}

WeightsEvolution weights_evolution(const std::vector<GoalWeights>& series) {
  if (series.empty()) throw InputError("weights_evolution needs at least one year");
  WeightsEvolution out;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& w : series) {
    out.years.push_back(w.year);
    for (const auto& c : w.categories) {
      if (index.emplace(c, out.categories.size()).second) out.categories.push_back(c);
    }
  }
  out.values.assign(out.categories.size(), std::vector<std::optional<double>>(series.size()));
  for (std::size_t y = 0; y < series.size(); ++y)
    for (std::size_t g = 0; g < series[y].categories.size(); ++g)
      out.values[index.at(series[y].categories[g])][y] = series[y].W[g];
  return out;
}

}  // namespace genepy
