#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "genepy/errors.hpp"
#include "genepy/panel.hpp"
#include "oracles.hpp"

using namespace genepy;

namespace {

std::string uniform_csv(std::size_t rows, std::size_t cols, const std::string& value) {
  std::string csv = "entity";
  for (std::size_t g = 0; g < cols; ++g) csv += ",G" + std::to_string(g + 1);
  csv += "\n";
  for (std::size_t s = 0; s < rows; ++s) {
    csv += "S" + std::to_string(s + 1);
    for (std::size_t g = 0; g < cols; ++g) csv += "," + value;
    csv += "\n";
  }
  return csv;
}

const Finding* find_code(const std::vector<Finding>& findings, const std::string& code) {
  for (const auto& f : findings)
    if (f.code == code) return &f;
  return nullptr;
}

}  // namespace

TEST_SUITE("panel") {

TEST_CASE("parse_panel reads a 36 x 15 panel") {
  const auto p = parse_panel(uniform_csv(36, 15, "55.5"), "2024");
  CHECK(p.year == "2024");
  CHECK(p.entity_count() == 36);
  CHECK(p.category_count() == 15);
  CHECK(p.entities.front() == "S1");
  CHECK(p.categories.back() == "G15");
  CHECK(p.scores(35, 14) == 55.5);
  CHECK(std::none_of(p.missing.begin(), p.missing.end(), [](char m) { return m != 0; }));
}

TEST_CASE("empty cells are missing and stored as zero") {
  const auto p = parse_panel("entity,G1,G2\nA,10,\nB, 20 ,30\n", "y");
  CHECK(p.is_missing(0, 1));
  CHECK(p.scores(0, 1) == 0.0);
  CHECK_FALSE(p.is_missing(1, 0));
  CHECK(p.scores(1, 0) == 20.0);
}

TEST_CASE("CRLF, BOM and quoted ids are accepted") {
  const auto p = parse_panel("\xEF\xBB\xBF" "entity,\"G,1\",G2\r\n\"Dadra \"\"N\"\" H\",1,2\r\nB,3,4\r\n", "y");
  CHECK(p.categories[0] == "G,1");
  CHECK(p.entities[0] == "Dadra \"N\" H");
  CHECK(p.scores(1, 1) == 4.0);
}

TEST_CASE("parse_panel errors") {
  SUBCASE("all-zero matrix is degenerate") {
    try {
      parse_panel("entity,G1,G2\nA,0,0\nB,0,0\n", "y");
      FAIL("expected DegenerateError");
    } catch (const DegenerateError& e) {
      CHECK(e.label() == "A");
    }
  }
  SUBCASE("score above 100") { CHECK_THROWS_AS(parse_panel("entity,G1,G2\nA,105,1\nB,2,3\n", "y"), InputError); }
  SUBCASE("negative score") { CHECK_THROWS_AS(parse_panel("entity,G1,G2\nA,-1,1\nB,2,3\n", "y"), InputError); }
  SUBCASE("non-numeric cell") {
    CHECK_THROWS_WITH_AS(parse_panel("entity,G1,G2\nA,abc,1\nB,2,3\n", "y"),
                         doctest::Contains("non-numeric cell 'abc' at line 2, column 2"), InputError);
  }
  SUBCASE("thousands separator is not a number") {
    CHECK_THROWS_AS(parse_panel("entity,G1,G2\nA,\"1,0\",1\nB,2,3\n", "y"), InputError);
  }
  SUBCASE("ragged row") { CHECK_THROWS_WITH_AS(parse_panel("entity,G1,G2\nA,1\nB,2,3\n", "y"), doctest::Contains("ragged"), InputError); }
  SUBCASE("duplicate entity") { CHECK_THROWS_WITH_AS(parse_panel("entity,G1,G2\nA,1,2\nA,2,3\n", "y"), doctest::Contains("duplicate entity"), InputError); }
  SUBCASE("duplicate category") { CHECK_THROWS_AS(parse_panel("entity,G1,G1\nA,1,2\nB,2,3\n", "y"), InputError); }
  SUBCASE("all-missing row") { CHECK_THROWS_WITH_AS(parse_panel("entity,G1,G2\nA,,\nB,2,3\n", "y"), doctest::Contains("no reported"), InputError); }
  SUBCASE("all-missing column") { CHECK_THROWS_AS(parse_panel("entity,G1,G2\nA,1,\nB,2,\n", "y"), InputError); }
  SUBCASE("single entity") { CHECK_THROWS_AS(parse_panel("entity,G1,G2\nA,1,2\n", "y"), InputError); }
  SUBCASE("single category") { CHECK_THROWS_AS(parse_panel("entity,G1\nA,1\nB,2\n", "y"), InputError); }
  SUBCASE("empty text") { CHECK_THROWS_AS(parse_panel("", "y"), InputError); }
}

TEST_CASE("aggregate_indicators averages indicators per goal") {
  IndicatorTable t{"2024",
                   {{"A", "1", "k1", 40.0},
                    {"A", "1", "k2", 60.0},
                    {"A", "2", "k1", 73.0},
                    {"B", "1", "k1", 0.0},
                    {"B", "1", "k2", 50.0},
                    {"B", "1", "k3", 100.0},
                    {"B", "2", "k1", std::nullopt}}};
  const auto p = aggregate_indicators(t);
  REQUIRE(p.entities == std::vector<std::string>{"A", "B"});
  REQUIRE(p.categories == std::vector<std::string>{"1", "2"});
  CHECK(p.scores(0, 0) == 50.0);  // {40, 60}
  CHECK(p.scores(0, 1) == 73.0);  // single indicator
  CHECK(p.scores(1, 0) == 50.0);  // {0, 50, 100}
  CHECK(p.is_missing(1, 1));      // declared not applicable
}

TEST_CASE("aggregate_indicators is invariant to indicator order") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dist(0.0, 100.0);
  IndicatorTable t{"y", {}};
  for (const char* e : {"A", "B", "C"})
    for (const char* g : {"1", "2", "3"})
      for (int k = 0; k < 4; ++k) t.rows.push_back({e, g, "k" + std::to_string(k), std::round(dist(rng))});
  const auto base = aggregate_indicators(t);
  for (int trial = 0; trial < 20; ++trial) {
    IndicatorTable shuffled = t;
    std::shuffle(shuffled.rows.begin(), shuffled.rows.end(), rng);
    auto p = aggregate_indicators(shuffled);
    for (std::size_t s = 0; s < base.entity_count(); ++s) {
      const auto si = std::find(p.entities.begin(), p.entities.end(), base.entities[s]) - p.entities.begin();
      for (std::size_t g = 0; g < base.category_count(); ++g) {
        const auto gi = std::find(p.categories.begin(), p.categories.end(), base.categories[g]) - p.categories.begin();
        // Integer-valued indicators: every partial sum is exact, so the mean is too.
        CHECK(p.scores(static_cast<std::size_t>(si), static_cast<std::size_t>(gi)) == base.scores(s, g));
      }
    }
  }
}

TEST_CASE("aggregate_indicators errors") {
  CHECK_THROWS_AS(aggregate_indicators(IndicatorTable{"y", {}}), InputError);
  CHECK_THROWS_AS(aggregate_indicators(IndicatorTable{"y", {{"A", "1", "k", 101.0}, {"B", "1", "k", 1.0}}}), InputError);
  // B has no row at all for category 2.
  CHECK_THROWS_WITH_AS(aggregate_indicators(IndicatorTable{"y",
                                                           {{"A", "1", "k", 10.0},
                                                            {"A", "2", "k", 10.0},
                                                            {"B", "1", "k", 10.0}}}),
                       doctest::Contains("no indicators"), InputError);
  CHECK_THROWS_WITH_AS(aggregate_indicators(IndicatorTable{"y", {{"A", "1", "k", 10.0}, {"A", "1", "k", 12.0}}}),
                       doctest::Contains("duplicate"), InputError);
}

TEST_CASE("parse_indicator_csv") {
  const auto t = parse_indicator_csv("entity,category,indicator,value\nA,1,k1,40\nA,1,k2,\n", "2020");
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].value == 40.0);
  CHECK_FALSE(t.rows[1].value.has_value());
  CHECK_THROWS_AS(parse_indicator_csv("entity,goal,indicator,value\n", "y"), InputError);
  CHECK_THROWS_AS(parse_indicator_csv("entity,category,indicator,value\nA,1,k,x\n", "y"), InputError);
}

TEST_CASE("validate_panel findings") {
  SUBCASE("uniform 100 matrix: no errors, one constant-columns warning") {
    const auto p = read_panel_csv(uniform_csv(36, 15, "100"), "y");
    const auto f = validate_panel(p);
    CHECK_FALSE(has_errors(f));
    REQUIRE(f.size() == 1);
    CHECK(f[0].severity == Severity::warning);
    CHECK(f[0].code == "constant-columns");
  }
  SUBCASE("column with 30 of 36 missing") {
    std::string csv = "entity,G1,G2\n";
    for (int s = 0; s < 36; ++s) csv += "S" + std::to_string(s) + "," + std::to_string(10 + s) + "," + (s < 6 ? std::to_string(s + 1) : "") + "\n";
    const auto f = validate_panel(read_panel_csv(csv, "y"));
    CHECK_FALSE(has_errors(f));
    const Finding* w = find_code(f, "high-missingness");
    REQUIRE(w != nullptr);
    CHECK(w->col == 1u);
    CHECK(*w->value == doctest::Approx(30.0 / 36.0).epsilon(1e-15));
    CHECK(w->message.find("0.833") != std::string::npos);
  }
  SUBCASE("exactly half missing is not flagged") {
    const auto f = validate_panel(read_panel_csv("entity,G1,G2\nA,1,2\nB,3,\n", "y"));
    CHECK(find_code(f, "high-missingness") == nullptr);
  }
  SUBCASE("valid 2024-shaped panel has no errors") {
    std::mt19937_64 rng(2024);
    const auto p = oracle::panel_from(oracle::random_scores(rng, 36, 15, 0.0, 100.0), "2024");
    CHECK_FALSE(has_errors(validate_panel(p)));
  }
  SUBCASE("out-of-range cell carries coordinates") {
    const auto f = validate_panel(read_panel_csv("entity,G1,G2\nA,1,2\nB,3,105\n", "y"));
    const Finding* e = find_code(f, "out-of-range");
    REQUIRE(e != nullptr);
    CHECK(e->row == 1u);
    CHECK(e->col == 1u);
    CHECK(e->message.find("row 2") != std::string::npos);
    CHECK(e->message.find("column 2") != std::string::npos);
  }
  SUBCASE("never mutates its input") {
    const auto p = read_panel_csv("entity,G1,G2\nA,1,2\nA,300,\n", "y");
    const ScorePanel copy = p;
    (void)validate_panel(p);
    CHECK(p == copy);
  }
}

TEST_CASE("emit then parse round-trips random panels") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t ns = 2 + rng() % 10, ng = 2 + rng() % 8;
    auto p = oracle::panel_from(oracle::random_scores(rng, ns, ng, 0.5, 100.0), "2019-20");
    p.entities[0] = "Jammu, Kashmir \"UT\"";
    // Sprinkle missing cells but keep at least one present cell per row and column.
    for (std::size_t s = 1; s < ns; ++s)
      for (std::size_t g = 1; g < ng; ++g)
        if (u(rng) < 0.2) {
          p.missing[s * ng + g] = 1;
          p.scores(s, g) = 0.0;
        }
    const auto q = parse_panel(emit_panel_csv(p), p.year);
    CHECK(q == p);
  }
}

TEST_CASE("entity map parsing") {
  const auto m = parse_entity_map(R"({"renames":[{"from":["OR"],"to":["OD"]}],
                                      "splits":[{"from":["AP"],"to":["AP","TG"]}],
                                      "merges":[{"from":["DN","DD"],"to":["DNDD"]}]})");
  CHECK(m.renames.size() == 1);
  CHECK(m.splits[0].to == std::vector<std::string>{"AP", "TG"});
  CHECK(m.merges[0].from.size() == 2);
  CHECK(parse_entity_map("{}").splits.empty());
  CHECK_THROWS_AS(parse_entity_map("[1]"), InputError);
  CHECK_THROWS_AS(parse_entity_map("{not json"), InputError);
  CHECK_THROWS_AS(parse_entity_map(R"({"splits":[{"from":["A"],"to":["B"]}]})"), InputError);
  CHECK_THROWS_AS(parse_entity_map(R"({"merges":[{"from":["A"],"to":["B"]}]})"), InputError);
  CHECK_THROWS_AS(parse_entity_map(R"({"renames":[{"from":["A","C"],"to":["B"]}]})"), InputError);
  CHECK_THROWS_AS(parse_entity_map(R"({"shuffles":[]})"), InputError);
}

TEST_CASE("align_rosters") {
  const std::vector<std::string> base{"AP", "KL", "DN", "DD"};
  SUBCASE("identical rosters, empty map") {
    const auto a = align_rosters(base, base, {});
    REQUIRE(a.entities.size() == 4);
    for (const auto& e : a.entities) {
      CHECK(e.lineage == Lineage::identity);
      CHECK(e.sources == std::vector<std::string>{e.id});
    }
    CHECK(a.retired.empty());
    CHECK(a.comparable() == base);
  }
  SUBCASE("split and merge") {
    EntityMap m;
    m.splits.push_back({{"AP"}, {"AP", "TG"}});
    m.merges.push_back({{"DN", "DD"}, {"DNDD"}});
    const auto a = align_rosters(base, {"AP", "TG", "KL", "DNDD", "LA"}, m);
    CHECK(a.entities[0].lineage == Lineage::split_derived);
    CHECK(a.entities[1].lineage == Lineage::split_derived);
    CHECK(a.entities[1].sources == std::vector<std::string>{"AP"});
    CHECK(a.entities[2].lineage == Lineage::identity);
    CHECK(a.entities[3].lineage == Lineage::merged);
    CHECK(a.entities[3].sources == std::vector<std::string>{"DN", "DD"});
    CHECK(a.entities[4].lineage == Lineage::introduced);
    CHECK(a.retired.empty());
    CHECK(a.comparable() == std::vector<std::string>{"KL"});
  }
  SUBCASE("rename and retirement") {
    EntityMap m;
    m.renames.push_back({{"KL"}, {"KE"}});
    const auto a = align_rosters(base, {"AP", "KE", "DN"}, m);
    CHECK(a.entities[1].lineage == Lineage::renamed);
    CHECK(a.retired == std::vector<std::string>{"DD"});
  }
  SUBCASE("dangling ids") {
    EntityMap m;
    m.renames.push_back({{"XX"}, {"KL"}});
    CHECK_THROWS_AS(align_rosters(base, base, m), AlignmentError);
    EntityMap m2;
    m2.renames.push_back({{"KL"}, {"ZZ"}});
    CHECK_THROWS_AS(align_rosters(base, base, m2), AlignmentError);
  }
  SUBCASE("conflicting rules") {
    EntityMap m;
    m.renames.push_back({{"KL"}, {"KE"}});
    m.splits.push_back({{"KL"}, {"K1", "K2"}});
    CHECK_THROWS_AS(align_rosters(base, {"KE", "K1", "K2"}, m), AlignmentError);
    EntityMap m2;
    m2.renames.push_back({{"AP"}, {"X"}});
    m2.renames.push_back({{"KL"}, {"X"}});
    CHECK_THROWS_AS(align_rosters(base, {"X"}, m2), AlignmentError);
    // KL renamed away but KL also still present unchanged.
    EntityMap m3;
    m3.renames.push_back({{"KL"}, {"KE"}});
    CHECK_THROWS_AS(align_rosters(base, {"KL", "KE"}, m3), AlignmentError);
  }
}

}  // TEST_SUITE
