#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "restcheck/metrics/metrics.hpp"
#include "restcheck/metrics/project_inputs.hpp"
#include "review_model.hpp"
#include "synthetic_project.hpp"

using namespace restcheck;
using namespace restcheck::metrics;

namespace {

const MetricRecord& find(const std::vector<MetricRecord>& records, const std::string& metric,
                         const std::string& scope, const std::string& variant = "") {
  for (const auto& r : records)
    if (r.metric == metric && r.scope == scope && r.variant == variant) return r;
  throw std::out_of_range(metric + "/" + variant + "@" + scope);
}

void expect_ratio(const MetricRecord& r, double num, double den) {
  ASSERT_TRUE(r.value.has_value()) << r.metric << " " << r.note;
  EXPECT_DOUBLE_EQ(r.numerator, num) << r.metric;
  EXPECT_DOUBLE_EQ(r.denominator, den) << r.metric;
  EXPECT_DOUBLE_EQ(*r.value, num / den) << r.metric;
}

void expect_matches(const MetricRecord& r, const std::optional<oracle::Ratio>& o) {
  if (!o) {
    EXPECT_FALSE(r.value.has_value()) << r.metric << "@" << r.scope;
    return;
  }
  ASSERT_TRUE(r.value.has_value()) << r.metric << "@" << r.scope << ": " << r.note;
  EXPECT_DOUBLE_EQ(r.numerator, o->num) << r.metric << "@" << r.scope;
  EXPECT_DOUBLE_EQ(r.denominator, o->den) << r.metric << "@" << r.scope;
  EXPECT_NEAR(*r.value, o->value(), 1e-12) << r.metric << "@" << r.scope;
}

void compare_with_oracle(const workflow::Project& p) {
  const auto records = evaluate_project(p, "t");
  oracle::ProjectOracle o{p};
  expect_matches(find(records, "Cor_Syn", p.id), o.syntax());
  expect_matches(find(records, "Cor_DT", p.id), o.data_type());
  expect_matches(find(records, "Usability", p.id), o.usability());
  expect_matches(find(records, "Cov_US_api", p.id), o.unit_coverage_api());
  expect_matches(find(records, "Cov_SS", p.id), o.system_coverage());
  expect_matches(find(records, "Cov_Ops", p.id), o.operation_coverage());
  expect_matches(find(records, "Cov_SCode", p.id, "summed"), o.status_coverage_summed());
  for (const auto& op : p.operation_ids()) {
    expect_matches(find(records, "Cov_US_op", op), o.unit_coverage(op));
    expect_matches(find(records, "Cov_SCode", op), o.status_coverage(op));
  }
}

}  // namespace

TEST(Levenshtein, MatchesRecursiveDefinition) {
  std::vector<std::string> words{""};
  for (std::size_t i = 0; i < words.size() && words.size() < 121; ++i) {
    if (words[i].size() == 4) continue;
    for (char c : {'a', 'b', 'c'}) words.push_back(words[i] + c);
  }
  for (const auto& a : words)
    for (const auto& b : words) ASSERT_EQ(levenshtein(a, b), oracle::edit_distance(a, b)) << a << " / " << b;
}

TEST(Levenshtein, KnownValuesAndAxioms) {
  EXPECT_EQ(levenshtein("kitten", "sitting"), 3u);
  EXPECT_EQ(levenshtein("", "abc"), 3u);
  EXPECT_EQ(levenshtein("flaw", "lawn"), 2u);
  std::mt19937 rng(7);
  auto random_word = [&] {
    std::string s(rng() % 12, 'a');
    for (auto& c : s) c = static_cast<char>('a' + rng() % 4);
    return s;
  };
  for (int i = 0; i < 300; ++i) {
    auto a = random_word(), b = random_word(), c = random_word();
    EXPECT_EQ(levenshtein(a, a), 0u);
    EXPECT_EQ(levenshtein(a, b), levenshtein(b, a));
    EXPECT_LE(levenshtein(a, c), levenshtein(a, b) + levenshtein(b, c));
    EXPECT_GE(levenshtein(a, b), a.size() > b.size() ? a.size() - b.size() : b.size() - a.size());
  }
}

TEST(Rounding, MeanOverApis) {
  const double a[] = {97, 100, 95, 78, 100};
  EXPECT_DOUBLE_EQ(mean_over_apis(a), 94.0);
  const double b[] = {44.27, 14.85, 9.29, 63.2, 20.12};
  EXPECT_DOUBLE_EQ(mean_over_apis(b), 30.35);
  const double c[] = {15.4, 40.27, 31.97, 10.45, 25.02};
  EXPECT_DOUBLE_EQ(mean_over_apis(c), 24.62);
  EXPECT_THROW(mean_over_apis(std::span<const double>{}), Error);
  EXPECT_DOUBLE_EQ(round_to(2.675, 2), 2.68);
  EXPECT_DOUBLE_EQ(round_to(-1.005, 2), -1.01);
  EXPECT_DOUBLE_EQ(round_to(1.0 / 3.0, 0), 0.0);
}

TEST(SyntheticProject, HandComputedValues) {
  const auto p = synthetic::build();
  const auto r = evaluate_project(p, "2024-01-01T00:00:00.000Z");
  expect_ratio(find(r, "Cor_Syn", "p1"), 2, 3);
  expect_ratio(find(r, "Cor_DT", "p1"), 2, 3);
  expect_ratio(find(r, "Usability", "p1"), 2, 5);
  expect_ratio(find(r, "Usability", "p1", "strict"), 2, 3);
  expect_ratio(find(r, "Cov_US_op", "p1.op1"), 1, 3);
  expect_ratio(find(r, "Cov_US_op", "p1.op2"), 1, 2);
  EXPECT_FALSE(find(r, "Cov_US_op", "p1.op3").value.has_value());
  EXPECT_FALSE(find(r, "Cov_US_op", "p1.op3").note.empty());
  expect_ratio(find(r, "Cov_US_api", "p1"), 2, 5);
  expect_ratio(find(r, "Cov_SS", "p1"), 1, 2);
  expect_ratio(find(r, "Cov_Ops", "p1"), 2, 3);
  expect_ratio(find(r, "Cov_SCode", "p1.op1"), 1, 2);
  expect_ratio(find(r, "Cov_SCode", "p1.op2"), 1, 2);
  expect_ratio(find(r, "Cov_SCode", "p1.op3"), 2, 2);
  expect_ratio(find(r, "Cov_SCode", "p1", "summed"), 4, 6);
  for (const auto& rec : r) EXPECT_EQ(rec.computed_at, "2024-01-01T00:00:00.000Z");
}

TEST(SyntheticProject, OracleAgrees) { compare_with_oracle(synthetic::build()); }

TEST(SyntheticProject, UnconfirmedDataTypeIsUndefined) {
  auto p = synthetic::build();
  p.script("p1.ts5").data_type_verdict.reset();
  auto r = evaluate_project(p, "t");
  EXPECT_FALSE(find(r, "Cor_DT", "p1").value.has_value());
  EXPECT_NE(find(r, "Cor_DT", "p1").note.find("p1.ts5"), std::string::npos);
  EXPECT_THROW(data_type_correctness(build_inputs(p)), Error);
}

TEST(RandomProjects, OracleAgrees) {
  const auto spec = spec::load_spec(testkit::spec_fixture("items").string());
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    review_model::Fuzzer fuzz(spec, seed);
    ASSERT_TRUE(fuzz.run(30).empty());
    auto p = fuzz.project();
    std::mt19937 rng(static_cast<unsigned>(seed));
    for (auto& t : p.scripts) {
      if (t.llm_origin()) {
        t.original_syntax = rng() % 2 ? exec::SyntaxVerdict::valid : exec::SyntaxVerdict::invalid;
        t.data_type_verdict = rng() % 2 == 0;
      }
    }
    SCOPED_TRACE("seed " + std::to_string(seed));
    compare_with_oracle(p);
  }
}

TEST(EmptyProject, EverythingUndefinedButOperations) {
  const auto spec = spec::load_spec(testkit::spec_fixture("items").string());
  auto p = workflow::new_project("p1", spec, "", synthetic::fixed_clock());
  auto r = evaluate_project(p, "t");
  EXPECT_FALSE(find(r, "Cor_Syn", "p1").value.has_value());
  EXPECT_FALSE(find(r, "Usability", "p1").value.has_value());
  EXPECT_FALSE(find(r, "Cov_SS", "p1").value.has_value());
  expect_ratio(find(r, "Cov_Ops", "p1"), 0, 3);
  expect_ratio(find(r, "Cov_SCode", "p1", "summed"), 0, 6);
  MetricInputs empty;
  try {
    syntax_correctness(empty);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::undefined_metric);
  }
}

TEST(Records, JsonRoundTripAndPresentation) {
  for (const auto& rec : evaluate_project(synthetic::build(), "t"))
    EXPECT_EQ(metric_record_from_json(to_json(rec)), rec);
  MetricRecord ratio{"Cov_SS", "", "p1", 0.5, 1, 2, "", "t"};
  MetricRecord distance{"Usability", "", "p1", 0.4, 2, 5, "", "t"};
  EXPECT_DOUBLE_EQ(*presented(ratio), 50.0);
  EXPECT_DOUBLE_EQ(*presented(distance), 0.4);
  EXPECT_TRUE(is_distance_metric("Usability"));
  EXPECT_FALSE(is_distance_metric("Cov_Ops"));
}

TEST(Table, RowsAndAverage) {
  const auto records = evaluate_project(synthetic::build(), "t");
  auto row = table_row("items", records, "p1");
  EXPECT_DOUBLE_EQ(*row.values.at("Cov_Ops"), 100.0 * 2 / 3);
  EXPECT_DOUBLE_EQ(*row.values.at("Usability"), 0.4);
  TableRow other{"other", {{"Cov_Ops", 50.0}, {"Usability", std::nullopt}}};
  const std::vector<TableRow> rows{row, other};
  const std::vector<std::string> cols{"Cov_Ops", "Usability"};
  const auto text = render_table(rows, cols);
  EXPECT_NE(text.find("API"), std::string::npos);
  EXPECT_NE(text.find("66.67"), std::string::npos);
  EXPECT_NE(text.find("n/a"), std::string::npos);
  EXPECT_NE(text.find("Average"), std::string::npos);
  EXPECT_NE(text.find("58.33"), std::string::npos);  // mean of 66.67 and 50
  EXPECT_EQ(default_columns().size(), 7u);
}
