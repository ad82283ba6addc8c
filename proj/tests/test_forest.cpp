#include <doctest.h>

#include <set>

#include "fairaudit/audit.hpp"
#include "fairaudit/disparity.hpp"
#include "fairaudit/synthetic.hpp"
#include "support/test_util.hpp"

using namespace fairaudit;
using namespace fairaudit::testing;

TEST_CASE("split_halves sizes and disjointness") {
  const auto [d1a, d2a] = split_halves(10, 7, 5);
  CHECK(d1a.size() == 5);
  CHECK(d2a.size() == 5);

  const auto [d1b, d2b] = split_halves(11, 7, 5);
  CHECK(d1b.size() == 6);  // ceiling convention
  CHECK(d2b.size() == 5);

  std::set<RowIndex> all(d1b.begin(), d1b.end());
  all.insert(d2b.begin(), d2b.end());
  CHECK(all.size() == 11);

  const auto [d1c, d2c] = split_halves(11, 7, 5);
  CHECK(d1b == d1c);  // same seed, same partition
  const auto [d1d, d2d] = split_halves(11, 8, 5);
  CHECK(d1b != d1d);

  CHECK_THROWS_AS(split_halves(30, 7, 20), ConfigError);
}

TEST_CASE("candidate criteria are canonical, distinct, and non-empty") {
  Dataset2Params gen;
  gen.rho = 0.4;
  gen.seed = 21;
  gen.n = 2000;
  const auto data = gen_dataset2(gen);
  auto [d1, d2] = split_halves(data.row_count(), 3, 20);
  ForestParams params;
  params.master_seed = 17;
  const auto candidates = generate_subgroups(data, d1, d2, params);

  std::set<std::string> seen;
  std::size_t total_leaves = 0;
  for (const auto& tree : candidates.trees) total_leaves += tree.leaf_count();
  for (const auto& subgroup : candidates.subgroups) {
    CHECK_FALSE(subgroup.criterion.empty());
    CHECK(seen.insert(subgroup.criterion_string).second);  // pairwise distinct
    CHECK(subgroup.d2_count >= params.tree.min_leaf_size);
    CHECK_FALSE(subgroup.source_trees.empty());
  }
  CHECK(candidates.subgroups.size() <= total_leaves);
}

TEST_CASE("a race-gender cell criterion is found on dataset2") {
  int located = 0;
  const int seeds = 100;
  for (int seed = 0; seed < seeds; ++seed) {
    Dataset2Params gen;
    gen.rho = 0.4;
    gen.seed = child_seed(300, seed);
    const auto data = gen_dataset2(gen);
    auto [d1, d2] = split_halves(data.row_count(), child_seed(301, seed), 20);
    ForestParams params;
    params.master_seed = child_seed(302, seed);
    params.workers = 2;
    const auto candidates = generate_subgroups(data, d1, d2, params);

    for (const auto& subgroup : candidates.subgroups) {
      std::set<std::string> attrs;
      for (const auto& pred : subgroup.criterion.predicates()) attrs.insert(pred.attribute);
      if (attrs == std::set<std::string>{"gender", "race"}) {
        // The cell's D2 members must reproduce from the criterion alone.
        const auto members = matching_rows(subgroup.criterion, data, candidates.d2_rows);
        CHECK(members.size() == subgroup.d2_count);
        ++located;
        break;
      }
    }
  }
  CHECK(located >= 95);
}

TEST_CASE("single-tree forest reduces to one grown tree") {
  Dataset2Params gen;
  gen.rho = 0.4;
  gen.seed = 5;
  gen.n = 1500;
  const auto data = gen_dataset2(gen);
  auto [d1, d2] = split_halves(data.row_count(), 11, 20);
  ForestParams params;
  params.n_trees = 1;
  params.master_seed = 23;
  const auto candidates = generate_subgroups(data, d1, d2, params);
  REQUIRE(candidates.trees.size() == 1);

  // Reproduce the tree directly from the derived seeds.
  Rng sample_rng(child_seed(23, 0));
  auto subsample = sample_rng.sample_without_replacement(
      candidates.d1_rows,
      static_cast<std::size_t>(params.subsample_fraction *
                               static_cast<double>(candidates.d1_rows.size())));
  std::sort(subsample.begin(), subsample.end());
  TreeParams tree_params = params.tree;
  tree_params.seed = child_seed(23, 1);
  const auto tree = grow_tree(data, subsample, tree_params);

  std::set<std::string> expected;
  for (const auto& criterion : terminal_criteria(tree)) {
    if (criterion.empty()) continue;
    if (matching_rows(criterion, data, candidates.d2_rows).size() >= params.tree.min_leaf_size)
      expected.insert(format_criterion(criterion));
  }
  std::set<std::string> got;
  for (const auto& subgroup : candidates.subgroups) got.insert(subgroup.criterion_string);
  CHECK(got == expected);
}

TEST_CASE("candidate generation never reads held-out outcomes") {
  Dataset2Params gen;
  gen.rho = 0.4;
  gen.seed = 9;
  gen.n = 2000;
  const auto data = gen_dataset2(gen);
  auto [d1, d2] = split_halves(data.row_count(), 31, 20);

  // Poison every D2 outcome; candidate generation must not notice.
  std::vector<std::uint8_t> y(data.row_count());
  for (RowIndex i = 0; i < data.row_count(); ++i) y[i] = data.outcome(i);
  for (RowIndex i : d2) y[i] = 1 - y[i];
  const auto race = *data.find_attribute("race");
  const auto gender = *data.find_attribute("gender");
  const auto age = *data.find_attribute("age");
  AuditDataset::Builder builder("poisoned");
  {
    std::vector<std::int32_t> r(data.row_count()), g(data.row_count());
    std::vector<double> a(data.row_count());
    for (RowIndex i = 0; i < data.row_count(); ++i) {
      r[i] = data.category(race, i);
      g[i] = data.category(gender, i);
      a[i] = data.continuous_value(age, i);
    }
    builder.categorical_column("race", {"r1", "r2"}, std::move(r))
        .categorical_column("gender", {"g1", "g2"}, std::move(g))
        .continuous_column("age", std::move(a))
        .outcome(std::move(y));
  }
  const auto poisoned = builder.build();

  ForestParams params;
  params.master_seed = 77;
  const auto original = generate_subgroups(data, d1, d2, params);
  const auto masked = generate_subgroups(poisoned, d1, d2, params);

  REQUIRE(original.subgroups.size() == masked.subgroups.size());
  for (std::size_t i = 0; i < original.subgroups.size(); ++i) {
    CHECK(original.subgroups[i].criterion_string == masked.subgroups[i].criterion_string);
    CHECK(original.subgroups[i].d2_count == masked.subgroups[i].d2_count);
    CHECK(original.subgroups[i].source_trees == masked.subgroups[i].source_trees);
  }
}

TEST_CASE("disparity evaluation never reads training-half rows") {
  Dataset2Params gen;
  gen.rho = 0.4;
  gen.seed = 10;
  gen.n = 2000;
  const auto data = gen_dataset2(gen);
  auto [d1, d2] = split_halves(data.row_count(), 32, 20);
  ForestParams params;
  params.master_seed = 78;
  const auto candidates = generate_subgroups(data, d1, d2, params);

  // Poison every D1 outcome; findings on the fixed candidate set must not move.
  std::vector<std::uint8_t> y(data.row_count());
  for (RowIndex i = 0; i < data.row_count(); ++i) y[i] = data.outcome(i);
  for (RowIndex i : candidates.d1_rows) y[i] = 1 - y[i];
  AuditDataset::Builder builder("poisoned");
  {
    std::vector<std::int32_t> r(data.row_count()), g(data.row_count());
    std::vector<double> a(data.row_count());
    for (RowIndex i = 0; i < data.row_count(); ++i) {
      r[i] = data.category(0, i);
      g[i] = data.category(1, i);
      a[i] = data.continuous_value(2, i);
    }
    builder.categorical_column("race", {"r1", "r2"}, std::move(r))
        .categorical_column("gender", {"g1", "g2"}, std::move(g))
        .continuous_column("age", std::move(a))
        .outcome(std::move(y));
  }
  const auto poisoned = builder.build();

  const auto a = evaluate_candidates(candidates, data, MetricKind::StatisticalParity);
  const auto b = evaluate_candidates(candidates, poisoned, MetricKind::StatisticalParity);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].psi == b[i].psi);
    CHECK(a[i].chi2 == b[i].chi2);
    CHECK(a[i].p_adjusted == b[i].p_adjusted);
    CHECK(a[i].group_count == b[i].group_count);
  }
}

TEST_CASE("worker count does not change the candidate set") {
  Dataset2Params gen;
  gen.rho = 0.3;
  gen.seed = 14;
  gen.n = 2000;
  const auto data = gen_dataset2(gen);
  auto [d1, d2] = split_halves(data.row_count(), 41, 20);

  ForestParams serial;
  serial.master_seed = 444;
  serial.workers = 1;
  ForestParams threaded = serial;
  threaded.workers = 4;

  const auto a = generate_subgroups(data, d1, d2, serial);
  const auto b = generate_subgroups(data, d1, d2, threaded);
  REQUIRE(a.subgroups.size() == b.subgroups.size());
  for (std::size_t i = 0; i < a.subgroups.size(); ++i)
    CHECK(a.subgroups[i].criterion_string == b.subgroups[i].criterion_string);
}

TEST_CASE("candidate sets serialize with criteria in both forms") {
  Dataset2Params gen;
  gen.rho = 0.4;
  gen.seed = 2;
  gen.n = 1500;
  const auto data = gen_dataset2(gen);
  auto [d1, d2] = split_halves(data.row_count(), 6, 20);
  ForestParams params;
  params.master_seed = 55;
  const auto candidates = generate_subgroups(data, d1, d2, params);

  const auto doc = candidate_set_to_json(candidates);
  CHECK(doc.at("master_seed").get<std::uint64_t>() == 55);
  CHECK(doc.at("d1_size").get<std::size_t>() == candidates.d1_rows.size());
  CHECK(doc.at("n_trees").get<std::size_t>() == 25);
  REQUIRE(doc.at("subgroups").size() == candidates.subgroups.size());
  for (const auto& subgroup : doc.at("subgroups")) {
    // String and structured forms must agree.
    const auto parsed = criterion_from_json(subgroup.at("predicates"));
    CHECK(format_criterion(parsed) == subgroup.at("criterion").get<std::string>());
    CHECK(subgroup.at("d2_count").get<std::size_t>() >= params.tree.min_leaf_size);
  }
}

TEST_CASE("parameter validation rejects inconsistent settings") {
  TreeParams tree;
  tree.alpha = 0.0;
  CHECK_THROWS_AS(tree.validate(), ConfigError);
  tree.alpha = 1.0;
  CHECK_THROWS_AS(tree.validate(), ConfigError);
  tree = {};
  tree.min_leaf_size = 0;
  CHECK_THROWS_AS(tree.validate(), ConfigError);
  tree = {};
  tree.min_node_size = 10;
  tree.min_leaf_size = 6;  // 2 * min_leaf > min_node
  CHECK_THROWS_AS(tree.validate(), ConfigError);

  ForestParams forest;
  forest.n_trees = 0;
  CHECK_THROWS_AS(forest.validate(1000), ConfigError);
  forest = {};
  forest.subsample_fraction = 1.5;
  CHECK_THROWS_AS(forest.validate(1000), ConfigError);
  forest = {};
  CHECK_THROWS_AS(forest.validate(20), ConfigError);  // subsample below min_node_size
}

TEST_CASE("null data rarely yields significant findings") {
  int audits_with_hits = 0;
  const int seeds = 20;
  for (int seed = 0; seed < seeds; ++seed) {
    const auto data = null_dataset(2000, child_seed(5555, seed));
    AuditParams params;
    params.forest.master_seed = child_seed(5556, seed);
    params.timestamp = "t";
    const auto report = run_audit(data, params);
    bool any = false;
    for (std::size_t i = 0; i < report.ranked_count; ++i)
      if (report.findings[i].p_adjusted <= 0.05) any = true;
    if (any) ++audits_with_hits;
  }
  CHECK(audits_with_hits <= 2);  // >= 90% of seeds clean
}
