#include <benchmark/benchmark.h>

#include "fairaudit/audit.hpp"
#include "fairaudit/disparity.hpp"
#include "fairaudit/rng.hpp"
#include "fairaudit/synthetic.hpp"
#include "fairaudit/tree.hpp"

namespace {

using namespace fairaudit;

const AuditDataset& dataset1_10k() {
  static const AuditDataset data = [] {
    Dataset1Params params;
    params.rho = 0.3;
    params.seed = 17;
    return gen_dataset1(params);
  }();
  return data;
}

std::vector<RowIndex> all_rows(const AuditDataset& data) {
  std::vector<RowIndex> rows(data.row_count());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<RowIndex>(i);
  return rows;
}

void BM_association_pvalue_continuous(benchmark::State& state) {
  const auto& data = dataset1_10k();
  const auto rows = all_rows(data);
  const auto age = *data.find_attribute("age");
  Rng rng(1);
  for (auto _ : state)
    benchmark::DoNotOptimize(attribute_association_pvalue(data, rows, age, rng));
}
BENCHMARK(BM_association_pvalue_continuous);

void BM_association_pvalue_categorical(benchmark::State& state) {
  const auto& data = dataset1_10k();
  const auto rows = all_rows(data);
  const auto race = *data.find_attribute("race");
  Rng rng(1);
  for (auto _ : state)
    benchmark::DoNotOptimize(attribute_association_pvalue(data, rows, race, rng));
}
BENCHMARK(BM_association_pvalue_categorical);

void BM_best_binary_split_continuous(benchmark::State& state) {
  const auto& data = dataset1_10k();
  const auto rows = all_rows(data);
  const auto age = *data.find_attribute("age");
  TreeParams params;
  for (auto _ : state) benchmark::DoNotOptimize(best_binary_split(data, rows, age, params));
}
BENCHMARK(BM_best_binary_split_continuous);

void BM_grow_tree(benchmark::State& state) {
  const auto& data = dataset1_10k();
  TreeParams params;
  params.seed = 5;
  for (auto _ : state) {
    auto tree = grow_tree(data, all_rows(data), params);
    benchmark::DoNotOptimize(tree);
  }
}
BENCHMARK(BM_grow_tree);

void BM_full_audit_dataset2(benchmark::State& state) {
  Dataset2Params gen;
  gen.rho = 0.4;
  gen.seed = 3;
  const AuditDataset data = gen_dataset2(gen);
  AuditParams params;
  params.forest.master_seed = 11;
  params.timestamp = "bench";
  for (auto _ : state) {
    auto report = run_audit(data, params);
    benchmark::DoNotOptimize(report);
  }
}
BENCHMARK(BM_full_audit_dataset2);

void BM_benjamini_hochberg(benchmark::State& state) {
  Rng rng(9);
  std::vector<double> p(2000);
  for (auto& v : p) v = rng.next_double();
  for (auto _ : state) benchmark::DoNotOptimize(benjamini_hochberg(p));
}
BENCHMARK(BM_benjamini_hochberg);

}  // namespace

BENCHMARK_MAIN();
