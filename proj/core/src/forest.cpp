#include "fairaudit/forest.hpp"

#include <algorithm>
#include <map>

#include "fairaudit/errors.hpp"
#include "fairaudit/parallel.hpp"
#include "fairaudit/rng.hpp"

namespace fairaudit {

void ForestParams::validate(std::size_t d1_size) const {
  tree.validate();
  if (n_trees < 1) throw ConfigError("n_trees must be at least 1");
  if (!(subsample_fraction > 0.0 && subsample_fraction <= 1.0))
    throw ConfigError("subsample_fraction must lie in (0,1]");
  const auto subsample =
      static_cast<std::size_t>(subsample_fraction * static_cast<double>(d1_size));
  if (subsample < tree.min_node_size)
    throw ConfigError("subsample of D1 is smaller than min_node_size; provide more rows");
}

std::pair<std::vector<RowIndex>, std::vector<RowIndex>> split_halves(std::size_t n_rows,
                                                                     std::uint64_t seed,
                                                                     std::size_t min_node_size) {
  if (n_rows < 2 * min_node_size)
    throw ConfigError("dataset has " + std::to_string(n_rows) + " rows; at least " +
                      std::to_string(2 * min_node_size) + " are required");
  std::vector<RowIndex> order(n_rows);
  for (std::size_t i = 0; i < n_rows; ++i) order[i] = static_cast<RowIndex>(i);
  Rng rng(seed);
  rng.shuffle(std::span<RowIndex>(order));

  const std::size_t d1_size = (n_rows + 1) / 2;  // ceil(M/2)
  std::vector<RowIndex> d1(order.begin(), order.begin() + d1_size);
  std::vector<RowIndex> d2(order.begin() + d1_size, order.end());
  std::sort(d1.begin(), d1.end());
  std::sort(d2.begin(), d2.end());
  return {std::move(d1), std::move(d2)};
}

CandidateSet generate_subgroups(const AuditDataset& dataset, std::vector<RowIndex> d1_rows,
                                std::vector<RowIndex> d2_rows, const ForestParams& params) {
  params.validate(d1_rows.size());
  if (dataset.sensitive_attributes().empty())
    throw ConfigError("no attribute is flagged sensitive");

  const auto subsample_size = static_cast<std::size_t>(
      params.subsample_fraction * static_cast<double>(d1_rows.size()));

  CandidateSet out;
  out.master_seed = params.master_seed;
  out.d1_rows = std::move(d1_rows);
  out.d2_rows = std::move(d2_rows);
  out.trees.resize(params.n_trees);

  // Counter-derived per-tree seeds: results do not depend on which worker
  // grows which tree.
  parallel_for(params.n_trees, params.workers, [&](std::size_t t) {
    const std::uint64_t sample_seed = child_seed(params.master_seed, 2 * t);
    const std::uint64_t tree_seed = child_seed(params.master_seed, 2 * t + 1);

    Rng sample_rng(sample_seed);
    std::vector<RowIndex> subsample =
        sample_rng.sample_without_replacement(out.d1_rows, subsample_size);
    std::sort(subsample.begin(), subsample.end());

    TreeParams tree_params = params.tree;
    tree_params.seed = tree_seed;
    out.trees[t] = grow_tree(dataset, std::move(subsample), tree_params);
  });

  // Deduplicate by canonical criterion across trees, in tree order.
  struct Pending {
    Criterion criterion;
    std::vector<std::uint32_t> sources;
  };
  std::vector<Pending> pending;
  std::map<std::string, std::size_t> index_of;
  for (std::size_t t = 0; t < out.trees.size(); ++t) {
    for (auto& criterion : terminal_criteria(out.trees[t])) {
      if (criterion.empty()) continue;  // root-only tree
      std::string key = format_criterion(criterion);
      auto [it, fresh] = index_of.try_emplace(std::move(key), pending.size());
      if (fresh)
        pending.push_back({std::move(criterion), {static_cast<std::uint32_t>(t)}});
      else if (pending[it->second].sources.back() != static_cast<std::uint32_t>(t))
        pending[it->second].sources.push_back(static_cast<std::uint32_t>(t));
    }
  }

  for (auto& p : pending) {
    const auto members = matching_rows(p.criterion, dataset, out.d2_rows);
    if (members.size() < params.tree.min_leaf_size) continue;  // untestably small on D2
    CandidateSubgroup subgroup;
    subgroup.criterion_string = format_criterion(p.criterion);
    subgroup.criterion = std::move(p.criterion);
    subgroup.source_trees = std::move(p.sources);
    subgroup.d2_count = static_cast<std::uint32_t>(members.size());
    out.subgroups.push_back(std::move(subgroup));
  }
  return out;
}

nlohmann::ordered_json candidate_set_to_json(const CandidateSet& set) {
  nlohmann::ordered_json doc;
  doc["master_seed"] = set.master_seed;
  doc["d1_size"] = set.d1_rows.size();
  doc["d2_size"] = set.d2_rows.size();
  doc["n_trees"] = set.trees.size();
  nlohmann::ordered_json subgroups = nlohmann::ordered_json::array();
  for (const auto& s : set.subgroups) {
    nlohmann::ordered_json g;
    g["criterion"] = s.criterion_string;
    g["predicates"] = criterion_to_json(s.criterion);
    g["source_trees"] = s.source_trees;
    g["d2_count"] = s.d2_count;
    subgroups.push_back(std::move(g));
  }
  doc["subgroups"] = std::move(subgroups);
  return doc;
}

}  // namespace fairaudit
