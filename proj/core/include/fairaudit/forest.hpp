#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "fairaudit/criterion.hpp"
#include "fairaudit/dataset.hpp"
#include "fairaudit/tree.hpp"

namespace fairaudit {

struct ForestParams {
  std::size_t n_trees = 25;
  double subsample_fraction = 0.632;  // per-tree sample of D1, without replacement
  TreeParams tree;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;  // throughput only; results are schedule-independent

  void validate(std::size_t d1_size) const;
};

struct CandidateSubgroup {
  Criterion criterion;
  std::string criterion_string;           // canonical form, used as identity
  std::vector<std::uint32_t> source_trees;
  std::uint32_t d2_count = 0;
};

/// Step-1 output: deduplicated candidate criteria plus full provenance (the
/// grown trees, the D1/D2 partition, and the seeds that produced them).
struct CandidateSet {
  std::vector<CandidateSubgroup> subgroups;
  std::vector<SearchTree> trees;
  std::vector<RowIndex> d1_rows;
  std::vector<RowIndex> d2_rows;
  std::uint64_t master_seed = 0;
};

/// Uniformly random partition into halves of size ceil(M/2) / floor(M/2).
std::pair<std::vector<RowIndex>, std::vector<RowIndex>> split_halves(std::size_t n_rows,
                                                                     std::uint64_t seed,
                                                                     std::size_t min_node_size);

/// Grows the randomized forest on d1 and collects its terminal criteria:
/// canonicalized, deduplicated, the empty criterion removed, and subgroups
/// with fewer than min_leaf_size members in d2 dropped. Tree growth reads
/// only d1 rows; d2 enters solely through the membership-size filter.
CandidateSet generate_subgroups(const AuditDataset& dataset, std::vector<RowIndex> d1_rows,
                                std::vector<RowIndex> d2_rows, const ForestParams& params);

nlohmann::ordered_json candidate_set_to_json(const CandidateSet& set);

}  // namespace fairaudit
