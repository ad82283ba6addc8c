#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fairaudit/criterion.hpp"
#include "fairaudit/dataset.hpp"
#include "fairaudit/rng.hpp"

namespace fairaudit {

struct TreeParams {
  double alpha = 0.1;              // split significance threshold (corrected p <= alpha)
  std::size_t min_node_size = 20;  // minimum rows to attempt a split
  std::size_t min_leaf_size = 7;   // minimum rows per child
  std::size_t max_depth = 0;       // 0 = unlimited
  std::size_t mtry = 0;            // attributes sampled per node; 0 = ceil(sqrt(K))
  // Exploration: nodes shallower than this split on the best drawn attribute
  // even when no association clears alpha. Interactions that are invisible
  // marginally (each attribute independent of the outcome on its own) are
  // unreachable for any significance-gated rule, so the first levels must be
  // free to probe; held-out testing keeps false discoveries controlled.
  std::size_t forced_depth = 2;
  // Exploration splits must keep this share of the node's rows on each side.
  // Unguarded maximally-selected statistics inflate at extreme cut points,
  // which would flood the candidate set with vacuously trimmed duplicates.
  double forced_split_min_share = 0.1;
  std::uint64_t seed = 0;
  std::size_t mc_cutoff = 30;      // below this many rows, Monte-Carlo permutation p-values
  std::size_t mc_rounds = 10000;

  void validate() const;
  std::size_t resolved_mtry(std::size_t n_candidates) const;
};

struct SplitSpec {
  std::size_t attribute = 0;
  Predicate left;
  Predicate right;
  double statistic = 0.0;
};

constexpr std::uint32_t kNoNode = 0xffffffffu;

struct TreeNode {
  std::uint32_t id = 0;
  std::uint32_t parent = kNoNode;
  std::uint32_t left = kNoNode;
  std::uint32_t right = kNoNode;
  std::uint32_t depth = 0;
  std::uint32_t n = 0;          // rows reaching the node during growth
  std::uint32_t positives = 0;  // outcome-positive rows among them
  double psi = 0.0;             // growth-time disparity of the node vs the rest of the root rows
  std::optional<SplitSpec> split;

  bool is_leaf() const { return !split.has_value(); }
};

/// One grown search tree; nodes are stored in preorder, node 0 is the root.
class SearchTree {
 public:
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  const TreeNode& node(std::uint32_t id) const { return nodes_[id]; }
  std::size_t leaf_count() const;
  std::uint64_t seed() const { return seed_; }

 private:
  friend SearchTree grow_tree(const AuditDataset&, std::vector<RowIndex>, const TreeParams&);
  std::vector<TreeNode> nodes_;
  std::uint64_t seed_ = 0;
};

/// Asymptotic permutation-test p-value for independence between one
/// attribute and the binary outcome on the given rows, following the
/// linear-statistic framework: T = sum_i g(x_i) y_i with g = identity for
/// continuous attributes and one-hot level coding for categorical ones,
/// standardized by the closed-form permutation mean and covariance and
/// referred to chi-squared with df = rank of the covariance. Below
/// `mc_cutoff` rows a seeded Monte-Carlo permutation estimate is returned
/// instead. Constant attributes or a constant outcome give p = 1.
double attribute_association_pvalue(const AuditDataset& dataset, std::span<const RowIndex> rows,
                                    std::size_t attribute, Rng& mc_rng,
                                    std::size_t mc_cutoff = 30, std::size_t mc_rounds = 10000);

/// Smallest Bonferroni-corrected p-value among the candidates, if it clears
/// alpha; ties break to the lexicographically smallest attribute name.
std::optional<std::size_t> select_split_attribute(const AuditDataset& dataset,
                                                  std::span<const RowIndex> rows,
                                                  std::span<const std::size_t> candidates,
                                                  const TreeParams& params, Rng& mc_rng);

/// Best binary split of `rows` on one attribute by the standardized
/// two-sample outcome statistic. Continuous: thresholds at midpoints of
/// consecutive distinct values. Categorical: exhaustive level partitions up
/// to 6 present levels, mean-outcome-ordered cuts above that. Returns
/// nullopt when no partition satisfies min_leaf_size.
std::optional<SplitSpec> best_binary_split(const AuditDataset& dataset,
                                           std::span<const RowIndex> rows, std::size_t attribute,
                                           const TreeParams& params);

/// Recursive partitioning driver: per node, draw mtry sensitive attributes,
/// select the split attribute by permutation-test significance, split, and
/// recurse; stops on the alpha, size, and depth conditions. Nodes shallower
/// than forced_depth split on the best drawn attribute without the alpha
/// gate (see TreeParams); a constant outcome is always terminal.
SearchTree grow_tree(const AuditDataset& dataset, std::vector<RowIndex> rows,
                     const TreeParams& params);

/// Canonical root-to-leaf criteria, one per leaf in node order. A root-only
/// tree yields the single empty criterion.
std::vector<Criterion> terminal_criteria(const SearchTree& tree);
std::vector<std::pair<std::uint32_t, Criterion>> leaf_criteria(const SearchTree& tree);

}  // namespace fairaudit
