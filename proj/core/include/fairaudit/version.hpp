#pragma once

#include <string>
#include <vector>

namespace fairaudit {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kEngineName = "fairaudit";

/// Fixed methodology notes embedded in every report; these state the
/// statistical choices an auditor needs to interpret the numbers.
inline std::vector<std::string> methodology_notes() {
  return {
      "split-variable selection: standardized linear-statistic permutation tests "
      "(asymptotic chi-squared; Monte-Carlo permutation below 30 rows), "
      "Bonferroni-corrected over each node's sampled attributes",
      "exploration: tree levels shallower than forced_depth split on the strongest "
      "drawn attribute without the alpha gate, so that interactions invisible "
      "marginally remain reachable; all reported confidence comes from held-out testing",
      "split-point search: standardized two-sample outcome statistic over candidate "
      "binary partitions; continuous thresholds at midpoints of consecutive distinct values",
      "equalized-odds testing: Pearson chi-squared on each error-rate 2x2 table, "
      "combined via Fisher's method (df=4); no continuity correction",
      "candidate subgroups are deduplicated by canonical criterion across trees before "
      "testing; subgroups smaller than min_leaf_size on the held-out half are dropped",
      "Benjamini-Hochberg correction is applied once across all testable candidates per audit",
      "tree-node statistics in reports and visualizations are computed on the held-out "
      "half restricted to each node's criterion",
  };
}

}  // namespace fairaudit
