#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairaudit/forest.hpp"
#include "fairaudit/metric.hpp"

namespace fairaudit {

/// 2x2 outcome-by-membership counts for statistical parity.
struct SpCounts {
  std::uint64_t p_g = 0, n_g = 0;      // positive / negative outcomes inside G
  std::uint64_t p_out = 0, n_out = 0;  // and outside G
};

/// Error cells for equalized odds under the prediction-error outcome
/// encoding (y = 1 iff the model was wrong, truth = actual label):
///   fp: y=1, truth=0   tn: y=0, truth=0
///   fn: y=1, truth=1   tp: y=0, truth=1
struct EoCounts {
  std::uint64_t fp_g = 0, tn_g = 0, fn_g = 0, tp_g = 0;
  std::uint64_t fp_out = 0, tn_out = 0, fn_out = 0, tp_out = 0;
};

struct Chi2Result {
  double chi2 = 0.0;
  int df = 1;
  double p = 1.0;
};

struct EoDisparity {
  double eo = 0.0;   // 0.5 * (|fpr difference| + |fnr difference|)
  double fpr = 0.0;  // FPR_G - FPR_out
  double fnr = 0.0;  // FNR_G - FNR_out
};

/// Statistical parity difference; nullopt when the group or its complement
/// is empty.
std::optional<double> disparity_sp(const SpCounts& counts);

/// Absolute odds difference; nullopt when any error rate is undefined.
std::optional<EoDisparity> disparity_eo(const EoCounts& counts);

/// Pearson chi-squared (df=1) of the 2x2 outcome-by-membership table;
/// nullopt on a degenerate marginal.
std::optional<Chi2Result> chi2_sp(const SpCounts& counts);

/// Pearson chi-squared per error-rate table, combined with Fisher's method
/// into a df=4 statistic; nullopt when either table is degenerate.
std::optional<Chi2Result> chi2_eo(const EoCounts& counts);

/// Step-up adjusted p-values in the original order; inputs must lie in [0,1].
std::vector<double> benjamini_hochberg(const std::vector<double>& p_raw);

struct DisparityFinding {
  Criterion criterion;
  std::string criterion_string;
  std::uint64_t group_count = 0;  // members in D2
  double group_share = 0.0;       // fraction of D2
  double psi = 0.0;
  std::optional<double> psi_fpr;
  std::optional<double> psi_fnr;
  double chi2 = 0.0;
  int df = 1;
  double p_raw = 1.0;
  double p_adjusted = 1.0;
  bool untestable = false;
  std::string untestable_reason;
  std::vector<std::uint32_t> source_trees;
};

/// Step 2: contingency counts on D2 per candidate, psi and chi-squared,
/// then one Benjamini-Hochberg pass across all testable candidates.
/// Untestable candidates are carried with a flag and excluded from the BH
/// family. Only D2 rows are read.
std::vector<DisparityFinding> evaluate_candidates(const CandidateSet& candidates,
                                                  const AuditDataset& dataset, MetricKind metric);

}  // namespace fairaudit
