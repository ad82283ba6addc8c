#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fairaudit/disparity.hpp"
#include "fairaudit/metric.hpp"

namespace fairaudit {

/// Total order over testable findings.
///   confidence: p_adjusted ascending, then |psi| descending, then criterion
///   magnitude:  |psi| descending, then p_adjusted ascending, then criterion
std::vector<DisparityFinding> rank(std::vector<DisparityFinding> findings, RankingMode mode);

/// Serializable view of a search tree with held-out (D2) statistics per node.
struct TreeViewSplit {
  std::string attribute;
  AttrKind kind = AttrKind::Continuous;
  double threshold = 0.0;                       // continuous
  std::vector<std::string> left_levels;         // categorical
  std::vector<std::string> right_levels;
};

struct TreeViewNode {
  std::uint32_t id = 0;
  std::uint32_t parent = kNoNode;
  std::uint32_t left = kNoNode;
  std::uint32_t right = kNoNode;
  std::optional<TreeViewSplit> split;
  std::uint64_t n_d2 = 0;
  double share_d2 = 0.0;
  std::optional<double> psi_d2;  // nullopt when undefined (e.g. empty complement)
};

struct TreeView {
  std::uint32_t id = 0;
  std::uint64_t seed = 0;
  std::vector<TreeViewNode> nodes;
};

struct ReportMetadata {
  std::string engine;
  std::string dataset_id;
  MetricKind metric = MetricKind::StatisticalParity;
  RankingMode ranking = RankingMode::Confidence;
  std::size_t n_groups = 3;
  std::string timestamp;
  std::uint64_t seed = 0;
  std::size_t n_trees = 25;
  double subsample_fraction = 0.632;
  double alpha = 0.1;
  std::size_t mtry = 0;  // resolved value
  std::size_t min_node_size = 20;
  std::size_t min_leaf_size = 7;
  std::size_t max_depth = 0;  // 0 = unlimited
  std::size_t forced_depth = 2;
  double forced_split_min_share = 0.1;
  std::size_t mc_cutoff = 30;
  std::size_t mc_rounds = 10000;
  std::vector<std::string> sensitive_attributes;
  std::size_t d1_size = 0;
  std::size_t d2_size = 0;
  std::string config_hash;  // fingerprint of the resolved configuration
  std::vector<std::string> methodology;
};

/// Final audit artifact: ranked findings (testable first, carrying ranks
/// 1..ranked_count; untestable flagged after them) plus the minimal set of
/// source trees covering the top n_groups findings.
struct AuditReport {
  ReportMetadata metadata;
  std::vector<DisparityFinding> findings;
  std::size_t ranked_count = 0;
  std::vector<TreeView> trees;
};

struct ReportSpec {
  MetricKind metric = MetricKind::StatisticalParity;
  RankingMode ranking = RankingMode::Confidence;
  std::size_t n_groups = 3;
  std::string dataset_id;
  std::string timestamp;
  ForestParams forest;  // resolved engine parameters
  std::vector<std::string> sensitive_attributes;
};

AuditReport build_report(const AuditDataset& dataset, const CandidateSet& candidates,
                         std::vector<DisparityFinding> findings, const ReportSpec& spec);

nlohmann::ordered_json render_json(const AuditReport& report);
AuditReport report_from_json(const nlohmann::json& doc);

/// Human-readable table mirroring the report fields, top n_groups rows.
std::string render_text(const AuditReport& report);

/// One DOT document per selected tree, as (name, content) pairs; node fill
/// encodes |psi| on a fixed monotone scale anchored at 0 and the audit's
/// maximum |psi|.
std::vector<std::pair<std::string, std::string>> render_dot(const AuditReport& report);

}  // namespace fairaudit
