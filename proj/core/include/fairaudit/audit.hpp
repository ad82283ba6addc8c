#pragma once

#include <string>
#include <vector>

#include "fairaudit/report.hpp"

namespace fairaudit {

struct AuditParams {
  MetricKind metric = MetricKind::StatisticalParity;
  RankingMode ranking = RankingMode::Confidence;
  std::size_t n_groups = 3;
  std::vector<std::string> sensitive;  // empty = all attributes
  ForestParams forest;
  std::string dataset_id;
  std::string timestamp;
};

/// Full pipeline: split halves, grow the randomized forest on D1, test the
/// candidate subgroups on D2, rank, and assemble the report.
AuditReport run_audit(const AuditDataset& dataset, const AuditParams& params);

}  // namespace fairaudit
