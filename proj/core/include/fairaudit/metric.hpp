#pragma once

#include <string>

#include "fairaudit/errors.hpp"

namespace fairaudit {

enum class MetricKind { StatisticalParity, EqualizedOdds };

/// Equalized odds compares error rates against ground truth, so it can only
/// be evaluated on datasets carrying truth labels.
inline bool requires_truth(MetricKind kind) { return kind == MetricKind::EqualizedOdds; }

inline std::string to_string(MetricKind kind) {
  return kind == MetricKind::StatisticalParity ? "statistical-parity" : "equalized-odds";
}

inline MetricKind metric_from_string(const std::string& name) {
  if (name == "statistical-parity") return MetricKind::StatisticalParity;
  if (name == "equalized-odds") return MetricKind::EqualizedOdds;
  throw ConfigError("unknown metric '" + name + "' (expected statistical-parity or equalized-odds)");
}

enum class RankingMode { Confidence, Magnitude };

inline std::string to_string(RankingMode mode) {
  return mode == RankingMode::Confidence ? "confidence" : "magnitude";
}

inline RankingMode ranking_from_string(const std::string& name) {
  if (name == "confidence") return RankingMode::Confidence;
  if (name == "magnitude") return RankingMode::Magnitude;
  throw ConfigError("unknown ranking mode '" + name + "' (expected confidence or magnitude)");
}

}  // namespace fairaudit
