#include "fairaudit/audit.hpp"

#include "fairaudit/errors.hpp"
#include "fairaudit/rng.hpp"

namespace fairaudit {

AuditReport run_audit(const AuditDataset& dataset, const AuditParams& params) {
  if (requires_truth(params.metric) && !dataset.has_truth())
    throw ConfigError("metric '" + to_string(params.metric) +
                      "' requires a dataset with truth labels");
  if (params.n_groups < 1) throw ConfigError("n_groups must be at least 1");

  const AuditDataset scoped = dataset.with_sensitive(params.sensitive);
  std::vector<std::string> sensitive_names;
  for (std::size_t k : scoped.sensitive_attributes())
    sensitive_names.push_back(scoped.attribute(k).name);
  if (sensitive_names.empty()) throw ConfigError("no attribute is flagged sensitive");

  auto [d1, d2] = split_halves(scoped.row_count(), child_seed(params.forest.master_seed, 0),
                               params.forest.tree.min_node_size);
  ForestParams forest = params.forest;
  forest.master_seed = child_seed(params.forest.master_seed, 1);

  CandidateSet candidates = generate_subgroups(scoped, std::move(d1), std::move(d2), forest);
  std::vector<DisparityFinding> findings =
      evaluate_candidates(candidates, scoped, params.metric);

  ReportSpec spec;
  spec.metric = params.metric;
  spec.ranking = params.ranking;
  spec.n_groups = params.n_groups;
  spec.dataset_id = params.dataset_id.empty() ? scoped.id() : params.dataset_id;
  spec.timestamp = params.timestamp;
  spec.forest = params.forest;  // report the caller's seed, not the derived one
  spec.sensitive_attributes = sensitive_names;
  return build_report(scoped, candidates, std::move(findings), spec);
}

}  // namespace fairaudit
