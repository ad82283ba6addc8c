#include "fairaudit/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

#include "fairaudit/errors.hpp"
#include "fairaudit/math.hpp"
#include "fairaudit/version.hpp"

namespace fairaudit {

namespace {

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string format_p(double p) { return p < 0.001 ? "<0.001" : fixed(p, 3); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

bool finding_order_confidence(const DisparityFinding& a, const DisparityFinding& b) {
  if (a.p_adjusted != b.p_adjusted) return a.p_adjusted < b.p_adjusted;
  if (std::fabs(a.psi) != std::fabs(b.psi)) return std::fabs(a.psi) > std::fabs(b.psi);
  return a.criterion_string < b.criterion_string;
}

bool finding_order_magnitude(const DisparityFinding& a, const DisparityFinding& b) {
  if (std::fabs(a.psi) != std::fabs(b.psi)) return std::fabs(a.psi) > std::fabs(b.psi);
  if (a.p_adjusted != b.p_adjusted) return a.p_adjusted < b.p_adjusted;
  return a.criterion_string < b.criterion_string;
}

nlohmann::ordered_json params_json(const ReportMetadata& m) {
  nlohmann::ordered_json params;
  params["n_trees"] = m.n_trees;
  params["subsample_fraction"] = m.subsample_fraction;
  params["alpha"] = m.alpha;
  params["mtry"] = m.mtry;
  params["min_node_size"] = m.min_node_size;
  params["min_leaf_size"] = m.min_leaf_size;
  params["max_depth"] =
      m.max_depth == 0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(m.max_depth);
  params["forced_depth"] = m.forced_depth;
  params["forced_split_min_share"] = m.forced_split_min_share;
  params["mc_cutoff"] = m.mc_cutoff;
  params["mc_rounds"] = m.mc_rounds;
  params["sensitive_attributes"] = m.sensitive_attributes;
  return params;
}

std::string config_fingerprint(const ReportMetadata& m) {
  nlohmann::ordered_json doc;
  doc["metric"] = to_string(m.metric);
  doc["ranking"] = to_string(m.ranking);
  doc["n_groups"] = m.n_groups;
  doc["seed"] = m.seed;
  doc["params"] = params_json(m);
  return hex64(fnv1a64(doc.dump()));
}

/// Minimal set of trees whose leaves cover the top findings (greedy; ties
/// prefer the smallest tree id).
std::vector<std::uint32_t> covering_trees(std::span<const DisparityFinding> top) {
  std::set<std::size_t> uncovered;
  for (std::size_t i = 0; i < top.size(); ++i) uncovered.insert(i);
  std::set<std::uint32_t> pool;
  for (const auto& f : top) pool.insert(f.source_trees.begin(), f.source_trees.end());

  std::vector<std::uint32_t> selected;
  while (!uncovered.empty() && !pool.empty()) {
    std::uint32_t best_tree = 0;
    std::size_t best_cover = 0;
    for (std::uint32_t tree : pool) {
      std::size_t cover = 0;
      for (std::size_t i : uncovered)
        if (std::find(top[i].source_trees.begin(), top[i].source_trees.end(), tree) !=
            top[i].source_trees.end())
          ++cover;
      if (cover > best_cover) {
        best_cover = cover;
        best_tree = tree;
      }
    }
    if (best_cover == 0) break;
    selected.push_back(best_tree);
    pool.erase(best_tree);
    for (auto it = uncovered.begin(); it != uncovered.end();) {
      const auto& sources = top[*it].source_trees;
      if (std::find(sources.begin(), sources.end(), best_tree) != sources.end())
        it = uncovered.erase(it);
      else
        ++it;
    }
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

struct D2Totals {
  double n = 0.0, pos = 0.0;                      // statistical parity
  double fp = 0.0, tn = 0.0, fn = 0.0, tp = 0.0;  // equalized odds cells
};

std::optional<double> node_psi(const D2Totals& in, const D2Totals& all, MetricKind metric) {
  if (metric == MetricKind::StatisticalParity) {
    const double n_out = all.n - in.n;
    if (in.n <= 0.0 || n_out <= 0.0) return std::nullopt;
    return in.pos / in.n - (all.pos - in.pos) / n_out;
  }
  EoCounts counts;
  counts.fp_g = static_cast<std::uint64_t>(in.fp);
  counts.tn_g = static_cast<std::uint64_t>(in.tn);
  counts.fn_g = static_cast<std::uint64_t>(in.fn);
  counts.tp_g = static_cast<std::uint64_t>(in.tp);
  counts.fp_out = static_cast<std::uint64_t>(all.fp - in.fp);
  counts.tn_out = static_cast<std::uint64_t>(all.tn - in.tn);
  counts.fn_out = static_cast<std::uint64_t>(all.fn - in.fn);
  counts.tp_out = static_cast<std::uint64_t>(all.tp - in.tp);
  const auto eo = disparity_eo(counts);
  if (!eo) return std::nullopt;
  return eo->eo;
}

D2Totals tally(const AuditDataset& dataset, std::span<const RowIndex> rows, MetricKind metric) {
  D2Totals t;
  t.n = static_cast<double>(rows.size());
  for (RowIndex r : rows) {
    const bool y = dataset.outcome(r) != 0;
    t.pos += y ? 1.0 : 0.0;
    if (metric == MetricKind::EqualizedOdds) {
      const bool truth = dataset.truth(r) != 0;
      if (truth)
        (y ? t.fn : t.tp) += 1.0;
      else
        (y ? t.fp : t.tn) += 1.0;
    }
  }
  return t;
}

TreeView make_tree_view(const AuditDataset& dataset, const SearchTree& tree,
                        std::uint32_t tree_id, std::span<const RowIndex> d2, MetricKind metric) {
  TreeView view;
  view.id = tree_id;
  view.seed = tree.seed();
  view.nodes.resize(tree.nodes().size());
  const D2Totals all = tally(dataset, d2, metric);

  std::function<void(std::uint32_t, std::vector<RowIndex>&&)> walk =
      [&](std::uint32_t id, std::vector<RowIndex>&& rows) {
        const TreeNode& node = tree.node(id);
        TreeViewNode& out = view.nodes[id];
        out.id = id;
        out.parent = node.parent;
        out.left = node.left;
        out.right = node.right;
        const D2Totals in = tally(dataset, rows, metric);
        out.n_d2 = static_cast<std::uint64_t>(in.n);
        out.share_d2 = all.n > 0.0 ? in.n / all.n : 0.0;
        out.psi_d2 = node_psi(in, all, metric);

        if (node.is_leaf()) return;

        const SplitSpec& split = *node.split;
        TreeViewSplit view_split;
        view_split.attribute = dataset.attribute(split.attribute).name;
        std::vector<RowIndex> left_rows, right_rows;
        if (dataset.attribute(split.attribute).kind == AttrKind::Continuous) {
          view_split.kind = AttrKind::Continuous;
          view_split.threshold = std::get<Interval>(split.left.test).upper;
          for (RowIndex r : rows)
            (dataset.continuous_value(split.attribute, r) <= view_split.threshold ? left_rows
                                                                                  : right_rows)
                .push_back(r);
        } else {
          view_split.kind = AttrKind::Categorical;
          view_split.left_levels = std::get<LevelSet>(split.left.test).levels;
          view_split.right_levels = std::get<LevelSet>(split.right.test).levels;
          const auto& schema = dataset.attribute(split.attribute);
          std::vector<std::uint8_t> on_left(schema.levels.size(), 0);
          for (const auto& level : view_split.left_levels) {
            const auto it = std::find(schema.levels.begin(), schema.levels.end(), level);
            on_left[static_cast<std::size_t>(it - schema.levels.begin())] = 1;
          }
          for (RowIndex r : rows)
            (on_left[static_cast<std::size_t>(dataset.category(split.attribute, r))] ? left_rows
                                                                                     : right_rows)
                .push_back(r);
        }
        out.split = std::move(view_split);
        rows.clear();
        walk(node.left, std::move(left_rows));
        walk(node.right, std::move(right_rows));
      };

  walk(0, std::vector<RowIndex>(d2.begin(), d2.end()));
  return view;
}

std::string dot_escape_html(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string dot_escape_quoted(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '\\' || c == '"') out += '\\';
    out += c;
  }
  return out;
}

std::string fill_color(std::optional<double> psi, double max_abs) {
  double t = 0.0;
  if (psi && max_abs > 0.0) t = std::min(1.0, std::fabs(*psi) / max_abs);
  const auto lerp = [t](int from, int to) {
    return static_cast<int>(std::lround(static_cast<double>(from) +
                                        t * static_cast<double>(to - from)));
  };
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", lerp(0xf7, 0xb2), lerp(0xf7, 0x18),
                lerp(0xf7, 0x2b));
  return buf;
}

}  // namespace

std::vector<DisparityFinding> rank(std::vector<DisparityFinding> findings, RankingMode mode) {
  for (const auto& f : findings)
    if (f.untestable)
      throw AuditError("E_STATS", "rank() requires untestable findings to be excluded");
  std::sort(findings.begin(), findings.end(),
            mode == RankingMode::Confidence ? finding_order_confidence : finding_order_magnitude);
  return findings;
}

AuditReport build_report(const AuditDataset& dataset, const CandidateSet& candidates,
                         std::vector<DisparityFinding> findings, const ReportSpec& spec) {
  AuditReport report;

  std::vector<DisparityFinding> testable, untestable;
  for (auto& f : findings) (f.untestable ? untestable : testable).push_back(std::move(f));
  testable = rank(std::move(testable), spec.ranking);
  std::sort(untestable.begin(), untestable.end(),
            [](const DisparityFinding& a, const DisparityFinding& b) {
              return a.criterion_string < b.criterion_string;
            });
  report.ranked_count = testable.size();
  report.findings = std::move(testable);
  report.findings.insert(report.findings.end(), std::make_move_iterator(untestable.begin()),
                         std::make_move_iterator(untestable.end()));

  auto& m = report.metadata;
  m.engine = std::string(kEngineName) + " " + kVersion;
  m.dataset_id = spec.dataset_id;
  m.metric = spec.metric;
  m.ranking = spec.ranking;
  m.n_groups = spec.n_groups;
  m.timestamp = spec.timestamp;
  m.seed = spec.forest.master_seed;
  m.n_trees = spec.forest.n_trees;
  m.subsample_fraction = spec.forest.subsample_fraction;
  m.alpha = spec.forest.tree.alpha;
  m.mtry = spec.forest.tree.resolved_mtry(spec.sensitive_attributes.size());
  m.min_node_size = spec.forest.tree.min_node_size;
  m.min_leaf_size = spec.forest.tree.min_leaf_size;
  m.max_depth = spec.forest.tree.max_depth;
  m.forced_depth = spec.forest.tree.forced_depth;
  m.forced_split_min_share = spec.forest.tree.forced_split_min_share;
  m.mc_cutoff = spec.forest.tree.mc_cutoff;
  m.mc_rounds = spec.forest.tree.mc_rounds;
  m.sensitive_attributes = spec.sensitive_attributes;
  m.d1_size = candidates.d1_rows.size();
  m.d2_size = candidates.d2_rows.size();
  m.methodology = methodology_notes();
  m.config_hash = config_fingerprint(m);

  const std::size_t top_n = std::min(spec.n_groups, report.ranked_count);
  const auto top = std::span<const DisparityFinding>(report.findings.data(), top_n);
  for (std::uint32_t tree_id : covering_trees(top))
    report.trees.push_back(make_tree_view(dataset, candidates.trees[tree_id], tree_id,
                                          candidates.d2_rows, spec.metric));
  return report;
}

nlohmann::ordered_json render_json(const AuditReport& report) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;

  const auto& m = report.metadata;
  nlohmann::ordered_json meta;
  meta["engine"] = m.engine;
  meta["dataset_id"] = m.dataset_id;
  meta["metric"] = to_string(m.metric);
  meta["ranking"] = to_string(m.ranking);
  meta["n_groups"] = m.n_groups;
  meta["timestamp"] = m.timestamp;
  meta["seed"] = m.seed;
  meta["params"] = params_json(m);
  meta["d1_size"] = m.d1_size;
  meta["d2_size"] = m.d2_size;
  meta["config_hash"] = m.config_hash;
  meta["methodology"] = m.methodology;
  doc["metadata"] = std::move(meta);

  nlohmann::ordered_json findings = nlohmann::ordered_json::array();
  std::size_t next_rank = 1;
  for (const auto& f : report.findings) {
    nlohmann::ordered_json out;
    out["rank"] = f.untestable ? nlohmann::ordered_json(nullptr)
                               : nlohmann::ordered_json(next_rank++);
    out["criterion"] = f.criterion_string;
    out["predicates"] = criterion_to_json(f.criterion);
    out["group_count"] = f.group_count;
    out["group_share"] = f.group_share;
    if (f.untestable) {
      out["psi"] = nullptr;
      out["psi_fpr"] = nullptr;
      out["psi_fnr"] = nullptr;
      out["chi2"] = nullptr;
      out["df"] = nullptr;
      out["p_raw"] = nullptr;
      out["p_adjusted"] = nullptr;
    } else {
      out["psi"] = f.psi;
      out["psi_fpr"] =
          f.psi_fpr ? nlohmann::ordered_json(*f.psi_fpr) : nlohmann::ordered_json(nullptr);
      out["psi_fnr"] =
          f.psi_fnr ? nlohmann::ordered_json(*f.psi_fnr) : nlohmann::ordered_json(nullptr);
      out["chi2"] = f.chi2;
      out["df"] = f.df;
      out["p_raw"] = f.p_raw;
      out["p_adjusted"] = f.p_adjusted;
    }
    out["untestable"] = f.untestable;
    if (f.untestable) out["untestable_reason"] = f.untestable_reason;
    out["source_trees"] = f.source_trees;
    findings.push_back(std::move(out));
  }
  doc["findings"] = std::move(findings);

  nlohmann::ordered_json trees = nlohmann::ordered_json::array();
  for (const auto& tree : report.trees) {
    nlohmann::ordered_json t;
    t["id"] = tree.id;
    t["seed"] = tree.seed;
    nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
    for (const auto& node : tree.nodes) {
      nlohmann::ordered_json n;
      n["id"] = node.id;
      n["parent"] = node.parent == kNoNode ? nlohmann::ordered_json(nullptr)
                                           : nlohmann::ordered_json(node.parent);
      n["left"] = node.left == kNoNode ? nlohmann::ordered_json(nullptr)
                                       : nlohmann::ordered_json(node.left);
      n["right"] = node.right == kNoNode ? nlohmann::ordered_json(nullptr)
                                         : nlohmann::ordered_json(node.right);
      if (node.split) {
        nlohmann::ordered_json s;
        s["attribute"] = node.split->attribute;
        if (node.split->kind == AttrKind::Continuous) {
          s["kind"] = "continuous";
          s["threshold"] = node.split->threshold;
        } else {
          s["kind"] = "categorical";
          s["left_levels"] = node.split->left_levels;
          s["right_levels"] = node.split->right_levels;
        }
        n["split"] = std::move(s);
      } else {
        n["split"] = nullptr;
      }
      n["n_d2"] = node.n_d2;
      n["share_d2"] = node.share_d2;
      n["psi_d2"] = node.psi_d2 ? nlohmann::ordered_json(*node.psi_d2)
                                : nlohmann::ordered_json(nullptr);
      nodes.push_back(std::move(n));
    }
    t["nodes"] = std::move(nodes);
    trees.push_back(std::move(t));
  }
  doc["trees"] = std::move(trees);
  return doc;
}

AuditReport report_from_json(const nlohmann::json& doc) {
  AuditReport report;
  const auto& meta = doc.at("metadata");
  auto& m = report.metadata;
  m.engine = meta.at("engine").get<std::string>();
  m.dataset_id = meta.at("dataset_id").get<std::string>();
  m.metric = metric_from_string(meta.at("metric").get<std::string>());
  m.ranking = ranking_from_string(meta.at("ranking").get<std::string>());
  m.n_groups = meta.at("n_groups").get<std::size_t>();
  m.timestamp = meta.at("timestamp").get<std::string>();
  m.seed = meta.at("seed").get<std::uint64_t>();
  const auto& params = meta.at("params");
  m.n_trees = params.at("n_trees").get<std::size_t>();
  m.subsample_fraction = params.at("subsample_fraction").get<double>();
  m.alpha = params.at("alpha").get<double>();
  m.mtry = params.at("mtry").get<std::size_t>();
  m.min_node_size = params.at("min_node_size").get<std::size_t>();
  m.min_leaf_size = params.at("min_leaf_size").get<std::size_t>();
  m.max_depth = params.at("max_depth").is_null() ? 0 : params.at("max_depth").get<std::size_t>();
  m.forced_depth = params.at("forced_depth").get<std::size_t>();
  m.forced_split_min_share = params.at("forced_split_min_share").get<double>();
  m.mc_cutoff = params.at("mc_cutoff").get<std::size_t>();
  m.mc_rounds = params.at("mc_rounds").get<std::size_t>();
  m.sensitive_attributes = params.at("sensitive_attributes").get<std::vector<std::string>>();
  m.d1_size = meta.at("d1_size").get<std::size_t>();
  m.d2_size = meta.at("d2_size").get<std::size_t>();
  m.config_hash = meta.at("config_hash").get<std::string>();
  m.methodology = meta.at("methodology").get<std::vector<std::string>>();

  for (const auto& f : doc.at("findings")) {
    DisparityFinding out;
    out.criterion_string = f.at("criterion").get<std::string>();
    out.criterion = criterion_from_json(f.at("predicates"));
    out.group_count = f.at("group_count").get<std::uint64_t>();
    out.group_share = f.at("group_share").get<double>();
    out.untestable = f.at("untestable").get<bool>();
    if (out.untestable) {
      if (f.contains("untestable_reason"))
        out.untestable_reason = f.at("untestable_reason").get<std::string>();
    } else {
      out.psi = f.at("psi").get<double>();
      if (!f.at("psi_fpr").is_null()) out.psi_fpr = f.at("psi_fpr").get<double>();
      if (!f.at("psi_fnr").is_null()) out.psi_fnr = f.at("psi_fnr").get<double>();
      out.chi2 = f.at("chi2").get<double>();
      out.df = f.at("df").get<int>();
      out.p_raw = f.at("p_raw").get<double>();
      out.p_adjusted = f.at("p_adjusted").get<double>();
      ++report.ranked_count;
    }
    out.source_trees = f.at("source_trees").get<std::vector<std::uint32_t>>();
    report.findings.push_back(std::move(out));
  }

  for (const auto& t : doc.at("trees")) {
    TreeView tree;
    tree.id = t.at("id").get<std::uint32_t>();
    tree.seed = t.at("seed").get<std::uint64_t>();
    for (const auto& n : t.at("nodes")) {
      TreeViewNode node;
      node.id = n.at("id").get<std::uint32_t>();
      node.parent = n.at("parent").is_null() ? kNoNode : n.at("parent").get<std::uint32_t>();
      node.left = n.at("left").is_null() ? kNoNode : n.at("left").get<std::uint32_t>();
      node.right = n.at("right").is_null() ? kNoNode : n.at("right").get<std::uint32_t>();
      if (!n.at("split").is_null()) {
        const auto& s = n.at("split");
        TreeViewSplit split;
        split.attribute = s.at("attribute").get<std::string>();
        if (s.at("kind").get<std::string>() == "continuous") {
          split.kind = AttrKind::Continuous;
          split.threshold = s.at("threshold").get<double>();
        } else {
          split.kind = AttrKind::Categorical;
          split.left_levels = s.at("left_levels").get<std::vector<std::string>>();
          split.right_levels = s.at("right_levels").get<std::vector<std::string>>();
        }
        node.split = std::move(split);
      }
      node.n_d2 = n.at("n_d2").get<std::uint64_t>();
      node.share_d2 = n.at("share_d2").get<double>();
      if (!n.at("psi_d2").is_null()) node.psi_d2 = n.at("psi_d2").get<double>();
      tree.nodes.push_back(std::move(node));
    }
    report.trees.push_back(std::move(tree));
  }
  return report;
}

std::string render_text(const AuditReport& report) {
  const auto& m = report.metadata;
  const bool eo = m.metric == MetricKind::EqualizedOdds;
  std::string out;
  out += std::string(kEngineName) + " audit report\n";
  out += "dataset: " + m.dataset_id + "\n";
  out += "metric: " + to_string(m.metric) + " | ranking: " + to_string(m.ranking) +
         " | N_groups: " + std::to_string(m.n_groups) + "\n";
  out += "seed: " + std::to_string(m.seed) + " | n_trees: " + std::to_string(m.n_trees) +
         " | alpha: " + format_number(m.alpha) +
         " | subsample: " + format_number(m.subsample_fraction) +
         " | mtry: " + std::to_string(m.mtry) + "\n";
  out += "D1/D2: " + std::to_string(m.d1_size) + "/" + std::to_string(m.d2_size) +
         " | timestamp: " + m.timestamp + " | config: " + m.config_hash + "\n\n";

  if (report.ranked_count == 0) {
    out += "no statistically significant disparities located\n";
  } else {
    const std::size_t shown = std::min(m.n_groups, report.ranked_count);

    std::vector<std::vector<std::string>> cells;
    std::vector<std::string> header = {"rank", "group size", eo ? "psi_eo" : "psi_sp"};
    if (eo) {
      header.push_back("psi_fpr");
      header.push_back("psi_fnr");
    }
    header.push_back("p_adj");
    header.push_back("subgroup");
    cells.push_back(header);
    for (std::size_t i = 0; i < shown; ++i) {
      const auto& f = report.findings[i];
      std::vector<std::string> row;
      row.push_back(std::to_string(i + 1));
      row.push_back(std::to_string(f.group_count) + " / " + fixed(100.0 * f.group_share, 2) + "%");
      row.push_back(fixed(f.psi, 3));
      if (eo) {
        row.push_back(f.psi_fpr ? fixed(*f.psi_fpr, 3) : "n/a");
        row.push_back(f.psi_fnr ? fixed(*f.psi_fnr, 3) : "n/a");
      }
      row.push_back(format_p(f.p_adjusted));
      row.push_back(f.criterion_string);
      cells.push_back(std::move(row));
    }

    std::vector<std::size_t> width(cells[0].size(), 0);
    for (const auto& row : cells)
      for (std::size_t c = 0; c + 1 < row.size(); ++c)  // last column left ragged
        width[c] = std::max(width[c], row[c].size());
    for (const auto& row : cells) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        if (c + 1 < row.size()) {
          out += row[c];
          out += std::string(width[c] - row[c].size() + 2, ' ');
        } else {
          out += row[c];
        }
      }
      out += "\n";
    }

    const std::size_t untestable = report.findings.size() - report.ranked_count;
    out += "\n(top " + std::to_string(shown) + " of " + std::to_string(report.ranked_count) +
           " ranked findings";
    if (untestable > 0) out += "; " + std::to_string(untestable) + " untestable candidates";
    out += ")\n";
  }

  out += "\nmethodology:\n";
  for (const auto& note : m.methodology) out += "  - " + note + "\n";
  return out;
}

std::vector<std::pair<std::string, std::string>> render_dot(const AuditReport& report) {
  double max_abs = 0.0;
  for (std::size_t i = 0; i < report.ranked_count; ++i)
    max_abs = std::max(max_abs, std::fabs(report.findings[i].psi));

  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& tree : report.trees) {
    std::string dot;
    dot += "// " + report.metadata.engine + " | config " + report.metadata.config_hash + "\n";
    dot += "digraph audit_tree_" + std::to_string(tree.id) + " {\n";
    dot += "  graph [rankdir=TB];\n";
    dot += "  node [shape=box, style=\"filled,rounded\", fontname=\"Helvetica\"];\n";

    for (const auto& node : tree.nodes) {
      std::string label;
      if (node.split) label += "<B>" + dot_escape_html(node.split->attribute) + "</B><BR/>";
      label += "n=" + std::to_string(node.n_d2) + " (" + fixed(100.0 * node.share_d2, 1) + "%)";
      label += "<BR/>psi=" + (node.psi_d2 ? fixed(*node.psi_d2, 3) : std::string("n/a"));
      dot += "  n" + std::to_string(node.id) + " [label=<" + label + ">, fillcolor=\"" +
             fill_color(node.psi_d2, max_abs) + "\"];\n";
    }
    for (const auto& node : tree.nodes) {
      if (!node.split) continue;
      std::string left_label, right_label;
      if (node.split->kind == AttrKind::Continuous) {
        left_label = "<= " + format_number(node.split->threshold);
        right_label = "> " + format_number(node.split->threshold);
      } else {
        for (std::size_t i = 0; i < node.split->left_levels.size(); ++i) {
          if (i) left_label += ", ";
          left_label += node.split->left_levels[i];
        }
        for (std::size_t i = 0; i < node.split->right_levels.size(); ++i) {
          if (i) right_label += ", ";
          right_label += node.split->right_levels[i];
        }
      }
      dot += "  n" + std::to_string(node.id) + " -> n" + std::to_string(node.left) +
             " [label=\"" + dot_escape_quoted(left_label) + "\"];\n";
      dot += "  n" + std::to_string(node.id) + " -> n" + std::to_string(node.right) +
             " [label=\"" + dot_escape_quoted(right_label) + "\"];\n";
    }
    dot += "}\n";
    out.emplace_back("tree_" + std::to_string(tree.id), std::move(dot));
  }
  return out;
}

}  // namespace fairaudit
