#include "fairaudit/tree.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "fairaudit/errors.hpp"
#include "fairaudit/math.hpp"

namespace fairaudit {

namespace {

struct OutcomeStats {
  std::size_t n = 0;
  double sum = 0.0;      // number of positive outcomes
  double variance = 0.0; // population variance of y on the rows
};

OutcomeStats outcome_stats(const AuditDataset& dataset, std::span<const RowIndex> rows) {
  OutcomeStats s;
  s.n = rows.size();
  for (RowIndex r : rows) s.sum += dataset.outcome(r);
  if (s.n > 0) {
    const double mean = s.sum / static_cast<double>(s.n);
    s.variance = mean * (1.0 - mean);
  }
  return s;
}

bool attribute_constant(const AuditDataset& dataset, std::span<const RowIndex> rows,
                        std::size_t attr) {
  if (rows.size() < 2) return true;
  if (dataset.attribute(attr).kind == AttrKind::Continuous) {
    const double first = dataset.continuous_value(attr, rows[0]);
    for (RowIndex r : rows)
      if (dataset.continuous_value(attr, r) != first) return false;
  } else {
    const std::int32_t first = dataset.category(attr, rows[0]);
    for (RowIndex r : rows)
      if (dataset.category(attr, r) != first) return false;
  }
  return true;
}

/// Standardized two-sample statistic |T - mu| / sigma for a binary partition
/// with n_left rows summing to s_left, against node totals.
double two_sample_statistic(double n, double s, double variance, double n_left, double s_left) {
  const double mu = n_left * s / n;
  const double sigma2 = variance * n * n_left * (n - n_left) / (n * (n - 1.0));
  if (sigma2 <= 0.0) return 0.0;
  return std::fabs(s_left - mu) / std::sqrt(sigma2);
}

}  // namespace

void TreeParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
  if (min_leaf_size < 1) throw ConfigError("min_leaf_size must be at least 1");
  if (2 * min_leaf_size > min_node_size)
    throw ConfigError("min_node_size must be at least twice min_leaf_size");
  if (!(forced_split_min_share >= 0.0 && forced_split_min_share < 0.5))
    throw ConfigError("forced_split_min_share must lie in [0, 0.5)");
  if (mc_rounds < 1) throw ConfigError("mc_rounds must be positive");
}

std::size_t TreeParams::resolved_mtry(std::size_t n_candidates) const {
  if (mtry > 0) return std::min(mtry, n_candidates);
  return static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(std::max<std::size_t>(n_candidates, 1)))));
}

double attribute_association_pvalue(const AuditDataset& dataset, std::span<const RowIndex> rows,
                                    std::size_t attribute, Rng& mc_rng, std::size_t mc_cutoff,
                                    std::size_t mc_rounds) {
  const std::size_t n = rows.size();
  if (n < 2) return 1.0;
  const OutcomeStats y = outcome_stats(dataset, rows);
  if (y.variance <= 0.0) return 1.0;  // constant outcome: independence unfalsifiable
  if (attribute_constant(dataset, rows, attribute)) return 1.0;

  const double dn = static_cast<double>(n);
  const bool continuous = dataset.attribute(attribute).kind == AttrKind::Continuous;

  // Closed-form permutation moments of the linear statistic, plus a reusable
  // standardizer so the Monte-Carlo path shares the exact same statistic.
  std::function<double(const std::vector<std::uint8_t>&)> statistic;
  std::size_t df = 1;

  if (continuous) {
    std::vector<double> g(n);
    double sg = 0.0, sgg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      g[i] = dataset.continuous_value(attribute, rows[i]);
      sg += g[i];
      sgg += g[i] * g[i];
    }
    const double mu = sg * y.sum / dn;
    const double sigma2 = y.variance * dn * (dn * sgg - sg * sg) / (dn * (dn - 1.0));
    if (sigma2 <= 0.0) return 1.0;
    statistic = [g = std::move(g), mu, sigma2](const std::vector<std::uint8_t>& yv) {
      double t = 0.0;
      for (std::size_t i = 0; i < yv.size(); ++i) t += yv[i] ? g[i] : 0.0;
      const double d = t - mu;
      return d * d / sigma2;
    };
    df = 1;
  } else {
    const std::size_t n_levels = dataset.attribute(attribute).levels.size();
    std::vector<std::size_t> count(n_levels, 0);
    std::vector<std::int32_t> code(n);
    for (std::size_t i = 0; i < n; ++i) {
      code[i] = dataset.category(attribute, rows[i]);
      ++count[static_cast<std::size_t>(code[i])];
    }
    std::vector<std::int32_t> slot_of(n_levels, -1);
    std::vector<double> level_n;
    for (std::size_t l = 0; l < n_levels; ++l) {
      if (count[l] == 0) continue;
      slot_of[l] = static_cast<std::int32_t>(level_n.size());
      level_n.push_back(static_cast<double>(count[l]));
    }
    const std::size_t lp = level_n.size();
    if (lp < 2) return 1.0;

    std::vector<double> mu(lp);
    std::vector<double> cov(lp * lp);
    for (std::size_t a = 0; a < lp; ++a) {
      mu[a] = level_n[a] * y.sum / dn;
      for (std::size_t b = 0; b < lp; ++b) {
        const double diag = a == b ? dn * level_n[a] : 0.0;
        cov[a * lp + b] = y.variance * dn * (diag - level_n[a] * level_n[b]) / (dn * (dn - 1.0));
      }
    }
    const SymmetricEigen eig = symmetric_eigen(cov, lp);
    double max_abs = 0.0;
    for (double v : eig.values) max_abs = std::max(max_abs, std::fabs(v));
    const double tol = static_cast<double>(lp) * max_abs * 1e-12;
    std::vector<double> kept_values;
    std::vector<double> kept_vectors;  // kept eigenvectors, column-packed
    for (std::size_t j = 0; j < lp; ++j) {
      if (std::fabs(eig.values[j]) <= tol) continue;
      kept_values.push_back(eig.values[j]);
      for (std::size_t i = 0; i < lp; ++i) kept_vectors.push_back(eig.vectors[i * lp + j]);
    }
    df = kept_values.size();
    if (df == 0) return 1.0;

    statistic = [code = std::move(code), slot_of = std::move(slot_of), mu = std::move(mu),
                 kept_values = std::move(kept_values), kept_vectors = std::move(kept_vectors),
                 lp](const std::vector<std::uint8_t>& yv) {
      std::vector<double> d(lp, 0.0);
      for (std::size_t i = 0; i < yv.size(); ++i)
        if (yv[i]) d[static_cast<std::size_t>(slot_of[static_cast<std::size_t>(code[i])])] += 1.0;
      for (std::size_t a = 0; a < lp; ++a) d[a] -= mu[a];
      double c = 0.0;
      for (std::size_t j = 0; j < kept_values.size(); ++j) {
        double proj = 0.0;
        for (std::size_t i = 0; i < lp; ++i) proj += kept_vectors[j * lp + i] * d[i];
        c += proj * proj / kept_values[j];
      }
      return c;
    };
  }

  std::vector<std::uint8_t> yv(n);
  for (std::size_t i = 0; i < n; ++i) yv[i] = dataset.outcome(rows[i]);
  const double observed = statistic(yv);

  if (n >= mc_cutoff) return chisq_sf(observed, static_cast<double>(df));

  // Small nodes: asymptotics are unreliable, estimate the permutation
  // distribution of the same statistic directly.
  std::size_t at_least = 0;
  for (std::size_t b = 0; b < mc_rounds; ++b) {
    mc_rng.shuffle(std::span<std::uint8_t>(yv));
    if (statistic(yv) >= observed - 1e-12) ++at_least;
  }
  return static_cast<double>(1 + at_least) / static_cast<double>(mc_rounds + 1);
}

namespace {

struct BestCandidate {
  std::size_t attr = 0;
  double corrected_p = 1.0;
};

/// Smallest Bonferroni-corrected p among non-constant candidates, without
/// the alpha gate.
std::optional<BestCandidate> best_association(const AuditDataset& dataset,
                                              std::span<const RowIndex> rows,
                                              std::span<const std::size_t> candidates,
                                              const TreeParams& params, Rng& mc_rng) {
  struct Scored {
    std::size_t attr;
    double p;
  };
  std::vector<Scored> scored;
  for (std::size_t attr : candidates) {
    if (attribute_constant(dataset, rows, attr)) continue;
    scored.push_back(
        {attr, attribute_association_pvalue(dataset, rows, attr, mc_rng, params.mc_cutoff,
                                            params.mc_rounds)});
  }
  if (scored.empty()) return std::nullopt;

  const double m = static_cast<double>(scored.size());
  const Scored* best = nullptr;
  for (const auto& s : scored) {
    if (!best) {
      best = &s;
      continue;
    }
    const double a = std::min(1.0, s.p * m);
    const double b = std::min(1.0, best->p * m);
    if (a < b || (a == b && dataset.attribute(s.attr).name < dataset.attribute(best->attr).name))
      best = &s;
  }
  return BestCandidate{best->attr, std::min(1.0, best->p * m)};
}

}  // namespace

std::optional<std::size_t> select_split_attribute(const AuditDataset& dataset,
                                                  std::span<const RowIndex> rows,
                                                  std::span<const std::size_t> candidates,
                                                  const TreeParams& params, Rng& mc_rng) {
  const auto best = best_association(dataset, rows, candidates, params, mc_rng);
  if (!best || best->corrected_p > params.alpha) return std::nullopt;
  return best->attr;
}

namespace {

std::optional<SplitSpec> best_continuous_split(const AuditDataset& dataset,
                                               std::span<const RowIndex> rows, std::size_t attr,
                                               const TreeParams& params, const OutcomeStats& y) {
  struct ValueOutcome {
    double value;
    std::uint8_t y;
  };
  std::vector<ValueOutcome> sorted(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    sorted[i] = {dataset.continuous_value(attr, rows[i]), dataset.outcome(rows[i])};
  std::sort(sorted.begin(), sorted.end(),
            [](const ValueOutcome& a, const ValueOutcome& b) { return a.value < b.value; });

  const double n = static_cast<double>(rows.size());
  double best_stat = -1.0;
  double best_threshold = 0.0;
  double n_left = 0.0, s_left = 0.0;

  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    n_left += 1.0;
    s_left += sorted[i].y;
    if (sorted[i].value == sorted[i + 1].value) continue;  // not a boundary
    if (n_left < static_cast<double>(params.min_leaf_size)) continue;
    if (n - n_left < static_cast<double>(params.min_leaf_size)) break;
    const double stat = two_sample_statistic(n, y.sum, y.variance, n_left, s_left);
    if (stat > best_stat) {  // scan ascending: ties keep the smaller threshold
      best_stat = stat;
      best_threshold = (sorted[i].value + sorted[i + 1].value) / 2.0;
    }
  }
  if (best_stat < 0.0) return std::nullopt;

  SplitSpec spec;
  spec.attribute = attr;
  spec.statistic = best_stat;
  Interval left;
  left.upper = best_threshold;
  Interval right;
  right.lower = best_threshold;
  const std::string& name = dataset.attribute(attr).name;
  spec.left = {name, left};
  spec.right = {name, right};
  return spec;
}

constexpr std::size_t kExhaustivePartitionLevels = 6;

std::optional<SplitSpec> best_categorical_split(const AuditDataset& dataset,
                                                std::span<const RowIndex> rows, std::size_t attr,
                                                const TreeParams& params, const OutcomeStats& y) {
  const auto& schema = dataset.attribute(attr);
  const std::size_t n_levels = schema.levels.size();
  std::vector<double> count(n_levels, 0.0), positives(n_levels, 0.0);
  for (RowIndex r : rows) {
    const auto code = static_cast<std::size_t>(dataset.category(attr, r));
    count[code] += 1.0;
    positives[code] += dataset.outcome(r);
  }
  std::vector<std::size_t> present;
  for (std::size_t l = 0; l < n_levels; ++l)
    if (count[l] > 0.0) present.push_back(l);
  if (present.size() < 2) return std::nullopt;

  const double n = static_cast<double>(rows.size());
  const double min_leaf = static_cast<double>(params.min_leaf_size);

  struct Candidate {
    double stat = -1.0;
    std::vector<std::size_t> left;        // present level codes on the canonical side
    std::vector<std::string> left_names;  // sorted, for deterministic tie-breaks
  };
  Candidate best;

  auto sorted_names = [&](const std::vector<std::size_t>& codes) {
    std::vector<std::string> names;
    names.reserve(codes.size());
    for (std::size_t l : codes) names.push_back(schema.levels[l]);
    std::sort(names.begin(), names.end());
    return names;
  };
  auto consider = [&](const std::vector<std::size_t>& side) {
    double n_side = 0.0, s_side = 0.0;
    for (std::size_t l : side) {
      n_side += count[l];
      s_side += positives[l];
    }
    if (n_side < min_leaf || n - n_side < min_leaf) return;
    const double stat = two_sample_statistic(n, y.sum, y.variance, n_side, s_side);
    if (stat < best.stat) return;

    std::vector<std::size_t> other;
    for (std::size_t l : present)
      if (std::find(side.begin(), side.end(), l) == side.end()) other.push_back(l);

    // Canonical "left": fewer levels; on equal sizes, the side whose sorted
    // level names compare smaller.
    std::vector<std::size_t> left;
    std::vector<std::string> left_names;
    if (side.size() != other.size()) {
      left = side.size() < other.size() ? side : other;
      left_names = sorted_names(left);
    } else {
      auto side_names = sorted_names(side);
      auto other_names = sorted_names(other);
      if (side_names < other_names) {
        left = side;
        left_names = std::move(side_names);
      } else {
        left = other;
        left_names = std::move(other_names);
      }
    }

    if (stat > best.stat ||
        (best.stat >= 0.0 && (left.size() < best.left.size() ||
                              (left.size() == best.left.size() && left_names < best.left_names)))) {
      best.stat = stat;
      best.left = std::move(left);
      best.left_names = std::move(left_names);
    }
  };

  if (present.size() <= kExhaustivePartitionLevels) {
    // All binary partitions; anchoring the first present level to one side
    // enumerates each partition exactly once.
    const std::size_t lp = present.size();
    const std::uint32_t full = (1u << (lp - 1)) - 1u;
    for (std::uint32_t mask = 0; mask <= full; ++mask) {
      if (mask == full) continue;  // all levels on one side is not a partition
      std::vector<std::size_t> side{present[0]};
      for (std::size_t j = 1; j < lp; ++j)
        if (mask & (1u << (j - 1))) side.push_back(present[j]);
      consider(side);
    }
  } else {
    // Too many levels for exhaustion: order by mean outcome and scan cuts.
    std::vector<std::size_t> ordered = present;
    std::sort(ordered.begin(), ordered.end(), [&](std::size_t a, std::size_t b) {
      const double ma = positives[a] / count[a];
      const double mb = positives[b] / count[b];
      if (ma != mb) return ma < mb;
      return schema.levels[a] < schema.levels[b];
    });
    for (std::size_t k = 1; k < ordered.size(); ++k)
      consider(std::vector<std::size_t>(ordered.begin(), ordered.begin() + k));
  }

  if (best.stat < 0.0) return std::nullopt;

  std::sort(best.left.begin(), best.left.end());
  std::vector<std::uint8_t> on_left(n_levels, 0);
  for (std::size_t l : best.left) on_left[l] = 1;

  LevelSet left_set, right_set;
  for (std::size_t l = 0; l < n_levels; ++l)
    (on_left[l] ? left_set : right_set).levels.push_back(schema.levels[l]);
  std::sort(left_set.levels.begin(), left_set.levels.end());
  std::sort(right_set.levels.begin(), right_set.levels.end());

  SplitSpec spec;
  spec.attribute = attr;
  spec.statistic = best.stat;
  spec.left = {schema.name, std::move(left_set)};
  spec.right = {schema.name, std::move(right_set)};
  return spec;
}

}  // namespace

std::optional<SplitSpec> best_binary_split(const AuditDataset& dataset,
                                           std::span<const RowIndex> rows, std::size_t attribute,
                                           const TreeParams& params) {
  if (rows.size() < 2 * params.min_leaf_size) return std::nullopt;
  const OutcomeStats y = outcome_stats(dataset, rows);
  return dataset.attribute(attribute).kind == AttrKind::Continuous
             ? best_continuous_split(dataset, rows, attribute, params, y)
             : best_categorical_split(dataset, rows, attribute, params, y);
}

SearchTree grow_tree(const AuditDataset& dataset, std::vector<RowIndex> rows,
                     const TreeParams& params) {
  params.validate();
  const std::vector<std::size_t> sensitive = dataset.sensitive_attributes();
  if (sensitive.empty()) throw ConfigError("no attribute is flagged sensitive");

  SearchTree tree;
  tree.seed_ = params.seed;
  Rng rng(params.seed);

  const double n_root = static_cast<double>(rows.size());
  double s_root = 0.0;
  for (RowIndex r : rows) s_root += dataset.outcome(r);
  const std::size_t mtry = params.resolved_mtry(sensitive.size());

  // Depth-first recursion with a single sequential RNG keeps trees a pure
  // function of (rows, dataset, params).
  std::function<std::uint32_t(std::vector<RowIndex>&&, std::uint32_t, std::uint32_t)> build =
      [&](std::vector<RowIndex>&& node_rows, std::uint32_t depth,
          std::uint32_t parent) -> std::uint32_t {
    const auto id = static_cast<std::uint32_t>(tree.nodes_.size());
    TreeNode node;
    node.id = id;
    node.parent = parent;
    node.depth = depth;
    node.n = static_cast<std::uint32_t>(node_rows.size());
    double s = 0.0;
    for (RowIndex r : node_rows) s += dataset.outcome(r);
    node.positives = static_cast<std::uint32_t>(s);
    const double n = static_cast<double>(node_rows.size());
    node.psi = (n_root > n && n > 0.0) ? s / n - (s_root - s) / (n_root - n) : 0.0;
    tree.nodes_.push_back(node);

    if (node_rows.size() < params.min_node_size) return id;
    if (params.max_depth > 0 && depth >= params.max_depth) return id;
    if (s == 0.0 || s == n) return id;  // constant outcome

    std::vector<std::size_t> candidates =
        mtry >= sensitive.size() ? sensitive : rng.sample_without_replacement(sensitive, mtry);
    std::sort(candidates.begin(), candidates.end());

    std::optional<std::size_t> selected;
    const bool forced = depth < params.forced_depth;
    if (forced) {
      // Exploration levels: take the strongest drawn attribute unconditionally.
      const auto best = best_association(dataset, node_rows, candidates, params, rng);
      if (best) selected = best->attr;
    } else {
      selected = select_split_attribute(dataset, node_rows, candidates, params, rng);
    }
    if (!selected) return id;
    TreeParams split_params = params;
    if (forced)
      split_params.min_leaf_size = std::max(
          params.min_leaf_size,
          static_cast<std::size_t>(std::ceil(params.forced_split_min_share *
                                             static_cast<double>(node_rows.size()))));
    auto split = best_binary_split(dataset, node_rows, *selected, split_params);
    if (!split) return id;

    // Stable partition keeps child row order deterministic.
    std::vector<RowIndex> left_rows, right_rows;
    if (dataset.attribute(*selected).kind == AttrKind::Continuous) {
      const double threshold = std::get<Interval>(split->left.test).upper;
      for (RowIndex r : node_rows)
        (dataset.continuous_value(*selected, r) <= threshold ? left_rows : right_rows).push_back(r);
    } else {
      const auto& schema = dataset.attribute(*selected);
      std::vector<std::uint8_t> on_left(schema.levels.size(), 0);
      for (const auto& level : std::get<LevelSet>(split->left.test).levels) {
        const auto it = std::find(schema.levels.begin(), schema.levels.end(), level);
        on_left[static_cast<std::size_t>(it - schema.levels.begin())] = 1;
      }
      for (RowIndex r : node_rows)
        (on_left[static_cast<std::size_t>(dataset.category(*selected, r))] ? left_rows
                                                                           : right_rows)
            .push_back(r);
    }
    node_rows.clear();
    node_rows.shrink_to_fit();

    tree.nodes_[id].split = std::move(*split);
    const std::uint32_t left_id = build(std::move(left_rows), depth + 1, id);
    const std::uint32_t right_id = build(std::move(right_rows), depth + 1, id);
    tree.nodes_[id].left = left_id;
    tree.nodes_[id].right = right_id;
    return id;
  };

  build(std::move(rows), 0, kNoNode);
  return tree;
}

std::size_t SearchTree::leaf_count() const {
  std::size_t count = 0;
  for (const auto& node : nodes_)
    if (node.is_leaf()) ++count;
  return count;
}

std::vector<std::pair<std::uint32_t, Criterion>> leaf_criteria(const SearchTree& tree) {
  std::vector<std::pair<std::uint32_t, Criterion>> out;
  std::vector<Predicate> path;

  std::function<void(std::uint32_t)> walk = [&](std::uint32_t id) {
    const TreeNode& node = tree.node(id);
    if (node.is_leaf()) {
      const auto canonical = canonicalize(Criterion(path));
      if (!canonical)
        throw AuditError("E_INTERNAL", "unsatisfiable criterion on a populated leaf");
      out.emplace_back(id, *canonical);
      return;
    }
    path.push_back(node.split->left);
    walk(node.left);
    path.pop_back();
    path.push_back(node.split->right);
    walk(node.right);
    path.pop_back();
  };

  if (!tree.nodes().empty()) walk(0);
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  return out;
}

std::vector<Criterion> terminal_criteria(const SearchTree& tree) {
  std::vector<Criterion> out;
  for (auto& [id, criterion] : leaf_criteria(tree)) out.push_back(std::move(criterion));
  return out;
}

}  // namespace fairaudit
