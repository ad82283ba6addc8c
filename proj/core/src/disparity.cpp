#include "fairaudit/disparity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairaudit/errors.hpp"
#include "fairaudit/math.hpp"

namespace fairaudit {

namespace {

constexpr double kLogFloor = 1e-300;  // p-value clamp before Fisher's log

/// Pearson chi-squared for the 2x2 table [[a, b], [c, d]]; nullopt when a
/// row or column marginal is zero.
std::optional<Chi2Result> pearson_2x2(double a, double b, double c, double d) {
  const double n = a + b + c + d;
  const double r1 = a + b, r2 = c + d, c1 = a + c, c2 = b + d;
  if (r1 <= 0.0 || r2 <= 0.0 || c1 <= 0.0 || c2 <= 0.0) return std::nullopt;
  const double delta = a * d - b * c;
  Chi2Result out;
  out.chi2 = n * delta * delta / (r1 * r2 * c1 * c2);
  out.df = 1;
  out.p = chisq_sf(out.chi2, 1.0);
  return out;
}

}  // namespace

std::optional<double> disparity_sp(const SpCounts& counts) {
  const double in_total = static_cast<double>(counts.p_g + counts.n_g);
  const double out_total = static_cast<double>(counts.p_out + counts.n_out);
  if (in_total <= 0.0 || out_total <= 0.0) return std::nullopt;
  return static_cast<double>(counts.p_g) / in_total - static_cast<double>(counts.p_out) / out_total;
}

std::optional<EoDisparity> disparity_eo(const EoCounts& counts) {
  const double neg_g = static_cast<double>(counts.fp_g + counts.tn_g);
  const double pos_g = static_cast<double>(counts.fn_g + counts.tp_g);
  const double neg_out = static_cast<double>(counts.fp_out + counts.tn_out);
  const double pos_out = static_cast<double>(counts.fn_out + counts.tp_out);
  if (neg_g <= 0.0 || pos_g <= 0.0 || neg_out <= 0.0 || pos_out <= 0.0) return std::nullopt;
  EoDisparity out;
  out.fpr = static_cast<double>(counts.fp_g) / neg_g - static_cast<double>(counts.fp_out) / neg_out;
  out.fnr = static_cast<double>(counts.fn_g) / pos_g - static_cast<double>(counts.fn_out) / pos_out;
  out.eo = 0.5 * (std::fabs(out.fpr) + std::fabs(out.fnr));
  return out;
}

std::optional<Chi2Result> chi2_sp(const SpCounts& counts) {
  return pearson_2x2(static_cast<double>(counts.p_g), static_cast<double>(counts.n_g),
                     static_cast<double>(counts.p_out), static_cast<double>(counts.n_out));
}

std::optional<Chi2Result> chi2_eo(const EoCounts& counts) {
  const auto fpr = pearson_2x2(static_cast<double>(counts.fp_g), static_cast<double>(counts.tn_g),
                               static_cast<double>(counts.fp_out),
                               static_cast<double>(counts.tn_out));
  const auto fnr = pearson_2x2(static_cast<double>(counts.fn_g), static_cast<double>(counts.tp_g),
                               static_cast<double>(counts.fn_out),
                               static_cast<double>(counts.tp_out));
  if (!fpr || !fnr) return std::nullopt;
  Chi2Result out;
  out.chi2 = -2.0 * (std::log(std::max(fpr->p, kLogFloor)) + std::log(std::max(fnr->p, kLogFloor)));
  out.df = 4;
  out.p = chisq_sf(out.chi2, 4.0);
  return out;
}

std::vector<double> benjamini_hochberg(const std::vector<double>& p_raw) {
  const std::size_t m = p_raw.size();
  for (double p : p_raw)
    if (!(p >= 0.0 && p <= 1.0))
      throw AuditError("E_STATS", "p-value outside [0,1] passed to benjamini_hochberg");
  if (m == 0) return {};

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (p_raw[a] != p_raw[b]) return p_raw[a] < p_raw[b];
    return a < b;
  });

  std::vector<double> adjusted(m);
  double running = 1.0;
  for (std::size_t i = m; i-- > 0;) {
    const double scaled = p_raw[order[i]] * static_cast<double>(m) / static_cast<double>(i + 1);
    running = std::min(running, std::min(scaled, 1.0));
    // Guard the adjusted >= raw invariant against rounding in scaled.
    adjusted[order[i]] = std::max(running, p_raw[order[i]]);
  }
  return adjusted;
}

std::vector<DisparityFinding> evaluate_candidates(const CandidateSet& candidates,
                                                  const AuditDataset& dataset, MetricKind metric) {
  if (requires_truth(metric) && !dataset.has_truth())
    throw ConfigError("equalized-odds requires a dataset with truth labels");

  const auto& d2 = candidates.d2_rows;
  const double d2_size = static_cast<double>(d2.size());

  std::vector<DisparityFinding> findings;
  findings.reserve(candidates.subgroups.size());

  for (const auto& subgroup : candidates.subgroups) {
    DisparityFinding f;
    f.criterion = subgroup.criterion;
    f.criterion_string = subgroup.criterion_string;
    f.source_trees = subgroup.source_trees;

    // members is a sorted subset of d2; walk the two in lockstep.
    const auto members = matching_rows(subgroup.criterion, dataset, d2);
    f.group_count = members.size();
    f.group_share = d2_size > 0.0 ? static_cast<double>(members.size()) / d2_size : 0.0;

    if (metric == MetricKind::StatisticalParity) {
      SpCounts counts;
      std::size_t mi = 0;
      for (RowIndex r : d2) {
        const bool in_group = mi < members.size() && members[mi] == r;
        if (in_group) ++mi;
        const bool positive = dataset.outcome(r) != 0;
        if (in_group)
          (positive ? counts.p_g : counts.n_g) += 1;
        else
          (positive ? counts.p_out : counts.n_out) += 1;
      }
      const auto psi = disparity_sp(counts);
      const auto chi2 = chi2_sp(counts);
      if (!psi || !chi2) {
        f.untestable = true;
        f.untestable_reason = !psi ? "empty group or complement on D2"
                                   : "degenerate outcome margin on D2";
      } else {
        f.psi = *psi;
        f.chi2 = chi2->chi2;
        f.df = chi2->df;
        f.p_raw = chi2->p;
      }
    } else {
      EoCounts counts;
      std::size_t mi = 0;
      for (RowIndex r : d2) {
        const bool in_group = mi < members.size() && members[mi] == r;
        if (in_group) ++mi;
        const bool wrong = dataset.outcome(r) != 0;
        const bool positive_truth = dataset.truth(r) != 0;
        if (in_group) {
          if (positive_truth)
            (wrong ? counts.fn_g : counts.tp_g) += 1;
          else
            (wrong ? counts.fp_g : counts.tn_g) += 1;
        } else {
          if (positive_truth)
            (wrong ? counts.fn_out : counts.tp_out) += 1;
          else
            (wrong ? counts.fp_out : counts.tn_out) += 1;
        }
      }
      const auto psi = disparity_eo(counts);
      const auto chi2 = chi2_eo(counts);
      if (!psi || !chi2) {
        f.untestable = true;
        f.untestable_reason =
            !psi ? "undefined error rate on D2" : "degenerate error-rate table on D2";
      } else {
        f.psi = psi->eo;
        f.psi_fpr = psi->fpr;
        f.psi_fnr = psi->fnr;
        f.chi2 = chi2->chi2;
        f.df = chi2->df;
        f.p_raw = chi2->p;
      }
    }
    findings.push_back(std::move(f));
  }

  // One BH family per audit: exactly the candidates that produced a test.
  std::vector<double> p_raw;
  std::vector<std::size_t> testable;
  for (std::size_t i = 0; i < findings.size(); ++i) {
    if (findings[i].untestable) continue;
    testable.push_back(i);
    p_raw.push_back(findings[i].p_raw);
  }
  const auto adjusted = benjamini_hochberg(p_raw);
  for (std::size_t j = 0; j < testable.size(); ++j)
    findings[testable[j]].p_adjusted = adjusted[j];

  return findings;
}

}  // namespace fairaudit
