#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "fairaudit/dataset.hpp"
#include "fairaudit/rng.hpp"

namespace fairaudit::testing {

inline std::vector<RowIndex> all_rows(const AuditDataset& data) {
  std::vector<RowIndex> rows(data.row_count());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = static_cast<RowIndex>(i);
  return rows;
}

/// Small mixed-type dataset with outcome independent of everything.
inline AuditDataset null_dataset(std::size_t n, std::uint64_t seed, std::size_t n_categorical = 3,
                                 std::size_t n_continuous = 2) {
  Rng rng(seed);
  AuditDataset::Builder builder("null");
  for (std::size_t k = 0; k < n_continuous; ++k) {
    std::vector<double> values(n);
    for (auto& v : values) v = rng.uniform(0.0, 100.0);
    builder.continuous_column("x" + std::to_string(k), std::move(values));
  }
  for (std::size_t k = 0; k < n_categorical; ++k) {
    const std::size_t levels = 2 + k % 3;
    std::vector<std::string> names;
    for (std::size_t l = 0; l < levels; ++l)
      names.push_back("c" + std::to_string(k) + "_" + std::to_string(l));
    std::vector<std::int32_t> codes(n);
    for (auto& c : codes) c = static_cast<std::int32_t>(rng.below(levels));
    builder.categorical_column("c" + std::to_string(k), std::move(names), std::move(codes));
  }
  std::vector<std::uint8_t> y(n);
  for (auto& v : y) v = rng.bernoulli(0.5) ? 1 : 0;
  builder.outcome(std::move(y));
  return builder.build();
}

/// Kolmogorov-Smirnov distance of a sample against Uniform(0,1).
inline double ks_uniform_statistic(std::vector<double> sample) {
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = sample[i];
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - cdf));
    d = std::max(d, std::fabs(cdf - static_cast<double>(i) / n));
  }
  return d;
}

/// 5%-level critical value for the one-sample KS test.
inline double ks_critical_5pct(std::size_t n) {
  const double sn = std::sqrt(static_cast<double>(n));
  return 1.358 / (sn + 0.12 + 0.11 / sn);
}

/// Textbook Pearson chi-squared on a 2x2 table via expected counts.
inline double pearson_2x2_oracle(double a, double b, double c, double d) {
  const double n = a + b + c + d;
  const double row[2] = {a + b, c + d};
  const double col[2] = {a + c, b + d};
  const double obs[2][2] = {{a, b}, {c, d}};
  double chi2 = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      const double expected = row[i] * col[j] / n;
      chi2 += (obs[i][j] - expected) * (obs[i][j] - expected) / expected;
    }
  return chi2;
}

}  // namespace fairaudit::testing
