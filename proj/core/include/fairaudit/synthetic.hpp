#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fairaudit/audit.hpp"
#include "fairaudit/dataset.hpp"

namespace fairaudit {

/// Benchmark generator with a disparity on a continuous age interval and on
/// race: y ~ Bernoulli(f_age(x_age) * f_race(x_race) / g), where f_age is
/// elevated on (54 - w/2, 54 + w/2], f_race is {0.4, 0.5, 0.6} over three
/// races, and g normalizes so E[y] = 0.5. Gender is an irrelevant decoy.
struct Dataset1Params {
  std::size_t n = 10000;
  double rho = 0.2;  // induced disparity, [0, 0.5)
  double w = 24.0;   // age interval width in years, (0, 72)
  std::array<double, 3> race_probs{0.5, 0.3, 0.2};
  std::array<double, 3> gender_probs{0.45, 0.45, 0.10};
  std::uint64_t seed = 0;
};

AuditDataset gen_dataset1(const Dataset1Params& params);

/// The age interval carrying the elevated rate, (54 - w/2, 54 + w/2].
std::pair<double, double> dataset1_true_interval(double w);

/// Hidden-intersectionality generator: two races and two genders, outcome
/// rate 0.5 - rho/2 on the diagonal cells {(r1,g1),(r2,g2)} and 0.5 + rho/2
/// off-diagonal; race and gender marginals are both rate-0.5. Age is an
/// irrelevant decoy.
struct Dataset2Params {
  std::size_t n = 10000;
  double rho = 0.2;  // [0, 1]
  std::uint64_t seed = 0;
};

AuditDataset gen_dataset2(const Dataset2Params& params);

/// What a benchmark run must locate. `attributes` must all appear in a
/// finding's criterion; `allowed_extra` may also appear; anything else is a
/// decoy and disqualifies the finding. Continuous attributes carry the true
/// interval and the attribute range (for the tolerance span and for mapping
/// +-infinity bounds to range ends).
struct GroundTruth {
  std::vector<std::string> attributes;
  std::vector<std::string> allowed_extra;
  std::map<std::string, std::pair<double, double>> intervals;
  std::map<std::string, std::pair<double, double>> ranges;
};

GroundTruth ground_truth_from_json(const nlohmann::json& doc);
nlohmann::ordered_json ground_truth_to_json(const GroundTruth& truth);

enum class IntervalScore {
  PerBound,             // each bound within tolerance * span of the true bound
  SymmetricDifference,  // |found interval delta true interval| <= tolerance * span
};

/// True iff some finding in `top` involves exactly the ground-truth
/// attributes (plus allowed extras) and locates every true interval within
/// tolerance (a fraction of the attribute span).
bool locate_success(std::span<const DisparityFinding> top, const GroundTruth& truth,
                    double tolerance, IntervalScore score = IntervalScore::PerBound);

enum class Generator { Dataset1, Dataset2 };

struct BenchmarkConfig {
  Generator generator = Generator::Dataset1;
  std::vector<double> rho_grid{0.2};
  std::vector<double> w_grid{24.0};  // dataset1 only
  std::size_t n = 10000;
  std::size_t runs = 100;
  double tolerance = 0.05;
  IntervalScore interval_score = IntervalScore::PerBound;
  AuditParams engine;  // metric/ranking/n_groups + forest params
  std::optional<GroundTruth> truth_override;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
};

struct BenchmarkCell {
  Generator generator = Generator::Dataset1;
  double rho = 0.0;
  std::optional<double> w;
  std::size_t runs = 0;
  std::size_t successes = 0;
  double success_rate = 0.0;
  double stderr_rate = 0.0;  // binomial standard error
};

/// Location-rate protocol: per grid cell, generate `runs` datasets, run the
/// full audit pipeline, apply locate_success to the top N_groups findings.
std::vector<BenchmarkCell> run_benchmark(const BenchmarkConfig& config);

/// CSV table: generator, rho, w, runs, success_rate, stderr, params_hash.
std::string benchmark_csv(const std::vector<BenchmarkCell>& cells, const BenchmarkConfig& config);

/// Default ground truth for a generator (dataset1: the age interval with
/// race allowed; dataset2: a race-and-gender cell).
GroundTruth default_ground_truth(Generator generator, double w);

}  // namespace fairaudit
