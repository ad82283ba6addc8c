#include "fairaudit/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "fairaudit/errors.hpp"
#include "fairaudit/math.hpp"
#include "fairaudit/parallel.hpp"
#include "fairaudit/rng.hpp"

namespace fairaudit {

namespace {

constexpr double kAgeLow = 18.0;
constexpr double kAgeHigh = 90.0;
constexpr double kAgeSpan = kAgeHigh - kAgeLow;  // 72
constexpr double kAgeCenter = 54.0;

int draw_level(Rng& rng, std::span<const double> probs) {
  const double u = rng.next_double();
  double cum = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    cum += probs[i];
    if (u < cum) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size() - 1);
}

void check_probs(std::span<const double> probs, const char* what) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0)) throw ConfigError(std::string(what) + " probabilities must be non-negative");
    sum += p;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw ConfigError(std::string(what) + " probabilities must sum to 1");
}

}  // namespace

std::pair<double, double> dataset1_true_interval(double w) {
  return {kAgeCenter - w / 2.0, kAgeCenter + w / 2.0};
}

AuditDataset gen_dataset1(const Dataset1Params& params) {
  if (!(params.rho >= 0.0 && params.rho < 0.5)) throw ConfigError("dataset1: rho must lie in [0, 0.5)");
  if (!(params.w > 0.0 && params.w < kAgeSpan))
    throw ConfigError("dataset1: w must lie in (0, 72)");
  if (params.n < 1) throw ConfigError("dataset1: n must be positive");
  check_probs(params.race_probs, "race");
  check_probs(params.gender_probs, "gender");

  const double f_age_in = 0.5 + params.rho * (kAgeSpan - params.w) / kAgeSpan;
  const double f_age_out = 0.5 - params.rho * params.w / kAgeSpan;
  const std::array<double, 3> f_race{0.4, 0.5, 0.6};

  // Normalizer so that E[y] = 0.5: with age independent of race and
  // E[f_age] = 0.5 by construction, g is the race-weighted mean of f_race.
  double g = 0.0;
  for (std::size_t r = 0; r < 3; ++r) g += params.race_probs[r] * f_race[r];
  if (!(g > 0.0)) throw ConfigError("dataset1: race probabilities give a zero normalizer");

  const auto [lo, hi] = dataset1_true_interval(params.w);
  for (double fa : {f_age_in, f_age_out}) {
    for (double fr : f_race) {
      const double q = fa * fr / g;
      if (!(q >= 0.0 && q <= 1.0))
        throw ConfigError("dataset1: parameters give Bernoulli rate " + std::to_string(q) +
                          " outside [0,1]; reduce rho or adjust race probabilities");
    }
  }

  Rng rng(params.seed);
  std::vector<double> age(params.n);
  std::vector<std::int32_t> race(params.n), gender(params.n);
  std::vector<std::uint8_t> y(params.n);
  for (std::size_t i = 0; i < params.n; ++i) {
    age[i] = rng.uniform(kAgeLow, kAgeHigh);
    race[i] = draw_level(rng, params.race_probs);
    gender[i] = draw_level(rng, params.gender_probs);
    const double f_age = (age[i] > lo && age[i] <= hi) ? f_age_in : f_age_out;
    const double q = f_age * f_race[static_cast<std::size_t>(race[i])] / g;
    y[i] = rng.bernoulli(q) ? 1 : 0;
  }

  return AuditDataset::Builder("dataset1")
      .continuous_column("age", std::move(age))
      .categorical_column("race", {"r1", "r2", "r3"}, std::move(race))
      .categorical_column("gender", {"g1", "g2", "g3"}, std::move(gender))
      .outcome(std::move(y))
      .build();
}

AuditDataset gen_dataset2(const Dataset2Params& params) {
  if (!(params.rho >= 0.0 && params.rho <= 1.0)) throw ConfigError("dataset2: rho must lie in [0, 1]");
  if (params.n < 1) throw ConfigError("dataset2: n must be positive");

  const double s_diagonal = 0.5 - params.rho / 2.0;
  const double s_off = 0.5 + params.rho / 2.0;

  Rng rng(params.seed);
  std::vector<std::int32_t> race(params.n), gender(params.n);
  std::vector<double> age(params.n);
  std::vector<std::uint8_t> y(params.n);
  for (std::size_t i = 0; i < params.n; ++i) {
    race[i] = rng.next_double() < 0.5 ? 0 : 1;
    gender[i] = rng.next_double() < 0.5 ? 0 : 1;
    age[i] = rng.uniform(kAgeLow, kAgeHigh);
    const double s = race[i] == gender[i] ? s_diagonal : s_off;
    y[i] = rng.bernoulli(s) ? 1 : 0;
  }

  return AuditDataset::Builder("dataset2")
      .categorical_column("race", {"r1", "r2"}, std::move(race))
      .categorical_column("gender", {"g1", "g2"}, std::move(gender))
      .continuous_column("age", std::move(age))
      .outcome(std::move(y))
      .build();
}

GroundTruth ground_truth_from_json(const nlohmann::json& doc) {
  GroundTruth truth;
  truth.attributes = doc.at("attributes").get<std::vector<std::string>>();
  if (doc.contains("allowed_extra"))
    truth.allowed_extra = doc.at("allowed_extra").get<std::vector<std::string>>();
  if (doc.contains("intervals"))
    for (const auto& [name, bounds] : doc.at("intervals").items())
      truth.intervals[name] = {bounds.at(0).get<double>(), bounds.at(1).get<double>()};
  if (doc.contains("ranges"))
    for (const auto& [name, bounds] : doc.at("ranges").items())
      truth.ranges[name] = {bounds.at(0).get<double>(), bounds.at(1).get<double>()};
  for (const auto& [name, bounds] : truth.intervals)
    if (!truth.ranges.count(name))
      throw ConfigError("ground truth interval for '" + name + "' needs a matching range");
  return truth;
}

nlohmann::ordered_json ground_truth_to_json(const GroundTruth& truth) {
  nlohmann::ordered_json doc;
  doc["attributes"] = truth.attributes;
  if (!truth.allowed_extra.empty()) doc["allowed_extra"] = truth.allowed_extra;
  nlohmann::ordered_json intervals = nlohmann::ordered_json::object();
  for (const auto& [name, bounds] : truth.intervals)
    intervals[name] = {bounds.first, bounds.second};
  if (!truth.intervals.empty()) doc["intervals"] = std::move(intervals);
  nlohmann::ordered_json ranges = nlohmann::ordered_json::object();
  for (const auto& [name, bounds] : truth.ranges) ranges[name] = {bounds.first, bounds.second};
  if (!truth.ranges.empty()) doc["ranges"] = std::move(ranges);
  return doc;
}

bool locate_success(std::span<const DisparityFinding> top, const GroundTruth& truth,
                    double tolerance, IntervalScore score) {
  if (!(tolerance > 0.0)) throw ConfigError("tolerance must be positive");

  const std::set<std::string> required(truth.attributes.begin(), truth.attributes.end());
  std::set<std::string> allowed = required;
  allowed.insert(truth.allowed_extra.begin(), truth.allowed_extra.end());

  for (const auto& finding : top) {
    if (finding.untestable) continue;

    std::set<std::string> involved;
    for (const auto& pred : finding.criterion.predicates()) involved.insert(pred.attribute);

    bool ok = std::includes(involved.begin(), involved.end(), required.begin(), required.end()) &&
              std::includes(allowed.begin(), allowed.end(), involved.begin(), involved.end());
    if (!ok) continue;

    for (const auto& [attr, bounds] : truth.intervals) {
      if (!required.count(attr)) continue;
      const auto range = truth.ranges.at(attr);
      const double span = range.second - range.first;
      const double limit = tolerance * span;

      const Interval* found = nullptr;
      for (const auto& pred : finding.criterion.predicates())
        if (pred.attribute == attr && std::holds_alternative<Interval>(pred.test))
          found = &std::get<Interval>(pred.test);
      if (!found) {
        ok = false;
        break;
      }
      // Bounds at +-infinity locate the corresponding range end.
      const double lo = std::isfinite(found->lower) ? found->lower : range.first;
      const double hi = std::isfinite(found->upper) ? found->upper : range.second;
      if (score == IntervalScore::PerBound) {
        if (std::fabs(lo - bounds.first) > limit || std::fabs(hi - bounds.second) > limit) {
          ok = false;
          break;
        }
      } else {
        // Length of the symmetric difference between the two intervals.
        const double inter =
            std::max(0.0, std::min(hi, bounds.second) - std::max(lo, bounds.first));
        const double sym_diff = (hi - lo) + (bounds.second - bounds.first) - 2.0 * inter;
        if (sym_diff > limit) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return true;
  }
  return false;
}

GroundTruth default_ground_truth(Generator generator, double w) {
  GroundTruth truth;
  if (generator == Generator::Dataset1) {
    truth.attributes = {"age"};
    truth.allowed_extra = {"race"};
    truth.intervals["age"] = dataset1_true_interval(w);
    truth.ranges["age"] = {kAgeLow, kAgeHigh};
  } else {
    truth.attributes = {"race", "gender"};
  }
  return truth;
}

std::vector<BenchmarkCell> run_benchmark(const BenchmarkConfig& config) {
  if (config.runs < 1) throw ConfigError("benchmark runs must be positive");
  if (!(config.tolerance > 0.0)) throw ConfigError("benchmark tolerance must be positive");

  struct Cell {
    double rho;
    std::optional<double> w;
  };
  std::vector<Cell> grid;
  if (config.generator == Generator::Dataset1) {
    for (double rho : config.rho_grid)
      for (double w : config.w_grid) grid.push_back({rho, w});
  } else {
    for (double rho : config.rho_grid) grid.push_back({rho, std::nullopt});
  }

  std::vector<BenchmarkCell> cells(grid.size());
  for (std::size_t c = 0; c < grid.size(); ++c) {
    const std::uint64_t cell_seed = child_seed(config.master_seed, c);
    const GroundTruth truth =
        config.truth_override ? *config.truth_override
                              : default_ground_truth(config.generator, grid[c].w.value_or(24.0));

    std::vector<std::uint8_t> success(config.runs, 0);
    parallel_for(config.runs, config.workers, [&](std::size_t run) {
      const std::uint64_t run_seed = child_seed(cell_seed, run);
      AuditDataset data =
          config.generator == Generator::Dataset1
              ? gen_dataset1({config.n, grid[c].rho, *grid[c].w, Dataset1Params{}.race_probs,
                              Dataset1Params{}.gender_probs, child_seed(run_seed, 0)})
              : gen_dataset2({config.n, grid[c].rho, child_seed(run_seed, 0)});

      AuditParams engine = config.engine;
      engine.forest.master_seed = child_seed(run_seed, 1);
      engine.forest.workers = 1;  // parallelism lives at the run level
      const AuditReport report = run_audit(data, engine);

      const std::size_t top_n = std::min(engine.n_groups, report.ranked_count);
      success[run] = locate_success({report.findings.data(), top_n}, truth, config.tolerance,
                                    config.interval_score)
                         ? 1
                         : 0;
    });

    BenchmarkCell& cell = cells[c];
    cell.generator = config.generator;
    cell.rho = grid[c].rho;
    cell.w = grid[c].w;
    cell.runs = config.runs;
    for (std::uint8_t s : success) cell.successes += s;
    cell.success_rate = static_cast<double>(cell.successes) / static_cast<double>(cell.runs);
    cell.stderr_rate =
        std::sqrt(cell.success_rate * (1.0 - cell.success_rate) / static_cast<double>(cell.runs));
  }
  return cells;
}

std::string benchmark_csv(const std::vector<BenchmarkCell>& cells, const BenchmarkConfig& config) {
  nlohmann::ordered_json fingerprint;
  fingerprint["generator"] = config.generator == Generator::Dataset1 ? "dataset1" : "dataset2";
  fingerprint["n"] = config.n;
  fingerprint["runs"] = config.runs;
  fingerprint["tolerance"] = config.tolerance;
  fingerprint["n_trees"] = config.engine.forest.n_trees;
  fingerprint["alpha"] = config.engine.forest.tree.alpha;
  fingerprint["subsample_fraction"] = config.engine.forest.subsample_fraction;
  fingerprint["n_groups"] = config.engine.n_groups;
  fingerprint["master_seed"] = config.master_seed;
  char hash[17];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a64(fingerprint.dump())));

  std::string out = "generator,rho,w,runs,success_rate,stderr,params_hash\n";
  char line[256];
  for (const auto& cell : cells) {
    std::string w_text;
    if (cell.w) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%g", *cell.w);
      w_text = buf;
    }
    std::snprintf(line, sizeof(line), "%s,%g,%s,%zu,%.4f,%.4f,%s\n",
                  cell.generator == Generator::Dataset1 ? "dataset1" : "dataset2", cell.rho,
                  w_text.c_str(), cell.runs, cell.success_rate, cell.stderr_rate, hash);
    out += line;
  }
  return out;
}

}  // namespace fairaudit
