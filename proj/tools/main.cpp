// Command-line front end: audit, generate, benchmark, render.

#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fairaudit/audit.hpp"
#include "fairaudit/csv.hpp"
#include "fairaudit/errors.hpp"
#include "fairaudit/math.hpp"
#include "fairaudit/parallel.hpp"
#include "fairaudit/synthetic.hpp"
#include "fairaudit/version.hpp"

namespace {

using namespace fairaudit;

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t next = text.find(',', pos);
    if (next == std::string::npos) next = text.size();
    std::string item = text.substr(pos, next - pos);
    const auto b = item.find_first_not_of(" \t");
    if (b != std::string::npos) {
      const auto e = item.find_last_not_of(" \t");
      out.push_back(item.substr(b, e - b + 1));
    }
    pos = next + 1;
  }
  return out;
}

std::uint64_t default_seed() {
  if (const char* env = std::getenv("FAIRAUDIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      throw ConfigError("FAIRAUDIT_SEED is not an unsigned integer");
    }
  }
  return 0;
}

std::string resolve_timestamp(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  std::time_t t = std::time(nullptr);
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
    try {
      t = static_cast<std::time_t>(std::stoll(env));
    } catch (...) {
      throw ConfigError("SOURCE_DATE_EPOCH is not an integer");
    }
  }
  char buf[32];
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw AuditError("E_IO", "cannot write '" + path + "'");
  out << content;
}

struct SchemaFlags {
  std::string schema_path;
  std::string continuous, categorical;
  std::string outcome_col, truth_col, predicted_col, actual_col;
  std::string outcome_positive, truth_positive, predicted_positive, actual_positive;

  SchemaDecl resolve() const {
    if (!schema_path.empty()) {
      if (!continuous.empty() || !categorical.empty() || !outcome_col.empty())
        throw ConfigError("--schema cannot be combined with inline schema flags");
      return schema_from_json_file(schema_path);
    }
    SchemaDecl decl;
    auto add = [&](const std::string& name, ColumnRole role, const std::string& positive) {
      ColumnSpec spec;
      spec.role = role;
      spec.positive = split_list(positive);
      if (!decl.columns.emplace(name, std::move(spec)).second)
        throw ConfigError("column '" + name + "' assigned more than one role");
    };
    for (const auto& name : split_list(continuous)) add(name, ColumnRole::Continuous, "");
    for (const auto& name : split_list(categorical)) add(name, ColumnRole::Categorical, "");
    if (!outcome_col.empty()) add(outcome_col, ColumnRole::Outcome, outcome_positive);
    if (!truth_col.empty()) add(truth_col, ColumnRole::Truth, truth_positive);
    if (!predicted_col.empty()) add(predicted_col, ColumnRole::Predicted, predicted_positive);
    if (!actual_col.empty()) add(actual_col, ColumnRole::Actual, actual_positive);
    if (decl.columns.empty())
      throw ConfigError("no schema given: pass --schema or inline column flags");
    return decl;
  }
};

struct EngineFlags {
  std::size_t n_trees = 25;
  double alpha = 0.1;
  double subsample = 0.632;
  std::size_t mtry = 0;
  std::size_t min_node_size = 20;
  std::size_t min_leaf_size = 7;
  std::size_t max_depth = 0;
  std::size_t forced_depth = 2;
  double forced_split_min_share = 0.1;
  std::size_t mc_cutoff = 30;
  std::size_t mc_rounds = 10000;
  std::uint64_t seed = default_seed();
  std::size_t workers = default_workers();

  void attach(CLI::App* cmd) {
    cmd->add_option("--n-trees", n_trees, "Number of randomized search trees");
    cmd->add_option("--alpha", alpha, "Split significance threshold in (0,1)");
    cmd->add_option("--subsample", subsample, "Per-tree subsample fraction of D1");
    cmd->add_option("--mtry", mtry, "Attributes sampled per node (0 = ceil(sqrt(K)))");
    cmd->add_option("--min-node-size", min_node_size, "Minimum rows to attempt a split");
    cmd->add_option("--min-leaf-size", min_leaf_size, "Minimum rows per child");
    cmd->add_option("--max-depth", max_depth, "Depth cap (0 = unlimited)");
    cmd->add_option("--forced-depth", forced_depth,
                    "Levels that split on the best drawn attribute without the alpha gate");
    cmd->add_option("--forced-split-min-share", forced_split_min_share,
                    "Minimum per-side row share for exploration splits");
    cmd->add_option("--mc-cutoff", mc_cutoff, "Monte-Carlo p-values below this node size");
    cmd->add_option("--mc-rounds", mc_rounds, "Monte-Carlo permutation rounds");
    cmd->add_option("--seed", seed, "Master seed (default: $FAIRAUDIT_SEED or 0)");
    cmd->add_option("--workers", workers, "Worker threads (does not affect results)");
  }

  ForestParams forest() const {
    ForestParams params;
    params.n_trees = n_trees;
    params.subsample_fraction = subsample;
    params.tree.alpha = alpha;
    params.tree.mtry = mtry;
    params.tree.min_node_size = min_node_size;
    params.tree.min_leaf_size = min_leaf_size;
    params.tree.max_depth = max_depth;
    params.tree.forced_depth = forced_depth;
    params.tree.forced_split_min_share = forced_split_min_share;
    params.tree.mc_cutoff = mc_cutoff;
    params.tree.mc_rounds = mc_rounds;
    params.master_seed = seed;
    params.workers = workers;
    return params;
  }
};

void emit_report(const AuditReport& report, const std::string& out_report,
                 const std::string& out_text, const std::string& out_dot_dir) {
  if (!out_report.empty())
    write_text_file(out_report, render_json(report).dump(2) + "\n");
  if (!out_text.empty()) write_text_file(out_text, render_text(report));
  if (!out_dot_dir.empty()) {
    std::filesystem::create_directories(out_dot_dir);
    for (const auto& [name, dot] : render_dot(report))
      write_text_file((std::filesystem::path(out_dot_dir) / (name + ".dot")).string(), dot);
  }
  if (out_report.empty() && out_text.empty() && out_dot_dir.empty())
    std::cout << render_text(report);
}

int run(int argc, char** argv) {
  CLI::App app{"fairaudit: locates population subgroups with disparate audit outcomes"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "",
                 "Key=value config file; subcommand options go under an [audit] or "
                 "[benchmark] section. Flags override file values.");
  const std::string version_line = std::string(kEngineName) + " " + kVersion + " (methodology " +
                                   [] {
                                     std::string all;
                                     for (const auto& n : methodology_notes()) all += n + "\n";
                                     char buf[17];
                                     std::snprintf(buf, sizeof(buf), "%016llx",
                                                   static_cast<unsigned long long>(fnv1a64(all)));
                                     return std::string(buf);
                                   }() +
                                   ")";
  app.set_version_flag("--version", version_line);

  // ---- audit ----
  auto* audit = app.add_subcommand("audit", "Run the full audit pipeline on a CSV dataset");
  audit->fallthrough();
  std::string data_path, dataset_id, timestamp;
  std::string metric_name = "statistical-parity", ranking_name = "confidence";
  std::string sensitive_list;
  std::size_t n_groups = 3;
  std::string out_report, out_text, out_dot_dir;
  SchemaFlags schema_flags;
  EngineFlags audit_engine;

  audit->add_option("--data", data_path, "Input CSV (RFC-4180, header row)")->required();
  audit->add_option("--schema", schema_flags.schema_path, "Schema JSON mapping columns to roles");
  audit->add_option("--continuous", schema_flags.continuous, "Continuous predictor columns");
  audit->add_option("--categorical", schema_flags.categorical, "Categorical predictor columns");
  audit->add_option("--outcome-col", schema_flags.outcome_col, "Binary outcome column");
  audit->add_option("--outcome-positive", schema_flags.outcome_positive,
                    "Values of the outcome column mapping to 1");
  audit->add_option("--truth-col", schema_flags.truth_col, "Binary truth column");
  audit->add_option("--truth-positive", schema_flags.truth_positive,
                    "Values of the truth column mapping to 1");
  audit->add_option("--predicted-col", schema_flags.predicted_col,
                    "Prediction column (derives outcome = prediction error)");
  audit->add_option("--predicted-positive", schema_flags.predicted_positive,
                    "Values of the predicted column mapping to 1");
  audit->add_option("--actual-col", schema_flags.actual_col,
                    "Actual-label column (paired with --predicted-col)");
  audit->add_option("--actual-positive", schema_flags.actual_positive,
                    "Values of the actual column mapping to 1");
  audit->add_option("--metric", metric_name, "statistical-parity or equalized-odds");
  audit->add_option("--sensitive", sensitive_list,
                    "Attributes to scan (default: all predictors)");
  audit->add_option("--rank", ranking_name, "confidence or magnitude");
  audit->add_option("--n-groups", n_groups, "Findings to highlight and cover with trees");
  audit->add_option("--dataset-id", dataset_id, "Dataset identifier for the report");
  audit->add_option("--timestamp", timestamp,
                    "Report timestamp (default: $SOURCE_DATE_EPOCH or now)");
  audit->add_option("--out-report", out_report, "Write the JSON report here");
  audit->add_option("--out-text", out_text, "Write the text report here");
  audit->add_option("--out-dot-dir", out_dot_dir, "Write DOT tree visualizations here");
  audit_engine.attach(audit);

  audit->callback([&] {
    const SchemaDecl decl = schema_flags.resolve();
    const AuditDataset dataset = ingest_file(data_path, decl, dataset_id);
    AuditParams params;
    params.metric = metric_from_string(metric_name);
    params.ranking = ranking_from_string(ranking_name);
    params.n_groups = n_groups;
    params.sensitive = split_list(sensitive_list);
    params.forest = audit_engine.forest();
    params.dataset_id = dataset.id();
    params.timestamp = resolve_timestamp(timestamp);
    const AuditReport report = run_audit(dataset, params);
    emit_report(report, out_report, out_text, out_dot_dir);
  });

  // ---- generate ----
  auto* generate = app.add_subcommand("generate", "Write a synthetic benchmark dataset");
  generate->require_subcommand(1);
  double gen_rho = 0.2, gen_w = 24.0;
  std::size_t gen_n = 10000;
  std::uint64_t gen_seed = default_seed();
  std::string gen_out;

  auto* gen1 = generate->add_subcommand("dataset1", "Age-interval and race disparities");
  gen1->add_option("--rho", gen_rho, "Induced disparity, [0, 0.5)");
  gen1->add_option("--w", gen_w, "Age interval width in years, (0, 72)");
  gen1->add_option("--n", gen_n, "Sample count");
  gen1->add_option("--seed", gen_seed, "Generator seed");
  gen1->add_option("--out", gen_out, "Output CSV path")->required();
  gen1->callback([&] {
    Dataset1Params params;
    params.n = gen_n;
    params.rho = gen_rho;
    params.w = gen_w;
    params.seed = gen_seed;
    const AuditDataset data = gen_dataset1(params);
    write_csv_file(data, gen_out);
    write_text_file(gen_out + ".schema.json",
                    schema_to_json(sidecar_schema(data)).dump(2) + "\n");
  });

  auto* gen2 = generate->add_subcommand("dataset2", "Hidden race-gender intersectionality");
  gen2->add_option("--rho", gen_rho, "Induced disparity, [0, 1]");
  gen2->add_option("--n", gen_n, "Sample count");
  gen2->add_option("--seed", gen_seed, "Generator seed");
  gen2->add_option("--out", gen_out, "Output CSV path")->required();
  gen2->callback([&] {
    Dataset2Params params;
    params.n = gen_n;
    params.rho = gen_rho;
    params.seed = gen_seed;
    const AuditDataset data = gen_dataset2(params);
    write_csv_file(data, gen_out);
    write_text_file(gen_out + ".schema.json",
                    schema_to_json(sidecar_schema(data)).dump(2) + "\n");
  });

  // ---- benchmark ----
  auto* benchmark = app.add_subcommand("benchmark", "Location-rate sweep over synthetic data");
  benchmark->fallthrough();
  std::string bench_generator = "dataset1";
  std::vector<double> rho_grid{0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4};
  std::vector<double> w_grid{24.0};
  std::size_t bench_n = 10000, bench_runs = 100;
  double bench_tolerance = 0.05;
  std::string interval_score = "per-bound";
  std::string engine_variant = "default";
  std::string truth_path, bench_out;
  std::string bench_metric = "statistical-parity", bench_rank = "confidence";
  std::size_t bench_groups = 3;
  EngineFlags bench_engine;

  benchmark->add_option("--generator", bench_generator, "dataset1 or dataset2");
  benchmark->add_option("--rho", rho_grid, "Comma-separated rho grid")->delimiter(',');
  benchmark->add_option("--w", w_grid, "Comma-separated w grid (dataset1)")->delimiter(',');
  benchmark->add_option("--n", bench_n, "Rows per generated dataset");
  benchmark->add_option("--runs", bench_runs, "Runs per grid cell");
  benchmark->add_option("--tolerance", bench_tolerance,
                        "Bound tolerance as a fraction of the attribute span");
  benchmark->add_option("--interval-score", interval_score, "per-bound or symdiff");
  benchmark->add_option("--engine-variant", engine_variant,
                        "default or single-tree (ablation with n_trees = 1)");
  benchmark->add_option("--truth", truth_path, "Ground-truth JSON override");
  benchmark->add_option("--metric", bench_metric, "Audit metric");
  benchmark->add_option("--rank", bench_rank, "Audit ranking mode");
  benchmark->add_option("--n-groups", bench_groups, "Top findings scored per run");
  benchmark->add_option("--out", bench_out, "Write the location-rate CSV here");
  bench_engine.attach(benchmark);

  benchmark->callback([&] {
    BenchmarkConfig config;
    if (bench_generator == "dataset1")
      config.generator = Generator::Dataset1;
    else if (bench_generator == "dataset2")
      config.generator = Generator::Dataset2;
    else
      throw ConfigError("unknown generator '" + bench_generator + "'");
    config.rho_grid = rho_grid;
    config.w_grid = w_grid;
    config.n = bench_n;
    config.runs = bench_runs;
    config.tolerance = bench_tolerance;
    if (interval_score == "per-bound")
      config.interval_score = IntervalScore::PerBound;
    else if (interval_score == "symdiff")
      config.interval_score = IntervalScore::SymmetricDifference;
    else
      throw ConfigError("unknown interval score '" + interval_score + "'");
    config.engine.metric = metric_from_string(bench_metric);
    config.engine.ranking = ranking_from_string(bench_rank);
    config.engine.n_groups = bench_groups;
    config.engine.forest = bench_engine.forest();
    if (engine_variant == "single-tree")
      config.engine.forest.n_trees = 1;
    else if (engine_variant != "default")
      throw ConfigError("unknown engine variant '" + engine_variant + "'");
    if (!truth_path.empty()) {
      std::ifstream in(truth_path);
      if (!in) throw AuditError("E_IO", "cannot open ground truth '" + truth_path + "'");
      nlohmann::json doc;
      in >> doc;
      config.truth_override = ground_truth_from_json(doc);
    }
    config.master_seed = bench_engine.seed;
    config.workers = bench_engine.workers;

    const auto cells = run_benchmark(config);
    const std::string csv = benchmark_csv(cells, config);
    std::cout << csv;
    if (!bench_out.empty()) write_text_file(bench_out, csv);
  });

  // ---- render ----
  auto* render = app.add_subcommand("render", "Re-render text/DOT from a saved JSON report");
  std::string render_in, render_report, render_text_path, render_dot_dir;
  render->add_option("--report", render_in, "Saved JSON report")->required();
  render->add_option("--out-report", render_report, "Re-emit normalized JSON here");
  render->add_option("--out-text", render_text_path, "Write the text report here");
  render->add_option("--out-dot-dir", render_dot_dir, "Write DOT files here");
  render->callback([&] {
    std::ifstream in(render_in);
    if (!in) throw AuditError("E_IO", "cannot open report '" + render_in + "'");
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("invalid report JSON: " + std::string(e.what()));
    }
    const AuditReport report = report_from_json(doc);
    emit_report(report, render_report, render_text_path, render_dot_dir);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: [E_CONFIG] " << e.what() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const IngestError& e) {
    std::cerr << "error: [" << e.code() << "] " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "error: [" << e.code() << "] " << e.what() << "\n";
    return 2;
  } catch (const AuditError& e) {
    std::cerr << "error: [" << e.code() << "] " << e.what() << "\n";
    return e.code() == "E_IO" ? 4 : 5;
  } catch (const std::exception& e) {
    std::cerr << "error: [E_INTERNAL] " << e.what() << "\n";
    return 5;
  }
}
