#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "efg/game_tree.hpp"
#include "efg/solvers.hpp"

namespace efg {

// One run-CSV row. Every meta-iteration produces a row; exploitability and
// wall_time_ms are NaN except at evaluation checkpoints (and the final row).
struct IterationRecord {
  std::uint64_t meta_iteration = 0;
  std::uint64_t effective_iteration = 0;
  std::uint64_t w_pst = 1;
  std::uint64_t nodes_touched = 0;  // cumulative
  double exploitability = 0.0;
  double wall_time_ms = 0.0;
};

// Exploitability evaluation cadence.
//   log:<k>    k log-spaced checkpoints over the budget's own metric
//   nodes:<n>  every n cumulative nodes touched
//   iters:<n>  every n meta-iterations
struct EvalCadence {
  enum class Kind { LogSpaced, EveryNodes, EveryIters };
  Kind kind = Kind::LogSpaced;
  std::uint64_t value = 60;

  static EvalCadence parse(const std::string& spec);
  std::string to_string() const;
};

struct BenchmarkConfig {
  std::string game;
  std::vector<std::string> algos;
  std::vector<std::uint64_t> seeds;
  Budget budget;
  EvalCadence cadence;
  std::string out_dir;
  int workers = 0;  // 0 = available parallelism; EFGSOLVE_WORKERS overrides
};

// key=value lines: game, algos (comma list), seeds (count or comma list),
// budget, eval_every, out, workers. '#' starts a comment.
BenchmarkConfig parse_config_file(const std::string& path);

struct RunOutput {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::vector<IterationRecord> records;
  // (checkpoint, exploitability) pairs on the cadence grid.
  std::vector<std::pair<std::uint64_t, double>> checkpoint_evals;
  StrategyProfile average;
  bool stationary = false;
  double final_exploitability = 0.0;
};

RunOutput run_single(const GameTree& tree, const std::string& algo, Budget budget,
                     std::uint64_t seed, const EvalCadence& cadence);

struct AggregateRow {
  std::uint64_t checkpoint = 0;  // in the cadence metric (nodes unless iters-based)
  std::string algorithm;
  double mean_exploitability = 0.0;
  double ci_low = 0.0;   // 90% normal-approximation interval
  double ci_high = 0.0;
  int n_seeds = 0;
};

std::vector<AggregateRow> aggregate_runs(const std::vector<RunOutput>& runs,
                                         const std::vector<std::string>& algo_order);

void write_run_csv(const std::string& path, const std::vector<IterationRecord>& records);
std::vector<IterationRecord> read_run_csv(const std::string& path);
void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows);
std::vector<AggregateRow> read_aggregate_csv(const std::string& path);

struct BenchmarkResult {
  std::vector<std::string> run_files;
  std::string aggregate_file;
  std::vector<AggregateRow> aggregate;
};

// Full protocol: one run per (algorithm, seed) executed on a bounded worker
// pool, one CSV per run, then the cross-seed aggregate CSV.
BenchmarkResult run_benchmark(const BenchmarkConfig& config);

struct HistogramBin {
  std::uint64_t lo = 0;  // inclusive
  std::uint64_t hi = 0;  // exclusive
  std::uint64_t count = 0;
};

struct PhaseStats {
  std::vector<HistogramBin> histogram;  // power-of-two bins over w_pst
  std::vector<std::pair<std::uint64_t, std::uint64_t>> mapping;  // meta -> effective
};

// Throws std::invalid_argument on empty input.
PhaseStats sync_phase_stats(const std::vector<IterationRecord>& records);
// Writes <out_dir>/<stem>_mapping.csv and <out_dir>/<stem>_histogram.csv.
std::vector<std::string> write_phase_stats(const std::string& out_dir, const std::string& stem,
                                           const PhaseStats& stats);

struct CompareResult {
  bool a_crossed = false;
  bool b_crossed = false;
  std::uint64_t a_checkpoint = 0;
  std::uint64_t b_checkpoint = 0;
  double ratio = 0.0;  // a_checkpoint / b_checkpoint, valid when both crossed
};

// First checkpoint at which each algorithm's mean exploitability is at or
// below the target. Not crossing is reported, not an error.
CompareResult compare_to_target(const std::vector<AggregateRow>& aggregate, const std::string& a,
                                const std::string& b, double target);

}  // namespace efg
