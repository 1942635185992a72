#include "efg/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "efg/games.hpp"
#include "efg/metrics.hpp"

namespace efg {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("bad " + what + " '" + s + "'");
  }
}

// Log-spaced checkpoint grid over [hi/10^4, hi], deduplicated and ascending.
std::vector<std::uint64_t> log_grid(std::uint64_t hi, std::uint64_t points) {
  std::vector<std::uint64_t> grid;
  if (points <= 1 || hi <= 1) {
    grid.push_back(hi);
    return grid;
  }
  double lo = std::max(1.0, static_cast<double>(hi) / 1e4);
  double hid = static_cast<double>(hi);
  for (std::uint64_t j = 0; j < points; ++j) {
    double f = static_cast<double>(j) / static_cast<double>(points - 1);
    auto v = static_cast<std::uint64_t>(std::llround(lo * std::pow(hid / lo, f)));
    v = std::max<std::uint64_t>(1, std::min(v, hi));
    if (grid.empty() || v > grid.back()) grid.push_back(v);
  }
  if (grid.back() != hi) grid.push_back(hi);
  return grid;
}

int worker_count(const BenchmarkConfig& config, size_t items) {
  int n = config.workers;
  if (const char* env = std::getenv("EFGSOLVE_WORKERS")) {
    try {
      n = std::stoi(env);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad EFGSOLVE_WORKERS value");
    }
  }
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  return std::min<int>(n, static_cast<int>(items));
}

}  // namespace

EvalCadence EvalCadence::parse(const std::string& spec) {
  auto colon = spec.find(':');
  if (colon == std::string::npos)
    throw std::invalid_argument("bad eval cadence '" + spec +
                                "' (want log:<k>, nodes:<n> or iters:<n>)");
  std::string kind = spec.substr(0, colon);
  std::uint64_t value = parse_u64(spec.substr(colon + 1), "eval cadence value");
  if (value < 1) throw std::invalid_argument("eval cadence value must be >= 1");
  EvalCadence c;
  c.value = value;
  if (kind == "log") c.kind = Kind::LogSpaced;
  else if (kind == "nodes") c.kind = Kind::EveryNodes;
  else if (kind == "iters") c.kind = Kind::EveryIters;
  else
    throw std::invalid_argument("bad eval cadence '" + spec +
                                "' (want log:<k>, nodes:<n> or iters:<n>)");
  return c;
}

std::string EvalCadence::to_string() const {
  switch (kind) {
    case Kind::LogSpaced: return "log:" + std::to_string(value);
    case Kind::EveryNodes: return "nodes:" + std::to_string(value);
    case Kind::EveryIters: return "iters:" + std::to_string(value);
  }
  return "";
}

BenchmarkConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file '" + path + "'");
  BenchmarkConfig cfg;
  cfg.cadence = EvalCadence{};
  bool have_budget = false;
  std::string line;
  while (std::getline(f, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("bad config line '" + line + "' (want key=value)");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key == "game") {
      cfg.game = value;
    } else if (key == "algos") {
      for (const std::string& a : split(value, ',')) cfg.algos.push_back(trim(a));
    } else if (key == "seeds") {
      if (value.find(',') != std::string::npos) {
        for (const std::string& s : split(value, ','))
          cfg.seeds.push_back(parse_u64(trim(s), "seed"));
      } else {
        std::uint64_t count = parse_u64(value, "seed count");
        for (std::uint64_t s = 1; s <= count; ++s) cfg.seeds.push_back(s);
      }
    } else if (key == "budget") {
      cfg.budget = Budget::parse(value);
      have_budget = true;
    } else if (key == "eval_every") {
      cfg.cadence = EvalCadence::parse(value);
    } else if (key == "out") {
      cfg.out_dir = value;
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_u64(value, "worker count"));
    } else {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  if (cfg.game.empty()) throw std::invalid_argument("config is missing game=");
  if (cfg.algos.empty()) throw std::invalid_argument("config is missing algos=");
  if (cfg.seeds.empty()) throw std::invalid_argument("config is missing seeds=");
  if (!have_budget) throw std::invalid_argument("config is missing budget=");
  if (cfg.out_dir.empty()) throw std::invalid_argument("config is missing out=");
  return cfg;
}

RunOutput run_single(const GameTree& tree, const std::string& algo, Budget budget,
                     std::uint64_t seed, const EvalCadence& cadence) {
  RunOutput out;
  out.algorithm = algo;
  out.seed = seed;

  // Checkpoints for log cadence live in the budget's own metric.
  std::vector<std::uint64_t> grid;
  if (cadence.kind == EvalCadence::Kind::LogSpaced)
    grid = log_grid(budget.amount, cadence.value);
  size_t grid_idx = 0;
  std::uint64_t next_every = cadence.value;

  using Clock = std::chrono::steady_clock;
  Clock::time_point start = Clock::now();
  Clock::duration eval_time{0};

  auto observer = [&](const SolverState& state, const StepRecord& rec) {
    out.records.push_back(IterationRecord{rec.meta_iteration, rec.effective_iteration, rec.w_pst,
                                          rec.cumulative_nodes, kNan, kNan});
    std::uint64_t metric = 0;
    switch (cadence.kind) {
      case EvalCadence::Kind::LogSpaced:
        metric = budget.kind == Budget::Kind::Nodes ? rec.cumulative_nodes
                 : budget.kind == Budget::Kind::EffIters ? rec.effective_iteration
                                                         : rec.meta_iteration;
        break;
      case EvalCadence::Kind::EveryNodes:
        metric = rec.cumulative_nodes;
        break;
      case EvalCadence::Kind::EveryIters:
        metric = rec.meta_iteration;
        break;
    }
    bool due = false;
    if (cadence.kind == EvalCadence::Kind::LogSpaced) {
      due = grid_idx < grid.size() && metric >= grid[grid_idx];
    } else {
      due = metric >= next_every;
    }
    if (!due) return;

    // Solver wall time excludes the cost of the evaluation passes.
    Clock::time_point eval_start = Clock::now();
    double wall_ms =
        std::chrono::duration<double, std::milli>(eval_start - start - eval_time).count();
    StrategyProfile avg = normalize_average(state);
    double expl = exploitability(tree, avg).exploitability;
    out.records.back().exploitability = expl;
    out.records.back().wall_time_ms = wall_ms;
    if (cadence.kind == EvalCadence::Kind::LogSpaced) {
      while (grid_idx < grid.size() && metric >= grid[grid_idx]) {
        out.checkpoint_evals.emplace_back(grid[grid_idx], expl);
        ++grid_idx;
      }
    } else {
      while (metric >= next_every) {
        out.checkpoint_evals.emplace_back(next_every, expl);
        next_every += cadence.value;
      }
    }
    eval_time += Clock::now() - eval_start;
  };

  RunResult run = run_solver(algo, tree, budget, seed, observer);
  out.average = std::move(run.average);
  out.stationary = run.stationary;

  if (out.records.empty()) throw std::runtime_error("solver produced no iterations");
  if (std::isnan(out.records.back().exploitability)) {
    Clock::time_point eval_start = Clock::now();
    double wall_ms =
        std::chrono::duration<double, std::milli>(eval_start - start - eval_time).count();
    out.records.back().exploitability = exploitability(tree, out.average).exploitability;
    out.records.back().wall_time_ms = wall_ms;
  }
  out.final_exploitability = out.records.back().exploitability;

  // Normalization invariant on the emitted profile.
  for (const std::vector<double>& dist : out.average) {
    double sum = 0.0;
    for (double p : dist) {
      if (p < 0.0) throw std::runtime_error("emitted profile has a negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw std::runtime_error("emitted profile is not normalized");
  }
  return out;
}

std::vector<AggregateRow> aggregate_runs(const std::vector<RunOutput>& runs,
                                         const std::vector<std::string>& algo_order) {
  std::vector<AggregateRow> rows;
  for (const std::string& algo : algo_order) {
    std::map<std::uint64_t, std::vector<double>> by_checkpoint;
    for (const RunOutput& run : runs) {
      if (run.algorithm != algo) continue;
      for (const auto& [checkpoint, expl] : run.checkpoint_evals)
        by_checkpoint[checkpoint].push_back(expl);
    }
    for (const auto& [checkpoint, values] : by_checkpoint) {
      AggregateRow row;
      row.checkpoint = checkpoint;
      row.algorithm = algo;
      row.n_seeds = static_cast<int>(values.size());
      double mean = 0.0;
      for (double v : values) mean += v;
      mean /= static_cast<double>(values.size());
      double sd = 0.0;
      if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - mean) * (v - mean);
        sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
      }
      double half = 1.645 * sd / std::sqrt(static_cast<double>(values.size()));
      row.mean_exploitability = mean;
      row.ci_low = mean - half;
      row.ci_high = mean + half;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

void write_run_csv(const std::string& path, const std::vector<IterationRecord>& records) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << "meta_iteration,effective_iteration,w_pst,nodes_touched,exploitability,wall_time_ms\n";
  for (const IterationRecord& r : records) {
    f << r.meta_iteration << ',' << r.effective_iteration << ',' << r.w_pst << ','
      << r.nodes_touched << ',' << format_double(r.exploitability) << ','
      << format_double(r.wall_time_ms) << '\n';
  }
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<IterationRecord> read_run_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line) ||
      line != "meta_iteration,effective_iteration,w_pst,nodes_touched,exploitability,wall_time_ms")
    throw std::runtime_error("'" + path + "' is not a run CSV");
  std::vector<IterationRecord> records;
  while (std::getline(f, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 6) throw std::runtime_error("bad row in '" + path + "'");
    IterationRecord r;
    r.meta_iteration = parse_u64(cells[0], "meta_iteration");
    r.effective_iteration = parse_u64(cells[1], "effective_iteration");
    r.w_pst = parse_u64(cells[2], "w_pst");
    r.nodes_touched = parse_u64(cells[3], "nodes_touched");
    r.exploitability = std::strtod(cells[4].c_str(), nullptr);
    r.wall_time_ms = std::strtod(cells[5].c_str(), nullptr);
    records.push_back(r);
  }
  return records;
}

void write_aggregate_csv(const std::string& path, const std::vector<AggregateRow>& rows) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + path + "'");
  f << "nodes_touched_checkpoint,algorithm,mean_exploitability,ci_low,ci_high,n_seeds\n";
  for (const AggregateRow& r : rows) {
    f << r.checkpoint << ',' << r.algorithm << ',' << format_double(r.mean_exploitability)
      << ',' << format_double(r.ci_low) << ',' << format_double(r.ci_high) << ',' << r.n_seeds
      << '\n';
  }
  if (!f) throw std::runtime_error("write failed for '" + path + "'");
}

std::vector<AggregateRow> read_aggregate_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(f, line) ||
      line != "nodes_touched_checkpoint,algorithm,mean_exploitability,ci_low,ci_high,n_seeds")
    throw std::runtime_error("'" + path + "' is not an aggregate CSV");
  std::vector<AggregateRow> rows;
  while (std::getline(f, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split(line, ',');
    if (cells.size() != 6) throw std::runtime_error("bad row in '" + path + "'");
    AggregateRow r;
    r.checkpoint = parse_u64(cells[0], "checkpoint");
    r.algorithm = cells[1];
    r.mean_exploitability = std::strtod(cells[2].c_str(), nullptr);
    r.ci_low = std::strtod(cells[3].c_str(), nullptr);
    r.ci_high = std::strtod(cells[4].c_str(), nullptr);
    r.n_seeds = static_cast<int>(parse_u64(cells[5], "n_seeds"));
    rows.push_back(std::move(r));
  }
  return rows;
}

BenchmarkResult run_benchmark(const BenchmarkConfig& config) {
  // Validate ids up front so a bad config fails before any run starts.
  for (const std::string& algo : config.algos) {
    const auto& ids = known_solver_ids();
    if (std::find(ids.begin(), ids.end(), algo) == ids.end()) {
      std::string valid;
      for (const std::string& s : ids) valid += (valid.empty() ? "" : ", ") + s;
      throw std::invalid_argument("unknown solver id '" + algo + "' (valid: " + valid + ")");
    }
  }
  GameTree tree = make_game(config.game);
  std::filesystem::create_directories(config.out_dir);

  struct Item {
    std::string algo;
    std::uint64_t seed;
  };
  std::vector<Item> items;
  for (const std::string& algo : config.algos)
    for (std::uint64_t seed : config.seeds) items.push_back({algo, seed});

  std::vector<RunOutput> outputs(items.size());
  std::vector<std::string> files(items.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  auto work = [&]() {
    while (!failed.load()) {
      size_t idx = next.fetch_add(1);
      if (idx >= items.size()) return;
      try {
        const Item& item = items[idx];
        RunOutput out = run_single(tree, item.algo, config.budget, item.seed, config.cadence);
        std::string path = (std::filesystem::path(config.out_dir) /
                            (config.game + "_" + item.algo + "_seed" +
                             std::to_string(item.seed) + ".csv"))
                               .string();
        write_run_csv(path, out.records);
        files[idx] = path;
        outputs[idx] = std::move(out);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        if (error_message.empty()) error_message = e.what();
      }
    }
  };

  int n_workers = worker_count(config, items.size());
  std::vector<std::thread> pool;
  for (int i = 1; i < n_workers; ++i) pool.emplace_back(work);
  work();
  for (std::thread& t : pool) t.join();
  if (failed.load()) throw std::runtime_error("benchmark run failed: " + error_message);

  BenchmarkResult result;
  result.run_files = std::move(files);
  result.aggregate = aggregate_runs(outputs, config.algos);
  result.aggregate_file =
      (std::filesystem::path(config.out_dir) / "aggregate.csv").string();
  write_aggregate_csv(result.aggregate_file, result.aggregate);
  return result;
}

PhaseStats sync_phase_stats(const std::vector<IterationRecord>& records) {
  if (records.empty()) throw std::invalid_argument("phase stats need at least one record");
  PhaseStats stats;
  std::map<int, std::uint64_t> bins;
  for (const IterationRecord& r : records) {
    stats.mapping.emplace_back(r.meta_iteration, r.effective_iteration);
    int bin = 0;
    std::uint64_t w = r.w_pst;
    while (w > 1) {
      w >>= 1;
      ++bin;
    }
    ++bins[bin];
  }
  for (const auto& [bin, count] : bins) {
    HistogramBin hb;
    hb.lo = 1ULL << bin;
    hb.hi = 1ULL << (bin + 1);
    hb.count = count;
    stats.histogram.push_back(hb);
  }
  return stats;
}

std::vector<std::string> write_phase_stats(const std::string& out_dir, const std::string& stem,
                                           const PhaseStats& stats) {
  std::filesystem::create_directories(out_dir);
  std::string mapping_path =
      (std::filesystem::path(out_dir) / (stem + "_mapping.csv")).string();
  std::string histogram_path =
      (std::filesystem::path(out_dir) / (stem + "_histogram.csv")).string();
  {
    std::ofstream f(mapping_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + mapping_path + "'");
    f << "meta_iteration,effective_iteration\n";
    for (const auto& [meta, eff] : stats.mapping) f << meta << ',' << eff << '\n';
  }
  {
    std::ofstream f(histogram_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + histogram_path + "'");
    f << "w_pst_bin_lo,w_pst_bin_hi,count\n";
    for (const HistogramBin& b : stats.histogram)
      f << b.lo << ',' << b.hi << ',' << b.count << '\n';
  }
  return {mapping_path, histogram_path};
}

CompareResult compare_to_target(const std::vector<AggregateRow>& aggregate, const std::string& a,
                                const std::string& b, double target) {
  CompareResult result;
  auto first_crossing = [&](const std::string& algo, bool& crossed, std::uint64_t& checkpoint) {
    std::map<std::uint64_t, double> by_checkpoint;
    for (const AggregateRow& row : aggregate)
      if (row.algorithm == algo) by_checkpoint[row.checkpoint] = row.mean_exploitability;
    for (const auto& [cp, mean] : by_checkpoint) {
      if (mean <= target) {
        crossed = true;
        checkpoint = cp;
        return;
      }
    }
  };
  first_crossing(a, result.a_crossed, result.a_checkpoint);
  first_crossing(b, result.b_crossed, result.b_checkpoint);
  if (result.a_crossed && result.b_crossed && result.b_checkpoint > 0)
    result.ratio = static_cast<double>(result.a_checkpoint) /
                   static_cast<double>(result.b_checkpoint);
  return result;
}

}  // namespace efg
