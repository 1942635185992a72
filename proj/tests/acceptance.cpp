// Acceptance suite: end-to-end checks of the solver stack, one printed
// PASS/FAIL line per criterion. Exits nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "efg/bench.hpp"
#include "efg/games.hpp"
#include "efg/matrix_game.hpp"
#include "efg/metrics.hpp"
#include "efg/solvers.hpp"
#include "oracles.hpp"

using namespace efg;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s: criterion %d (%s) %s%s\n", pass ? "PASS" : "FAIL", number, name.c_str(),
              detail.empty() ? "" : "- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

double max_rel_diff(const std::vector<std::vector<double>>& a,
                    const std::vector<std::vector<double>>& b) {
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < a[i].size(); ++j) {
      double denom = std::max({1.0, std::abs(a[i][j]), std::abs(b[i][j])});
      worst = std::max(worst, std::abs(a[i][j] - b[i][j]) / denom);
    }
  return worst;
}

bool tables_equal(const SolverState& x, const SolverState& y) {
  return x.table == y.table && x.avg_num == y.avg_num;
}

// Criterion 1: sync PCFR and vanilla PCFR agree on Q tables, average
// numerators and the final average profile at equal effective iteration
// counts (rtol 1e-9 on Kuhn and Leduc, exact on an integer-utility toy).
void criterion_equivalence() {
  double worst = 0.0;
  bool ok = true;
  auto run_pair = [&](const GameTree& tree, std::uint64_t eff, std::uint64_t seed) {
    RunResult vanilla = run_pcfr(tree, {Budget::Kind::EffIters, eff}, seed);
    RunResult synced = run_sync_pcfr(tree, {Budget::Kind::EffIters, eff}, seed);
    ok = ok && vanilla.state.effective_iteration == synced.state.effective_iteration;
    worst = std::max(worst, max_rel_diff(vanilla.state.table, synced.state.table));
    worst = std::max(worst, max_rel_diff(vanilla.state.avg_num, synced.state.avg_num));
    worst = std::max(worst, max_rel_diff(vanilla.average, synced.average));
  };
  GameTree kuhn = build_kuhn();
  for (std::uint64_t seed = 1; seed <= 10; ++seed) run_pair(kuhn, 20000, seed);
  GameTree leduc = build_leduc(1, {2, 4}, 2);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) run_pair(leduc, 1500, seed);
  ok = ok && worst <= 1e-9;

  // Integer-utility toy with power-of-two chance: exact match required.
  GameTree toy = build_matrix_tree(3, 3, {2, -1, 0, 1, 0, -2, -1, 2, 1}, "toy");
  bool exact = true;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RunResult vanilla = run_pcfr(toy, {Budget::Kind::EffIters, 4000}, seed);
    RunResult synced = run_sync_pcfr(toy, {Budget::Kind::EffIters, 4000}, seed);
    exact = exact && tables_equal(vanilla.state, synced.state) &&
            vanilla.average == synced.average;
  }
  std::ostringstream detail;
  detail << "max relative difference " << format_double(worst) << " over 10 seeds x {kuhn, leduc}"
         << (exact ? ", toy exact" : ", TOY MISMATCH");
  report(1, "sync/vanilla equivalence", ok && exact, detail.str());
}

// Criterion 2: instrumented vanilla replays confirm the best-response or
// argmax profile is constant strictly inside every skipped phase.
void criterion_phase_correctness() {
  bool ok = true;
  std::uint64_t phases_checked = 0;

  // 50 random 3x3 and 4x4 integer matrix games.
  for (std::uint64_t i = 0; i < 50 && ok; ++i) {
    int n = 3 + static_cast<int>(i % 2);
    MatrixGame g = oracle::random_integer_matrix(n, n, 9, 5000 + i);
    FpState s = FpState::init_random(g, i + 1);
    const std::uint64_t horizon = 2000;
    while (s.t < horizon && ok) {
      auto [next, w] = sync_fp_step(g, s, horizon - s.t);
      FpState replay = s;
      for (std::uint64_t j = 0; j < w && ok; ++j) {
        ok = replay.br == s.br;
        replay = fp_step(g, replay);
      }
      ++phases_checked;
      s = std::move(next);
    }
  }

  // Kuhn: vanilla per-iteration argmax profiles against the sync phases.
  GameTree kuhn = build_kuhn();
  for (std::uint64_t seed = 11; seed <= 13 && ok; ++seed) {
    const std::uint64_t horizon = 5000;
    std::vector<StrategyProfile> vanilla;
    run_pcfr(kuhn, {Budget::Kind::EffIters, horizon}, seed,
             [&](const SolverState& st, const StepRecord&) { vanilla.push_back(st.profile); });
    std::uint64_t covered = 0;
    run_sync_pcfr(kuhn, {Budget::Kind::EffIters, horizon}, seed,
                  [&](const SolverState& st, const StepRecord& rec) {
                    for (std::uint64_t j = 0; j < rec.w_pst; ++j)
                      ok = ok && vanilla[covered + j] == st.profile;
                    covered = rec.effective_iteration;
                    ++phases_checked;
                  });
    ok = ok && covered == horizon;
  }
  report(2, "phase correctness by vanilla replay", ok,
         std::to_string(phases_checked) + " phases verified");
}

// Criterion 3: convergence targets on Kuhn plus the LP-anchored game value.
void criterion_convergence() {
  GameTree kuhn = build_kuhn();
  std::ostringstream detail;
  bool ok = true;

  for (const std::string& algo : known_solver_ids()) {
    RunResult run = run_solver(algo, kuhn, {Budget::Kind::EffIters, 100000}, 1);
    double expl = exploitability(kuhn, run.average).exploitability;
    detail << algo << " " << format_double(expl) << " ";
    ok = ok && expl < 1e-2;
  }

  RunResult plus = run_cfrplus(kuhn, {Budget::Kind::MetaIters, 1000}, 1);
  double plus_expl = exploitability(kuhn, plus.average).exploitability;
  detail << "| cfrplus@1e3 " << format_double(plus_expl);
  ok = ok && plus_expl < 1e-3;

  RunResult synced = run_sync_pcfr(kuhn, {Budget::Kind::Nodes, 2000000}, 1);
  double sync_expl = exploitability(kuhn, synced.average).exploitability;
  detail << " | sync-pcfr@2e6nodes " << format_double(sync_expl);
  ok = ok && sync_expl < 1e-3;

  // Game value against the sequence-of-pure-strategies LP oracle.
  oracle::PureMatrix pm = oracle::pure_strategy_matrix(kuhn);
  double lp_value = oracle::matrix_game_value(pm.rows, pm.cols, pm.payoff);
  double sync_value = game_value(kuhn, synced.average);
  detail << " | game value " << format_double(sync_value) << " vs lp "
         << format_double(lp_value);
  ok = ok && std::abs(lp_value - (-1.0 / 18.0)) <= 1e-9;
  ok = ok && std::abs(sync_value - lp_value) <= 1e-3;

  report(3, "convergence on kuhn", ok, detail.str());
}

// Criterion 4: per-iteration nodes touched by the pure solvers on Leduc
// stay strictly below the full-tree pass count for at least 95% of
// iterations; the median is reported.
void criterion_cost_metric() {
  GameTree leduc = build_leduc(1, {2, 4}, 2);
  std::uint64_t full = static_cast<std::uint64_t>(leduc.num_nodes());
  bool ok = true;
  std::ostringstream detail;
  detail << "full tree " << full;
  for (const std::string& algo : {std::string("pcfr"), std::string("sync-pcfr")}) {
    RunResult run = run_solver(algo, leduc, {Budget::Kind::MetaIters, 2000}, 3);
    std::vector<std::uint64_t> touches = run.touches.per_iteration;
    std::uint64_t below = 0;
    for (std::uint64_t t : touches)
      if (t < full) ++below;
    double frac = static_cast<double>(below) / static_cast<double>(touches.size());
    std::sort(touches.begin(), touches.end());
    std::uint64_t median = touches[touches.size() / 2];
    detail << " | " << algo << " median " << median << " below-full " << format_double(frac);
    ok = ok && frac >= 0.95;
  }
  report(4, "per-iteration cost on leduc", ok, detail.str());
}

// Criterion 5: nodes-touched ratio sync-pcfr / cfrplus at exploitability
// 1e-3, hard-gated below 1.0 on both games; measured ratios reported.
void criterion_headline_speed() {
  bool ok = true;
  std::ostringstream detail;
  fs::create_directories("acceptance_out");
  struct Setup {
    std::string game;
    std::string sync_budget;
    std::string plus_budget;
  };
  for (const Setup& setup : {Setup{"kuhn", "400000nodes", "400000nodes"},
                             Setup{"leduc", "1200000000nodes", "40000000nodes"}}) {
    BenchmarkConfig config;
    config.game = setup.game;
    config.algos = {"sync-pcfr", "cfrplus"};
    config.seeds = {1, 2};
    config.cadence = EvalCadence::parse("log:80");
    config.out_dir = "acceptance_out/" + setup.game;
    config.workers = 1;

    // Budgets differ per algorithm; run two one-algo benchmarks into one
    // aggregate to keep each run's checkpoint grid aligned with its budget.
    std::vector<AggregateRow> aggregate;
    for (const std::string& algo : config.algos) {
      BenchmarkConfig one = config;
      one.algos = {algo};
      one.budget = Budget::parse(algo == "sync-pcfr" ? setup.sync_budget : setup.plus_budget);
      one.out_dir = config.out_dir + "_" + algo;
      for (AggregateRow& row : run_benchmark(one).aggregate) aggregate.push_back(std::move(row));
    }
    CompareResult r = compare_to_target(aggregate, "sync-pcfr", "cfrplus", 1e-3);
    detail << setup.game << ": ";
    if (!r.a_crossed || !r.b_crossed) {
      detail << (r.a_crossed ? "" : "sync-pcfr not-crossed ")
             << (r.b_crossed ? "" : "cfrplus not-crossed ");
      ok = false;
    } else {
      detail << "sync-pcfr " << r.a_checkpoint << " cfrplus " << r.b_checkpoint << " ratio "
             << format_double(r.ratio) << " ";
      ok = ok && r.ratio < 1.0;
    }
  }
  report(5, "headline nodes-to-target ratio", ok, detail.str());
}

// Criterion 6: skipping on Leduc: max w_pst > 10 within 1e4 meta-iterations
// and a strictly superlinear effective-vs-meta mapping in the final decile;
// histogram and mapping CSVs are emitted.
void criterion_skipping() {
  GameTree leduc = build_leduc(1, {2, 4}, 2);
  RunOutput run = run_single(leduc, "sync-pcfr", {Budget::Kind::MetaIters, 10000}, 1,
                             EvalCadence::parse("log:10"));
  std::uint64_t max_w = 0;
  for (const IterationRecord& rec : run.records) max_w = std::max(max_w, rec.w_pst);

  PhaseStats stats = sync_phase_stats(run.records);
  fs::create_directories("acceptance_out");
  write_phase_stats("acceptance_out", "leduc_sync_pcfr", stats);

  size_t last = stats.mapping.size() - 1;
  size_t decile = stats.mapping.size() - stats.mapping.size() / 10;
  auto [m0, e0] = stats.mapping[decile - 1];
  auto [m1, e1] = stats.mapping[last];
  // Strict superlinearity: effective iterations grow faster than metas.
  bool superlinear =
      static_cast<double>(e1) * static_cast<double>(m0) >
      static_cast<double>(e0) * static_cast<double>(m1);
  std::ostringstream detail;
  detail << "max w_pst " << max_w << ", final-decile mapping (" << m0 << "," << e0 << ") -> ("
         << m1 << "," << e1 << ")";
  report(6, "sync phases appear on leduc", max_w > 10 && superlinear, detail.str());
}

// Criterion 7: determinism of run CSVs (modulo the measured wall-time
// column), CI bounds containing the mean, and zero-sum plus normalization
// invariants on every emitted profile.
void criterion_determinism_and_schema() {
  bool ok = true;
  std::ostringstream detail;

  auto strip_wall = [](const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream out;
    std::string line;
    while (std::getline(f, line)) out << line.substr(0, line.rfind(',')) << '\n';
    return out.str();
  };

  BenchmarkConfig config;
  config.game = "kuhn";
  config.algos = {"cfr", "cfrplus", "pcfr", "sync-pcfr"};
  config.seeds = {1, 2};
  config.budget = Budget::parse("30000nodes");
  config.cadence = EvalCadence::parse("log:10");
  config.workers = 2;

  config.out_dir = "acceptance_out/det_a";
  BenchmarkResult a = run_benchmark(config);
  config.out_dir = "acceptance_out/det_b";
  BenchmarkResult b = run_benchmark(config);

  for (size_t i = 0; i < a.run_files.size(); ++i)
    ok = ok && strip_wall(a.run_files[i]) == strip_wall(b.run_files[i]);
  detail << (ok ? "8 run CSVs byte-stable (wall-time column excluded)"
                : "RUN CSV MISMATCH");

  std::ifstream fa(a.aggregate_file, std::ios::binary), fb(b.aggregate_file, std::ios::binary);
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  ok = ok && sa.str() == sb.str();

  for (const AggregateRow& row : a.aggregate)
    ok = ok && row.ci_low <= row.mean_exploitability + 1e-15 &&
         row.mean_exploitability <= row.ci_high + 1e-15;

  GameTree kuhn = build_kuhn();
  for (const std::string& algo : known_solver_ids()) {
    RunOutput out = run_single(kuhn, algo, {Budget::Kind::EffIters, 500}, 9,
                               EvalCadence::parse("log:5"));
    // Player 2's utility is the negation by construction; cross-check the
    // profile's value through two independent evaluation paths.
    double v1 = game_value(kuhn, out.average);
    double v2 = strategy_to_values(kuhn, out.average).root_value_p1;
    ok = ok && std::abs(v1 - v2) <= 1e-12;
    for (const auto& dist : out.average) {
      double sum = 0.0;
      for (double p : dist) {
        ok = ok && p >= 0.0;
        sum += p;
      }
      ok = ok && std::abs(sum - 1.0) <= 1e-9;
    }
  }
  report(7, "determinism, CI bounds, profile invariants", ok, detail.str());
}

}  // namespace

int main() {
  criterion_equivalence();
  criterion_phase_correctness();
  criterion_convergence();
  criterion_cost_metric();
  criterion_headline_speed();
  criterion_skipping();
  criterion_determinism_and_schema();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
