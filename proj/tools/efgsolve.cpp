// efgsolve: equilibrium solvers for small poker games with node-touch
// accounting, plus the benchmark harness that produces the convergence CSVs.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"
#include "efg/bench.hpp"
#include "efg/games.hpp"
#include "efg/matrix_game.hpp"
#include "efg/metrics.hpp"
#include "efg/solvers.hpp"

namespace {

int cmd_solve(const std::string& game_id, const std::string& algo, const std::string& budget_spec,
              std::uint64_t seed, const std::string& eval_spec, const std::string& out_dir,
              const std::string& dump_state_path) {
  efg::GameTree tree = efg::make_game(game_id);
  efg::Budget budget = efg::Budget::parse(budget_spec);
  efg::EvalCadence cadence = efg::EvalCadence::parse(eval_spec);
  efg::RunOutput out = efg::run_single(tree, algo, budget, seed, cadence);

  std::filesystem::create_directories(out_dir);
  std::string path = (std::filesystem::path(out_dir) /
                      (game_id + "_" + algo + "_seed" + std::to_string(seed) + ".csv"))
                         .string();
  efg::write_run_csv(path, out.records);

  if (!dump_state_path.empty()) {
    // Re-run to a SolverState checkpoint for the equivalence harness.
    efg::RunResult run = efg::run_solver(algo, tree, budget, seed);
    std::ofstream f(dump_state_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + dump_state_path + "'");
    efg::dump_state(f, run.state);
  }

  const efg::IterationRecord& last = out.records.back();
  std::cout << "run " << path << "\n"
            << "meta_iterations " << last.meta_iteration << " effective_iterations "
            << last.effective_iteration << " nodes_touched " << last.nodes_touched << "\n"
            << "exploitability " << efg::format_double(out.final_exploitability) << " chips\n";
  if (out.stationary) std::cout << "note: profile became stationary (all pursue times infinite)\n";
  return 0;
}

int cmd_bench(const std::string& config_path) {
  efg::BenchmarkConfig config = efg::parse_config_file(config_path);
  efg::BenchmarkResult result = efg::run_benchmark(config);
  std::cout << "wrote " << result.run_files.size() << " run CSVs and " << result.aggregate_file
            << "\n";
  return 0;
}

int cmd_phase_stats(const std::string& in_path, const std::string& out_dir) {
  std::vector<efg::IterationRecord> records = efg::read_run_csv(in_path);
  efg::PhaseStats stats = efg::sync_phase_stats(records);
  std::string stem = std::filesystem::path(in_path).stem().string();
  std::vector<std::string> written = efg::write_phase_stats(out_dir, stem, stats);
  for (const std::string& f : written) std::cout << "wrote " << f << "\n";
  return 0;
}

int cmd_compare(const std::string& in_path, const std::string& algo_a, const std::string& algo_b,
                double target) {
  std::vector<efg::AggregateRow> rows = efg::read_aggregate_csv(in_path);
  efg::CompareResult r = efg::compare_to_target(rows, algo_a, algo_b, target);
  if (!r.a_crossed) std::cout << algo_a << " not-crossed\n";
  if (!r.b_crossed) std::cout << algo_b << " not-crossed\n";
  if (r.a_crossed && r.b_crossed) {
    std::cout << algo_a << " " << r.a_checkpoint << " " << algo_b << " " << r.b_checkpoint
              << " ratio " << efg::format_double(r.ratio) << "\n";
  }
  return 0;
}

int cmd_dump(const std::string& game_id) {
  efg::GameTree tree = efg::make_game(game_id);
  efg::dump_tree(std::cout, tree);
  return 0;
}

int cmd_solve_matrix(const std::string& game_spec, const std::string& algo, std::uint64_t iters,
                     std::uint64_t seed) {
  efg::MatrixGame game = efg::MatrixGame::from_id_or_file(game_spec);
  std::array<std::vector<double>, 2> avg;
  if (algo == "fp" || algo == "sync-fp") {
    efg::FpState state = efg::FpState::init_random(game, seed);
    if (algo == "fp") {
      while (state.t < iters) state = efg::fp_step(game, state);
    } else {
      while (state.t < iters) {
        auto [next, w] = efg::sync_fp_step(game, state, iters - state.t);
        state = std::move(next);
      }
    }
    std::cout << "effective_iterations " << state.t << "\n";
    avg = state.avg;
  } else if (algo == "rm") {
    efg::RmState state = efg::RmState::init(game);
    for (std::uint64_t i = 0; i < iters; ++i) state = efg::rm_step(game, state);
    avg = efg::rm_average(game, state);
  } else {
    throw std::invalid_argument("unknown matrix algorithm '" + algo +
                                "' (valid: fp, sync-fp, rm)");
  }
  for (int p = 0; p < 2; ++p) {
    std::cout << "player" << (p + 1);
    for (double v : avg[p]) std::cout << " " << efg::format_double(v);
    std::cout << "\n";
  }
  std::cout << "exploitability " << efg::format_double(efg::nf_exploitability(game, avg[0], avg[1]))
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equilibrium solvers and benchmark harness for small poker games"};
  app.require_subcommand(1);

  std::string game_id, algo, budget_spec, eval_spec = "log:60", out_dir = "out";
  std::string dump_state_path, config_path, in_path, algo_a, algo_b, matrix_spec;
  std::uint64_t seed = 1, iters = 10000;
  double target = 1e-3;

  CLI::App* solve = app.add_subcommand("solve", "run one solver and write its run CSV");
  solve->add_option("--game", game_id, "kuhn | leduc | leduc5")->required();
  solve->add_option("--algo", algo, "cfr | cfrplus | pcfr | sync-pcfr")->required();
  solve->add_option("--budget", budget_spec, "<n>iters | <n>eff-iters | <n>nodes")->required();
  solve->add_option("--seed", seed, "rng seed for the initial pure profile");
  solve->add_option("--eval-every", eval_spec, "log:<k> | nodes:<n> | iters:<n>");
  solve->add_option("--out", out_dir, "output directory");
  solve->add_option("--dump-state", dump_state_path, "write the final Q/average checkpoint");

  CLI::App* bench = app.add_subcommand("bench", "run the multi-seed benchmark protocol");
  bench->add_option("--config", config_path, "key=value config file")->required();

  CLI::App* phase = app.add_subcommand("phase-stats", "sync-phase statistics from a run CSV");
  phase->add_option("--in", in_path, "run CSV")->required();
  phase->add_option("--out", out_dir, "output directory")->required();

  CLI::App* compare = app.add_subcommand("compare", "nodes-touched ratio at a target");
  compare->add_option("--in", in_path, "aggregate CSV")->required();
  compare->add_option("--a", algo_a, "numerator algorithm")->required();
  compare->add_option("--b", algo_b, "denominator algorithm")->required();
  compare->add_option("--target", target, "exploitability target in chips")->required();

  CLI::App* dump = app.add_subcommand("dump", "print the game tree as text");
  dump->add_option("--game", game_id, "kuhn | leduc | leduc5")->required();

  CLI::App* matrix = app.add_subcommand("solve-matrix", "normal-form baselines");
  matrix->add_option("--game", matrix_spec, "rps | matching-pennies | diag-<k> | file path")
      ->required();
  matrix->add_option("--algo", algo, "fp | sync-fp | rm")->required();
  matrix->add_option("--iters", iters, "effective iterations");
  matrix->add_option("--seed", seed, "rng seed for the initial pure plays");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed())
      return cmd_solve(game_id, algo, budget_spec, seed, eval_spec, out_dir, dump_state_path);
    if (bench->parsed()) return cmd_bench(config_path);
    if (phase->parsed()) return cmd_phase_stats(in_path, out_dir);
    if (compare->parsed()) return cmd_compare(in_path, algo_a, algo_b, target);
    if (dump->parsed()) return cmd_dump(game_id);
    if (matrix->parsed()) return cmd_solve_matrix(matrix_spec, algo, iters, seed);
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
