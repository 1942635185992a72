#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "efg/game_tree.hpp"
#include "efg/matrix_game.hpp"  // kNoEffectiveLimit
#include "efg/metrics.hpp"

namespace efg {

// Shared state of the extensive-form solvers. `table` holds cumulative
// Q-values for the PCFR family and cumulative regrets for the CFR family.
struct SolverState {
  std::vector<std::vector<double>> table;
  std::vector<std::vector<double>> avg_num;  // cumulative weighted strategy numerators
  StrategyProfile profile;                   // profile of the current meta-iteration
  std::uint64_t meta_iteration = 0;
  std::uint64_t effective_iteration = 0;
  std::uint64_t rng_seed = 0;

  // Zeroed tables plus a seeded random pure profile.
  static SolverState init(const GameTree& tree, std::uint64_t seed);
};

// One simultaneous evaluation pass over the tree.
//   values[I][a]     counterfactual action value of the acting player times
//                    scale (the tree's chance_scale)
//   opp_reach[I]     opponent-and-chance reach of the infoset, times scale
//   own_reach[I]     acting player's own reach of the infoset (unscaled)
// The scaling keeps every entry an exact integer for pure profiles on
// integer-utility games, which is what makes phase skipping reproduce the
// un-skipped run bit for bit. Argmax decisions, pursue times and averages
// are invariant under the scaling. Subtrees both players reach with
// probability zero are skipped and do not count as touched.
struct ValueTable {
  std::vector<std::vector<double>> values;
  std::vector<double> opp_reach;
  std::vector<double> own_reach;
  double scale = 1.0;
  std::uint64_t nodes_touched = 0;
  double root_value_p1 = 0.0;  // unscaled
};

struct PursuitResultEf {
  std::vector<std::vector<double>> gap;
  std::vector<std::vector<double>> speed;
  std::vector<std::vector<double>> pursue;  // may hold inf
  std::uint64_t phase_length = 1;
  bool stationary = false;  // every pursue time was infinite
};

enum class QUpdateMode { Pcfr, Sync };

// Point mass on each infoset's Q-argmax (ties to the lowest action index).
StrategyProfile q_to_strategy(const SolverState& state);

ValueTable strategy_to_values(const GameTree& tree, const StrategyProfile& profile);

PursuitResultEf compute_pursuit_ef(const SolverState& state, const ValueTable& values,
                                   std::uint64_t budget_remaining = kNoEffectiveLimit);

// Pcfr: adds values once, returns 1. Sync: computes the pursuit result and
// adds phase_length * values. Returns the applied phase length.
std::uint64_t update_q_values(SolverState& state, const ValueTable& values, QUpdateMode mode,
                              std::uint64_t budget_remaining = kNoEffectiveLimit);

void update_average(SolverState& state, const StrategyProfile& profile,
                    std::uint64_t phase_length, const std::vector<double>& infoset_own_reach);
void update_average(SolverState& state, const GameTree& tree, const StrategyProfile& profile,
                    std::uint64_t phase_length, const ReachWeights& reach);

// Per-infoset normalization; zero-mass infosets fall back to uniform.
StrategyProfile normalize_average(const SolverState& state);

struct Budget {
  enum class Kind { MetaIters, EffIters, Nodes };
  Kind kind = Kind::EffIters;
  std::uint64_t amount = 0;

  // "<n>iters", "<n>eff-iters" or "<n>nodes".
  static Budget parse(const std::string& spec);
  std::string to_string() const;
};

struct StepRecord {
  std::uint64_t meta_iteration = 0;       // 1-based, after the step
  std::uint64_t effective_iteration = 0;  // cumulative, after the step
  std::uint64_t w_pst = 1;
  std::uint64_t cumulative_nodes = 0;
};

// Called after every meta-iteration; state.profile is the profile the step played.
using StepObserver = std::function<void(const SolverState& state, const StepRecord& record)>;

struct RunResult {
  StrategyProfile average;
  std::vector<StepRecord> steps;
  SolverState state;
  TouchCounter touches;
  bool stationary = false;  // some step had every pursue time infinite
};

RunResult run_sync_pcfr(const GameTree& tree, Budget budget, std::uint64_t seed,
                        const StepObserver& observer = {});
RunResult run_pcfr(const GameTree& tree, Budget budget, std::uint64_t seed,
                   const StepObserver& observer = {});
RunResult run_cfr(const GameTree& tree, Budget budget, std::uint64_t seed,
                  const StepObserver& observer = {});
RunResult run_cfrplus(const GameTree& tree, Budget budget, std::uint64_t seed,
                      const StepObserver& observer = {});

// Dispatch by id: "cfr", "cfrplus", "pcfr", "sync-pcfr".
// Throws std::invalid_argument (listing valid ids) for anything else.
RunResult run_solver(const std::string& algo_id, const GameTree& tree, Budget budget,
                     std::uint64_t seed, const StepObserver& observer = {});
const std::vector<std::string>& known_solver_ids();

// Checkpoint dump: one line per infoset with the Q/regret vector and the
// average numerators, full precision.
void dump_state(std::ostream& os, const SolverState& state);

}  // namespace efg
