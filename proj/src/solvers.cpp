#include "efg/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "efg/pursuit.hpp"

namespace efg {

namespace {

void check_profile_shape(const GameTree& tree, const StrategyProfile& profile) {
  if (profile.size() != tree.infosets.size())
    throw std::logic_error("profile does not cover every infoset");
  for (const InfoSet& is : tree.infosets)
    if (profile[is.id].size() != static_cast<size_t>(is.num_actions))
      throw std::logic_error("profile arity mismatch at infoset " + std::to_string(is.id));
}

// Simultaneous counterfactual evaluation with naive pruning: a subtree is
// skipped once both players' own action-probability products hit zero, at
// which point nothing below can contribute to any Q, regret or average
// update, nor to any value that still carries weight above.
//
// zeta carries chance_scale times the chance probability of the node. With
// integer chance weights, zeta * weight / total is an exact integer
// division, so for pure profiles on integer utilities all returned masses
// and accumulated values are exact integers.
struct ValuePass {
  const GameTree& tree;
  const StrategyProfile& profile;
  ValueTable out;

  ValuePass(const GameTree& t, const StrategyProfile& p) : tree(t), profile(p) {
    out.values.resize(tree.infosets.size());
    for (const InfoSet& is : tree.infosets) out.values[is.id].assign(is.num_actions, 0.0);
    out.opp_reach.assign(tree.infosets.size(), 0.0);
    out.own_reach.assign(tree.infosets.size(), 0.0);
    out.scale = t.chance_scale;
  }

  // Returns the subtree's player-1 value mass: the sum over reachable
  // terminals of (strategy products below this node) * zeta(z) * u1(z).
  double walk(int node, double p1, double p2, double zeta) {
    ++out.nodes_touched;
    const Node& n = tree.nodes[node];
    switch (n.kind) {
      case NodeKind::Terminal:
        return zeta * n.utility;
      case NodeKind::Chance: {
        std::int64_t total = 0;
        for (std::int64_t w : n.chance_weights) total += w;
        double m = 0.0;
        for (size_t k = 0; k < n.children.size(); ++k)
          m += walk(n.children[k], p1, p2,
                    zeta * static_cast<double>(n.chance_weights[k]) / static_cast<double>(total));
        return m;
      }
      case NodeKind::Decision:
        break;
    }
    int player = n.player;
    double own = player == 1 ? p1 : p2;
    double opp_sigma = player == 1 ? p2 : p1;  // zeta joins via the returned masses
    out.own_reach[n.infoset] += own;
    out.opp_reach[n.infoset] += opp_sigma * zeta;
    const std::vector<double>& sigma = profile[n.infoset];
    std::vector<double>& v = out.values[n.infoset];
    double m = 0.0;
    for (size_t a = 0; a < n.children.size(); ++a) {
      double c1 = p1, c2 = p2;
      (player == 1 ? c1 : c2) *= sigma[a];
      if (c1 == 0.0 && c2 == 0.0) continue;  // sigma[a] is 0 here, so nothing is lost
      double ma = walk(n.children[a], c1, c2, zeta);
      m += sigma[a] * ma;
      v[a] += opp_sigma * (player == 1 ? ma : -ma);
    }
    return m;
  }
};

StrategyProfile regret_matching_profile(const GameTree& tree, const SolverState& state) {
  StrategyProfile p(tree.infosets.size());
  for (const InfoSet& is : tree.infosets)
    p[is.id] = regret_matching_strategy(state.table[is.id]);
  return p;
}

bool budget_exhausted(const Budget& budget, const SolverState& state,
                      const TouchCounter& touches) {
  switch (budget.kind) {
    case Budget::Kind::MetaIters:
      return state.meta_iteration >= budget.amount;
    case Budget::Kind::EffIters:
      return state.effective_iteration >= budget.amount;
    case Budget::Kind::Nodes:
      return touches.cumulative >= budget.amount;
  }
  return true;
}

std::uint64_t remaining_effective(const Budget& budget, const SolverState& state) {
  if (budget.kind == Budget::Kind::EffIters) return budget.amount - state.effective_iteration;
  if (state.effective_iteration >= kNoEffectiveLimit) return 1;
  return kNoEffectiveLimit - state.effective_iteration;
}

std::uint64_t update_q_values_impl(SolverState& state, const ValueTable& values,
                                   QUpdateMode mode, std::uint64_t budget_remaining,
                                   bool* stationary_out) {
  std::uint64_t w = 1;
  if (mode == QUpdateMode::Sync) {
    PursuitResultEf pursuit = compute_pursuit_ef(state, values, budget_remaining);
    w = pursuit.phase_length;
    if (stationary_out) *stationary_out = pursuit.stationary;
  } else if (stationary_out) {
    *stationary_out = false;
  }
  double wd = static_cast<double>(w);
  for (size_t i = 0; i < state.table.size(); ++i)
    for (size_t a = 0; a < state.table[i].size(); ++a)
      state.table[i][a] += wd * values.values[i][a];
  return w;
}

RunResult run_pcfr_family(const GameTree& tree, Budget budget, std::uint64_t seed, bool sync,
                          const StepObserver& observer) {
  if (budget.amount < 1) throw std::invalid_argument("solver budget must be >= 1");
  RunResult out;
  SolverState state = SolverState::init(tree, seed);
  while (!budget_exhausted(budget, state, out.touches)) {
    // Meta-iteration 0 plays the seeded random profile; afterwards the
    // profile is the Q-argmax.
    if (state.meta_iteration > 0) state.profile = q_to_strategy(state);
    ValueTable values = strategy_to_values(tree, state.profile);
    out.touches.add(values.nodes_touched);
    bool stationary = false;
    std::uint64_t w =
        update_q_values_impl(state, values, sync ? QUpdateMode::Sync : QUpdateMode::Pcfr,
                             remaining_effective(budget, state), &stationary);
    out.stationary = out.stationary || stationary;
    update_average(state, state.profile, w, values.own_reach);
    state.meta_iteration += 1;
    state.effective_iteration += w;
    StepRecord rec{state.meta_iteration, state.effective_iteration, w, out.touches.cumulative};
    out.steps.push_back(rec);
    if (observer) observer(state, rec);
  }
  out.average = normalize_average(state);
  out.state = std::move(state);
  return out;
}

RunResult run_cfr_impl(const GameTree& tree, Budget budget, std::uint64_t seed,
                       const StepObserver& observer) {
  if (budget.amount < 1) throw std::invalid_argument("solver budget must be >= 1");
  RunResult out;
  SolverState state = SolverState::init(tree, seed);
  while (!budget_exhausted(budget, state, out.touches)) {
    state.profile = regret_matching_profile(tree, state);
    ValueTable values = strategy_to_values(tree, state.profile);
    out.touches.add(values.nodes_touched);
    for (const InfoSet& is : tree.infosets) {
      const std::vector<double>& v = values.values[is.id];
      const std::vector<double>& sigma = state.profile[is.id];
      double ev = 0.0;
      for (int a = 0; a < is.num_actions; ++a) ev += sigma[a] * v[a];
      for (int a = 0; a < is.num_actions; ++a) state.table[is.id][a] += v[a] - ev;
    }
    update_average(state, state.profile, 1, values.own_reach);
    state.meta_iteration += 1;
    state.effective_iteration += 1;
    StepRecord rec{state.meta_iteration, state.effective_iteration, 1, out.touches.cumulative};
    out.steps.push_back(rec);
    if (observer) observer(state, rec);
  }
  out.average = normalize_average(state);
  out.state = std::move(state);
  return out;
}

RunResult run_cfrplus_impl(const GameTree& tree, Budget budget, std::uint64_t seed,
                           const StepObserver& observer) {
  if (budget.amount < 1) throw std::invalid_argument("solver budget must be >= 1");
  RunResult out;
  SolverState state = SolverState::init(tree, seed);
  while (!budget_exhausted(budget, state, out.touches)) {
    std::uint64_t t = state.meta_iteration + 1;  // linear averaging weight
    std::uint64_t nodes_this_iter = 0;
    for (int player = 1; player <= 2; ++player) {
      state.profile = regret_matching_profile(tree, state);
      ValueTable values = strategy_to_values(tree, state.profile);
      nodes_this_iter += values.nodes_touched;
      for (const InfoSet& is : tree.infosets) {
        if (is.player != player) continue;
        const std::vector<double>& v = values.values[is.id];
        const std::vector<double>& sigma = state.profile[is.id];
        double ev = 0.0;
        for (int a = 0; a < is.num_actions; ++a) ev += sigma[a] * v[a];
        for (int a = 0; a < is.num_actions; ++a) {
          state.table[is.id][a] = std::max(0.0, state.table[is.id][a] + (v[a] - ev));
          state.avg_num[is.id][a] +=
              static_cast<double>(t) * values.own_reach[is.id] * sigma[a];
        }
      }
    }
    out.touches.add(nodes_this_iter);
    state.meta_iteration += 1;
    state.effective_iteration += 1;
    StepRecord rec{state.meta_iteration, state.effective_iteration, 1, out.touches.cumulative};
    out.steps.push_back(rec);
    if (observer) observer(state, rec);
  }
  out.average = normalize_average(state);
  out.state = std::move(state);
  return out;
}

}  // namespace

SolverState SolverState::init(const GameTree& tree, std::uint64_t seed) {
  SolverState s;
  s.rng_seed = seed;
  s.table.resize(tree.infosets.size());
  s.avg_num.resize(tree.infosets.size());
  s.profile.resize(tree.infosets.size());
  std::mt19937_64 rng(seed);
  for (const InfoSet& is : tree.infosets) {
    s.table[is.id].assign(is.num_actions, 0.0);
    s.avg_num[is.id].assign(is.num_actions, 0.0);
    s.profile[is.id].assign(is.num_actions, 0.0);
    s.profile[is.id][rng() % is.num_actions] = 1.0;
  }
  return s;
}

StrategyProfile q_to_strategy(const SolverState& state) {
  StrategyProfile p(state.table.size());
  for (size_t i = 0; i < state.table.size(); ++i) {
    p[i].assign(state.table[i].size(), 0.0);
    p[i][argmax_lowest(state.table[i])] = 1.0;
  }
  return p;
}

ValueTable strategy_to_values(const GameTree& tree, const StrategyProfile& profile) {
  check_profile_shape(tree, profile);
  ValuePass pass(tree, profile);
  double mass = pass.walk(tree.root, 1.0, 1.0, tree.chance_scale);
  pass.out.root_value_p1 = mass / tree.chance_scale;
  return std::move(pass.out);
}

PursuitResultEf compute_pursuit_ef(const SolverState& state, const ValueTable& values,
                                   std::uint64_t budget_remaining) {
  PursuitResultEf r;
  size_t n_sets = state.table.size();
  r.gap.resize(n_sets);
  r.speed.resize(n_sets);
  r.pursue.resize(n_sets);
  double best = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n_sets; ++i) {
    const std::vector<double>& q = state.table[i];
    const std::vector<double>& v = values.values[i];
    int n = static_cast<int>(q.size());
    // Reference action: the one the current (pure) profile plays.
    int cur = argmax_lowest(state.profile[i]);
    double q_max = *std::max_element(q.begin(), q.end());
    r.gap[i].resize(n);
    r.speed[i].resize(n);
    r.pursue[i].resize(n);
    for (int a = 0; a < n; ++a) {
      r.gap[i][a] = q_max - q[a];
      r.speed[i][a] = v[a] - v[cur];
      r.pursue[i][a] = a == cur ? std::numeric_limits<double>::infinity()
                                : pursue_time(r.gap[i][a], r.speed[i][a], a < cur);
      best = std::min(best, r.pursue[i][a]);
    }
  }
  r.stationary = std::isinf(best);
  double cap = static_cast<double>(budget_remaining);
  double w = r.stationary ? cap : std::min(best, cap);
  r.phase_length = static_cast<std::uint64_t>(std::max(1.0, w));
  return r;
}

std::uint64_t update_q_values(SolverState& state, const ValueTable& values, QUpdateMode mode,
                              std::uint64_t budget_remaining) {
  return update_q_values_impl(state, values, mode, budget_remaining, nullptr);
}

void update_average(SolverState& state, const StrategyProfile& profile,
                    std::uint64_t phase_length, const std::vector<double>& infoset_own_reach) {
  double w = static_cast<double>(phase_length);
  for (size_t i = 0; i < state.avg_num.size(); ++i) {
    double reach = infoset_own_reach[i];
    if (reach == 0.0) continue;
    for (size_t a = 0; a < state.avg_num[i].size(); ++a)
      state.avg_num[i][a] += w * reach * profile[i][a];
  }
}

void update_average(SolverState& state, const GameTree& tree, const StrategyProfile& profile,
                    std::uint64_t phase_length, const ReachWeights& reach) {
  InfosetReach per_infoset = infoset_reach(tree, reach);
  update_average(state, profile, phase_length, per_infoset.own);
}

StrategyProfile normalize_average(const SolverState& state) {
  StrategyProfile p(state.avg_num.size());
  for (size_t i = 0; i < state.avg_num.size(); ++i) {
    const std::vector<double>& num = state.avg_num[i];
    double total = 0.0;
    for (double v : num) total += v;
    p[i].resize(num.size());
    if (total > 0.0) {
      for (size_t a = 0; a < num.size(); ++a) p[i][a] = num[a] / total;
    } else {
      for (size_t a = 0; a < num.size(); ++a) p[i][a] = 1.0 / static_cast<double>(num.size());
    }
  }
  return p;
}

Budget Budget::parse(const std::string& spec) {
  size_t pos = 0;
  double amount = 0.0;
  try {
    amount = std::stod(spec, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad budget '" + spec + "'");
  }
  std::string suffix = spec.substr(pos);
  Budget b;
  if (suffix == "iters") b.kind = Kind::MetaIters;
  else if (suffix == "eff-iters") b.kind = Kind::EffIters;
  else if (suffix == "nodes") b.kind = Kind::Nodes;
  else
    throw std::invalid_argument("bad budget '" + spec +
                                "' (want <n>iters, <n>eff-iters or <n>nodes)");
  if (!(amount >= 1.0) || amount != std::floor(amount) || amount > 9e18)
    throw std::invalid_argument("budget amount must be a positive integer");
  b.amount = static_cast<std::uint64_t>(amount);
  return b;
}

std::string Budget::to_string() const {
  std::string suffix = kind == Kind::MetaIters ? "iters"
                       : kind == Kind::EffIters ? "eff-iters"
                                                : "nodes";
  return std::to_string(amount) + suffix;
}

RunResult run_sync_pcfr(const GameTree& tree, Budget budget, std::uint64_t seed,
                        const StepObserver& observer) {
  return run_pcfr_family(tree, budget, seed, /*sync=*/true, observer);
}

RunResult run_pcfr(const GameTree& tree, Budget budget, std::uint64_t seed,
                   const StepObserver& observer) {
  return run_pcfr_family(tree, budget, seed, /*sync=*/false, observer);
}

RunResult run_cfr(const GameTree& tree, Budget budget, std::uint64_t seed,
                  const StepObserver& observer) {
  return run_cfr_impl(tree, budget, seed, observer);
}

RunResult run_cfrplus(const GameTree& tree, Budget budget, std::uint64_t seed,
                      const StepObserver& observer) {
  return run_cfrplus_impl(tree, budget, seed, observer);
}

RunResult run_solver(const std::string& algo_id, const GameTree& tree, Budget budget,
                     std::uint64_t seed, const StepObserver& observer) {
  if (algo_id == "cfr") return run_cfr(tree, budget, seed, observer);
  if (algo_id == "cfrplus") return run_cfrplus(tree, budget, seed, observer);
  if (algo_id == "pcfr") return run_pcfr(tree, budget, seed, observer);
  if (algo_id == "sync-pcfr") return run_sync_pcfr(tree, budget, seed, observer);
  std::string valid;
  for (const std::string& s : known_solver_ids()) valid += (valid.empty() ? "" : ", ") + s;
  throw std::invalid_argument("unknown solver id '" + algo_id + "' (valid: " + valid + ")");
}

const std::vector<std::string>& known_solver_ids() {
  static const std::vector<std::string> ids = {"cfr", "cfrplus", "pcfr", "sync-pcfr"};
  return ids;
}

void dump_state(std::ostream& os, const SolverState& state) {
  for (size_t i = 0; i < state.table.size(); ++i) {
    os << "infoset " << i << " q";
    for (double v : state.table[i]) os << " " << format_double(v);
    os << " avg";
    for (double v : state.avg_num[i]) os << " " << format_double(v);
    os << "\n";
  }
}

}  // namespace efg
