#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace oracle {

using efg::GameTree;
using efg::InfoSet;
using efg::MatrixGame;
using efg::Node;
using efg::NodeKind;
using efg::StrategyProfile;

namespace {

double expectation_below(const GameTree& tree, const StrategyProfile& profile, int node) {
  const Node& n = tree.nodes[node];
  switch (n.kind) {
    case NodeKind::Terminal:
      return n.utility;
    case NodeKind::Chance: {
      double v = 0.0;
      for (size_t k = 0; k < n.children.size(); ++k)
        v += n.chance_probs[k] * expectation_below(tree, profile, n.children[k]);
      return v;
    }
    case NodeKind::Decision: {
      double v = 0.0;
      for (size_t a = 0; a < n.children.size(); ++a)
        v += profile[n.infoset][a] * expectation_below(tree, profile, n.children[a]);
      return v;
    }
  }
  return 0.0;
}

// Opponent-and-chance reach of a node, walked up the parent chain.
double opp_chance_reach_of_node(const GameTree& tree, const StrategyProfile& profile, int node,
                                int player) {
  double reach = 1.0;
  int cur = node;
  while (tree.nodes[cur].parent != -1) {
    int parent = tree.nodes[cur].parent;
    const Node& p = tree.nodes[parent];
    size_t idx = 0;
    while (p.children[idx] != cur) ++idx;
    if (p.kind == NodeKind::Chance) reach *= p.chance_probs[idx];
    else if (p.player != player) reach *= profile[p.infoset][idx];
    cur = parent;
  }
  return reach;
}

}  // namespace

std::vector<double> infoset_action_values(const GameTree& tree, const StrategyProfile& profile,
                                          int infoset_id) {
  const InfoSet& is = tree.infosets[infoset_id];
  std::vector<double> v(is.num_actions, 0.0);
  for (int m : is.member_nodes) {
    double w = opp_chance_reach_of_node(tree, profile, m, is.player);
    for (int a = 0; a < is.num_actions; ++a)
      v[a] += w * expectation_below(tree, profile, tree.nodes[m].children[a]) *
              (is.player == 1 ? 1.0 : -1.0);
  }
  return v;
}

double infoset_opp_reach(const GameTree& tree, const StrategyProfile& profile, int infoset_id) {
  const InfoSet& is = tree.infosets[infoset_id];
  double w = 0.0;
  for (int m : is.member_nodes) w += opp_chance_reach_of_node(tree, profile, m, is.player);
  return w;
}

double expected_value(const GameTree& tree, const StrategyProfile& profile) {
  return expectation_below(tree, profile, tree.root);
}

namespace {

// Pure strategies indexed per infoset of the player, in id order.
std::vector<int> player_infosets(const GameTree& tree, int player) {
  std::vector<int> ids;
  for (const InfoSet& is : tree.infosets)
    if (is.player == player) ids.push_back(is.id);
  return ids;
}

std::uint64_t pure_count(const GameTree& tree, const std::vector<int>& sets,
                         std::uint64_t limit) {
  std::uint64_t count = 1;
  for (int id : sets) {
    count *= static_cast<std::uint64_t>(tree.infosets[id].num_actions);
    if (count > limit) throw std::runtime_error("pure strategy space too large for the oracle");
  }
  return count;
}

void assign_pure(const GameTree& tree, const std::vector<int>& sets, std::uint64_t index,
                 StrategyProfile& profile) {
  for (int id : sets) {
    int n = tree.infosets[id].num_actions;
    int a = static_cast<int>(index % n);
    index /= n;
    std::fill(profile[id].begin(), profile[id].end(), 0.0);
    profile[id][a] = 1.0;
  }
}

}  // namespace

double best_response_pure_enum(const GameTree& tree, const StrategyProfile& profile,
                               int responder, std::uint64_t limit) {
  std::vector<int> sets = player_infosets(tree, responder);
  std::uint64_t total = pure_count(tree, sets, limit);
  StrategyProfile work = profile;
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t idx = 0; idx < total; ++idx) {
    assign_pure(tree, sets, idx, work);
    double v = expected_value(tree, work);
    if (responder == 2) v = -v;
    best = std::max(best, v);
  }
  return best;
}

double matrix_game_value(int rows, int cols, const std::vector<double>& payoff_row_major) {
  // Shift payoffs positive, then maximize sum(w) subject to A'w <= 1, w >= 0.
  // The optimum is 1/v', and v = v' - shift.
  double shift = 1.0;
  for (double v : payoff_row_major) shift = std::max(shift, 1.0 - v);
  int m = rows, n = cols;
  // Tableau rows: m constraints plus objective; columns: n vars, m slacks, rhs.
  std::vector<std::vector<double>> t(m + 1, std::vector<double>(n + m + 1, 0.0));
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j)
      t[i][j] = payoff_row_major[static_cast<size_t>(i) * n + j] + shift;
    t[i][n + i] = 1.0;
    t[i][n + m] = 1.0;
  }
  for (int j = 0; j < n; ++j) t[m][j] = -1.0;  // maximize sum(w)

  std::vector<int> basis(m);
  for (int i = 0; i < m; ++i) basis[i] = n + i;
  for (int iter = 0; iter < 10000; ++iter) {
    // Bland's rule: entering column = lowest index with negative cost.
    int col = -1;
    for (int j = 0; j < n + m; ++j)
      if (t[m][j] < -1e-12) {
        col = j;
        break;
      }
    if (col < 0) break;
    int row = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < m; ++i) {
      if (t[i][col] > 1e-12) {
        double ratio = t[i][n + m] / t[i][col];
        if (row < 0 || ratio < best_ratio - 1e-15 ||
            (std::abs(ratio - best_ratio) <= 1e-15 && basis[i] < basis[row])) {
          row = i;
          best_ratio = ratio;
        }
      }
    }
    if (row < 0) throw std::runtime_error("matrix game LP is unbounded");
    double pivot = t[row][col];
    for (double& x : t[row]) x /= pivot;
    for (int i = 0; i <= m; ++i) {
      if (i == row) continue;
      double f = t[i][col];
      if (f == 0.0) continue;
      for (int j = 0; j <= n + m; ++j) t[i][j] -= f * t[row][j];
    }
    basis[row] = col;
  }
  double opt = t[m][n + m];  // sum of w at the optimum
  if (!(opt > 0.0)) throw std::runtime_error("matrix game LP failed");
  return 1.0 / opt - shift;
}

PureMatrix pure_strategy_matrix(const GameTree& tree, std::uint64_t limit) {
  std::vector<int> sets1 = player_infosets(tree, 1);
  std::vector<int> sets2 = player_infosets(tree, 2);
  std::uint64_t n1 = pure_count(tree, sets1, limit);
  std::uint64_t n2 = pure_count(tree, sets2, limit);
  PureMatrix pm;
  pm.rows = static_cast<int>(n1);
  pm.cols = static_cast<int>(n2);
  pm.payoff.resize(n1 * n2);
  StrategyProfile work(tree.infosets.size());
  for (const InfoSet& is : tree.infosets) work[is.id].assign(is.num_actions, 0.0);
  for (std::uint64_t i = 0; i < n1; ++i) {
    assign_pure(tree, sets1, i, work);
    for (std::uint64_t j = 0; j < n2; ++j) {
      assign_pure(tree, sets2, j, work);
      pm.payoff[i * n2 + j] = expected_value(tree, work);
    }
  }
  return pm;
}

StrategyProfile kuhn_equilibrium(const GameTree& kuhn, double alpha) {
  if (alpha < 0.0 || alpha > 1.0 / 3.0)
    throw std::invalid_argument("kuhn_equilibrium: alpha outside [0, 1/3]");
  StrategyProfile p(kuhn.infosets.size());
  auto set = [&](const std::string& key, double second_action_prob) {
    for (const InfoSet& is : kuhn.infosets) {
      if (is.key != key) continue;
      p[is.id] = {1.0 - second_action_prob, second_action_prob};
      return;
    }
    throw std::logic_error("kuhn_equilibrium: no infoset with key " + key);
  };
  // Player 1 opening (check/bet) and reply to a bet after checking (fold/call).
  set("P1|J|", alpha);
  set("P1|Q|", 0.0);
  set("P1|K|", 3.0 * alpha);
  set("P1|J|kb", 0.0);
  set("P1|Q|kb", alpha + 1.0 / 3.0);
  set("P1|K|kb", 1.0);
  // Player 2 after a check (check/bet) and facing a bet (fold/call).
  set("P2|J|k", 1.0 / 3.0);
  set("P2|Q|k", 0.0);
  set("P2|K|k", 1.0);
  set("P2|J|b", 0.0);
  set("P2|Q|b", 1.0 / 3.0);
  set("P2|K|b", 1.0);
  return p;
}

StrategyProfile random_mixed_profile(const GameTree& tree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.05, 1.0);
  StrategyProfile p(tree.infosets.size());
  for (const InfoSet& is : tree.infosets) {
    p[is.id].resize(is.num_actions);
    double total = 0.0;
    for (double& v : p[is.id]) {
      v = unif(rng);
      total += v;
    }
    for (double& v : p[is.id]) v /= total;
  }
  return p;
}

StrategyProfile random_pure_profile(const GameTree& tree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  StrategyProfile p(tree.infosets.size());
  for (const InfoSet& is : tree.infosets) {
    p[is.id].assign(is.num_actions, 0.0);
    p[is.id][rng() % is.num_actions] = 1.0;
  }
  return p;
}

MatrixGame random_integer_matrix(int rows, int cols, int max_abs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  MatrixGame g;
  g.rows = rows;
  g.cols = cols;
  g.name = "random";
  g.payoff.resize(static_cast<size_t>(rows) * cols);
  for (double& v : g.payoff)
    v = static_cast<double>(static_cast<std::int64_t>(rng() % (2 * max_abs + 1)) - max_abs);
  return g;
}

}  // namespace oracle
