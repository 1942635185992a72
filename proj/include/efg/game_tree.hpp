#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace efg {

enum class NodeKind { Decision, Chance, Terminal };

struct Node {
  NodeKind kind = NodeKind::Terminal;
  int player = 0;    // Decision only: acting player, 1 or 2
  int infoset = -1;  // Decision only
  double utility = 0.0;  // Terminal only: payoff of player 1, in chips
  int parent = -1;
  std::vector<int> children;  // Decision/Chance: one per action/outcome
  // Chance only. Outcome k has probability chance_weights[k] / sum(weights);
  // chance_probs caches the quotients. Keeping the integer weights lets the
  // solvers run on exactly representable reach products.
  std::vector<std::int64_t> chance_weights;
  std::vector<double> chance_probs;
};

struct InfoSet {
  int id = -1;
  int player = 0;
  int num_actions = 0;
  std::string key;  // observation string, unique within the game
  std::vector<std::string> action_labels;
  std::vector<int> member_nodes;
};

// Behavioural strategy profile: one distribution over actions per infoset id.
// Covers both players (infoset ids are global).
using StrategyProfile = std::vector<std::vector<double>>;

// Per-node reach decomposition under a profile.
//   own: product of the acting player's own action probabilities on the path
//   opp: product of the other player's probabilities and chance probabilities
// At chance/terminal nodes the split is taken from player 1's perspective, so
// own * opp is always the full reach probability of the node.
struct ReachWeights {
  std::vector<double> own;
  std::vector<double> opp;
};

// Infoset-level reach: sum of member-node reach weights.
struct InfosetReach {
  std::vector<double> own;
  std::vector<double> opp;
};

struct GameTree {
  std::string name;
  std::vector<Node> nodes;
  std::vector<InfoSet> infosets;
  int root = 0;
  int num_players = 2;
  double utility_range = 0.0;  // max |terminal utility| in chips
  // Smallest D such that D times any path's chance probability is an
  // integer (lcm over root-to-leaf paths of the chance denominators).
  // Solvers accumulate values scaled by D so that trees with integer
  // utilities stay in exact integer arithmetic.
  double chance_scale = 1.0;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_infosets() const { return static_cast<int>(infosets.size()); }

  // Derives chance_probs from chance_weights and computes chance_scale.
  // Builders call this once all nodes are in place.
  void finalize_chance();

  // Checks the structural invariants (single root, acyclicity, child/action
  // consistency, chance probabilities, infoset homogeneity). Throws
  // std::logic_error on violation. Builders call this before returning.
  void validate() const;
};

StrategyProfile uniform_profile(const GameTree& tree);

// Top-down reach pass. Throws std::logic_error if the profile does not
// define a distribution for every infoset.
ReachWeights compute_reach(const GameTree& tree, const StrategyProfile& profile);

InfosetReach infoset_reach(const GameTree& tree, const ReachWeights& weights);

// Ids of the player's infosets in stable (id) order.
std::vector<int> enumerate_infosets(const GameTree& tree, int player);

// Line-oriented debug dump (node index, kind, infoset id, children) used by
// golden-file tests and the `dump` CLI command.
void dump_tree(std::ostream& os, const GameTree& tree);

// Shortest round-trip decimal form of a double ("nan" for NaN); used by the
// dump and CSV writers so output is byte-stable.
std::string format_double(double v);

// Lowest index among the maxima of v. Single tie-break rule used everywhere
// (argmax of Q values, best responses, pursuit reference actions).
int argmax_lowest(const std::vector<double>& v);

}  // namespace efg
