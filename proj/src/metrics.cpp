#include "efg/metrics.hpp"

#include <stdexcept>

namespace efg {

namespace {

// Best response machinery. Decisions are made per infoset: the responder
// maximizes the sum over member nodes of opponent-and-chance reach times the
// subtree value, which is the correct maximization under imperfect
// information. Infosets are decided on demand; perfect recall guarantees the
// recursion terminates (an infoset never needs its own decision).
struct BestResponse {
  const GameTree& tree;
  const StrategyProfile& profile;
  int responder;
  std::vector<double> opp_reach;  // opponent-and-chance reach per node
  std::vector<int> decision;      // chosen action per responder infoset, -1 = undecided

  BestResponse(const GameTree& t, const StrategyProfile& p, int r)
      : tree(t), profile(p), responder(r) {
    opp_reach.assign(tree.nodes.size(), 0.0);
    decision.assign(tree.infosets.size(), -1);
    fill_reach(tree.root, 1.0);
  }

  void fill_reach(int node, double w) {
    opp_reach[node] = w;
    const Node& n = tree.nodes[node];
    if (n.kind == NodeKind::Chance) {
      for (size_t k = 0; k < n.children.size(); ++k)
        fill_reach(n.children[k], w * n.chance_probs[k]);
    } else if (n.kind == NodeKind::Decision) {
      for (size_t a = 0; a < n.children.size(); ++a) {
        double wa = n.player == responder ? w : w * profile[n.infoset][a];
        fill_reach(n.children[a], wa);
      }
    }
  }

  // Responder's expected utility below the node, given everything decided so far.
  double value(int node) {
    const Node& n = tree.nodes[node];
    switch (n.kind) {
      case NodeKind::Terminal:
        return responder == 1 ? n.utility : -n.utility;
      case NodeKind::Chance: {
        double v = 0.0;
        for (size_t k = 0; k < n.children.size(); ++k)
          v += n.chance_probs[k] * value(n.children[k]);
        return v;
      }
      case NodeKind::Decision: {
        if (n.player != responder) {
          double v = 0.0;
          for (size_t a = 0; a < n.children.size(); ++a)
            v += profile[n.infoset][a] * value(n.children[a]);
          return v;
        }
        return value(n.children[decide(n.infoset)]);
      }
    }
    return 0.0;
  }

  int decide(int infoset) {
    if (decision[infoset] >= 0) return decision[infoset];
    const InfoSet& is = tree.infosets[infoset];
    std::vector<double> score(is.num_actions, 0.0);
    for (int m : is.member_nodes) {
      const Node& n = tree.nodes[m];
      for (int a = 0; a < is.num_actions; ++a)
        score[a] += opp_reach[m] * value(n.children[a]);
    }
    decision[infoset] = argmax_lowest(score);
    return decision[infoset];
  }
};

void check_profile(const GameTree& tree, const StrategyProfile& profile) {
  if (profile.size() != tree.infosets.size())
    throw std::logic_error("profile does not cover every infoset");
  for (const InfoSet& is : tree.infosets)
    if (profile[is.id].size() != static_cast<size_t>(is.num_actions))
      throw std::logic_error("profile arity mismatch at infoset " + std::to_string(is.id));
}

double expectation(const GameTree& tree, const StrategyProfile& profile, int node) {
  const Node& n = tree.nodes[node];
  switch (n.kind) {
    case NodeKind::Terminal:
      return n.utility;
    case NodeKind::Chance: {
      double v = 0.0;
      for (size_t k = 0; k < n.children.size(); ++k)
        v += n.chance_probs[k] * expectation(tree, profile, n.children[k]);
      return v;
    }
    case NodeKind::Decision: {
      double v = 0.0;
      for (size_t a = 0; a < n.children.size(); ++a)
        v += profile[n.infoset][a] * expectation(tree, profile, n.children[a]);
      return v;
    }
  }
  return 0.0;
}

}  // namespace

double best_response_value(const GameTree& tree, const StrategyProfile& profile, int responder) {
  if (responder != 1 && responder != 2)
    throw std::invalid_argument("responder must be 1 or 2");
  check_profile(tree, profile);
  BestResponse br(tree, profile, responder);
  return br.value(tree.root);
}

ExploitabilityReport exploitability(const GameTree& tree, const StrategyProfile& profile) {
  ExploitabilityReport r;
  r.br_value_p1 = best_response_value(tree, profile, 1);
  r.br_value_p2 = best_response_value(tree, profile, 2);
  r.nash_conv = r.br_value_p1 + r.br_value_p2;
  r.exploitability = r.nash_conv / 2.0;
  return r;
}

double game_value(const GameTree& tree, const StrategyProfile& profile) {
  check_profile(tree, profile);
  return expectation(tree, profile, tree.root);
}

}  // namespace efg
