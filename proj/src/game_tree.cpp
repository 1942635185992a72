#include "efg/game_tree.hpp"

#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace efg {

namespace {

void fail(const std::string& what) { throw std::logic_error("game tree: " + what); }

std::int64_t lcm_checked(std::int64_t a, std::int64_t b) {
  std::int64_t g = std::gcd(a, b);
  if (a / g > (1LL << 52) / b) fail("chance denominators too large for exact scaling");
  return a / g * b;
}

}  // namespace

void GameTree::finalize_chance() {
  for (Node& n : nodes) {
    if (n.kind != NodeKind::Chance) continue;
    std::int64_t total = 0;
    for (std::int64_t w : n.chance_weights) total += w;
    n.chance_probs.resize(n.chance_weights.size());
    for (size_t k = 0; k < n.chance_weights.size(); ++k)
      n.chance_probs[k] = static_cast<double>(n.chance_weights[k]) / static_cast<double>(total);
  }
  // lcm over root-to-leaf paths of the product of chance denominators.
  std::int64_t scale = 1;
  struct Item {
    int node;
    std::int64_t den;
  };
  std::vector<Item> stack{{root, 1}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    const Node& n = nodes[it.node];
    if (n.kind == NodeKind::Terminal) {
      scale = lcm_checked(scale, it.den);
      continue;
    }
    std::int64_t den = it.den;
    if (n.kind == NodeKind::Chance) {
      std::int64_t total = 0;
      for (std::int64_t w : n.chance_weights) total += w;
      if (den > (1LL << 52) / total) fail("chance denominators too large for exact scaling");
      den *= total;
    }
    for (int c : n.children) stack.push_back({c, den});
  }
  chance_scale = static_cast<double>(scale);
}

void GameTree::validate() const {
  if (nodes.empty()) fail("empty tree");
  if (root < 0 || root >= num_nodes()) fail("root index out of range");
  if (nodes[root].parent != -1) fail("root has a parent");

  std::vector<int> seen(nodes.size(), 0);
  for (int i = 0; i < num_nodes(); ++i) {
    const Node& n = nodes[i];
    switch (n.kind) {
      case NodeKind::Terminal:
        if (!n.children.empty()) fail("terminal node with children");
        break;
      case NodeKind::Chance: {
        if (n.children.empty()) fail("chance node without children");
        if (n.children.size() != n.chance_probs.size() ||
            n.children.size() != n.chance_weights.size())
          fail("chance outcome/probability count mismatch");
        for (std::int64_t w : n.chance_weights)
          if (w < 1) fail("non-positive chance weight");
        double sum = 0.0;
        for (double p : n.chance_probs) {
          if (!(p > 0.0)) fail("non-positive chance probability");
          sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-12) fail("chance probabilities do not sum to 1");
        break;
      }
      case NodeKind::Decision: {
        if (n.children.empty()) fail("decision node without children");
        if (n.player != 1 && n.player != 2) fail("acting player must be 1 or 2");
        if (n.infoset < 0 || n.infoset >= num_infosets()) fail("bad infoset id");
        const InfoSet& is = infosets[n.infoset];
        if (is.player != n.player) fail("infoset player mismatch");
        if (static_cast<int>(n.children.size()) != is.num_actions)
          fail("child count differs from infoset action count");
        break;
      }
    }
    for (int c : n.children) {
      if (c < 0 || c >= num_nodes()) fail("child index out of range");
      if (nodes[c].parent != i) fail("child parent link broken");
      if (++seen[c] > 1) fail("node has two parents");
    }
  }
  if (seen[root] != 0) fail("root is some node's child");
  for (int i = 0; i < num_nodes(); ++i)
    if (i != root && seen[i] != 1) fail("unreachable or multiply-linked node");

  for (const InfoSet& is : infosets) {
    if (is.num_actions < 1) fail("infoset without actions");
    if (static_cast<int>(is.action_labels.size()) != is.num_actions)
      fail("action label count mismatch");
    if (is.member_nodes.empty()) fail("infoset without member nodes");
    for (int m : is.member_nodes) {
      if (m < 0 || m >= num_nodes()) fail("member index out of range");
      const Node& n = nodes[m];
      if (n.kind != NodeKind::Decision || n.infoset != is.id)
        fail("member node does not reference its infoset");
    }
  }
}

StrategyProfile uniform_profile(const GameTree& tree) {
  StrategyProfile p(tree.infosets.size());
  for (const InfoSet& is : tree.infosets)
    p[is.id].assign(is.num_actions, 1.0 / is.num_actions);
  return p;
}

ReachWeights compute_reach(const GameTree& tree, const StrategyProfile& profile) {
  if (profile.size() != tree.infosets.size())
    throw std::logic_error("compute_reach: profile does not cover every infoset");
  for (const InfoSet& is : tree.infosets)
    if (profile[is.id].size() != static_cast<size_t>(is.num_actions))
      throw std::logic_error("compute_reach: profile arity mismatch at infoset " +
                             std::to_string(is.id));

  ReachWeights w;
  w.own.assign(tree.nodes.size(), 0.0);
  w.opp.assign(tree.nodes.size(), 0.0);

  // Iterative DFS carrying (player-1 product, player-2 product, chance product).
  struct Item {
    int node;
    double p1, p2, pc;
  };
  std::vector<Item> stack;
  stack.push_back({tree.root, 1.0, 1.0, 1.0});
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    const Node& n = tree.nodes[it.node];
    if (n.kind == NodeKind::Decision) {
      w.own[it.node] = n.player == 1 ? it.p1 : it.p2;
      w.opp[it.node] = (n.player == 1 ? it.p2 : it.p1) * it.pc;
      const std::vector<double>& sigma = profile[n.infoset];
      for (size_t a = 0; a < n.children.size(); ++a) {
        Item child = it;
        child.node = n.children[a];
        (n.player == 1 ? child.p1 : child.p2) *= sigma[a];
        stack.push_back(child);
      }
    } else {
      // Player-1 perspective at chance and terminal nodes; own*opp is the
      // full reach either way.
      w.own[it.node] = it.p1;
      w.opp[it.node] = it.p2 * it.pc;
      if (n.kind == NodeKind::Chance) {
        for (size_t k = 0; k < n.children.size(); ++k) {
          Item child = it;
          child.node = n.children[k];
          child.pc *= n.chance_probs[k];
          stack.push_back(child);
        }
      }
    }
  }
  return w;
}

InfosetReach infoset_reach(const GameTree& tree, const ReachWeights& weights) {
  InfosetReach r;
  r.own.assign(tree.infosets.size(), 0.0);
  r.opp.assign(tree.infosets.size(), 0.0);
  for (const InfoSet& is : tree.infosets) {
    for (int m : is.member_nodes) {
      r.own[is.id] += weights.own[m];
      r.opp[is.id] += weights.opp[m];
    }
  }
  return r;
}

std::vector<int> enumerate_infosets(const GameTree& tree, int player) {
  std::vector<int> ids;
  for (const InfoSet& is : tree.infosets)
    if (is.player == player) ids.push_back(is.id);
  return ids;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int argmax_lowest(const std::vector<double>& v) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

void dump_tree(std::ostream& os, const GameTree& tree) {
  os << "game " << tree.name << " nodes " << tree.num_nodes() << " infosets "
     << tree.num_infosets() << " root " << tree.root << " utility_range "
     << format_double(tree.utility_range) << "\n";
  for (int i = 0; i < tree.num_nodes(); ++i) {
    const Node& n = tree.nodes[i];
    os << "node " << i;
    switch (n.kind) {
      case NodeKind::Decision: {
        os << " decision player " << n.player << " infoset " << n.infoset << " children ";
        for (size_t a = 0; a < n.children.size(); ++a)
          os << (a ? "," : "") << n.children[a];
        break;
      }
      case NodeKind::Chance: {
        os << " chance children ";
        for (size_t k = 0; k < n.children.size(); ++k)
          os << (k ? "," : "") << n.children[k] << ":" << format_double(n.chance_probs[k]);
        break;
      }
      case NodeKind::Terminal:
        os << " terminal utility " << format_double(n.utility);
        break;
    }
    os << "\n";
  }
  for (const InfoSet& is : tree.infosets) {
    os << "infoset " << is.id << " player " << is.player << " key " << is.key << " actions ";
    for (int a = 0; a < is.num_actions; ++a)
      os << (a ? "," : "") << is.action_labels[a];
    os << " members ";
    for (size_t m = 0; m < is.member_nodes.size(); ++m)
      os << (m ? "," : "") << is.member_nodes[m];
    os << "\n";
  }
}

}  // namespace efg
