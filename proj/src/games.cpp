#include "efg/games.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace efg {

namespace {

// Shared builder state: nodes are appended in DFS order, infosets are created
// on first sight of their observation key. Construction is fully
// deterministic, so rebuilding a game yields an identical tree.
struct TreeBuilder {
  GameTree tree;
  std::map<std::string, int> infoset_by_key;

  int add_node(Node n) {
    tree.nodes.push_back(std::move(n));
    return static_cast<int>(tree.nodes.size()) - 1;
  }

  int decision(int parent, int player, const std::string& key,
               const std::vector<std::string>& labels) {
    Node n;
    n.kind = NodeKind::Decision;
    n.player = player;
    n.parent = parent;
    int id = add_node(std::move(n));
    auto it = infoset_by_key.find(key);
    if (it == infoset_by_key.end()) {
      InfoSet is;
      is.id = static_cast<int>(tree.infosets.size());
      is.player = player;
      is.num_actions = static_cast<int>(labels.size());
      is.key = key;
      is.action_labels = labels;
      tree.infosets.push_back(std::move(is));
      it = infoset_by_key.emplace(key, tree.infosets.back().id).first;
    }
    tree.nodes[id].infoset = it->second;
    tree.infosets[it->second].member_nodes.push_back(id);
    return id;
  }

  int chance(int parent) {
    Node n;
    n.kind = NodeKind::Chance;
    n.parent = parent;
    return add_node(std::move(n));
  }

  int terminal(int parent, double u1) {
    Node n;
    n.kind = NodeKind::Terminal;
    n.parent = parent;
    n.utility = u1;
    tree.utility_range = std::max(tree.utility_range, std::abs(u1));
    return add_node(std::move(n));
  }

  void link(int parent, int child) { tree.nodes[parent].children.push_back(child); }

  void link_chance(int parent, int child, std::int64_t weight = 1) {
    tree.nodes[parent].children.push_back(child);
    tree.nodes[parent].chance_weights.push_back(weight);
  }

  GameTree finish(std::string name) {
    tree.name = std::move(name);
    tree.finalize_chance();
    tree.validate();
    return std::move(tree);
  }
};

int other(int player) { return 3 - player; }

// ---------------------------------------------------------------------------
// Kuhn poker.
//
// Deck {J,Q,K}, each player antes 1 and receives one card. Player 1 may
// check or bet 1; facing a bet the opponent may fold or call. Sequences:
//   kk        showdown for the antes          (+-1)
//   bf        player 2 folds                  (+1)
//   bc, kbc   showdown for ante + bet         (+-2)
//   kbf       player 1 folds                  (-1)
// ---------------------------------------------------------------------------

const char* kKuhnCard[3] = {"J", "Q", "K"};

struct KuhnBuilder {
  TreeBuilder b;

  std::string key(int player, int card, const std::string& hist) {
    return "P" + std::to_string(player) + "|" + kKuhnCard[card] + "|" + hist;
  }

  // contrib: chips already put in by each player (index 0 = player 1).
  int betting(int parent, int c1, int c2, const std::string& hist, int actor,
              std::array<int, 2> contrib, bool facing_bet) {
    int card = actor == 1 ? c1 : c2;
    if (!facing_bet) {
      int node = b.decision(parent, actor, key(actor, card, hist), {"check", "bet"});
      int after_check;
      if (hist.empty()) {
        after_check = betting(node, c1, c2, hist + "k", other(actor), contrib, false);
      } else {
        after_check = showdown(node, c1, c2, contrib);  // kk
      }
      std::array<int, 2> bet_contrib = contrib;
      bet_contrib[actor - 1] += 1;
      int after_bet = betting(node, c1, c2, hist + "b", other(actor), bet_contrib, true);
      b.link(node, after_check);
      b.link(node, after_bet);
      return node;
    }
    int node = b.decision(parent, actor, key(actor, card, hist), {"fold", "call"});
    int folded = b.terminal(node, actor == 1 ? -contrib[0] : contrib[1]);
    std::array<int, 2> call_contrib = contrib;
    call_contrib[actor - 1] += 1;
    int called = showdown(node, c1, c2, call_contrib);
    b.link(node, folded);
    b.link(node, called);
    return node;
  }

  int showdown(int parent, int c1, int c2, std::array<int, 2> contrib) {
    double u1 = c1 > c2 ? contrib[1] : -contrib[0];
    return b.terminal(parent, u1);
  }

  GameTree build() {
    int root = b.chance(-1);
    b.tree.root = root;
    for (int c1 = 0; c1 < 3; ++c1) {
      for (int c2 = 0; c2 < 3; ++c2) {
        if (c1 == c2) continue;
        int deal = betting(root, c1, c2, "", 1, {1, 1}, false);
        b.link_chance(root, deal);
      }
    }
    return b.finish("kuhn");
  }
};

// ---------------------------------------------------------------------------
// Leduc poker.
//
// Cards are indexed 0..5; rank = card / 2 (0=J, 1=Q, 2=K), suit = card % 2
// (s, h). Round 1 bets bet_sizes[0] chips, round 2 bets bet_sizes[1]. A round
// allows at most max_raises bets in total (the opening bet is the first).
// History characters: k check, b bet, r raise, c call, f fold; rounds joined
// with '/'. Showdown: pairing the public card wins, otherwise higher rank,
// equal ranks chop.
// ---------------------------------------------------------------------------

const char* kLeducCard[6] = {"Js", "Jh", "Qs", "Qh", "Ks", "Kh"};

struct LeducBuilder {
  TreeBuilder b;
  int ante;
  std::array<int, 2> bet_sizes;
  int max_raises;

  std::string key(int player, int card, int public_card, const std::string& hist) {
    std::string pub = public_card < 0 ? "-" : kLeducCard[public_card];
    return "P" + std::to_string(player) + "|" + kLeducCard[card] + "|" + pub + "|" + hist;
  }

  double showdown_u1(int c1, int c2, int public_card, std::array<int, 2> contrib) {
    int r1 = c1 / 2, r2 = c2 / 2, rp = public_card / 2;
    int winner = 0;  // 0 tie, 1 player 1, 2 player 2
    if (r1 == rp) winner = 1;
    else if (r2 == rp) winner = 2;
    else if (r1 > r2) winner = 1;
    else if (r2 > r1) winner = 2;
    if (winner == 0) return 0.0;
    return winner == 1 ? contrib[1] : -contrib[0];
  }

  // Terminal or continuation once a betting round closes.
  int round_over(int parent, int c1, int c2, int public_card, const std::string& hist,
                 std::array<int, 2> contrib) {
    if (public_card >= 0) {
      int t = b.terminal(parent, showdown_u1(c1, c2, public_card, contrib));
      return t;
    }
    // Reveal the public card and play round 2.
    int ch = b.chance(parent);
    for (int pc = 0; pc < 6; ++pc) {
      if (pc == c1 || pc == c2) continue;
      int sub = betting(ch, c1, c2, pc, hist + "/", 1, contrib, 0, 0);
      b.link_chance(ch, sub);
    }
    return ch;
  }

  int betting(int parent, int c1, int c2, int public_card, const std::string& hist, int actor,
              std::array<int, 2> contrib, int to_call, int bets_made) {
    int round = public_card < 0 ? 0 : 1;
    int bet = bet_sizes[round];
    int card = actor == 1 ? c1 : c2;
    std::string k = key(actor, card, public_card, hist);

    if (to_call == 0) {
      // No outstanding bet: only at the start of a round or after one check,
      // so the bet cap cannot be hit here (max_raises >= 1).
      int node = b.decision(parent, actor, k, {"check", "bet"});
      bool closes = !hist.empty() && hist.back() == 'k';
      int after_check = closes
          ? round_over(node, c1, c2, public_card, hist + "k", contrib)
          : betting(node, c1, c2, public_card, hist + "k", other(actor), contrib, 0, bets_made);
      b.link(node, after_check);
      std::array<int, 2> cb = contrib;
      cb[actor - 1] += bet;
      int after_bet =
          betting(node, c1, c2, public_card, hist + "b", other(actor), cb, bet, bets_made + 1);
      b.link(node, after_bet);
      return node;
    }

    bool can_raise = bets_made < max_raises;
    std::vector<std::string> labels = can_raise
        ? std::vector<std::string>{"fold", "call", "raise"}
        : std::vector<std::string>{"fold", "call"};
    int node = b.decision(parent, actor, k, labels);
    int folded = b.terminal(node, actor == 1 ? -contrib[0] : contrib[1]);
    b.link(node, folded);
    std::array<int, 2> cc = contrib;
    cc[actor - 1] += to_call;
    int called = round_over(node, c1, c2, public_card, hist + "c", cc);
    b.link(node, called);
    if (can_raise) {
      std::array<int, 2> cr = contrib;
      cr[actor - 1] += to_call + bet;
      int raised =
          betting(node, c1, c2, public_card, hist + "r", other(actor), cr, bet, bets_made + 1);
      b.link(node, raised);
    }
    return node;
  }

  GameTree build() {
    int root = b.chance(-1);
    b.tree.root = root;
    for (int c1 = 0; c1 < 6; ++c1) {
      for (int c2 = 0; c2 < 6; ++c2) {
        if (c1 == c2) continue;
        int deal = betting(root, c1, c2, -1, "", 1, {ante, ante}, 0, 0);
        b.link_chance(root, deal);
      }
    }
    std::string name = "leduc";
    if (ante != 1 || bet_sizes != std::array<int, 2>{2, 4} || max_raises != 2) {
      name += "(ante=" + std::to_string(ante) + ",bets=" + std::to_string(bet_sizes[0]) + "," +
              std::to_string(bet_sizes[1]) + ",raises=" + std::to_string(max_raises) + ")";
    }
    return b.finish(std::move(name));
  }
};

}  // namespace

GameTree build_kuhn() {
  KuhnBuilder kb;
  return kb.build();
}

GameTree build_leduc(int ante, std::array<int, 2> bet_sizes, int max_raises) {
  if (ante < 1) throw std::invalid_argument("build_leduc: ante must be >= 1");
  if (bet_sizes[0] < 1 || bet_sizes[1] < 1)
    throw std::invalid_argument("build_leduc: bet sizes must be >= 1");
  if (max_raises < 1) throw std::invalid_argument("build_leduc: max_raises must be >= 1");
  LeducBuilder lb;
  lb.ante = ante;
  lb.bet_sizes = bet_sizes;
  lb.max_raises = max_raises;
  return lb.build();
}

GameTree build_matrix_tree(int rows, int cols, const std::vector<double>& p1_payoff_row_major,
                           std::string name) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("build_matrix_tree: empty action set");
  if (p1_payoff_row_major.size() != static_cast<size_t>(rows) * cols)
    throw std::invalid_argument("build_matrix_tree: payoff size mismatch");
  TreeBuilder b;
  std::vector<std::string> row_labels, col_labels;
  for (int i = 0; i < rows; ++i) row_labels.push_back("r" + std::to_string(i));
  for (int j = 0; j < cols; ++j) col_labels.push_back("c" + std::to_string(j));
  int root = b.decision(-1, 1, "P1|", row_labels);
  b.tree.root = root;
  for (int i = 0; i < rows; ++i) {
    // Player 2 does not observe player 1's move: one infoset for all rows.
    int p2 = b.decision(root, 2, "P2|", col_labels);
    b.link(root, p2);
    for (int j = 0; j < cols; ++j) {
      int t = b.terminal(p2, p1_payoff_row_major[static_cast<size_t>(i) * cols + j]);
      b.link(p2, t);
    }
  }
  return b.finish(std::move(name));
}

GameTree make_game(const std::string& id) {
  if (id == "kuhn") return build_kuhn();
  if (id == "leduc") return build_leduc(1, {2, 4}, 2);
  if (id == "leduc5") {
    GameTree t = build_leduc(5, {2, 4}, 2);
    t.name = "leduc5";
    return t;
  }
  std::string valid;
  for (const std::string& g : known_game_ids()) valid += (valid.empty() ? "" : ", ") + g;
  throw std::invalid_argument("unknown game id '" + id + "' (valid: " + valid + ")");
}

const std::vector<std::string>& known_game_ids() {
  static const std::vector<std::string> ids = {"kuhn", "leduc", "leduc5"};
  return ids;
}

}  // namespace efg
