#pragma once

#include <array>
#include <string>
#include <vector>

#include "efg/game_tree.hpp"

namespace efg {

// Three-card poker: deck {J,Q,K}, one card each, ante 1, one bet of 1 chip.
GameTree build_kuhn();

// Leduc poker. Deck of 6 cards (ranks J,Q,K in two suits), one private card
// each, a betting round, one public card, a second betting round. Bets are
// fixed at bet_sizes[round]; at most max_raises bets (the opening bet counts)
// per round. Pair beats high card at showdown. Standard Leduc is
// build_leduc(1, {2, 4}, 2); the 5-pot variant raises the per-player ante to 5.
// Throws std::invalid_argument on bad parameters.
GameTree build_leduc(int ante, std::array<int, 2> bet_sizes, int max_raises);

// One-shot matrix game as a two-level tree: player 1 moves, player 2 moves
// without observing (a single infoset spanning all of player 1's choices).
GameTree build_matrix_tree(int rows, int cols, const std::vector<double>& p1_payoff_row_major,
                           std::string name);

// Game selection by id: "kuhn", "leduc", "leduc5".
// Throws std::invalid_argument (listing valid ids) for anything else.
GameTree make_game(const std::string& id);
const std::vector<std::string>& known_game_ids();

}  // namespace efg
