#pragma once

#include <cstdint>
#include <vector>

#include "efg/game_tree.hpp"

namespace efg {

struct ExploitabilityReport {
  double br_value_p1 = 0.0;  // best response of player 1 vs the profile's player-2 part
  double br_value_p2 = 0.0;
  double nash_conv = 0.0;        // br_value_p1 + br_value_p2
  double exploitability = 0.0;   // nash_conv / 2, in chips
};

// Expected payoff of the responder when it best-responds (infoset by infoset,
// ties to the lowest action index) against the opponent's part of the profile.
double best_response_value(const GameTree& tree, const StrategyProfile& profile, int responder);

ExploitabilityReport exploitability(const GameTree& tree, const StrategyProfile& profile);

// Player 1's expected utility when both players follow the profile.
double game_value(const GameTree& tree, const StrategyProfile& profile);

struct TouchCounter {
  std::uint64_t cumulative = 0;
  std::vector<std::uint64_t> per_iteration;

  void add(std::uint64_t touched) {
    cumulative += touched;
    per_iteration.push_back(touched);
  }
};

}  // namespace efg
