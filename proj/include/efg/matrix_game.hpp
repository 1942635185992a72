#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace efg {

// Effective-iteration headroom used when a run has no effective budget; also
// the phase length assigned when every pursue time is infinite and no tighter
// cap applies.
inline constexpr std::uint64_t kNoEffectiveLimit = 1'000'000'000'000'000ULL;

// Two-player zero-sum matrix game; payoff entries are player 1's.
struct MatrixGame {
  int rows = 0;
  int cols = 0;
  std::vector<double> payoff;  // row-major
  std::string name;

  double u1(int row, int col) const { return payoff[static_cast<size_t>(row) * cols + col]; }
  double u2(int row, int col) const { return -u1(row, col); }
  int num_actions(int player) const { return player == 1 ? rows : cols; }

  static MatrixGame rps();
  static MatrixGame matching_pennies();
  static MatrixGame diagonal(int k);  // k x k identity payoff
  // "rows cols" on the first line, then row-major player-1 payoffs.
  static MatrixGame from_text(std::istream& in, std::string name = "matrix");
  // Built-in id ("rps", "matching-pennies", "diag-<k>") or a file path.
  static MatrixGame from_id_or_file(const std::string& spec);
};

// Fictitious play state at effective time t: the average profile is the
// empirical average of the t pure strategies played so far, and q[p][a] is
// the cumulative payoff action a would have earned against the opponent's
// plays, so argmax q[p] is the best response to the opponent's average.
struct FpState {
  std::uint64_t t = 0;
  std::array<std::vector<double>, 2> avg;
  std::array<std::vector<double>, 2> q;
  std::array<int, 2> br{0, 0};

  // t = 1 state: one seeded random pure play per player folded into avg and q.
  static FpState init_random(const MatrixGame& game, std::uint64_t seed);
};

struct PursuitResultNf {
  std::array<std::vector<double>, 2> gap;     // q(a*) - q(a), a* = current br
  std::array<std::vector<double>, 2> speed;   // u(a, opp br) - u(a*, opp br)
  std::array<std::vector<double>, 2> pursue;  // per-action pursue time, may be inf
  std::uint64_t phase_length = 1;
  bool stationary = false;  // every pursue time was infinite
};

FpState fp_step(const MatrixGame& game, const FpState& state);

PursuitResultNf compute_pursuit_nf(const MatrixGame& game, const FpState& state,
                                   std::uint64_t budget_remaining = kNoEffectiveLimit);

// Skips one sync phase: w = phase length from compute_pursuit_nf, then the
// closed form of w fp_step applications with a fixed best-response profile.
std::pair<FpState, std::uint64_t> sync_fp_step(const MatrixGame& game, const FpState& state,
                                               std::uint64_t budget_remaining);

// Simultaneous regret matching.
struct RmState {
  std::uint64_t t = 0;
  std::array<std::vector<double>, 2> regrets;
  std::array<std::vector<double>, 2> strategy_sum;

  static RmState init(const MatrixGame& game);
};

RmState rm_step(const MatrixGame& game, const RmState& state);
std::array<std::vector<double>, 2> rm_average(const MatrixGame& game, const RmState& state);

// Positive-part normalization; uniform when no regret is positive.
std::vector<double> regret_matching_strategy(const std::vector<double>& regrets);

double nf_best_response_value(const MatrixGame& game, int player,
                              const std::vector<double>& opp_strategy);
// Mean of the two best-response gains against (x, y).
double nf_exploitability(const MatrixGame& game, const std::vector<double>& x,
                         const std::vector<double>& y);

}  // namespace efg
