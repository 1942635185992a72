#include "efg/matrix_game.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include "efg/game_tree.hpp"
#include "efg/pursuit.hpp"

namespace efg {

namespace {

double u_of(const MatrixGame& g, int player, int own, int opp) {
  return player == 1 ? g.u1(own, opp) : g.u2(opp, own);
}

}  // namespace

MatrixGame MatrixGame::rps() {
  return MatrixGame{3, 3, {0, -1, 1, 1, 0, -1, -1, 1, 0}, "rps"};
}

MatrixGame MatrixGame::matching_pennies() {
  return MatrixGame{2, 2, {1, -1, -1, 1}, "matching-pennies"};
}

MatrixGame MatrixGame::diagonal(int k) {
  if (k < 1) throw std::invalid_argument("diagonal game needs k >= 1");
  MatrixGame g;
  g.rows = g.cols = k;
  g.payoff.assign(static_cast<size_t>(k) * k, 0.0);
  for (int i = 0; i < k; ++i) g.payoff[static_cast<size_t>(i) * k + i] = 1.0;
  g.name = "diag-" + std::to_string(k);
  return g;
}

MatrixGame MatrixGame::from_text(std::istream& in, std::string name) {
  MatrixGame g;
  if (!(in >> g.rows >> g.cols) || g.rows < 1 || g.cols < 1)
    throw std::invalid_argument("matrix game: bad header (want \"rows cols\")");
  g.payoff.resize(static_cast<size_t>(g.rows) * g.cols);
  for (double& v : g.payoff)
    if (!(in >> v) || !std::isfinite(v))
      throw std::invalid_argument("matrix game: missing or non-finite payoff entry");
  g.name = std::move(name);
  return g;
}

MatrixGame MatrixGame::from_id_or_file(const std::string& spec) {
  if (spec == "rps") return rps();
  if (spec == "matching-pennies") return matching_pennies();
  if (spec.rfind("diag-", 0) == 0) {
    int k = 0;
    try {
      k = std::stoi(spec.substr(5));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad diagonal game spec '" + spec + "'");
    }
    return diagonal(k);
  }
  std::ifstream f(spec);
  if (!f) {
    throw std::invalid_argument("unknown matrix game '" + spec +
                                "' (builtins: rps, matching-pennies, diag-<k>; or a file path)");
  }
  return from_text(f, spec);
}

FpState FpState::init_random(const MatrixGame& game, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int r1 = static_cast<int>(rng() % game.rows);
  int r2 = static_cast<int>(rng() % game.cols);
  FpState s;
  s.t = 1;
  s.avg[0].assign(game.rows, 0.0);
  s.avg[1].assign(game.cols, 0.0);
  s.avg[0][r1] = 1.0;
  s.avg[1][r2] = 1.0;
  s.q[0].resize(game.rows);
  s.q[1].resize(game.cols);
  for (int a = 0; a < game.rows; ++a) s.q[0][a] = u_of(game, 1, a, r2);
  for (int a = 0; a < game.cols; ++a) s.q[1][a] = u_of(game, 2, a, r1);
  s.br[0] = argmax_lowest(s.q[0]);
  s.br[1] = argmax_lowest(s.q[1]);
  return s;
}

FpState fp_step(const MatrixGame& game, const FpState& state) {
  FpState next = state;
  const std::array<int, 2> play = state.br;
  double t = static_cast<double>(state.t);
  for (int p = 0; p < 2; ++p) {
    for (double& v : next.avg[p]) v *= t / (t + 1.0);
    next.avg[p][play[p]] += 1.0 / (t + 1.0);
    int opp_play = play[1 - p];
    for (size_t a = 0; a < next.q[p].size(); ++a)
      next.q[p][a] += u_of(game, p + 1, static_cast<int>(a), opp_play);
    next.br[p] = argmax_lowest(next.q[p]);
  }
  next.t = state.t + 1;
  return next;
}

PursuitResultNf compute_pursuit_nf(const MatrixGame& game, const FpState& state,
                                   std::uint64_t budget_remaining) {
  PursuitResultNf r;
  double best = std::numeric_limits<double>::infinity();
  for (int p = 0; p < 2; ++p) {
    int n = game.num_actions(p + 1);
    r.gap[p].resize(n);
    r.speed[p].resize(n);
    r.pursue[p].resize(n);
    int a_star = state.br[p];
    int opp_play = state.br[1 - p];
    double q_star = state.q[p][a_star];
    double u_star = u_of(game, p + 1, a_star, opp_play);
    for (int a = 0; a < n; ++a) {
      r.gap[p][a] = q_star - state.q[p][a];
      r.speed[p][a] = u_of(game, p + 1, a, opp_play) - u_star;
      // br is the lowest-index argmax, so ties never win the tie-break here.
      r.pursue[p][a] = a == a_star ? std::numeric_limits<double>::infinity()
                                   : pursue_time(r.gap[p][a], r.speed[p][a], false);
      best = std::min(best, r.pursue[p][a]);
    }
  }
  r.stationary = std::isinf(best);
  double cap = static_cast<double>(budget_remaining);
  double w = r.stationary ? cap : std::min(best, cap);
  r.phase_length = static_cast<std::uint64_t>(std::max(1.0, w));
  return r;
}

std::pair<FpState, std::uint64_t> sync_fp_step(const MatrixGame& game, const FpState& state,
                                               std::uint64_t budget_remaining) {
  if (budget_remaining < 1) throw std::invalid_argument("sync_fp_step: empty budget");
  PursuitResultNf pursuit = compute_pursuit_nf(game, state, budget_remaining);
  std::uint64_t w = pursuit.phase_length;
  double wd = static_cast<double>(w);
  double t = static_cast<double>(state.t);

  FpState next = state;
  const std::array<int, 2> play = state.br;
  for (int p = 0; p < 2; ++p) {
    // Closed form of w consecutive average updates with a fixed play.
    for (double& v : next.avg[p]) v *= t / (t + wd);
    next.avg[p][play[p]] += wd / (t + wd);
    int opp_play = play[1 - p];
    for (size_t a = 0; a < next.q[p].size(); ++a)
      next.q[p][a] += wd * u_of(game, p + 1, static_cast<int>(a), opp_play);
    next.br[p] = argmax_lowest(next.q[p]);
  }
  next.t = state.t + w;
  return {std::move(next), w};
}

RmState RmState::init(const MatrixGame& game) {
  RmState s;
  s.regrets[0].assign(game.rows, 0.0);
  s.regrets[1].assign(game.cols, 0.0);
  s.strategy_sum[0].assign(game.rows, 0.0);
  s.strategy_sum[1].assign(game.cols, 0.0);
  return s;
}

std::vector<double> regret_matching_strategy(const std::vector<double>& regrets) {
  std::vector<double> s(regrets.size());
  double total = 0.0;
  for (size_t a = 0; a < regrets.size(); ++a) {
    s[a] = regrets[a] > 0.0 ? regrets[a] : 0.0;
    total += s[a];
  }
  if (total > 0.0) {
    for (double& v : s) v /= total;
  } else {
    for (double& v : s) v = 1.0 / static_cast<double>(s.size());
  }
  return s;
}

RmState rm_step(const MatrixGame& game, const RmState& state) {
  std::array<std::vector<double>, 2> sigma = {regret_matching_strategy(state.regrets[0]),
                                              regret_matching_strategy(state.regrets[1])};
  RmState next = state;
  for (int p = 0; p < 2; ++p) {
    int n = game.num_actions(p + 1);
    const std::vector<double>& own = sigma[p];
    const std::vector<double>& opp = sigma[1 - p];
    std::vector<double> action_u(n, 0.0);
    for (int a = 0; a < n; ++a)
      for (size_t b = 0; b < opp.size(); ++b)
        action_u[a] += opp[b] * u_of(game, p + 1, a, static_cast<int>(b));
    double played_u = 0.0;
    for (int a = 0; a < n; ++a) played_u += own[a] * action_u[a];
    for (int a = 0; a < n; ++a) {
      next.regrets[p][a] += action_u[a] - played_u;
      next.strategy_sum[p][a] += own[a];
    }
  }
  next.t = state.t + 1;
  return next;
}

std::array<std::vector<double>, 2> rm_average(const MatrixGame&, const RmState& state) {
  std::array<std::vector<double>, 2> avg;
  for (int p = 0; p < 2; ++p) {
    avg[p] = state.strategy_sum[p];
    double total = 0.0;
    for (double v : avg[p]) total += v;
    if (total > 0.0) {
      for (double& v : avg[p]) v /= total;
    } else {
      for (double& v : avg[p]) v = 1.0 / static_cast<double>(avg[p].size());
    }
  }
  return avg;
}

double nf_best_response_value(const MatrixGame& game, int player,
                              const std::vector<double>& opp_strategy) {
  int n = game.num_actions(player);
  double best = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < n; ++a) {
    double v = 0.0;
    for (size_t b = 0; b < opp_strategy.size(); ++b)
      v += opp_strategy[b] * u_of(game, player, a, static_cast<int>(b));
    best = std::max(best, v);
  }
  return best;
}

double nf_exploitability(const MatrixGame& game, const std::vector<double>& x,
                         const std::vector<double>& y) {
  return (nf_best_response_value(game, 1, y) + nf_best_response_value(game, 2, x)) / 2.0;
}

}  // namespace efg
