#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ove/rng.hpp"
#include "ove/types.hpp"

namespace ove {

// Finite MDP with per-transition rewards r(s, a, s'). Successor-dependent
// rewards are needed by the two-point recommender outcomes and the
// enter-the-goal gridworld bonus; (s, a) rewards embed trivially.
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  std::vector<double> transition;       // [s][a][s'] flattened, rows sum to 1
  std::vector<double> reward;           // same layout
  std::vector<double> start;            // initial state distribution
  std::vector<std::uint8_t> terminal;   // terminal states self-loop with reward 0
  ReturnSpec spec;

  std::size_t idx(int s, int a, int s2) const {
    return (static_cast<std::size_t>(s) * static_cast<std::size_t>(num_actions) +
            static_cast<std::size_t>(a)) *
               static_cast<std::size_t>(num_states) +
           static_cast<std::size_t>(s2);
  }
  double transition_prob(int s, int a, int s2) const { return transition[idx(s, a, s2)]; }
  double reward_value(int s, int a, int s2) const { return reward[idx(s, a, s2)]; }
  bool is_terminal(int s) const { return terminal[static_cast<std::size_t>(s)] != 0; }
  std::span<const double> transition_row(int s, int a) const {
    return {transition.data() + idx(s, a, 0), static_cast<std::size_t>(num_states)};
  }

  void validate() const;
};

// Two-action, four-state chain: action a pays 1, action b pays 0, one step,
// gamma = 1. The end state is absorbing and unreachable within the horizon.
TabularMdp counterexample_mdp();

// 4x4 grid (state id = 4*row + col, start 0, goal cell 15) plus an absorbing
// end state 16 kept for the config schema. Eight moves (N, S, W, E, NW, NE,
// SW, SE), intended direction with probability 0.8, otherwise one of the
// remaining seven uniformly; off-grid moves stay put. Entering (or staying
// at) the goal cell pays +1, every other transition -0.05; the goal does not
// terminate, so episodes run the full horizon T = 30 at gamma = 0.95.
TabularMdp gridworld();

// One query state, five items; item k pays hi_k with probability p_k and
// lo_k otherwise, realized as two terminal outcome states so the MDP stays
// tabular. gamma = 1, T = 1.
TabularMdp recommender();

TabularPolicy uniform_policy(const TabularMdp& mdp);
TabularPolicy deterministic_policy(const TabularMdp& mdp, int action);

// Greedy with respect to exact optimal values (value iteration for gamma < 1,
// finite-horizon backward induction for gamma = 1); ties take the smallest
// action id.
TabularPolicy greedy_policy(const TabularMdp& mdp);

// (1 - epsilon) greedy + epsilon uniform.
TabularPolicy smoothed_policy(const TabularMdp& mdp, double epsilon);

/// beta(a|s) = alpha*pi(a|s) + (1-alpha)*uniform(a).
TabularPolicy mix_behavior(const TabularPolicy& pi, double alpha);

// Smoothing constants frozen per environment (calibrated once; see README).
inline constexpr double kGridworldSmoothing = 0.8;
inline constexpr double kRecommenderSmoothing = 0.3;
inline constexpr double kDefaultSmoothing = 0.3;
double default_smoothing(const std::string& env_name);

/// Builtin name (counterexample | gridworld | recommender) or a config path.
TabularMdp resolve_env(const std::string& name_or_path);

/// uniform | greedy | smoothed | det_<action> (letter or number) or a policy
/// config path. "smoothed" uses the environment's frozen epsilon.
TabularPolicy resolve_policy(const TabularMdp& mdp, const std::string& env_name,
                             const std::string& policy_name);

/// n independent trajectories under beta, recording beta's action
/// probabilities per step; stops at a terminal state or the horizon.
/// Trajectory i draws from rng.substream(i), so sampling order is free.
Dataset sample_dataset(const TabularMdp& mdp, const TabularPolicy& beta, std::size_t n,
                       const SeededRng& rng);

struct Moments {
  double mu = 0.0;
  double second = 0.0;
  double variance = 0.0;
};

/// Exact (mu, E[G^2], variance) under pi by backward recursion over the first
/// two moments of the return-to-go. Small models (<= 4 states, <= 4 actions,
/// T <= 4) are cross-checked against full trajectory enumeration; disagreement
/// is a hard error. Throws IntractableModel above the size limits.
Moments oracle_moments(const TabularMdp& mdp, const TabularPolicy& pi);

/// Independent oracle: enumerate every positive-probability trajectory under
/// pi and average the returns directly.
Moments enumeration_moments(const TabularMdp& mdp, const TabularPolicy& pi,
                            std::size_t limit = 2'000'000);

/// Depth-first enumeration of all positive-probability trajectories under the
/// given (behavior) policy, in (state, action, successor) ascending order.
/// The callback borrows the trajectory; copy it to keep it. Throws
/// IntractableModel when more than limit trajectories exist.
void for_each_trajectory(const TabularMdp& mdp, const TabularPolicy& behavior, std::size_t limit,
                         const std::function<void(const Trajectory&, double)>& fn);

std::vector<std::pair<Trajectory, double>> enumerate_trajectories(const TabularMdp& mdp,
                                                                  const TabularPolicy& behavior,
                                                                  std::size_t limit = 2'000'000);

// JSON config round trip (documented schema: sizes, spec constants, start
// distribution, terminal set, sparse transition and reward quadruples).
void save_mdp(const TabularMdp& mdp, const std::string& path);
TabularMdp load_mdp(const std::string& path);
void save_policy(const TabularPolicy& pi, const std::string& path);
TabularPolicy load_policy(const std::string& path);

}  // namespace ove
