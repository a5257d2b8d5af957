#include "ove/envs.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ove/errors.hpp"
#include "ove/numeric.hpp"
#include "ove/trajectory_ops.hpp"

namespace ove {

namespace {

constexpr double kRowSumTol = 1e-12;

TabularMdp make_empty(int num_states, int num_actions, ReturnSpec spec) {
  TabularMdp mdp;
  mdp.num_states = num_states;
  mdp.num_actions = num_actions;
  const std::size_t cells = static_cast<std::size_t>(num_states) *
                            static_cast<std::size_t>(num_actions) *
                            static_cast<std::size_t>(num_states);
  mdp.transition.assign(cells, 0.0);
  mdp.reward.assign(cells, 0.0);
  mdp.start.assign(static_cast<std::size_t>(num_states), 0.0);
  mdp.terminal.assign(static_cast<std::size_t>(num_states), 0);
  mdp.spec = spec;
  return mdp;
}

void absorb(TabularMdp& mdp, int s) {
  mdp.terminal[static_cast<std::size_t>(s)] = 1;
  for (int a = 0; a < mdp.num_actions; ++a) mdp.transition[mdp.idx(s, a, s)] = 1.0;
}

}  // namespace

void TabularMdp::validate() const {
  if (num_states <= 0 || num_actions <= 0) throw InvalidInput("mdp: empty state or action set");
  const std::size_t cells = static_cast<std::size_t>(num_states) *
                            static_cast<std::size_t>(num_actions) *
                            static_cast<std::size_t>(num_states);
  if (transition.size() != cells || reward.size() != cells)
    throw InvalidInput("mdp: table size does not match num_states/num_actions");
  if (start.size() != static_cast<std::size_t>(num_states) ||
      terminal.size() != static_cast<std::size_t>(num_states))
    throw InvalidInput("mdp: start/terminal size does not match num_states");
  spec.validate();

  double d0 = 0.0;
  for (double p : start) {
    if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidInput("mdp: bad start probability");
    d0 += p;
  }
  if (std::abs(d0 - 1.0) > kRowSumTol) throw InvalidInput("mdp: start distribution must sum to 1");

  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      double row = 0.0;
      for (int s2 = 0; s2 < num_states; ++s2) {
        const double p = transition_prob(s, a, s2);
        if (!(p >= 0.0) || !std::isfinite(p)) throw InvalidInput("mdp: bad transition probability");
        row += p;
        if (p > 0.0) {
          const double r = reward_value(s, a, s2);
          if (!std::isfinite(r)) throw InvalidInput("mdp: non-finite reward");
          if (is_terminal(s)) {
            if (s2 != s || r != 0.0)
              throw InvalidInput("mdp: terminal states must self-loop with zero reward");
          } else if (r < spec.r_min || r > spec.r_max) {
            throw InvalidRange("mdp: reward outside [r_min, r_max]");
          }
        }
      }
      if (std::abs(row - 1.0) > kRowSumTol)
        throw InvalidInput("mdp: transition row must sum to 1");
    }
  }
}

TabularMdp counterexample_mdp() {
  ReturnSpec spec;
  spec.gamma = 1.0;
  spec.horizon = 1;
  spec.r_min = 0.0;
  spec.r_max = 1.0;
  TabularMdp mdp = make_empty(4, 2, spec);
  mdp.start[0] = 1.0;
  mdp.transition[mdp.idx(0, 0, 1)] = 1.0;
  mdp.reward[mdp.idx(0, 0, 1)] = 1.0;
  mdp.transition[mdp.idx(0, 1, 2)] = 1.0;
  for (int a = 0; a < 2; ++a) {
    mdp.transition[mdp.idx(1, a, 3)] = 1.0;
    mdp.transition[mdp.idx(2, a, 3)] = 1.0;
  }
  absorb(mdp, 3);
  mdp.validate();
  return mdp;
}

TabularMdp gridworld() {
  constexpr int kSide = 4;
  constexpr int kCells = kSide * kSide;
  constexpr int kGoal = kCells - 1;
  constexpr int kEnd = kCells;
  constexpr int kMoves = 8;
  ReturnSpec spec;
  spec.gamma = 0.95;
  spec.horizon = 30;
  spec.r_min = -0.05;
  spec.r_max = 1.0;
  TabularMdp mdp = make_empty(kCells + 1, kMoves, spec);
  mdp.start[0] = 1.0;

  constexpr int kDr[kMoves] = {-1, 1, 0, 0, -1, -1, 1, 1};
  constexpr int kDc[kMoves] = {0, 0, -1, 1, -1, 1, -1, 1};
  auto move = [&](int cell, int m) {
    const int r = cell / kSide + kDr[m];
    const int c = cell % kSide + kDc[m];
    if (r < 0 || r >= kSide || c < 0 || c >= kSide) return cell;
    return r * kSide + c;
  };

  for (int s = 0; s < kCells; ++s) {
    for (int a = 0; a < kMoves; ++a) {
      for (int m = 0; m < kMoves; ++m) {
        const double p = (m == a) ? 0.8 : 0.2 / 7.0;
        mdp.transition[mdp.idx(s, a, move(s, m))] += p;
      }
      // Rewards live on the transition support only; the config round trip
      // stores exactly that.
      for (int s2 = 0; s2 < kCells; ++s2)
        if (mdp.transition[mdp.idx(s, a, s2)] > 0.0)
          mdp.reward[mdp.idx(s, a, s2)] = (s2 == kGoal) ? 1.0 : -0.05;
    }
  }
  absorb(mdp, kEnd);
  mdp.validate();
  return mdp;
}

TabularMdp recommender() {
  constexpr int kItems = 5;
  constexpr double kProbHi[kItems] = {0.5, 0.9, 0.2, 0.7, 0.5};
  constexpr double kPayHi[kItems] = {1.0, 0.9, 0.9, 0.6, 0.55};
  constexpr double kPayLo[kItems] = {0.0, 0.7, 0.1, 0.1, 0.45};
  ReturnSpec spec;
  spec.gamma = 1.0;
  spec.horizon = 1;
  spec.r_min = 0.0;
  spec.r_max = 1.0;
  TabularMdp mdp = make_empty(3, kItems, spec);
  mdp.start[0] = 1.0;
  for (int k = 0; k < kItems; ++k) {
    mdp.transition[mdp.idx(0, k, 1)] = kProbHi[k];
    mdp.reward[mdp.idx(0, k, 1)] = kPayHi[k];
    mdp.transition[mdp.idx(0, k, 2)] = 1.0 - kProbHi[k];
    mdp.reward[mdp.idx(0, k, 2)] = kPayLo[k];
  }
  absorb(mdp, 1);
  absorb(mdp, 2);
  mdp.validate();
  return mdp;
}

TabularPolicy uniform_policy(const TabularMdp& mdp) {
  TabularPolicy pi;
  pi.probs.assign(static_cast<std::size_t>(mdp.num_states),
                  std::vector<double>(static_cast<std::size_t>(mdp.num_actions),
                                      1.0 / mdp.num_actions));
  pi.validate();
  return pi;
}

TabularPolicy deterministic_policy(const TabularMdp& mdp, int action) {
  if (action < 0 || action >= mdp.num_actions)
    throw InvalidRange("deterministic_policy: action out of range");
  TabularPolicy pi;
  pi.probs.assign(static_cast<std::size_t>(mdp.num_states),
                  std::vector<double>(static_cast<std::size_t>(mdp.num_actions), 0.0));
  for (auto& row : pi.probs) row[static_cast<std::size_t>(action)] = 1.0;
  pi.validate();
  return pi;
}

namespace {

std::vector<double> action_values(const TabularMdp& mdp, const std::vector<double>& next_values) {
  std::vector<double> q(static_cast<std::size_t>(mdp.num_states) *
                            static_cast<std::size_t>(mdp.num_actions),
                        0.0);
  for (int s = 0; s < mdp.num_states; ++s) {
    if (mdp.is_terminal(s)) continue;
    for (int a = 0; a < mdp.num_actions; ++a) {
      NeumaierSum acc;
      for (int s2 = 0; s2 < mdp.num_states; ++s2) {
        const double p = mdp.transition_prob(s, a, s2);
        if (p <= 0.0) continue;
        acc.add(p * (mdp.reward_value(s, a, s2) + mdp.spec.gamma * next_values[s2]));
      }
      q[static_cast<std::size_t>(s) * static_cast<std::size_t>(mdp.num_actions) +
        static_cast<std::size_t>(a)] = acc.value();
    }
  }
  return q;
}

std::vector<double> greedy_values(const std::vector<double>& q, const TabularMdp& mdp) {
  std::vector<double> v(static_cast<std::size_t>(mdp.num_states), 0.0);
  for (int s = 0; s < mdp.num_states; ++s) {
    if (mdp.is_terminal(s)) continue;
    double best = q[static_cast<std::size_t>(s) * static_cast<std::size_t>(mdp.num_actions)];
    for (int a = 1; a < mdp.num_actions; ++a)
      best = std::max(best, q[static_cast<std::size_t>(s) *
                                  static_cast<std::size_t>(mdp.num_actions) +
                              static_cast<std::size_t>(a)]);
    v[static_cast<std::size_t>(s)] = best;
  }
  return v;
}

}  // namespace

TabularPolicy greedy_policy(const TabularMdp& mdp) {
  std::vector<double> v(static_cast<std::size_t>(mdp.num_states), 0.0);
  std::vector<double> q;
  if (mdp.spec.gamma < 1.0) {
    constexpr double kTol = 1e-13;
    constexpr int kMaxIters = 100000;
    for (int it = 0; it < kMaxIters; ++it) {
      q = action_values(mdp, v);
      std::vector<double> next = greedy_values(q, mdp);
      double diff = 0.0;
      for (int s = 0; s < mdp.num_states; ++s)
        diff = std::max(diff, std::abs(next[static_cast<std::size_t>(s)] -
                                       v[static_cast<std::size_t>(s)]));
      v = std::move(next);
      if (diff <= kTol) break;
    }
    q = action_values(mdp, v);
  } else {
    // Undiscounted: the horizon bounds every episode, so T sweeps of backward
    // induction give the exact finite-horizon optimum.
    for (int t = 0; t < mdp.spec.horizon; ++t) {
      q = action_values(mdp, v);
      v = greedy_values(q, mdp);
    }
    q = action_values(mdp, v);
  }

  TabularPolicy pi;
  pi.probs.assign(static_cast<std::size_t>(mdp.num_states),
                  std::vector<double>(static_cast<std::size_t>(mdp.num_actions), 0.0));
  for (int s = 0; s < mdp.num_states; ++s) {
    int best = 0;
    for (int a = 1; a < mdp.num_actions; ++a) {
      const std::size_t at = static_cast<std::size_t>(s) *
                                 static_cast<std::size_t>(mdp.num_actions) +
                             static_cast<std::size_t>(a);
      const std::size_t bt = static_cast<std::size_t>(s) *
                                 static_cast<std::size_t>(mdp.num_actions) +
                             static_cast<std::size_t>(best);
      if (q[at] > q[bt]) best = a;
    }
    pi.probs[static_cast<std::size_t>(s)][static_cast<std::size_t>(best)] = 1.0;
  }
  pi.validate();
  return pi;
}

TabularPolicy smoothed_policy(const TabularMdp& mdp, double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0))
    throw InvalidRange("smoothed_policy: epsilon must be in [0, 1]");
  return mix_behavior(greedy_policy(mdp), 1.0 - epsilon);
}

TabularPolicy mix_behavior(const TabularPolicy& pi, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw InvalidRange("mix_behavior: alpha must be in [0, 1]");
  pi.validate();
  TabularPolicy beta = pi;
  for (auto& row : beta.probs) {
    const double u = 1.0 / static_cast<double>(row.size());
    for (double& p : row) p = alpha * p + (1.0 - alpha) * u;
  }
  beta.validate();
  return beta;
}

double default_smoothing(const std::string& env_name) {
  if (env_name == "gridworld") return kGridworldSmoothing;
  if (env_name == "recommender") return kRecommenderSmoothing;
  return kDefaultSmoothing;
}

TabularMdp resolve_env(const std::string& name_or_path) {
  if (name_or_path == "counterexample") return counterexample_mdp();
  if (name_or_path == "gridworld") return gridworld();
  if (name_or_path == "recommender") return recommender();
  return load_mdp(name_or_path);
}

TabularPolicy resolve_policy(const TabularMdp& mdp, const std::string& env_name,
                             const std::string& policy_name) {
  if (policy_name == "uniform") return uniform_policy(mdp);
  if (policy_name == "greedy") return greedy_policy(mdp);
  if (policy_name == "smoothed") return smoothed_policy(mdp, default_smoothing(env_name));
  if (policy_name.rfind("det_", 0) == 0) {
    const std::string tag = policy_name.substr(4);
    if (tag.size() == 1 && std::isalpha(static_cast<unsigned char>(tag[0])))
      return deterministic_policy(mdp, std::tolower(static_cast<unsigned char>(tag[0])) - 'a');
    int action = -1;
    bool parsed = false;
    try {
      std::size_t used = 0;
      action = std::stoi(tag, &used);
      parsed = used == tag.size();
    } catch (const std::exception&) {
    }
    if (!parsed) throw InvalidInput("resolve_policy: bad action tag in '" + policy_name + "'");
    return deterministic_policy(mdp, action);
  }
  TabularPolicy pi = load_policy(policy_name);
  if (pi.num_states() != mdp.num_states || pi.num_actions() != mdp.num_actions)
    throw InvalidInput("resolve_policy: policy shape does not match the environment");
  return pi;
}

Dataset sample_dataset(const TabularMdp& mdp, const TabularPolicy& beta, std::size_t n,
                       const SeededRng& rng) {
  mdp.validate();
  beta.validate();
  if (beta.num_states() != mdp.num_states || beta.num_actions() != mdp.num_actions)
    throw InvalidInput("sample_dataset: policy shape does not match the environment");

  Dataset data;
  data.spec = mdp.spec;
  data.trajectories.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    SeededRng stream = rng.substream(i);
    Trajectory& traj = data.trajectories[i];
    int s = static_cast<int>(stream.sample_index(mdp.start));
    for (int t = 0; t < mdp.spec.horizon; ++t) {
      if (mdp.is_terminal(s)) break;
      const auto& row = beta.probs[static_cast<std::size_t>(s)];
      const int a = static_cast<int>(stream.sample_index(row));
      const int s2 = static_cast<int>(stream.sample_index(mdp.transition_row(s, a)));
      traj.steps.push_back(
          {s, a, row[static_cast<std::size_t>(a)], mdp.reward_value(s, a, s2)});
      s = s2;
    }
    traj.validate(data.spec);
  }
  return data;
}

namespace {

Moments dp_moments(const TabularMdp& mdp, const TabularPolicy& pi) {
  const int S = mdp.num_states;
  const int A = mdp.num_actions;
  const double g = mdp.spec.gamma;
  std::vector<double> m1(static_cast<std::size_t>(S), 0.0);
  std::vector<double> m2(static_cast<std::size_t>(S), 0.0);
  std::vector<double> n1(static_cast<std::size_t>(S), 0.0);
  std::vector<double> n2(static_cast<std::size_t>(S), 0.0);
  for (int t = 0; t < mdp.spec.horizon; ++t) {
    for (int s = 0; s < S; ++s) {
      if (mdp.is_terminal(s)) {
        n1[static_cast<std::size_t>(s)] = 0.0;
        n2[static_cast<std::size_t>(s)] = 0.0;
        continue;
      }
      NeumaierSum first;
      NeumaierSum second;
      for (int a = 0; a < A; ++a) {
        const double pa = pi.prob(s, a);
        if (pa <= 0.0) continue;
        for (int s2 = 0; s2 < S; ++s2) {
          const double pt = mdp.transition_prob(s, a, s2);
          if (pt <= 0.0) continue;
          const double w = pa * pt;
          const double r = mdp.reward_value(s, a, s2);
          first.add(w * (r + g * m1[static_cast<std::size_t>(s2)]));
          second.add(w * (r * r + 2.0 * g * r * m1[static_cast<std::size_t>(s2)] +
                          g * g * m2[static_cast<std::size_t>(s2)]));
        }
      }
      n1[static_cast<std::size_t>(s)] = first.value();
      n2[static_cast<std::size_t>(s)] = second.value();
    }
    m1 = n1;
    m2 = n2;
  }

  NeumaierSum mu;
  NeumaierSum sq;
  for (int s = 0; s < S; ++s) {
    const double p = mdp.start[static_cast<std::size_t>(s)];
    if (p <= 0.0) continue;
    mu.add(p * m1[static_cast<std::size_t>(s)]);
    sq.add(p * m2[static_cast<std::size_t>(s)]);
  }
  Moments out;
  out.mu = mu.value();
  out.second = sq.value();
  out.variance = out.second - out.mu * out.mu;
  return out;
}

}  // namespace

Moments oracle_moments(const TabularMdp& mdp, const TabularPolicy& pi) {
  mdp.validate();
  pi.validate();
  if (pi.num_states() != mdp.num_states || pi.num_actions() != mdp.num_actions)
    throw InvalidInput("oracle_moments: policy shape does not match the environment");
  const double ops = static_cast<double>(mdp.num_states) * mdp.num_actions * mdp.num_states *
                     mdp.spec.horizon;
  if (ops > 1e9) throw IntractableModel("oracle_moments: model too large for the exact recursion");

  const Moments dp = dp_moments(mdp, pi);

  if (mdp.num_states <= 4 && mdp.num_actions <= 4 && mdp.spec.horizon <= 4) {
    const Moments full = enumeration_moments(mdp, pi, 1'000'000);
    const double tol = 1e-12;
    if (std::abs(dp.mu - full.mu) > tol * std::max(1.0, std::abs(dp.mu)) ||
        std::abs(dp.second - full.second) > tol * std::max(1.0, std::abs(dp.second)))
      throw Error("oracle_moments: recursion and enumeration disagree");
  }
  return dp;
}

Moments enumeration_moments(const TabularMdp& mdp, const TabularPolicy& pi, std::size_t limit) {
  NeumaierSum mass;
  NeumaierSum mu;
  NeumaierSum sq;
  for_each_trajectory(mdp, pi, limit, [&](const Trajectory& traj, double p) {
    const double g = discounted_return(traj, mdp.spec);
    mass.add(p);
    mu.add(p * g);
    sq.add(p * g * g);
  });
  if (std::abs(mass.value() - 1.0) > 1e-9)
    throw Error("enumeration_moments: trajectory probabilities do not sum to 1");
  Moments out;
  out.mu = mu.value();
  out.second = sq.value();
  out.variance = out.second - out.mu * out.mu;
  return out;
}

void for_each_trajectory(const TabularMdp& mdp, const TabularPolicy& behavior, std::size_t limit,
                         const std::function<void(const Trajectory&, double)>& fn) {
  mdp.validate();
  behavior.validate();
  if (behavior.num_states() != mdp.num_states || behavior.num_actions() != mdp.num_actions)
    throw InvalidInput("for_each_trajectory: policy shape does not match the environment");

  std::size_t count = 0;
  Trajectory traj;
  traj.steps.reserve(static_cast<std::size_t>(mdp.spec.horizon));
  std::function<void(int, double, int)> descend = [&](int s, double p, int depth) {
    if (depth == mdp.spec.horizon || mdp.is_terminal(s)) {
      if (++count > limit)
        throw IntractableModel("for_each_trajectory: trajectory space exceeds the limit");
      fn(traj, p);
      return;
    }
    for (int a = 0; a < mdp.num_actions; ++a) {
      const double pa = behavior.prob(s, a);
      if (pa <= 0.0) continue;
      for (int s2 = 0; s2 < mdp.num_states; ++s2) {
        const double pt = mdp.transition_prob(s, a, s2);
        if (pt <= 0.0) continue;
        traj.steps.push_back({s, a, pa, mdp.reward_value(s, a, s2)});
        descend(s2, p * pa * pt, depth + 1);
        traj.steps.pop_back();
      }
    }
  };
  for (int s = 0; s < mdp.num_states; ++s) {
    const double p = mdp.start[static_cast<std::size_t>(s)];
    if (p > 0.0) descend(s, p, 0);
  }
}

std::vector<std::pair<Trajectory, double>> enumerate_trajectories(const TabularMdp& mdp,
                                                                  const TabularPolicy& behavior,
                                                                  std::size_t limit) {
  std::vector<std::pair<Trajectory, double>> out;
  for_each_trajectory(mdp, behavior, limit,
                      [&](const Trajectory& traj, double p) { out.emplace_back(traj, p); });
  return out;
}

namespace {

nlohmann::ordered_json spec_json(const ReturnSpec& spec) {
  return {{"gamma", spec.gamma},
          {"horizon", spec.horizon},
          {"r_min", spec.r_min},
          {"r_max", spec.r_max}};
}

ReturnSpec spec_from_json(const nlohmann::json& j) {
  ReturnSpec spec;
  spec.gamma = j.at("gamma").get<double>();
  spec.horizon = j.at("horizon").get<int>();
  spec.r_min = j.at("r_min").get<double>();
  spec.r_max = j.at("r_max").get<double>();
  return spec;
}

nlohmann::json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void dump_file(const std::string& path, const nlohmann::ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
  if (!out) throw InvalidInput("failed writing " + path);
}

}  // namespace

void save_mdp(const TabularMdp& mdp, const std::string& path) {
  mdp.validate();
  nlohmann::ordered_json j;
  j["num_states"] = mdp.num_states;
  j["num_actions"] = mdp.num_actions;
  j["spec"] = spec_json(mdp.spec);
  auto start = nlohmann::ordered_json::array();
  for (int s = 0; s < mdp.num_states; ++s) {
    const double p = mdp.start[static_cast<std::size_t>(s)];
    if (p > 0.0) start.push_back({s, p});
  }
  j["start"] = start;
  auto terminal = nlohmann::ordered_json::array();
  for (int s = 0; s < mdp.num_states; ++s)
    if (mdp.is_terminal(s)) terminal.push_back(s);
  j["terminal"] = terminal;
  auto transitions = nlohmann::ordered_json::array();
  auto rewards = nlohmann::ordered_json::array();
  for (int s = 0; s < mdp.num_states; ++s) {
    for (int a = 0; a < mdp.num_actions; ++a) {
      for (int s2 = 0; s2 < mdp.num_states; ++s2) {
        const double p = mdp.transition_prob(s, a, s2);
        if (p <= 0.0) continue;
        transitions.push_back({s, a, s2, p});
        const double r = mdp.reward_value(s, a, s2);
        if (r != 0.0) rewards.push_back({s, a, s2, r});
      }
    }
  }
  j["transitions"] = transitions;
  j["rewards"] = rewards;
  dump_file(path, j);
}

TabularMdp load_mdp(const std::string& path) {
  const nlohmann::json j = parse_file(path);
  try {
    TabularMdp mdp = make_empty(j.at("num_states").get<int>(), j.at("num_actions").get<int>(),
                                spec_from_json(j.at("spec")));
    for (const auto& entry : j.at("start")) {
      const int s = entry.at(0).get<int>();
      if (s < 0 || s >= mdp.num_states) throw InvalidRange(path + ": start state out of range");
      mdp.start[static_cast<std::size_t>(s)] = entry.at(1).get<double>();
    }
    for (const auto& entry : j.at("terminal")) {
      const int s = entry.get<int>();
      if (s < 0 || s >= mdp.num_states) throw InvalidRange(path + ": terminal state out of range");
      mdp.terminal[static_cast<std::size_t>(s)] = 1;
    }
    auto place = [&](const nlohmann::json& rows, std::vector<double>& table) {
      for (const auto& entry : rows) {
        const int s = entry.at(0).get<int>();
        const int a = entry.at(1).get<int>();
        const int s2 = entry.at(2).get<int>();
        if (s < 0 || s >= mdp.num_states || a < 0 || a >= mdp.num_actions || s2 < 0 ||
            s2 >= mdp.num_states)
          throw InvalidRange(path + ": transition index out of range");
        table[mdp.idx(s, a, s2)] = entry.at(3).get<double>();
      }
    };
    place(j.at("transitions"), mdp.transition);
    place(j.at("rewards"), mdp.reward);
    mdp.validate();
    return mdp;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

void save_policy(const TabularPolicy& pi, const std::string& path) {
  pi.validate();
  nlohmann::ordered_json j;
  j["probs"] = pi.probs;
  dump_file(path, j);
}

TabularPolicy load_policy(const std::string& path) {
  const nlohmann::json j = parse_file(path);
  try {
    TabularPolicy pi;
    pi.probs = j.at("probs").get<std::vector<std::vector<double>>>();
    pi.validate();
    return pi;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(path + ": " + e.what());
  }
}

}  // namespace ove
