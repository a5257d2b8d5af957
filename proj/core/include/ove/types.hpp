#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ove/errors.hpp"

namespace ove {

// Sentinel state/action id used by pad_trajectory. Padding steps carry
// behavior_prob 1 and reward 0 and contribute a per-step ratio of exactly 1;
// estimators recognize the action id and never consult a policy table for it.
inline constexpr int kPaddingId = -1;

// Discounting and reward-range constants of a problem. The derived return
// bounds and control-variate constants are closed forms of (gamma, horizon,
// r_min, r_max), exposed as functions so they can never fall out of sync.
struct ReturnSpec {
  double gamma = 1.0;
  int horizon = 1;
  double r_min = 0.0;
  double r_max = 1.0;

  // c = 1 + gamma + ... + gamma^(T-1); the gamma = 1 singularity is removable.
  double discount_total() const {
    if (gamma == 1.0) return static_cast<double>(horizon);
    return (1.0 - std::pow(gamma, horizon)) / (1.0 - gamma);
  }

  // Return range. A trajectory that terminates before the horizon realizes
  // zero reward at the remaining positions, so the per-position reward
  // support is [r_min, r_max] extended by 0 and the range endpoints use the
  // extended interval. Identical to r_min/r_max whenever the range already
  // contains 0.
  double r_lo() const { return std::min(r_min, 0.0); }
  double r_hi() const { return std::max(r_max, 0.0); }
  double g_min() const { return discount_total() * r_lo(); }
  double g_max() const { return discount_total() * r_hi(); }

  double xi_r() const { return std::max(r_min * r_min, r_max * r_max); }
  double xi_g() const {
    const double c = discount_total();
    return c * c * xi_r();
  }

  double popoviciu_bound() const {
    const double w = g_max() - g_min();
    return w * w / 4.0;
  }

  void validate() const {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw InvalidRange("ReturnSpec: gamma outside [0,1]");
    if (horizon < 1) throw InvalidRange("ReturnSpec: horizon must be positive");
    if (!(r_min <= r_max)) throw InvalidRange("ReturnSpec: r_min > r_max");
    if (!std::isfinite(r_min) || !std::isfinite(r_max)) throw InvalidRange("ReturnSpec: non-finite reward bounds");
  }
};

struct Step {
  int state = 0;
  int action = 0;
  double behavior_prob = 1.0;  // probability the behavior policy gave the logged action
  double reward = 0.0;
};

inline bool is_padding_step(const Step& st) { return st.action == kPaddingId; }

struct Trajectory {
  std::vector<Step> steps;

  std::size_t length() const { return steps.size(); }

  void validate(const ReturnSpec& spec) const {
    if (length() > static_cast<std::size_t>(spec.horizon))
      throw InvalidRange("Trajectory: longer than the spec horizon");
    for (const Step& st : steps) {
      if (is_padding_step(st)) {
        if (st.state != kPaddingId || st.behavior_prob != 1.0 || st.reward != 0.0)
          throw InvalidInput("Trajectory: malformed padding step");
        continue;
      }
      if (st.state < 0 || st.action < 0) throw InvalidRange("Trajectory: negative state or action id");
      if (!(st.behavior_prob > 0.0 && st.behavior_prob <= 1.0))
        throw InvalidInput("Trajectory: behavior_prob outside (0,1]");
      if (!std::isfinite(st.reward)) throw InvalidInput("Trajectory: non-finite reward");
    }
  }
};

struct Dataset {
  std::vector<Trajectory> trajectories;
  ReturnSpec spec;

  std::size_t size() const { return trajectories.size(); }

  void validate() const {
    spec.validate();
    if (trajectories.empty()) throw InsufficientData("Dataset: empty");
    for (const Trajectory& t : trajectories) t.validate(spec);
  }
};

// Action distribution per state; serves as both evaluation and behavior policy.
struct TabularPolicy {
  std::vector<std::vector<double>> probs;  // probs[state][action]

  int num_states() const { return static_cast<int>(probs.size()); }
  int num_actions() const { return probs.empty() ? 0 : static_cast<int>(probs.front().size()); }

  double prob(int state, int action) const {
    if (state < 0 || state >= num_states()) throw InvalidRange("TabularPolicy: state id out of range");
    const auto& row = probs[static_cast<std::size_t>(state)];
    if (action < 0 || action >= static_cast<int>(row.size()))
      throw InvalidRange("TabularPolicy: action id out of range");
    return row[static_cast<std::size_t>(action)];
  }

  void validate() const {
    if (probs.empty()) throw InvalidInput("TabularPolicy: no states");
    for (const auto& row : probs) {
      if (row.size() != probs.front().size()) throw InvalidInput("TabularPolicy: ragged rows");
      double total = 0.0;
      for (double p : row) {
        if (!(p >= 0.0)) throw InvalidInput("TabularPolicy: negative probability");
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-12) throw InvalidInput("TabularPolicy: row does not sum to 1");
    }
  }
};

}  // namespace ove
