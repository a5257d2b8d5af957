#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <string>
#include <vector>

#include "ove/envs.hpp"
#include "ove/errors.hpp"
#include "ove/numeric.hpp"
#include "ove/rng.hpp"
#include "ove/trajectory_ops.hpp"

namespace {

std::string temp_path(const char* name) {
  return std::string("ove_envs_test_") + name;
}

}  // namespace

TEST_CASE("builders validate and tampering is caught") {
  for (auto make : {ove::counterexample_mdp, ove::gridworld, ove::recommender}) {
    ove::TabularMdp mdp = make();
    CHECK_NOTHROW(mdp.validate());

    ove::TabularMdp broken_row = mdp;
    broken_row.transition[broken_row.idx(0, 0, 0)] += 0.25;
    CHECK_THROWS_AS(broken_row.validate(), ove::InvalidInput);

    ove::TabularMdp hot_reward = mdp;
    bool tampered = false;
    for (int s = 0; s < mdp.num_states && !tampered; ++s) {
      if (mdp.is_terminal(s)) continue;
      for (int s2 = 0; s2 < mdp.num_states && !tampered; ++s2)
        if (mdp.transition_prob(s, 0, s2) > 0.0) {
          hot_reward.reward[hot_reward.idx(s, 0, s2)] = mdp.spec.r_max + 1.0;
          tampered = true;
        }
    }
    REQUIRE(tampered);
    CHECK_THROWS_AS(hot_reward.validate(), ove::InvalidRange);
  }

  ove::TabularMdp leaky = ove::recommender();
  // States 1 and 2 are absorbing; paying them violates the terminal contract.
  leaky.reward[leaky.idx(1, 0, 1)] = 0.3;
  CHECK_THROWS_AS(leaky.validate(), ove::InvalidInput);
}

TEST_CASE("counterexample oracle is exact") {
  const ove::TabularMdp mdp = ove::counterexample_mdp();
  const auto uniform = ove::oracle_moments(mdp, ove::uniform_policy(mdp));
  CHECK(uniform.mu == 0.5);
  CHECK(uniform.second == 0.5);
  CHECK(uniform.variance == 0.25);

  const auto pay = ove::oracle_moments(mdp, ove::deterministic_policy(mdp, 0));
  CHECK(pay.mu == 1.0);
  CHECK(pay.variance == 0.0);
  const auto skip = ove::oracle_moments(mdp, ove::deterministic_policy(mdp, 1));
  CHECK(skip.mu == 0.0);
  CHECK(skip.variance == 0.0);
}

TEST_CASE("recommender oracle matches hand values") {
  const ove::TabularMdp mdp = ove::recommender();

  const auto uniform = ove::oracle_moments(mdp, ove::uniform_policy(mdp));
  CHECK(uniform.mu == doctest::Approx(0.518).epsilon(1e-12));
  CHECK(uniform.second == doctest::Approx(0.3911).epsilon(1e-12));
  CHECK(uniform.variance == doctest::Approx(0.122776).epsilon(1e-12));

  const auto greedy = ove::oracle_moments(mdp, ove::greedy_policy(mdp));
  CHECK(greedy.mu == doctest::Approx(0.88).epsilon(1e-12));
  CHECK(greedy.second == doctest::Approx(0.778).epsilon(1e-12));
  CHECK(greedy.variance == doctest::Approx(0.0036).epsilon(1e-12));

  const std::vector<double> item_var = {0.25, 0.0036, 0.1024, 0.0525, 0.0025};
  for (int k = 0; k < 5; ++k) {
    const auto det = ove::oracle_moments(mdp, ove::deterministic_policy(mdp, k));
    CHECK(det.variance == doctest::Approx(item_var[static_cast<std::size_t>(k)]).epsilon(1e-12));
  }
}

TEST_CASE("gridworld oracle regression") {
  const ove::TabularMdp mdp = ove::gridworld();
  const auto smoothed =
      ove::oracle_moments(mdp, ove::smoothed_policy(mdp, ove::kGridworldSmoothing));
  CHECK(smoothed.mu == doctest::Approx(1.615506123).epsilon(1e-9));
  CHECK(smoothed.second == doctest::Approx(7.359663492).epsilon(1e-9));
  CHECK(smoothed.variance == doctest::Approx(4.749803459).epsilon(1e-9));

  const auto uniform = ove::oracle_moments(mdp, ove::uniform_policy(mdp));
  CHECK(uniform.mu == doctest::Approx(-0.2420915246).epsilon(1e-9));
  CHECK(uniform.variance == doctest::Approx(1.137814221).epsilon(1e-9));
}

TEST_CASE("gridworld structure") {
  const ove::TabularMdp mdp = ove::gridworld();
  CHECK(mdp.num_states == 17);
  CHECK(mdp.num_actions == 8);
  CHECK(mdp.start[0] == 1.0);
  CHECK(mdp.is_terminal(16));
  CHECK_FALSE(mdp.is_terminal(15));

  for (int s = 0; s < 16; ++s)
    for (int a = 0; a < 8; ++a) {
      CHECK(mdp.transition_prob(s, a, 16) == 0.0);
      for (int s2 = 0; s2 < 16; ++s2)
        if (mdp.transition_prob(s, a, s2) > 0.0) {
          const double want = (s2 == 15) ? 1.0 : -0.05;
          CHECK(mdp.reward_value(s, a, s2) == want);
        }
    }
}

TEST_CASE("greedy policies and mixtures") {
  const ove::TabularMdp cx = ove::counterexample_mdp();
  CHECK(ove::greedy_policy(cx).prob(0, 0) == 1.0);

  const ove::TabularMdp rec = ove::recommender();
  const ove::TabularPolicy greedy = ove::greedy_policy(rec);
  CHECK(greedy.prob(0, 1) == 1.0);

  const ove::TabularPolicy uniform = ove::uniform_policy(rec);
  const ove::TabularPolicy full = ove::mix_behavior(greedy, 1.0);
  const ove::TabularPolicy none = ove::mix_behavior(greedy, 0.0);
  for (int a = 0; a < 5; ++a) {
    CHECK(full.prob(0, a) == greedy.prob(0, a));
    CHECK(none.prob(0, a) == doctest::Approx(uniform.prob(0, a)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(ove::mix_behavior(greedy, 1.5), ove::InvalidRange);
  CHECK_THROWS_AS(ove::mix_behavior(greedy, -0.1), ove::InvalidRange);

  const ove::TabularMdp gw = ove::gridworld();
  const ove::TabularPolicy sm = ove::smoothed_policy(gw, 0.8);
  for (int s = 0; s < gw.num_states; ++s) {
    double total = 0.0;
    for (int a = 0; a < gw.num_actions; ++a) total += sm.prob(s, a);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK_NOTHROW(sm.validate());
}

TEST_CASE("recursion oracle agrees with enumeration on larger models") {
  // The recommender has 5 actions and the trimmed gridworld has 8, so both
  // sit outside the automatic cross-check; compare explicitly.
  const ove::TabularMdp rec = ove::recommender();
  const ove::TabularPolicy pi = ove::smoothed_policy(rec, ove::kRecommenderSmoothing);
  const auto a = ove::oracle_moments(rec, pi);
  const auto b = ove::enumeration_moments(rec, pi);
  CHECK(a.mu == doctest::Approx(b.mu).epsilon(1e-12));
  CHECK(a.second == doctest::Approx(b.second).epsilon(1e-12));

  ove::TabularMdp short_gw = ove::gridworld();
  short_gw.spec.horizon = 3;
  const ove::TabularPolicy gpi = ove::smoothed_policy(short_gw, ove::kGridworldSmoothing);
  const auto c = ove::oracle_moments(short_gw, gpi);
  const auto d = ove::enumeration_moments(short_gw, gpi, 500'000);
  CHECK(c.mu == doctest::Approx(d.mu).epsilon(1e-10));
  CHECK(c.second == doctest::Approx(d.second).epsilon(1e-10));
}

TEST_CASE("dataset sampling") {
  const ove::TabularMdp rec = ove::recommender();
  const ove::TabularPolicy beta = ove::uniform_policy(rec);
  const ove::Dataset data = ove::sample_dataset(rec, beta, 20000, ove::SeededRng(6, 0));
  CHECK(data.size() == 20000);

  double total = 0.0;
  for (const auto& traj : data.trajectories) {
    CHECK(traj.length() == 1);
    CHECK(traj.steps[0].behavior_prob == beta.prob(traj.steps[0].state, traj.steps[0].action));
    total += ove::discounted_return(traj, data.spec);
  }
  CHECK(total / 20000.0 == doctest::Approx(0.518).epsilon(0.02));

  const ove::TabularMdp gw = ove::gridworld();
  const ove::Dataset gdata =
      ove::sample_dataset(gw, ove::uniform_policy(gw), 50, ove::SeededRng(6, 1));
  for (const auto& traj : gdata.trajectories) CHECK(traj.length() == 30);

  // Trajectory i is a pure function of (seed, i): prefixes are stable.
  const ove::Dataset first = ove::sample_dataset(rec, beta, 10, ove::SeededRng(5, 0));
  const ove::Dataset wider = ove::sample_dataset(rec, beta, 20, ove::SeededRng(5, 0));
  for (std::size_t i = 0; i < 10; ++i) {
    CHECK(first.trajectories[i].steps[0].state == wider.trajectories[i].steps[0].state);
    CHECK(first.trajectories[i].steps[0].action == wider.trajectories[i].steps[0].action);
    CHECK(first.trajectories[i].steps[0].reward == wider.trajectories[i].steps[0].reward);
  }
}

TEST_CASE("trajectory enumeration") {
  const ove::TabularMdp cx = ove::counterexample_mdp();
  const auto cx_all = ove::enumerate_trajectories(cx, ove::uniform_policy(cx));
  CHECK(cx_all.size() == 2);
  CHECK(cx_all[0].second == 0.5);
  CHECK(cx_all[1].second == 0.5);

  const ove::TabularMdp rec = ove::recommender();
  const auto rec_all = ove::enumerate_trajectories(rec, ove::uniform_policy(rec));
  CHECK(rec_all.size() == 10);
  ove::NeumaierSum mass;
  for (const auto& [traj, p] : rec_all) {
    CHECK(traj.length() == 1);
    mass.add(p);
  }
  CHECK(mass.value() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(ove::enumerate_trajectories(rec, ove::uniform_policy(rec), 1),
                  ove::IntractableModel);
}

TEST_CASE("config files round trip") {
  const std::string mdp_path = temp_path("mdp.json");
  const std::string pol_path = temp_path("policy.json");

  const ove::TabularMdp gw = ove::gridworld();
  ove::save_mdp(gw, mdp_path);
  const ove::TabularMdp back = ove::load_mdp(mdp_path);
  CHECK(back.num_states == gw.num_states);
  CHECK(back.num_actions == gw.num_actions);
  CHECK(back.transition == gw.transition);
  CHECK(back.reward == gw.reward);
  CHECK(back.start == gw.start);
  CHECK(back.terminal == gw.terminal);
  CHECK(back.spec.gamma == gw.spec.gamma);
  CHECK(back.spec.horizon == gw.spec.horizon);
  CHECK(back.spec.r_min == gw.spec.r_min);
  CHECK(back.spec.r_max == gw.spec.r_max);

  const ove::TabularPolicy pi = ove::smoothed_policy(gw, 0.8);
  ove::save_policy(pi, pol_path);
  const ove::TabularPolicy pback = ove::load_policy(pol_path);
  CHECK(pback.probs == pi.probs);

  const ove::TabularMdp resolved = ove::resolve_env(mdp_path);
  CHECK(resolved.transition == gw.transition);
  CHECK(ove::resolve_env("gridworld").num_states == 17);

  std::remove(mdp_path.c_str());
  std::remove(pol_path.c_str());
}

TEST_CASE("policy name resolution") {
  const ove::TabularMdp rec = ove::recommender();
  const auto by_number = ove::resolve_policy(rec, "recommender", "det_3");
  const auto by_letter = ove::resolve_policy(rec, "recommender", "det_d");
  CHECK(by_number.probs == by_letter.probs);
  CHECK(by_number.prob(0, 3) == 1.0);

  const auto smoothed = ove::resolve_policy(rec, "recommender", "smoothed");
  const auto frozen = ove::smoothed_policy(rec, ove::kRecommenderSmoothing);
  CHECK(smoothed.probs == frozen.probs);
  CHECK(ove::default_smoothing("gridworld") == ove::kGridworldSmoothing);
  CHECK(ove::default_smoothing("somewhere_else") == ove::kDefaultSmoothing);

  CHECK_THROWS_AS(ove::resolve_policy(rec, "recommender", "det_x9"), ove::InvalidInput);
  CHECK_THROWS_AS(ove::resolve_policy(rec, "recommender", "det_9"), ove::InvalidRange);

  const ove::TabularMdp cx = ove::counterexample_mdp();
  const std::string shape_path = temp_path("wrong_shape.json");
  ove::save_policy(ove::uniform_policy(cx), shape_path);
  CHECK_THROWS_AS(ove::resolve_policy(rec, "recommender", shape_path), ove::InvalidInput);
  std::remove(shape_path.c_str());
}
