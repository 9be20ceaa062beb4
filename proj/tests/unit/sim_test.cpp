#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

#include "rmab/experiments.hpp"
#include "rmab/sim.hpp"
#include "support/belief_tree_oracle.hpp"
#include "support/generators.hpp"

using namespace rmab;
using rmab::testing::belief_tree_value;
using rmab::testing::random_instance;
using rmab::testing::two_arm_instance;

namespace {

double geometric(double beta, std::size_t t) { return (1.0 - std::pow(beta, static_cast<double>(t))) / (1.0 - beta); }

BanditInstance always_click(BanditInstance inst) {
  for (auto& arm : inst.arms) std::fill(arm.click_prob.begin(), arm.click_prob.end(), 1.0);
  return inst;
}

// Initial beliefs put all mass on the true initial states.
BanditInstance point_mass_start(BanditInstance inst) {
  for (std::size_t j = 0; j < inst.n_arms(); ++j)
    inst.initial_beliefs[j] = Belief::point_mass(inst.n_states(), inst.initial_states[j]);
  return inst;
}

}  // namespace

TEST_SUITE("sim-harness") {

TEST_CASE("env_step click frequency follows the hidden state") {
  const BanditInstance ex1 = builtin_instance("example1");
  EnvState env = EnvState::initial(ex1, 42);
  int likes = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    env.hidden_states[0] = 3;
    const StepOutcome out = env_step(env, ex1, 0);
    CHECK((out.reward == 1) == (out.observation == Observation::Like));
    likes += out.reward;
  }
  CHECK(std::abs(likes / double(n) - 0.85) <= 0.01);
  CHECK(env.step == static_cast<std::size_t>(n));
}

TEST_CASE("env_step moves resting arms of the third built-in instance to state 2") {
  const BanditInstance ex3 = builtin_instance("example3");
  EnvState env = EnvState::initial(ex3, 7);
  for (int i = 0; i < 50; ++i) {
    const std::size_t played = static_cast<std::size_t>(i % 5);
    env_step(env, ex3, played);
    for (std::size_t j = 0; j < 5; ++j)
      if (j != played) CHECK(env.hidden_states[j] == 1);
  }
}

TEST_CASE("env_step follows a deterministic permutation chain") {
  const Matrix perm{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}};
  BanditInstance inst;
  inst.discount = 0.9;
  inst.arms = {ArmModel{perm, Matrix::identity(3), {0.2, 0.5, 0.8}}};
  inst.initial_beliefs = {Belief::uniform(3)};
  inst.initial_states = {0};
  EnvState env = EnvState::initial(inst, 1);
  for (std::size_t i = 1; i <= 9; ++i) {
    env_step(env, inst, 0);
    CHECK(env.hidden_states[0] == i % 3);
  }
  CHECK_THROWS_AS(env_step(env, inst, 1), ContractViolation);
}

TEST_CASE("run_episode single step") {
  const BanditInstance ex1 = builtin_instance("example1");
  const auto myopic = make_myopic_policy();
  double sum = 0.0;
  const int n = 20000;
  for (int s = 0; s < n; ++s) {
    const EpisodeResult r = run_episode(ex1, *myopic, 1, s);
    REQUIRE(r.records.size() == 1);
    CHECK((r.discounted_return == 0.0 || r.discounted_return == 1.0));
    CHECK(r.records[0].t == 1);
    CHECK(r.records[0].arm_played == 0);
    sum += r.discounted_return;
  }
  // Hidden state of the first item starts at state 2 (click 0.3).
  const double p = ex1.arms[0].click_prob[ex1.initial_states[0]];
  CHECK(std::abs(sum / n - p) <= 3.0 * std::sqrt(p * (1 - p) / n));
  CHECK_THROWS_AS(run_episode(ex1, *myopic, 0, 1), ContractViolation);
}

TEST_CASE("run_episode returns the geometric series when every play is clicked") {
  const BanditInstance inst = always_click(builtin_instance("example2"));
  const auto random = make_random_policy();
  for (const std::size_t t : {1u, 7u, 100u}) {
    const EpisodeResult r = run_episode(inst, *random, t, 3);
    CHECK(r.discounted_return == doctest::Approx(geometric(0.95, t)).epsilon(1e-12));
  }
}

TEST_CASE("run_episode is deterministic in its seed") {
  const BanditInstance ex2 = builtin_instance("example2");
  RolloutConfig cfg;
  cfg.trajectories = 10;
  const auto rollout = make_rollout_policy(cfg);
  const EpisodeResult a = run_episode(ex2, *rollout, 30, 11);
  const EpisodeResult b = run_episode(ex2, *rollout, 30, 11);
  REQUIRE(a.records.size() == b.records.size());
  CHECK(a.discounted_return == b.discounted_return);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].arm_played == b.records[i].arm_played);
    CHECK(a.records[i].observation == b.records[i].observation);
    CHECK(a.records[i].hidden_after == b.records[i].hidden_after);
    CHECK(a.records[i].beliefs_after == b.records[i].beliefs_after);
  }
}

TEST_CASE("recorded beliefs replay from the recorded actions and observations") {
  Rng gen(55);
  const auto random = make_random_policy();
  for (int trial = 0; trial < 1000; ++trial) {
    const BanditInstance inst = point_mass_start(random_instance(3, 3, gen));
    const EpisodeResult r = run_episode(inst, *random, 10, trial);
    std::vector<Belief> beliefs = inst.initial_beliefs;
    double ret = 0.0, w = 1.0;
    for (const StepRecord& rec : r.records) {
      CHECK((rec.reward == 1) == (rec.observation == Observation::Like));
      for (std::size_t j = 0; j < beliefs.size(); ++j)
        beliefs[j] = j == rec.arm_played ? belief_update_play(beliefs[j], inst.arms[j], rec.observation)
                                         : belief_update_passive(beliefs[j], inst.arms[j]);
      CHECK(beliefs == rec.beliefs_after);
      ret += w * rec.reward;
      w *= inst.discount;
    }
    CHECK(ret == doctest::Approx(r.discounted_return));
    CHECK(r.discounted_return >= 0.0);
    CHECK(r.discounted_return <= geometric(inst.discount, 10) + 1e-12);
  }
}

TEST_CASE("filter calibration: hidden-state frequencies match beliefs given the history") {
  const BanditInstance inst = point_mass_start(two_arm_instance());
  const auto myopic = make_myopic_policy();
  const std::size_t steps = 3;
  // Key: played arms and observations so far. Under a deterministic policy the
  // history fixes the belief.
  struct Group {
    std::vector<double> belief;
    std::size_t arm = 0;
    std::vector<int> counts = std::vector<int>(2, 0);
    int total = 0;
  };
  std::map<std::string, Group> groups;
  for (int s = 0; s < 50000; ++s) {
    const EpisodeResult r = run_episode(inst, *myopic, steps, s);
    std::string key;
    for (const StepRecord& rec : r.records) key += std::to_string(rec.arm_played) + to_string(rec.observation) + ";";
    const StepRecord& last = r.records.back();
    Group& g = groups[key];
    g.arm = last.arm_played;
    g.belief.assign(last.beliefs_after[g.arm].begin(), last.beliefs_after[g.arm].end());
    ++g.counts[last.hidden_after[g.arm]];
    ++g.total;
  }
  int checked = 0;
  for (const auto& [key, g] : groups) {
    if (g.total < 500) continue;
    ++checked;
    const double p = g.belief[0];
    const double se = std::sqrt(p * (1 - p) / g.total);
    CAPTURE(key);
    CHECK(std::abs(g.counts[0] / double(g.total) - p) <= 3.0 * se + 1e-12);
  }
  CHECK(checked >= 4);
}

TEST_CASE("evaluate aggregates") {
  const BanditInstance ex1 = builtin_instance("example1");
  const auto myopic = make_myopic_policy();

  EvalOptions one;
  one.episodes = 1;
  one.steps = 20;
  one.base_seed = 9;
  const EvalReport r1 = evaluate(ex1, *myopic, one);
  CHECK(r1.stderr_return == 0.0);
  CHECK(r1.mean_discounted_return == run_episode(ex1, *myopic, 20, 9).discounted_return);

  EvalOptions opts;
  opts.episodes = 200;
  opts.steps = 30;
  const EvalReport r = evaluate(ex1, *myopic, opts);
  CHECK(r.policy_name == "myopic");
  CHECK(r.ci95_lo <= r.mean_discounted_return);
  CHECK(r.mean_discounted_return <= r.ci95_hi);
  CHECK(r.ci95_hi - r.mean_discounted_return == doctest::Approx(1.96 * r.stderr_return));
  double freq = 0.0;
  for (double f : r.per_arm_play_frequency) freq += f;
  CHECK(std::abs(freq - 1.0) <= 1e-9);
  REQUIRE(r.cumulative_discounted_curve.size() == 30);
  CHECK(r.cumulative_discounted_curve.back() == doctest::Approx(r.mean_discounted_return));
  for (std::size_t t = 1; t < 30; ++t) CHECK(r.cumulative_discounted_curve[t] >= r.cumulative_discounted_curve[t - 1]);
  for (double v : r.episode_returns) {
    CHECK(v >= 0.0);
    CHECK(v <= geometric(0.95, 30) + 1e-12);
  }
}

TEST_CASE("random policy spreads plays evenly over symmetric arms") {
  BanditInstance inst = builtin_instance("example1");
  for (std::size_t j = 1; j < 5; ++j) {
    inst.arms[j] = inst.arms[0];
    inst.initial_beliefs[j] = inst.initial_beliefs[0];
    inst.initial_states[j] = inst.initial_states[0];
  }
  const auto random = make_random_policy();
  EvalOptions opts;
  opts.episodes = 1000;
  opts.steps = 10;
  const EvalReport r = evaluate(inst, *random, opts);
  for (double f : r.per_arm_play_frequency) CHECK(std::abs(f - 0.2) <= 0.02);
}

TEST_CASE("evaluate does not depend on the thread count") {
  const BanditInstance ex2 = builtin_instance("example2");
  RolloutConfig cfg;
  cfg.trajectories = 10;
  const auto rollout = make_rollout_policy(cfg);
  EvalOptions opts;
  opts.episodes = 24;
  opts.steps = 20;
  opts.threads = 1;
  const EvalReport a = evaluate(ex2, *rollout, opts);
  opts.threads = 4;
  const EvalReport b = evaluate(ex2, *rollout, opts);
  CHECK(a.episode_returns == b.episode_returns);
  CHECK(a.mean_discounted_return == b.mean_discounted_return);
  CHECK(a.stderr_return == b.stderr_return);
  CHECK(a.per_arm_play_frequency == b.per_arm_play_frequency);
  CHECK(a.cumulative_discounted_curve == b.cumulative_discounted_curve);
}

TEST_CASE("exact_value_oracle small cases") {
  const auto myopic = make_myopic_policy();
  const BanditInstance ex1 = builtin_instance("example1");

  // T=1: the first choice is item 1, whose hidden state is known.
  const BanditInstance small = two_arm_instance();
  const std::size_t first = myopic_select(small.initial_beliefs, small).arm;
  CHECK(exact_value_oracle(small, *myopic, 1) == small.arms[first].click_prob[small.initial_states[first]]);

  const BanditInstance clicks = always_click(small);
  CHECK(exact_value_oracle(clicks, *myopic, 5) == doctest::Approx(geometric(0.9, 5)).epsilon(1e-12));

  CHECK_THROWS_AS(exact_value_oracle(ex1, *myopic, 6), TreeTooLarge);
  CHECK_THROWS_AS(exact_value_oracle(small, *make_random_policy(), 2), ContractViolation);
}

TEST_CASE("exact_value_oracle agrees with belief-space enumeration from a known start") {
  // With point-mass beliefs the belief tree and the hidden-state tree describe
  // the same process.
  Rng gen(808);
  const auto myopic = make_myopic_policy();
  for (int trial = 0; trial < 50; ++trial) {
    const BanditInstance inst = point_mass_start(random_instance(2, 2, gen, 0.9));
    for (std::size_t t = 1; t <= 4; ++t) {
      const double exact = exact_value_oracle(inst, *myopic, t);
      const double tree = belief_tree_value(inst, inst.initial_beliefs, static_cast<int>(t), std::nullopt,
                                            BasePolicy::Myopic, inst.discount);
      CHECK(exact == doctest::Approx(tree).epsilon(1e-10));
    }
  }
}

TEST_CASE("evaluate agrees with the exact oracle") {
  const BanditInstance inst = two_arm_instance();
  const auto myopic = make_myopic_policy();
  EvalOptions opts;
  opts.episodes = 20000;
  opts.steps = 3;
  const EvalReport r = evaluate(inst, *myopic, opts);
  CHECK(std::abs(r.mean_discounted_return - exact_value_oracle(inst, *myopic, 3)) <= 3.0 * r.stderr_return);
}

TEST_CASE("trace CSV layout") {
  CHECK(trace_csv_header(2, 2) ==
        "episode,t,arm_played,observation,reward,belief_a1_s1,belief_a1_s2,belief_a2_s1,belief_a2_s2");
  const BanditInstance inst = two_arm_instance();
  const EpisodeResult r = run_episode(inst, *make_myopic_policy(), 2, 1);
  std::ostringstream os;
  write_trace_csv_rows(os, 3, r.records);
  std::istringstream in(os.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind("3," + std::to_string(rows) + ",", 0) == 0);
    CHECK(std::count(line.begin(), line.end(), ',') == 8);
    CHECK((line.find(",like,") != std::string::npos || line.find(",dislike,") != std::string::npos));
  }
  CHECK(rows == 2);
}

}  // TEST_SUITE
