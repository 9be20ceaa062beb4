#include <doctest.h>

#include <cmath>
#include <numeric>

#include "rmab/core.hpp"
#include "rmab/experiments.hpp"
#include "support/generators.hpp"

using namespace rmab;
using rmab::testing::random_arm;
using rmab::testing::random_belief;

namespace {

void check_belief(const Belief& got, std::initializer_list<double> want, double tol = 1e-12) {
  REQUIRE(got.size() == want.size());
  std::size_t i = 0;
  for (double w : want) CHECK(std::abs(got[i++] - w) <= tol);
}

ArmModel example1_item1() { return builtin_instance("example1").arms[0]; }

std::vector<double> times_matrix(const Belief& b, const Matrix& m) {
  std::vector<double> out(b.size(), 0.0);
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t l = 0; l < b.size(); ++l) out[l] += b[i] * m(i, l);
  return out;
}

}  // namespace

TEST_SUITE("bandit-core") {

TEST_CASE("belief construction enforces the probability simplex") {
  CHECK_NOTHROW(Belief{0.1, 0.2, 0.3, 0.4});
  CHECK_THROWS_AS(Belief({0.5, 0.6}), ContractViolation);
  CHECK_THROWS_AS(Belief({-0.1, 1.1}), ContractViolation);
  CHECK_THROWS_AS(Belief(std::vector<double>{}), ContractViolation);
  const Belief b = Belief::normalized({2.0, 6.0});
  CHECK(b[0] == doctest::Approx(0.25));
  CHECK_THROWS_AS(Belief::normalized({0.0, 0.0}), ContractViolation);
}

TEST_CASE("expected_reward examples") {
  ArmModel arm = example1_item1();
  CHECK(expected_reward(Belief{0, 0, 0, 1}, arm) == doctest::Approx(0.85));
  CHECK(expected_reward(Belief{0.1, 0.2, 0.3, 0.4}, arm) == doctest::Approx(0.59));
  arm.click_prob = {0.25, 0.4, 0.6, 0.95};
  CHECK(expected_reward(Belief{0.25, 0.25, 0.25, 0.25}, arm) == doctest::Approx(0.55));
  CHECK_THROWS_AS(expected_reward(Belief{0.5, 0.5}, arm), ContractViolation);
}

TEST_CASE("play update from a point mass returns the transition row") {
  const Belief post = belief_update_play(Belief{0, 0, 0, 1}, example1_item1(), Observation::Like);
  check_belief(post, {0, 0, 0.25, 0.75});
}

TEST_CASE("play update hand-computed Bayes posterior") {
  // numerator (0.045, 0.08, 0.075, 0), normalizer 0.2
  const Belief post = belief_update_play(Belief{0.5, 0.5, 0, 0}, example1_item1(), Observation::Like);
  check_belief(post, {0.225, 0.4, 0.375, 0.0});
}

TEST_CASE("like/dislike posteriors mix back to the predictive distribution") {
  const ArmModel arm = example1_item1();
  const Belief prior{0.5, 0.5, 0, 0};
  const Belief like = belief_update_play(prior, arm, Observation::Like);
  const Belief dislike = belief_update_play(prior, arm, Observation::Dislike);
  const auto predictive = times_matrix(prior, arm.p_active);
  for (std::size_t l = 0; l < 4; ++l) CHECK(0.2 * like[l] + 0.8 * dislike[l] == doctest::Approx(predictive[l]).epsilon(1e-12));
}

TEST_CASE("passive update examples") {
  const BanditInstance ex1 = builtin_instance("example1");
  const BanditInstance ex3 = builtin_instance("example3");
  ArmModel ident = ex1.arms[0];
  ident.p_passive = Matrix::identity(4);
  const Belief b{0.1, 0.2, 0.3, 0.4};
  CHECK(belief_update_passive(b, ident) == b);
  check_belief(belief_update_passive(Belief::uniform(4), ex3.arms[2]), {0, 1, 0, 0});
  check_belief(belief_update_passive(Belief{1, 0, 0, 0}, ex1.arms[0]), {0.45, 0.55, 0, 0});
}

TEST_CASE("observations with zero probability are rejected") {
  ArmModel arm{Matrix::identity(2), Matrix::identity(2), {0.0, 0.5}};
  CHECK_THROWS_AS(belief_update_play(Belief{1, 0}, arm, Observation::Like), ImpossibleObservation);
  arm.click_prob = {1.0, 0.5};
  CHECK_THROWS_AS(belief_update_play(Belief{1, 0}, arm, Observation::Dislike), ImpossibleObservation);
  CHECK_THROWS_AS(belief_update_play(Belief{1, 0}, arm, Observation::None), ContractViolation);
}

TEST_CASE("arm validation and the increasing-click diagnostic") {
  const BanditInstance ex1 = builtin_instance("example1");
  const BanditInstance ex2 = builtin_instance("example2");
  CHECK(ex1.arms[0].click_prob_strictly_increasing());
  CHECK_FALSE(ex1.arms[2].click_prob_strictly_increasing());  // 0.2 0.6 0.6 0.6
  CHECK_FALSE(ex2.arms[0].click_prob_strictly_increasing());

  ArmModel bad = ex1.arms[0];
  bad.p_active(0, 0) = 0.4;
  CHECK_THROWS_AS(bad.validate(), ContractViolation);
  bad = ex1.arms[0];
  bad.click_prob[3] = 1.2;
  CHECK_THROWS_AS(bad.validate(), ContractViolation);

  BanditInstance inst = ex1;
  inst.discount = 1.0;
  CHECK_THROWS_AS(inst.validate(), ContractViolation);
  inst = ex1;
  inst.initial_states[0] = 4;
  CHECK_THROWS_AS(inst.validate(), ContractViolation);
}

TEST_CASE("belief update properties on random inputs") {
  Rng rng(20240611);
  reset_renormalization_warnings();
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t s = 2 + trial % 5;
    const ArmModel arm = random_arm(s, rng, trial % 3 == 0 ? 0.3 : 0.0);
    const Belief prior = random_belief(s, rng, trial % 4 == 0 ? 0.3 : 0.0);
    const double like_prob = expected_reward(prior, arm);
    CAPTURE(trial);

    // Like normalizer equals the expected reward.
    std::vector<double> out(s);
    if (like_prob > 0.0) {
      const double z = kernels::play_update(prior.probs(), arm.p_active, arm.click_prob, true, out);
      CHECK(std::abs(z - like_prob) <= 1e-12);
    }

    std::vector<double> mix(s, 0.0);
    for (const Observation obs : {Observation::Like, Observation::Dislike}) {
      const double p = obs == Observation::Like ? like_prob : 1.0 - like_prob;
      if (p <= 0.0) continue;
      const Belief post = belief_update_play(prior, arm, obs);
      const double mass = std::accumulate(post.begin(), post.end(), 0.0);
      CHECK(std::abs(mass - 1.0) <= 1e-9);
      for (std::size_t l = 0; l < s; ++l) {
        CHECK(post[l] >= 0.0);
        mix[l] += p * post[l];
        // Support: no mass where no allowed transition lands.
        double reach = 0.0;
        for (std::size_t i = 0; i < s; ++i) reach += prior[i] * arm.p_active(i, l);
        if (reach == 0.0) CHECK(post[l] == 0.0);
      }
    }
    const auto predictive = times_matrix(prior, arm.p_active);
    for (std::size_t l = 0; l < s; ++l) CHECK(std::abs(mix[l] - predictive[l]) <= 1e-9);

    // Passive update is linear in the prior.
    const Belief other = random_belief(s, rng);
    const double a = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    std::vector<double> blend(s);
    for (std::size_t i = 0; i < s; ++i) blend[i] = a * prior[i] + (1.0 - a) * other[i];
    const Belief lhs = belief_update_passive(Belief::normalized(blend), arm);
    const Belief p1 = belief_update_passive(prior, arm);
    const Belief p2 = belief_update_passive(other, arm);
    for (std::size_t l = 0; l < s; ++l) CHECK(std::abs(lhs[l] - (a * p1[l] + (1.0 - a) * p2[l])) <= 1e-9);
  }
  CHECK(renormalization_warnings() == 0);
}

}  // TEST_SUITE
