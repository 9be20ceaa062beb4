#include <cmath>
#include <sstream>

#include "rmab/sim.hpp"

namespace rmab {

namespace {

class Enumerator {
 public:
  Enumerator(const BanditInstance& instance, const Policy& policy, std::size_t steps)
      : instance_(instance), policy_(policy), steps_(steps) {}

  // Expected discounted reward from step t onward, given the true hidden
  // states and the controller's beliefs.
  double value(std::size_t t, const std::vector<std::size_t>& hidden, const std::vector<Belief>& beliefs) {
    if (t == steps_) return 0.0;
    const std::size_t a = policy_.select(beliefs, instance_, unused_rng_).arm;
    const ArmModel& played = instance_.arms[a];
    const double like_prob = played.click_prob[hidden[a]];

    double total = like_prob;  // immediate expected reward
    for (const Observation obs : {Observation::Like, Observation::Dislike}) {
      const double p_obs = obs == Observation::Like ? like_prob : 1.0 - like_prob;
      if (p_obs <= 0.0) continue;
      std::vector<Belief> next_beliefs(beliefs.size());
      for (std::size_t j = 0; j < beliefs.size(); ++j)
        next_beliefs[j] = j == a ? belief_update_play(beliefs[j], played, obs)
                                 : belief_update_passive(beliefs[j], instance_.arms[j]);
      std::vector<std::size_t> next_hidden(hidden.size());
      total += instance_.discount * p_obs * transitions(t, a, hidden, next_hidden, 0, 1.0, next_beliefs);
    }
    return total;
  }

 private:
  // Sums over joint next hidden states, arm by arm.
  double transitions(std::size_t t, std::size_t played, const std::vector<std::size_t>& hidden,
                     std::vector<std::size_t>& next_hidden, std::size_t arm, double prob,
                     const std::vector<Belief>& next_beliefs) {
    if (arm == hidden.size()) return prob * value(t + 1, next_hidden, next_beliefs);
    const ArmModel& m = instance_.arms[arm];
    const auto row = (arm == played ? m.p_active : m.p_passive).row(hidden[arm]);
    double total = 0.0;
    for (std::size_t s = 0; s < row.size(); ++s) {
      if (row[s] == 0.0) continue;
      next_hidden[arm] = s;
      total += transitions(t, played, hidden, next_hidden, arm + 1, prob * row[s], next_beliefs);
    }
    return total;
  }

  const BanditInstance& instance_;
  const Policy& policy_;
  std::size_t steps_;
  Rng unused_rng_{0};
};

}  // namespace

double exact_value_oracle(const BanditInstance& instance, const Policy& policy, std::size_t steps) {
  instance.validate();
  if (!policy.deterministic())
    throw ContractViolation("exact_value_oracle: policy '" + policy.name() + "' is not deterministic");
  if (steps < 1) throw ContractViolation("exact_value_oracle: steps must be >= 1");
  const double per_step = 2.0 * std::pow(static_cast<double>(instance.n_states()), static_cast<double>(instance.n_arms()));
  const double leaves = std::pow(per_step, static_cast<double>(steps));
  if (leaves > kOracleLeafLimit) {
    std::ostringstream os;
    os << "exact_value_oracle: outcome tree has up to " << leaves << " leaves (limit " << kOracleLeafLimit << ")";
    throw TreeTooLarge(os.str());
  }
  return Enumerator(instance, policy, steps).value(0, instance.initial_states, instance.initial_beliefs);
}

}  // namespace rmab
