#include <cmath>
#include <ostream>
#include <sstream>

#include "rmab/sim.hpp"

namespace rmab {

namespace {

std::size_t sample_row(std::span<const double> row, double u) {
  double acc = 0.0;
  for (std::size_t i = 0; i < row.size(); ++i) {
    acc += row[i];
    if (u < acc) return i;
  }
  // u landed in rounding slack above the row mass; take the last reachable state.
  for (std::size_t i = row.size(); i-- > 0;)
    if (row[i] > 0.0) return i;
  return row.size() - 1;
}

}  // namespace

EnvState EnvState::initial(const BanditInstance& instance, std::uint64_t seed) {
  return EnvState{instance.initial_states, 0, Rng(seed)};
}

StepOutcome env_step(EnvState& env, const BanditInstance& instance, std::size_t arm) {
  if (arm >= instance.n_arms()) throw ContractViolation("env_step: arm out of range");
  StepOutcome out;
  const std::size_t x = env.hidden_states[arm];
  out.reward = uniform01(env.rng) < instance.arms[arm].click_prob[x] ? 1 : 0;
  out.observation = out.reward == 1 ? Observation::Like : Observation::Dislike;
  for (std::size_t j = 0; j < instance.n_arms(); ++j) {
    const Matrix& p = j == arm ? instance.arms[j].p_active : instance.arms[j].p_passive;
    env.hidden_states[j] = sample_row(p.row(env.hidden_states[j]), uniform01(env.rng));
  }
  ++env.step;
  return out;
}

EpisodeResult run_episode(const BanditInstance& instance, const Policy& policy, std::size_t steps,
                          std::uint64_t seed) {
  if (steps < 1) throw ContractViolation("run_episode: steps must be >= 1");
  EnvState env = EnvState::initial(instance, derive_seed(seed, 0));
  Rng policy_rng = make_substream(seed, 1);
  std::vector<Belief> beliefs = instance.initial_beliefs;

  EpisodeResult result;
  result.records.reserve(steps);
  double weight = 1.0;
  for (std::size_t t = 1; t <= steps; ++t) {
    PolicyDecision decision;
    try {
      decision = policy.select(beliefs, instance, policy_rng);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "policy '" << policy.name() << "' failed at step " << t << ": " << e.what();
      throw EpisodeError(os.str());
    }
    const std::size_t a = decision.arm;
    if (a >= instance.n_arms()) {
      std::ostringstream os;
      os << "policy '" << policy.name() << "' chose arm " << a << " at step " << t << " (N=" << instance.n_arms()
         << ")";
      throw EpisodeError(os.str());
    }
    const StepOutcome outcome = env_step(env, instance, a);
    try {
      for (std::size_t j = 0; j < beliefs.size(); ++j)
        beliefs[j] = j == a ? belief_update_play(beliefs[j], instance.arms[j], outcome.observation)
                            : belief_update_passive(beliefs[j], instance.arms[j]);
    } catch (const ImpossibleObservation& e) {
      std::ostringstream os;
      os << "belief update failed at step " << t << " on arm " << a + 1 << ": " << e.what();
      throw EpisodeError(os.str());
    }
    result.discounted_return += weight * outcome.reward;
    weight *= instance.discount;
    result.records.push_back(StepRecord{t, a, outcome.observation, outcome.reward, beliefs, env.hidden_states});
  }
  return result;
}

std::string trace_csv_header(std::size_t n_arms, std::size_t n_states) {
  std::ostringstream os;
  os << "episode,t,arm_played,observation,reward";
  for (std::size_t j = 1; j <= n_arms; ++j)
    for (std::size_t s = 1; s <= n_states; ++s) os << ",belief_a" << j << "_s" << s;
  return os.str();
}

void write_trace_csv_rows(std::ostream& out, std::size_t episode, const std::vector<StepRecord>& records) {
  const auto old_precision = out.precision(17);
  for (const auto& r : records) {
    out << episode << ',' << r.t << ',' << r.arm_played + 1 << ',' << to_string(r.observation) << ',' << r.reward;
    for (const auto& b : r.beliefs_after)
      for (double p : b) out << ',' << p;
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace rmab
