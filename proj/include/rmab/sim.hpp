// Ground-truth environment, episode runner, Monte Carlo evaluation, and an
// exact enumeration oracle for small instances.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmab/core.hpp"
#include "rmab/policies.hpp"
#include "rmab/random.hpp"

namespace rmab {

struct EnvState {
  std::vector<std::size_t> hidden_states;
  std::size_t step = 0;
  Rng rng;

  static EnvState initial(const BanditInstance& instance, std::uint64_t seed);
};

struct StepOutcome {
  int reward = 0;
  Observation observation = Observation::None;
};

// Samples the played arm's feedback from its current hidden state, then moves
// every arm: the played one by p_active, the rest by p_passive.
StepOutcome env_step(EnvState& env, const BanditInstance& instance, std::size_t arm);

struct StepRecord {
  std::size_t t = 0;  // 1-based
  std::size_t arm_played = 0;
  Observation observation = Observation::None;
  int reward = 0;
  std::vector<Belief> beliefs_after;
  std::vector<std::size_t> hidden_after;
};

struct EpisodeResult {
  double discounted_return = 0.0;
  std::vector<StepRecord> records;
};

class EpisodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Environment randomness comes from substream 0 of `seed`, policy randomness
// from substream 1.
EpisodeResult run_episode(const BanditInstance& instance, const Policy& policy, std::size_t steps,
                          std::uint64_t seed);

struct EvalReport {
  std::string policy_name;
  std::size_t episodes = 0;
  std::size_t steps_per_episode = 0;
  double mean_discounted_return = 0.0;
  double stderr_return = 0.0;
  double ci95_lo = 0.0;
  double ci95_hi = 0.0;
  std::vector<double> per_arm_play_frequency;
  // Per step t: mean and standard error of sum_{tau <= t} beta^(tau-1) R_tau.
  std::vector<double> cumulative_discounted_curve;
  std::vector<double> cumulative_discounted_stderr;
  std::vector<double> episode_returns;
};

struct EvalOptions {
  std::size_t episodes = 500;
  std::size_t steps = 100;
  std::uint64_t base_seed = 1;
  unsigned threads = 1;  // 0 selects hardware concurrency
};

// Episode k uses seed base_seed + k, so the report does not depend on the
// number of threads.
EvalReport evaluate(const BanditInstance& instance, const Policy& policy, const EvalOptions& options);

class TreeTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kOracleLeafLimit = 1e6;

// Exact expected discounted return of a deterministic belief-based policy
// over `steps` steps, by weighted enumeration of feedback and hidden
// transitions from the instance's initial states.
double exact_value_oracle(const BanditInstance& instance, const Policy& policy, std::size_t steps);

// Trace CSV: episode,t,arm_played,observation,reward,belief_a1_s1,...,
// belief_aN_sS (arm-major). Arms, states and t are 1-based; observation is
// like|dislike.
std::string trace_csv_header(std::size_t n_arms, std::size_t n_states);
void write_trace_csv_rows(std::ostream& out, std::size_t episode, const std::vector<StepRecord>& records);

}  // namespace rmab
