// Decision rules mapping per-arm beliefs to the arm played next: uniform
// random, myopic, Monte Carlo rollout with one-step improvement, and a
// Monte Carlo estimate of the Whittle index.
//
// Every rule breaks ties toward the lowest arm index.

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rmab/core.hpp"
#include "rmab/random.hpp"

namespace rmab {

enum class BasePolicy { UniformRandom, Myopic };

const char* to_string(BasePolicy base);

struct RolloutConfig {
  int horizon = 5;        // H: steps simulated after the first play
  int trajectories = 100; // L
  BasePolicy base = BasePolicy::Myopic;
  // Replaces the instance discount in scoring and rollouts; [0, 1).
  std::optional<double> discount_override;
  // Same trajectory seeds for every candidate arm.
  bool common_random_numbers = true;

  void validate() const;
  bool operator==(const RolloutConfig&) const = default;
};

struct RolloutEstimate {
  std::vector<double> q_values;  // r(pi, j) + beta * q_tilde(j)
  std::vector<double> q_tilde;   // mean H-step return from the post-play successor
  std::vector<double> std_error; // of q_tilde across trajectories
};

struct WhittleConfig {
  double subsidy_lo = 0.0;
  double subsidy_hi = 1.0;
  double tolerance = 0.01;
  int eval_horizon = 20;
  int eval_trajectories = 50;
  int probe_points = 11;

  void validate() const;
  bool operator==(const WhittleConfig&) const = default;
};

struct PolicyDecision {
  std::size_t arm = 0;
  std::vector<double> scores;
  std::optional<RolloutEstimate> diagnostics;
  // Arms whose play-minus-passive value difference was not monotone in W.
  std::size_t non_monotone_arms = 0;
};

// Lowest-index maximizer.
std::size_t argmax_lowest(std::span<const double> scores);

PolicyDecision random_select(std::size_t n_arms, Rng& rng);

PolicyDecision myopic_select(std::span<const Belief> beliefs, const BanditInstance& instance);

// Discounted belief-space return of `horizon` steps that plays `first_action`
// first and follows cfg.base afterwards. Rewards are expected rewards of the
// played belief; observations are sampled to branch the played arm's belief.
double rollout_trajectory(std::span<const Belief> beliefs, std::size_t first_action,
                          const BanditInstance& instance, const RolloutConfig& cfg, Rng& rng);

PolicyDecision mc_rollout_select(std::span<const Belief> beliefs, const BanditInstance& instance,
                                 const RolloutConfig& cfg, Rng& rng);

class NoCrossingInBracket : public std::runtime_error {
 public:
  enum class Side { Below, Above };
  NoCrossingInBracket(Side side, const std::string& what) : std::runtime_error(what), side_(side) {}
  // Below: passivity already preferred at subsidy_lo. Above: play still
  // preferred at subsidy_hi.
  Side side() const { return side_; }

 private:
  Side side_;
};

struct IndexEstimate {
  double index = 0.0;
  bool non_monotone = false;
};

// Estimated play-minus-passive value difference of a single arm under
// subsidy W, using `seed` for every trajectory. Deterministic in its inputs.
double subsidy_value_gap(const Belief& belief, const ArmModel& arm, double discount, double subsidy,
                         const WhittleConfig& cfg, std::uint64_t seed);

IndexEstimate whittle_index(const Belief& belief, const ArmModel& arm, double discount,
                            const WhittleConfig& cfg, Rng& rng);

PolicyDecision whittle_select(std::span<const Belief> beliefs, const BanditInstance& instance,
                              const WhittleConfig& cfg, Rng& rng);

// Polymorphic handle used by the simulator.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  // True when select() never consumes randomness.
  virtual bool deterministic() const = 0;
  virtual PolicyDecision select(std::span<const Belief> beliefs, const BanditInstance& instance,
                                Rng& rng) const = 0;
};

std::unique_ptr<Policy> make_random_policy();
std::unique_ptr<Policy> make_myopic_policy();
std::unique_ptr<Policy> make_rollout_policy(RolloutConfig cfg);
std::unique_ptr<Policy> make_whittle_policy(WhittleConfig cfg);

}  // namespace rmab
