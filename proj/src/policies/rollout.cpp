#include <cmath>
#include <vector>

#include "rmab/policies.hpp"

namespace rmab {

void RolloutConfig::validate() const {
  if (horizon < 1) throw ContractViolation("RolloutConfig: horizon must be >= 1");
  if (trajectories < 1) throw ContractViolation("RolloutConfig: trajectories must be >= 1");
  if (discount_override && !(*discount_override >= 0.0 && *discount_override < 1.0))
    throw ContractViolation("RolloutConfig: discount override must lie in [0, 1)");
}

namespace {

// All arms' beliefs for belief-space simulation. Passive drift is applied
// lazily: an arm not played for k steps keeps its last materialized belief
// and an age k, and its expected reward is read off the precomputed vector
// p_passive^k * click_prob. The belief is materialized only when played.
class BeliefBank {
 public:
  BeliefBank(std::span<const Belief> beliefs, const BanditInstance& instance, std::size_t max_age)
      : instance_(instance), n_(beliefs.size()), s_(instance.n_states()), max_age_(max_age), probs_(n_ * s_),
        scratch_(s_), ages_(n_, 0), rewards_(n_), reward_vectors_(n_ * (max_age + 1) * s_) {
    if (n_ != instance.n_arms()) throw ContractViolation("rollout: one belief per arm required");
    for (std::size_t j = 0; j < n_; ++j) {
      if (beliefs[j].size() != s_) throw ContractViolation("rollout: belief dimension mismatch");
      std::copy(beliefs[j].begin(), beliefs[j].end(), probs_.begin() + static_cast<std::ptrdiff_t>(j * s_));
      // v_0 = rho, v_k = P0 v_{k-1}
      const ArmModel& arm = instance.arms[j];
      std::copy(arm.click_prob.begin(), arm.click_prob.end(), reward_vector(j, 0).begin());
      for (std::size_t k = 1; k <= max_age_; ++k) {
        auto prev = reward_vector(j, k - 1);
        auto cur = reward_vector(j, k);
        for (std::size_t i = 0; i < s_; ++i) {
          double acc = 0.0;
          for (std::size_t l = 0; l < s_; ++l) acc += arm.p_passive(i, l) * prev[l];
          cur[i] = acc;
        }
      }
    }
    initial_ = probs_;
    refresh_rewards();
  }

  void reset() {
    probs_ = initial_;
    std::fill(ages_.begin(), ages_.end(), 0);
    refresh_rewards();
  }

  std::size_t n_arms() const { return n_; }
  double reward(std::size_t j) const { return rewards_[j]; }
  std::span<const double> rewards() const { return rewards_; }

  // Plays arm `a`, branching its belief on Like iff u < reward(a); every other
  // arm drifts passively.
  void advance(std::size_t a, double u) {
    const ArmModel& played = instance_.arms[a];
    auto row = belief(a);
    materialize(a);
    const bool like = u < rewards_[a];
    if (kernels::play_update(row, played.p_active, played.click_prob, like, scratch_) <= 0.0)
      throw ImpossibleObservation("rollout sampled an observation with zero probability");
    std::copy(scratch_.begin(), scratch_.end(), row.begin());
    rewards_[a] = kernels::expected_reward(row, played.click_prob);
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == a) continue;
      if (ages_[j] == max_age_) materialize(j);
      ++ages_[j];
      rewards_[j] = kernels::expected_reward(belief(j), reward_vector(j, ages_[j]));
    }
  }

 private:
  std::span<double> belief(std::size_t j) { return std::span<double>(probs_).subspan(j * s_, s_); }
  std::span<double> reward_vector(std::size_t j, std::size_t k) {
    return std::span<double>(reward_vectors_).subspan((j * (max_age_ + 1) + k) * s_, s_);
  }

  void materialize(std::size_t j) {
    auto row = belief(j);
    for (; ages_[j] > 0; --ages_[j]) {
      kernels::passive_update(row, instance_.arms[j].p_passive, scratch_);
      std::copy(scratch_.begin(), scratch_.end(), row.begin());
    }
  }

  void refresh_rewards() {
    for (std::size_t j = 0; j < n_; ++j)
      rewards_[j] = kernels::expected_reward(belief(j), instance_.arms[j].click_prob);
  }

  const BanditInstance& instance_;
  std::size_t n_, s_, max_age_;
  std::vector<double> probs_, initial_, scratch_;
  std::vector<std::size_t> ages_;
  std::vector<double> rewards_, reward_vectors_;
};

std::size_t base_action(const BeliefBank& bank, BasePolicy base, Rng& rng) {
  if (base == BasePolicy::UniformRandom)
    return std::uniform_int_distribution<std::size_t>(0, bank.n_arms() - 1)(rng);
  return argmax_lowest(bank.rewards());
}

// Discounted sum over `steps` steps from the bank's current state. The first
// action is forced when `first` names an arm.
double simulate(BeliefBank& bank, std::optional<std::size_t> first, int steps, double discount, BasePolicy base,
                Rng& rng) {
  double total = 0.0;
  double weight = 1.0;
  for (int h = 0; h < steps; ++h) {
    const std::size_t a = (h == 0 && first) ? *first : base_action(bank, base, rng);
    total += weight * bank.reward(a);
    weight *= discount;
    if (h + 1 < steps) bank.advance(a, uniform01(rng));
  }
  return total;
}

}  // namespace

double rollout_trajectory(std::span<const Belief> beliefs, std::size_t first_action, const BanditInstance& instance,
                          const RolloutConfig& cfg, Rng& rng) {
  cfg.validate();
  if (first_action >= instance.n_arms()) throw ContractViolation("rollout_trajectory: first_action out of range");
  BeliefBank bank(beliefs, instance, static_cast<std::size_t>(cfg.horizon));
  const double beta = cfg.discount_override.value_or(instance.discount);
  return simulate(bank, first_action, cfg.horizon, beta, cfg.base, rng);
}

PolicyDecision mc_rollout_select(std::span<const Belief> beliefs, const BanditInstance& instance,
                                 const RolloutConfig& cfg, Rng& rng) {
  cfg.validate();
  BeliefBank bank(beliefs, instance, static_cast<std::size_t>(cfg.horizon) + 1);
  const std::size_t n = bank.n_arms();
  const double beta = cfg.discount_override.value_or(instance.discount);
  const std::uint64_t decision_seed = rng();

  RolloutEstimate est;
  est.q_values.resize(n);
  est.q_tilde.resize(n);
  est.std_error.resize(n);

  const auto trajectories = static_cast<double>(cfg.trajectories);
  for (std::size_t j = 0; j < n; ++j) {
    Rng arm_rng = make_substream(decision_seed, cfg.common_random_numbers ? 0 : j + 1);
    bank.reset();
    const double immediate = bank.reward(j);
    double sum = 0.0, sum_sq = 0.0;
    for (int l = 0; l < cfg.trajectories; ++l) {
      bank.reset();
      bank.advance(j, uniform01(arm_rng));
      const double q = simulate(bank, std::nullopt, cfg.horizon, beta, cfg.base, arm_rng);
      sum += q;
      sum_sq += q * q;
    }
    const double mean = sum / trajectories;
    double se = 0.0;
    if (cfg.trajectories > 1) {
      const double var = std::max(0.0, (sum_sq - trajectories * mean * mean) / (trajectories - 1.0));
      se = std::sqrt(var / trajectories);
    }
    est.q_tilde[j] = mean;
    est.std_error[j] = se;
    est.q_values[j] = immediate + beta * mean;
  }

  PolicyDecision d;
  d.scores = est.q_values;
  d.arm = argmax_lowest(d.scores);
  d.diagnostics = std::move(est);
  return d;
}

}  // namespace rmab
