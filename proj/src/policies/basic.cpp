#include <sstream>

#include "rmab/policies.hpp"

namespace rmab {

const char* to_string(BasePolicy base) {
  return base == BasePolicy::Myopic ? "myopic" : "random";
}

std::size_t argmax_lowest(std::span<const double> scores) {
  if (scores.empty()) throw ContractViolation("argmax_lowest: empty score vector");
  std::size_t best = 0;
  for (std::size_t j = 1; j < scores.size(); ++j)
    if (scores[j] > scores[best]) best = j;
  return best;
}

PolicyDecision random_select(std::size_t n_arms, Rng& rng) {
  if (n_arms == 0) throw ContractViolation("random_select: no arms");
  PolicyDecision d;
  d.scores.assign(n_arms, 1.0 / static_cast<double>(n_arms));
  d.arm = std::uniform_int_distribution<std::size_t>(0, n_arms - 1)(rng);
  return d;
}

PolicyDecision myopic_select(std::span<const Belief> beliefs, const BanditInstance& instance) {
  if (beliefs.size() != instance.n_arms())
    throw ContractViolation("myopic_select: one belief per arm required");
  PolicyDecision d;
  d.scores.reserve(beliefs.size());
  for (std::size_t j = 0; j < beliefs.size(); ++j)
    d.scores.push_back(expected_reward(beliefs[j], instance.arms[j]));
  d.arm = argmax_lowest(d.scores);
  return d;
}

namespace {

class RandomPolicy final : public Policy {
 public:
  std::string name() const override { return "random"; }
  bool deterministic() const override { return false; }
  PolicyDecision select(std::span<const Belief> beliefs, const BanditInstance&, Rng& rng) const override {
    return random_select(beliefs.size(), rng);
  }
};

class MyopicPolicy final : public Policy {
 public:
  std::string name() const override { return "myopic"; }
  bool deterministic() const override { return true; }
  PolicyDecision select(std::span<const Belief> beliefs, const BanditInstance& instance, Rng&) const override {
    return myopic_select(beliefs, instance);
  }
};

class RolloutPolicy final : public Policy {
 public:
  explicit RolloutPolicy(RolloutConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }
  std::string name() const override {
    std::ostringstream os;
    os << "mc-rollout[H=" << cfg_.horizon << " L=" << cfg_.trajectories << " base=" << to_string(cfg_.base)
       << "]";
    return os.str();
  }
  bool deterministic() const override { return false; }
  PolicyDecision select(std::span<const Belief> beliefs, const BanditInstance& instance, Rng& rng) const override {
    return mc_rollout_select(beliefs, instance, cfg_, rng);
  }

 private:
  RolloutConfig cfg_;
};

class WhittlePolicy final : public Policy {
 public:
  explicit WhittlePolicy(WhittleConfig cfg) : cfg_(cfg) { cfg_.validate(); }
  std::string name() const override { return "whittle"; }
  bool deterministic() const override { return false; }
  PolicyDecision select(std::span<const Belief> beliefs, const BanditInstance& instance, Rng& rng) const override {
    return whittle_select(beliefs, instance, cfg_, rng);
  }

 private:
  WhittleConfig cfg_;
};

}  // namespace

std::unique_ptr<Policy> make_random_policy() { return std::make_unique<RandomPolicy>(); }
std::unique_ptr<Policy> make_myopic_policy() { return std::make_unique<MyopicPolicy>(); }
std::unique_ptr<Policy> make_rollout_policy(RolloutConfig cfg) { return std::make_unique<RolloutPolicy>(std::move(cfg)); }
std::unique_ptr<Policy> make_whittle_policy(WhittleConfig cfg) { return std::make_unique<WhittlePolicy>(cfg); }

}  // namespace rmab
