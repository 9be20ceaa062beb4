// Monte Carlo Whittle index by bisection on the passivity subsidy W.
//
// For a candidate W, both branches of the decoupled single-arm problem are
// simulated for eval_horizon steps: the first step is forced (play or rest),
// later steps play iff the belief's expected reward is at least W. One
// uniform is drawn per step in both branches so the branches and all W
// candidates share random numbers.

#include <cmath>
#include <sstream>
#include <vector>

#include "rmab/policies.hpp"

namespace rmab {

void WhittleConfig::validate() const {
  if (!(subsidy_lo < subsidy_hi)) throw ContractViolation("WhittleConfig: subsidy_lo must be < subsidy_hi");
  if (!(tolerance > 0.0)) throw ContractViolation("WhittleConfig: tolerance must be > 0");
  if (eval_horizon < 1) throw ContractViolation("WhittleConfig: eval_horizon must be >= 1");
  if (eval_trajectories < 1) throw ContractViolation("WhittleConfig: eval_trajectories must be >= 1");
  if (probe_points < 2) throw ContractViolation("WhittleConfig: probe_points must be >= 2");
}

namespace {

// Passive steps are applied lazily: the evaluator keeps the last materialized
// belief and the number of pending passive steps k, reading rewards off
// p_passive^k * click_prob.
class SingleArmEvaluator {
 public:
  SingleArmEvaluator(const Belief& belief, const ArmModel& arm, double discount, const WhittleConfig& cfg,
                     std::uint64_t seed)
      : belief_(belief), arm_(arm), discount_(discount), cfg_(cfg),
        horizon_(static_cast<std::size_t>(cfg.eval_horizon)),
        uniforms_(horizon_ * static_cast<std::size_t>(cfg.eval_trajectories)), current_(belief.size()),
        next_(belief.size()), reward_vectors_((horizon_ + 1) * belief.size()) {
    if (belief.size() != arm.n_states()) throw ContractViolation("whittle_index: belief dimension mismatch");
    Rng rng(seed);
    for (double& u : uniforms_) u = uniform01(rng);
    const std::size_t s = belief.size();
    std::copy(arm.click_prob.begin(), arm.click_prob.end(), reward_vectors_.begin());
    for (std::size_t k = 1; k <= horizon_; ++k)
      for (std::size_t i = 0; i < s; ++i) {
        double acc = 0.0;
        for (std::size_t l = 0; l < s; ++l) acc += arm.p_passive(i, l) * reward_vectors_[(k - 1) * s + l];
        reward_vectors_[k * s + i] = acc;
      }
  }

  double gap(double subsidy) {
    double total = 0.0;
    for (std::size_t l = 0; l < static_cast<std::size_t>(cfg_.eval_trajectories); ++l) {
      std::span<const double> u(uniforms_.data() + l * horizon_, horizon_);
      total += branch_value(true, subsidy, u) - branch_value(false, subsidy, u);
    }
    return total / static_cast<double>(cfg_.eval_trajectories);
  }

 private:
  double branch_value(bool play_first, double subsidy, std::span<const double> u) {
    const std::size_t s = current_.size();
    std::copy(belief_.begin(), belief_.end(), current_.begin());
    std::size_t age = 0;
    double value = 0.0, weight = 1.0;
    for (std::size_t h = 0; h < u.size(); ++h) {
      const double r = kernels::expected_reward(current_, std::span<const double>(reward_vectors_).subspan(age * s, s));
      const bool play = h == 0 ? play_first : r >= subsidy;
      if (play) {
        value += weight * r;
        if (h + 1 < u.size()) {
          for (; age > 0; --age) {
            kernels::passive_update(current_, arm_.p_passive, next_);
            current_.swap(next_);
          }
          if (kernels::play_update(current_, arm_.p_active, arm_.click_prob, u[h] < r, next_) <= 0.0)
            throw ImpossibleObservation("whittle rollout sampled an observation with zero probability");
          current_.swap(next_);
        }
      } else {
        value += weight * subsidy;
        ++age;
      }
      weight *= discount_;
    }
    return value;
  }

  const Belief& belief_;
  const ArmModel& arm_;
  double discount_;
  const WhittleConfig& cfg_;
  std::size_t horizon_;
  std::vector<double> uniforms_, current_, next_, reward_vectors_;
};

}  // namespace

double subsidy_value_gap(const Belief& belief, const ArmModel& arm, double discount, double subsidy,
                         const WhittleConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  return SingleArmEvaluator(belief, arm, discount, cfg, seed).gap(subsidy);
}

IndexEstimate whittle_index(const Belief& belief, const ArmModel& arm, double discount, const WhittleConfig& cfg,
                            Rng& rng) {
  cfg.validate();
  SingleArmEvaluator eval(belief, arm, discount, cfg, rng());

  const auto points = static_cast<std::size_t>(cfg.probe_points);
  const double step = (cfg.subsidy_hi - cfg.subsidy_lo) / static_cast<double>(points - 1);
  std::vector<double> grid(points), gaps(points);
  for (std::size_t k = 0; k < points; ++k) {
    grid[k] = k + 1 == points ? cfg.subsidy_hi : cfg.subsidy_lo + step * static_cast<double>(k);
    gaps[k] = eval.gap(grid[k]);
  }

  IndexEstimate out;
  for (std::size_t k = 0; k + 1 < points; ++k)
    if (gaps[k + 1] > gaps[k] + 1e-12) out.non_monotone = true;

  if (gaps.front() < 0.0) {
    std::ostringstream os;
    os << "passivity preferred at subsidy_lo=" << cfg.subsidy_lo << " (gap " << gaps.front() << ")";
    throw NoCrossingInBracket(NoCrossingInBracket::Side::Below, os.str());
  }
  if (gaps.back() > 0.0) {
    std::ostringstream os;
    os << "play preferred at subsidy_hi=" << cfg.subsidy_hi << " (gap " << gaps.back() << ")";
    throw NoCrossingInBracket(NoCrossingInBracket::Side::Above, os.str());
  }

  // First probe cell where the play preference flips.
  std::size_t k = 0;
  while (k + 1 < points && gaps[k + 1] >= 0.0) ++k;
  if (k + 1 == points) {
    out.index = grid.back();
    return out;
  }
  double lo = grid[k], hi = grid[k + 1];
  while (hi - lo >= cfg.tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (eval.gap(mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  out.index = 0.5 * (lo + hi);
  return out;
}

PolicyDecision whittle_select(std::span<const Belief> beliefs, const BanditInstance& instance,
                              const WhittleConfig& cfg, Rng& rng) {
  if (beliefs.size() != instance.n_arms()) throw ContractViolation("whittle_select: one belief per arm required");
  const std::uint64_t decision_seed = rng();
  PolicyDecision d;
  d.scores.resize(beliefs.size());
  for (std::size_t j = 0; j < beliefs.size(); ++j) {
    Rng arm_rng = make_substream(decision_seed, 0);
    try {
      const IndexEstimate est = whittle_index(beliefs[j], instance.arms[j], instance.discount, cfg, arm_rng);
      d.scores[j] = est.index;
      if (est.non_monotone) ++d.non_monotone_arms;
    } catch (const NoCrossingInBracket& e) {
      d.scores[j] = e.side() == NoCrossingInBracket::Side::Below ? cfg.subsidy_lo : cfg.subsidy_hi;
    }
  }
  d.arm = argmax_lowest(d.scores);
  return d;
}

}  // namespace rmab
