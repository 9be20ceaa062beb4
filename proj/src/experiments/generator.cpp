#include <algorithm>
#include <random>

#include "rmab/experiments.hpp"

namespace rmab {

namespace {

// Flat Dirichlet draw via normalized unit exponentials.
std::vector<double> simplex_point(std::size_t n, Rng& rng) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(n);
  double sum = 0.0;
  for (double& v : w) sum += (v = expo(rng));
  for (double& v : w) v /= sum;
  return w;
}

Matrix random_stochastic(std::size_t n, Rng& rng) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = simplex_point(n, rng);
    for (std::size_t j = 0; j < n; ++j) m(i, j) = row[j];
  }
  return m;
}

}  // namespace

BanditInstance generate_instance(const RandomInstanceSpec& spec) {
  if (spec.n_arms < 1) throw ContractViolation("generate_instance: n_arms must be >= 1");
  if (spec.n_states < 2) throw ContractViolation("generate_instance: n_states must be >= 2");
  Rng rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  BanditInstance inst;
  inst.name = "random-n" + std::to_string(spec.n_arms) + "-s" + std::to_string(spec.n_states) + "-seed" +
              std::to_string(spec.seed);
  inst.discount = spec.discount;
  const Matrix passive = random_stochastic(spec.n_states, rng);
  for (std::size_t j = 0; j < spec.n_arms; ++j) {
    ArmModel arm;
    arm.p_active = random_stochastic(spec.n_states, rng);
    arm.p_passive = passive;
    arm.click_prob.resize(spec.n_states);
    for (double& c : arm.click_prob) c = unit(rng);
    if (spec.increasing_click_prob) std::sort(arm.click_prob.begin(), arm.click_prob.end());
    inst.arms.push_back(std::move(arm));
  }
  std::uniform_int_distribution<std::size_t> state(0, spec.n_states - 1);
  for (std::size_t j = 0; j < spec.n_arms; ++j) {
    inst.initial_beliefs.push_back(Belief::normalized(simplex_point(spec.n_states, rng)));
    inst.initial_states.push_back(state(rng));
  }
  inst.validate();
  return inst;
}

}  // namespace rmab
