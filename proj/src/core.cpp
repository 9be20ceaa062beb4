#include "rmab/core.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>

namespace rmab {

namespace {

std::atomic<std::uint64_t> g_renorm_warnings{0};

void require(bool ok, const std::string& what) {
  if (!ok) throw ContractViolation(what);
}

void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw ContractViolation(os.str());
  }
}

}  // namespace

const char* to_string(Observation obs) {
  switch (obs) {
    case Observation::Like: return "like";
    case Observation::Dislike: return "dislike";
    case Observation::None: return "none";
  }
  return "?";
}

Matrix::Matrix(std::size_t n, double fill) : n_(n), data_(n * n, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) : n_(rows.size()) {
  data_.reserve(n_ * n_);
  for (const auto& r : rows) {
    require(r.size() == n_, "Matrix: rows must have as many entries as there are rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool Matrix::is_row_stochastic() const {
  for (std::size_t i = 0; i < n_; ++i) {
    double sum = 0.0;
    for (double v : row(i)) {
      if (!(v >= 0.0 && v <= 1.0)) return false;
      sum += v;
    }
    if (std::abs(sum - 1.0) > kProbTolerance) return false;
  }
  return true;
}

Belief::Belief(std::vector<double> probs) : probs_(std::move(probs)) {
  require(!probs_.empty(), "Belief: empty probability vector");
  double sum = 0.0;
  for (double p : probs_) {
    require(p >= 0.0 && p <= 1.0, "Belief: entry outside [0, 1]");
    sum += p;
  }
  require(std::abs(sum - 1.0) <= kProbTolerance, "Belief: entries do not sum to 1");
}

Belief Belief::normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (double& w : weights) {
    if (w < 0.0) w = 0.0;
    sum += w;
  }
  require(sum > 0.0 && std::isfinite(sum), "Belief::normalized: no positive mass");
  for (double& w : weights) w /= sum;
  return Belief(std::move(weights));
}

Belief Belief::point_mass(std::size_t n_states, std::size_t state) {
  require(state < n_states, "Belief::point_mass: state out of range");
  std::vector<double> p(n_states, 0.0);
  p[state] = 1.0;
  return Belief(std::move(p));
}

Belief Belief::uniform(std::size_t n_states) {
  require(n_states > 0, "Belief::uniform: zero states");
  return Belief(std::vector<double>(n_states, 1.0 / static_cast<double>(n_states)));
}

void ArmModel::validate() const {
  const std::size_t s = click_prob.size();
  require(s >= 2, "ArmModel: at least two states required");
  require_same_size(p_active.size(), s, "ArmModel p_active");
  require_same_size(p_passive.size(), s, "ArmModel p_passive");
  require(p_active.is_row_stochastic(), "ArmModel: p_active is not row-stochastic");
  require(p_passive.is_row_stochastic(), "ArmModel: p_passive is not row-stochastic");
  for (double c : click_prob) require(c >= 0.0 && c <= 1.0, "ArmModel: click_prob outside [0, 1]");
}

bool ArmModel::click_prob_strictly_increasing() const {
  for (std::size_t i = 1; i < click_prob.size(); ++i)
    if (!(click_prob[i - 1] < click_prob[i])) return false;
  return true;
}

void BanditInstance::validate() const {
  require(!arms.empty(), "BanditInstance: no arms");
  const std::size_t s = n_states();
  for (std::size_t j = 0; j < arms.size(); ++j) {
    try {
      arms[j].validate();
    } catch (const ContractViolation& e) {
      throw ContractViolation("arm " + std::to_string(j + 1) + ": " + e.what());
    }
    require_same_size(arms[j].n_states(), s, "BanditInstance arm state count");
  }
  require_same_size(initial_beliefs.size(), arms.size(), "BanditInstance initial_beliefs");
  require_same_size(initial_states.size(), arms.size(), "BanditInstance initial_states");
  for (const auto& b : initial_beliefs) require_same_size(b.size(), s, "BanditInstance initial belief");
  for (std::size_t x : initial_states) require(x < s, "BanditInstance: initial state out of range");
  require(discount > 0.0 && discount < 1.0, "BanditInstance: discount must lie in (0, 1)");
}

namespace kernels {

double expected_reward(std::span<const double> belief, std::span<const double> click_prob) {
  double r = 0.0;
  for (std::size_t i = 0; i < belief.size(); ++i) r += belief[i] * click_prob[i];
  return r;
}

double play_update(std::span<const double> belief, const Matrix& p_active,
                   std::span<const double> click_prob, bool like, std::span<double> out) {
  const std::size_t s = belief.size();
  std::fill(out.begin(), out.end(), 0.0);
  double obs_prob = 0.0;
  for (std::size_t i = 0; i < s; ++i) {
    const double w = belief[i] * (like ? click_prob[i] : 1.0 - click_prob[i]);
    if (w == 0.0) continue;
    obs_prob += w;
    const auto row = p_active.row(i);
    for (std::size_t l = 0; l < s; ++l) out[l] += w * row[l];
  }
  if (obs_prob <= 0.0) return 0.0;
  const double mass = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= mass;
  return obs_prob;
}

void passive_update(std::span<const double> belief, const Matrix& p_passive, std::span<double> out) {
  const std::size_t s = belief.size();
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t i = 0; i < s; ++i) {
    const double w = belief[i];
    if (w == 0.0) continue;
    const auto row = p_passive.row(i);
    for (std::size_t l = 0; l < s; ++l) out[l] += w * row[l];
  }
  const double mass = std::accumulate(out.begin(), out.end(), 0.0);
  if (std::abs(mass - 1.0) > kProbTolerance) g_renorm_warnings.fetch_add(1, std::memory_order_relaxed);
  for (double& v : out) v /= mass;
}

}  // namespace kernels

double expected_reward(const Belief& belief, const ArmModel& arm) {
  require_same_size(belief.size(), arm.n_states(), "expected_reward");
  return kernels::expected_reward(belief.probs(), arm.click_prob);
}

Belief belief_update_play(const Belief& belief, const ArmModel& arm, Observation obs) {
  require_same_size(belief.size(), arm.n_states(), "belief_update_play");
  require(obs != Observation::None, "belief_update_play: a played arm always yields Like or Dislike");
  std::vector<double> out(belief.size());
  const double z = kernels::play_update(belief.probs(), arm.p_active, arm.click_prob,
                                        obs == Observation::Like, out);
  if (z <= 0.0)
    throw ImpossibleObservation(std::string("observation '") + to_string(obs) +
                                "' has zero probability under the current belief");
  return Belief::normalized(std::move(out));
}

Belief belief_update_passive(const Belief& belief, const ArmModel& arm) {
  require_same_size(belief.size(), arm.n_states(), "belief_update_passive");
  std::vector<double> out(belief.size());
  kernels::passive_update(belief.probs(), arm.p_passive, out);
  return Belief::normalized(std::move(out));
}

std::uint64_t renormalization_warnings() { return g_renorm_warnings.load(std::memory_order_relaxed); }

void reset_renormalization_warnings() { g_renorm_warnings.store(0, std::memory_order_relaxed); }

}  // namespace rmab
