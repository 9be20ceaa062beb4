// Domain types and exact belief calculus for hidden-Markov restless bandits.
//
// States are stored 0-based in the order (L, M, H, V) when S = 4. All
// user-facing I/O converts to 1-based indices.

#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmab {

inline constexpr double kProbTolerance = 1e-9;

class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The observation has zero probability under the current belief.
class ImpossibleObservation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class Observation : std::uint8_t { None = 0, Like = 1, Dislike = 2 };

const char* to_string(Observation obs);

// Dense square matrix, row-major.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * n_, n_}; }
  std::span<const double> data() const { return data_; }

  bool operator==(const Matrix&) const = default;

  // Rows are probability vectors within kProbTolerance.
  bool is_row_stochastic() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Probability vector over the hidden interest states of one arm.
class Belief {
 public:
  Belief() = default;
  // Throws ContractViolation unless entries lie in [0,1] and sum to 1.
  explicit Belief(std::vector<double> probs);
  Belief(std::initializer_list<double> probs) : Belief(std::vector<double>(probs)) {}

  // Clamps tiny negatives and rescales to unit mass.
  static Belief normalized(std::vector<double> weights);
  static Belief point_mass(std::size_t n_states, std::size_t state);
  static Belief uniform(std::size_t n_states);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  auto begin() const { return probs_.begin(); }
  auto end() const { return probs_.end(); }

  bool operator==(const Belief&) const = default;

 private:
  std::vector<double> probs_;
};

struct ArmModel {
  Matrix p_active;
  Matrix p_passive;
  std::vector<double> click_prob;

  std::size_t n_states() const { return click_prob.size(); }

  // Throws ContractViolation on shape or stochasticity errors.
  void validate() const;
  // Diagnostic only: rho_L < rho_M < rho_H < rho_V fails on ties.
  bool click_prob_strictly_increasing() const;

  bool operator==(const ArmModel&) const = default;
};

struct BanditInstance {
  std::string name;
  std::vector<ArmModel> arms;
  std::vector<Belief> initial_beliefs;
  std::vector<std::size_t> initial_states;  // 0-based
  double discount = 0.95;

  std::size_t n_arms() const { return arms.size(); }
  std::size_t n_states() const { return arms.empty() ? 0 : arms.front().n_states(); }

  void validate() const;

  bool operator==(const BanditInstance&) const = default;
};

// Sum_i belief(i) * click_prob(i).
double expected_reward(const Belief& belief, const ArmModel& arm);

// Posterior after playing the arm and seeing Like or Dislike. The observation
// is emitted from the pre-transition state; the state then moves by p_active.
Belief belief_update_play(const Belief& belief, const ArmModel& arm, Observation obs);

// Prior drift of an arm that was not played: belief * p_passive.
Belief belief_update_passive(const Belief& belief, const ArmModel& arm);

// Number of passive updates whose pre-normalization mass drifted beyond
// kProbTolerance. Process-wide.
std::uint64_t renormalization_warnings();
void reset_renormalization_warnings();

// Allocation-free kernels over raw probability spans. `out` must not alias
// `belief`. These back the public operations and the rollout inner loops.
namespace kernels {

double expected_reward(std::span<const double> belief, std::span<const double> click_prob);

// Writes the normalized posterior into `out` and returns the normalizer,
// P(obs | belief). Leaves `out` unspecified when the normalizer is zero.
double play_update(std::span<const double> belief, const Matrix& p_active,
                   std::span<const double> click_prob, bool like, std::span<double> out);

void passive_update(std::span<const double> belief, const Matrix& p_passive, std::span<double> out);

}  // namespace kernels

}  // namespace rmab
