// Parameter sets of the three five-item, four-state recommendation examples.
// Transcription judgments are listed in docs/TRANSCRIPTION_NOTES.md.

#include "rmab/experiments.hpp"

namespace rmab {

namespace {

using Rows = std::vector<std::vector<double>>;

// Played-item transitions shared by examples 1 and 3 (stochastically
// monotone structure).
const std::vector<Matrix>& structured_active() {
  static const std::vector<Matrix> m = {
      {{0.3, 0.7, 0, 0}, {0.2, 0.3, 0.5, 0}, {0, 0.1, 0.4, 0.5}, {0, 0, 0.25, 0.75}},
      {{0.1, 0.9, 0, 0}, {0.3, 0.35, 0.35, 0}, {0, 0.25, 0.25, 0.5}, {0, 0, 0.25, 0.75}},
      {{0.45, 0.55, 0, 0}, {0.3, 0.3, 0.4, 0}, {0, 0.2, 0.35, 0.45}, {0, 0, 0.1, 0.9}},
      {{0.5, 0.5, 0, 0}, {0.1, 0.4, 0.5, 0}, {0, 0.3, 0.3, 0.4}, {0, 0, 0.4, 0.6}},
      {{0.4, 0.6, 0, 0}, {0.25, 0.35, 0.4, 0}, {0, 0.3, 0.35, 0.35}, {0, 0, 0.45, 0.55}},
  };
  return m;
}

const Rows& shared_initial_beliefs() {
  static const Rows b = {
      {0.1, 0.2, 0.3, 0.4},
      {0.3, 0.25, 0.4, 0.05},
      {0.15, 0.1, 0.3, 0.45},
      {0.5, 0.1, 0.1, 0.3},
      {0.25, 0.25, 0.25, 0.25},
  };
  return b;
}

// 1-based as printed.
const std::vector<std::size_t> kInitialStates1Based = {2, 1, 3, 2, 1};

BanditInstance assemble(std::string name, const std::vector<Matrix>& active, const Matrix& passive,
                        const Rows& click) {
  BanditInstance inst;
  inst.name = std::move(name);
  inst.discount = 0.95;
  for (std::size_t j = 0; j < active.size(); ++j)
    inst.arms.push_back(ArmModel{active[j], passive, click[j]});
  for (const auto& b : shared_initial_beliefs()) inst.initial_beliefs.emplace_back(b);
  for (std::size_t x : kInitialStates1Based) inst.initial_states.push_back(x - 1);
  inst.validate();
  return inst;
}

BanditInstance example1() {
  const Matrix passive{{0.45, 0.55, 0, 0}, {0.15, 0.4, 0.45, 0}, {0, 0.2, 0.3, 0.5}, {0, 0, 0.4, 0.6}};
  const Rows click = {
      {0.1, 0.3, 0.6, 0.85},
      {0.25, 0.5, 0.5, 0.7},
      {0.2, 0.6, 0.6, 0.6},
      {0.3, 0.35, 0.55, 0.65},
      {0.25, 0.4, 0.6, 0.95},
  };
  return assemble("example1", structured_active(), passive, click);
}

BanditInstance example2() {
  const std::vector<Matrix> active = {
      {{0.7, 0.3, 0, 0}, {0, 0.7, 0.3, 0}, {0, 0, 0.7, 0.3}, {0, 0.3, 0, 0.7}},
      {{0.9, 0.1, 0, 0}, {0, 0.9, 0.1, 0}, {0, 0, 0.9, 0.1}, {0.45, 0, 0.45, 0.1}},
      {{0.45, 0.55, 0, 0}, {0.3, 0.3, 0.4, 0}, {0, 0.2, 0.35, 0.45}, {0.9, 0, 0, 0.1}},
      {{0.5, 0.5, 0, 0}, {0.1, 0.4, 0.5, 0}, {0, 0.3, 0.3, 0.4}, {0.4, 0, 0.4, 0.2}},
      {{0.4, 0.6, 0, 0}, {0.25, 0.35, 0.4, 0}, {0, 0.3, 0.35, 0.35}, {0, 0.6, 0.25, 0.15}},
  };
  const Matrix passive{{0.5, 0.5, 0, 0}, {0.25, 0.75, 0, 0}, {0.2, 0.8, 0, 0}, {0.05, 0.95, 0, 0}};
  const Rows click = {
      {0.1, 0.1, 0.1, 0.85},
      {0.2, 0.2, 0.2, 0.7},
      {0.3, 0.3, 0.6, 0.6},
      {0.3, 0.35, 0.55, 0.65},
      {0.25, 0.4, 0.5, 0.6},
  };
  return assemble("example2", active, passive, click);
}

BanditInstance example3() {
  const Matrix passive{{0, 1, 0, 0}, {0, 1, 0, 0}, {0, 1, 0, 0}, {0, 1, 0, 0}};
  const Rows click = {
      {0.1, 0.3, 0.6, 0.75},
      {0.25, 0.45, 0.55, 0.75},
      {0.2, 0.6, 0.6, 0.7},
      {0.3, 0.35, 0.55, 0.65},
      {0.3, 0.5, 0.6, 0.95},
  };
  return assemble("example3", structured_active(), passive, click);
}

}  // namespace

const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> catalog = {
      {"example1", "5 items, 4 states; monotone played dynamics, common passive drift"},
      {"example2", "5 items, 4 states; unstructured played dynamics, passive drift toward low interest"},
      {"example3", "5 items, 4 states; example-1 played dynamics, passive reset to state 2"},
  };
  return catalog;
}

BanditInstance builtin_instance(const std::string& name) {
  if (name == "example1" || name == "1") return example1();
  if (name == "example2" || name == "2") return example2();
  if (name == "example3" || name == "3") return example3();
  throw ContractViolation("unknown built-in instance '" + name + "' (expected example1, example2 or example3)");
}

}  // namespace rmab
