// Built-in instances, random instance generation, experiment configuration
// and orchestration with CSV result emission.

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "rmab/core.hpp"
#include "rmab/policies.hpp"
#include "rmab/sim.hpp"

namespace rmab {

// ---------------------------------------------------------------------------
// Instances

struct BuiltinInfo {
  std::string name;
  std::string description;
};

const std::vector<BuiltinInfo>& builtin_catalog();

// name: "example1" | "example2" | "example3" (also "1", "2", "3").
BanditInstance builtin_instance(const std::string& name);

struct RandomInstanceSpec {
  std::size_t n_arms = 15;
  std::size_t n_states = 4;
  std::uint64_t seed = 1;
  bool increasing_click_prob = true;
  double discount = 0.95;

  bool operator==(const RandomInstanceSpec&) const = default;
};

// Rows drawn uniformly from the probability simplex; initial beliefs likewise;
// initial hidden states uniform.
BanditInstance generate_instance(const RandomInstanceSpec& spec);

// "n_arms=15,n_states=4,seed=7,increasing=1,beta=0.95"; omitted keys keep
// their defaults.
RandomInstanceSpec parse_random_spec(const std::string& text);

// ---------------------------------------------------------------------------
// Configuration

class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : std::runtime_error(path.empty() ? message : path + ": " + message), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class PolicyKind { Random, Myopic, Rollout, Whittle };

struct PolicySpec {
  PolicyKind kind = PolicyKind::Myopic;
  std::string label;  // empty: the policy's own name
  RolloutConfig rollout;
  WhittleConfig whittle;

  bool operator==(const PolicySpec&) const = default;
};

// "myopic", "random", "mc-rollout:H=5,L=100,base=myopic",
// "whittle:horizon=20,trajectories=50,lo=0,hi=1,tol=0.01,probes=11".
PolicySpec parse_policy_spec(const std::string& text);

std::unique_ptr<Policy> make_policy(const PolicySpec& spec);

struct BuiltinRef {
  std::string name;
  bool operator==(const BuiltinRef&) const = default;
};
struct InstanceFile {
  std::filesystem::path path;
  bool operator==(const InstanceFile&) const = default;
};
using InstanceSource = std::variant<BuiltinRef, RandomInstanceSpec, InstanceFile>;

struct ExperimentConfig {
  InstanceSource instance = BuiltinRef{"example1"};
  std::optional<double> beta;  // overrides the instance discount
  std::vector<PolicySpec> policies;
  std::size_t episodes = 500;
  std::size_t steps = 100;
  std::uint64_t base_seed = 1;
  std::filesystem::path output = "results";
  bool write_traces = false;
  std::size_t trace_episodes = 1;
  bool parallel_policies = false;
  unsigned threads = 1;

  void validate() const;
  bool operator==(const ExperimentConfig&) const = default;
};

// JSON text <-> config. Errors carry the offending field path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const ExperimentConfig& config);

// Instance files use the same JSON dialect; states are 1-based there.
BanditInstance parse_instance(const std::string& json_text);
std::string serialize_instance(const BanditInstance& instance);

BanditInstance resolve_instance(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Orchestration

inline constexpr const char* kResultsFile = "results.csv";
inline constexpr const char* kCurvesFile = "curves.csv";
inline constexpr const char* kTracesPrefix = "traces_";  // + policy name + .csv

// results.csv header; followed by freq_arm_1..freq_arm_N.
inline constexpr const char* kResultsHeaderPrefix =
    "policy,episodes,steps,mean_discounted_return,stderr,ci95_lo,ci95_hi";
inline constexpr const char* kCurvesHeader = "policy,step,mean_cumulative_discounted_reward,ci95_lo,ci95_hi";

struct RunResult {
  BanditInstance instance;
  std::vector<EvalReport> reports;
  std::vector<std::filesystem::path> files;
};

RunResult run_experiment(const ExperimentConfig& config);

void write_results_csv(std::ostream& out, const std::vector<EvalReport>& reports);
void write_curves_csv(std::ostream& out, const std::vector<EvalReport>& reports);
void print_summary(std::ostream& out, const BanditInstance& instance, const std::vector<EvalReport>& reports);

// Writes `content` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace rmab
