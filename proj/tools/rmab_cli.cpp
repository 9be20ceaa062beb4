// rmab: run policy comparisons on hidden-Markov restless bandit instances.
//
//   rmab run --example 2 --policy myopic --policy mc-rollout:H=5,L=100
//   rmab run --random n_arms=15,seed=3 --policy myopic --policy mc-rollout
//   rmab run --config experiment.json [overrides...]
//   rmab validate experiment.json
//   rmab list-examples
//
// Exit codes: 0 success, 2 configuration error, 3 runtime error.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "rmab/experiments.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::string default_output_dir() {
  if (const char* env = std::getenv("RMAB_OUT_DIR"); env && *env) return env;
  return "results";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Policy laboratory for hidden-Markov restless multi-armed bandits"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Evaluate policies on an instance and write CSV results");
  std::string example, random_spec, config_path, output;
  std::vector<std::string> policy_texts;
  std::optional<std::size_t> episodes, steps;
  std::optional<double> beta;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  bool traces = false, parallel = false;
  auto* src_example = run->add_option("--example", example, "Built-in instance: 1, 2 or 3");
  auto* src_random = run->add_option("--random", random_spec, "Random instance, e.g. n_arms=15,n_states=4,seed=7");
  auto* src_config = run->add_option("--config", config_path, "Experiment config file (JSON)")->check(CLI::ExistingFile);
  src_example->excludes(src_random);
  src_random->excludes(src_config);
  src_config->excludes(src_example);
  run->add_option("--policy", policy_texts,
                  "Repeatable: myopic | random | mc-rollout:H=5,L=100,base=myopic | whittle:horizon=20,trajectories=50");
  run->add_option("--episodes", episodes, "Episodes per policy (default 500)");
  run->add_option("--steps", steps, "Steps per episode (default 100)");
  run->add_option("--beta", beta, "Discount factor override");
  run->add_option("--seed", seed, "Base seed; episode k uses seed + k");
  run->add_option("--out", output, "Output directory (default $RMAB_OUT_DIR or ./results)");
  run->add_option("--threads", threads, "Episode worker threads (0 = all cores)");
  run->add_flag("--traces", traces, "Also write per-step trace CSVs for the first episode");
  run->add_flag("--parallel-policies", parallel, "Evaluate policies concurrently");

  auto* validate = app.add_subcommand("validate", "Parse and validate a config file");
  std::string validate_path;
  validate->add_option("config", validate_path, "Config file")->required();

  auto* list = app.add_subcommand("list-examples", "List built-in instances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (list->parsed()) {
      for (const auto& info : rmab::builtin_catalog()) {
        const auto inst = rmab::builtin_instance(info.name);
        std::cout << info.name << "  N=" << inst.n_arms() << " S=" << inst.n_states() << " beta=" << inst.discount
                  << "  " << info.description << '\n';
      }
      return 0;
    }

    if (validate->parsed()) {
      const auto cfg = rmab::load_config(validate_path);
      const auto inst = rmab::resolve_instance(cfg);
      std::cout << validate_path << ": ok (instance " << inst.name << ", " << cfg.policies.size() << " policies)\n";
      return 0;
    }

    rmab::ExperimentConfig cfg;
    if (!config_path.empty()) {
      cfg = rmab::load_config(config_path);
    } else {
      cfg.output = default_output_dir();
      if (!random_spec.empty())
        cfg.instance = rmab::parse_random_spec(random_spec);
      else if (!example.empty())
        cfg.instance = rmab::BuiltinRef{example.size() == 1 ? "example" + example : example};
      else
        throw rmab::ConfigError("instance", "one of --example, --random or --config is required");
    }
    if (!policy_texts.empty()) {
      cfg.policies.clear();
      for (const auto& t : policy_texts) cfg.policies.push_back(rmab::parse_policy_spec(t));
    }
    if (cfg.policies.empty()) {
      cfg.policies.push_back(rmab::parse_policy_spec("myopic"));
      cfg.policies.push_back(rmab::parse_policy_spec("mc-rollout"));
    }
    if (episodes) cfg.episodes = *episodes;
    if (steps) cfg.steps = *steps;
    if (beta) cfg.beta = *beta;
    if (seed) cfg.base_seed = *seed;
    if (threads) cfg.threads = *threads;
    if (!output.empty()) cfg.output = output;
    if (traces) cfg.write_traces = true;
    if (parallel) cfg.parallel_policies = true;
    cfg.validate();

    const auto result = rmab::run_experiment(cfg);
    rmab::print_summary(std::cout, result.instance, result.reports);
    for (const auto& f : result.files) std::cout << "wrote " << f.string() << '\n';
    return 0;
  } catch (const rmab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const rmab::ContractViolation& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
