#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "rmab/experiments.hpp"

namespace rmab {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string index_path(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void reject_unknown_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!keys.contains(key)) throw ConfigError(join(path, key), "unknown field");
}

const json& require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  return j;
}

template <typename T>
T read(const json& j, const std::string& path) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError(path, "wrong type (found " + std::string(j.type_name()) + ")");
  }
}

template <typename T>
T read_field(const json& obj, const std::string& path, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  return read<T>(obj.at(key), join(path, key));
}

std::size_t read_count(const json& obj, const std::string& path, const char* key, std::size_t fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError(join(path, key), "expected a non-negative integer");
  return v.get<std::size_t>();
}

int read_positive_int(const json& obj, const std::string& path, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigError(join(path, key), "expected a positive integer");
  return v.get<int>();
}

BasePolicy parse_base(const std::string& text, const std::string& path) {
  if (text == "myopic") return BasePolicy::Myopic;
  if (text == "random" || text == "uniform") return BasePolicy::UniformRandom;
  throw ConfigError(path, "unknown base policy '" + text + "' (expected myopic or random)");
}

PolicyKind parse_kind(const std::string& text, const std::string& path) {
  if (text == "myopic") return PolicyKind::Myopic;
  if (text == "random") return PolicyKind::Random;
  if (text == "mc-rollout" || text == "rollout") return PolicyKind::Rollout;
  if (text == "whittle") return PolicyKind::Whittle;
  throw ConfigError(path, "unknown policy type '" + text + "' (expected myopic, random, mc-rollout or whittle)");
}

const char* kind_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::Myopic: return "myopic";
    case PolicyKind::Random: return "random";
    case PolicyKind::Rollout: return "mc-rollout";
    case PolicyKind::Whittle: return "whittle";
  }
  return "?";
}

void check_policy(const PolicySpec& spec, const std::string& path) {
  try {
    if (spec.kind == PolicyKind::Rollout) spec.rollout.validate();
    if (spec.kind == PolicyKind::Whittle) spec.whittle.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(path, e.what());
  }
}

PolicySpec policy_from_json(const json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return parse_policy_spec(j.get<std::string>());
    } catch (const ConfigError& e) {
      throw ConfigError(path, e.what());
    }
  }
  require_object(j, path);
  if (!j.contains("type")) throw ConfigError(join(path, "type"), "missing required field");
  PolicySpec spec;
  spec.kind = parse_kind(read<std::string>(j.at("type"), join(path, "type")), join(path, "type"));
  spec.label = read_field<std::string>(j, path, "label", "");
  switch (spec.kind) {
    case PolicyKind::Myopic:
    case PolicyKind::Random:
      reject_unknown_keys(j, path, {"type", "label"});
      break;
    case PolicyKind::Rollout: {
      reject_unknown_keys(j, path, {"type", "label", "horizon", "trajectories", "base", "common_random_numbers",
                                    "discount_override"});
      auto& r = spec.rollout;
      r.horizon = read_positive_int(j, path, "horizon", r.horizon);
      r.trajectories = read_positive_int(j, path, "trajectories", r.trajectories);
      if (j.contains("base")) r.base = parse_base(read<std::string>(j.at("base"), join(path, "base")), join(path, "base"));
      r.common_random_numbers = read_field<bool>(j, path, "common_random_numbers", r.common_random_numbers);
      if (j.contains("discount_override"))
        r.discount_override = read<double>(j.at("discount_override"), join(path, "discount_override"));
      break;
    }
    case PolicyKind::Whittle: {
      reject_unknown_keys(j, path, {"type", "label", "subsidy_lo", "subsidy_hi", "tolerance", "eval_horizon",
                                    "eval_trajectories", "probe_points"});
      auto& w = spec.whittle;
      w.subsidy_lo = read_field<double>(j, path, "subsidy_lo", w.subsidy_lo);
      w.subsidy_hi = read_field<double>(j, path, "subsidy_hi", w.subsidy_hi);
      w.tolerance = read_field<double>(j, path, "tolerance", w.tolerance);
      w.eval_horizon = read_positive_int(j, path, "eval_horizon", w.eval_horizon);
      w.eval_trajectories = read_positive_int(j, path, "eval_trajectories", w.eval_trajectories);
      w.probe_points = read_positive_int(j, path, "probe_points", w.probe_points);
      break;
    }
  }
  check_policy(spec, path);
  return spec;
}

json policy_to_json(const PolicySpec& spec) {
  json j;
  j["type"] = kind_name(spec.kind);
  if (!spec.label.empty()) j["label"] = spec.label;
  if (spec.kind == PolicyKind::Rollout) {
    const auto& r = spec.rollout;
    j["horizon"] = r.horizon;
    j["trajectories"] = r.trajectories;
    j["base"] = to_string(r.base);
    j["common_random_numbers"] = r.common_random_numbers;
    if (r.discount_override) j["discount_override"] = *r.discount_override;
  } else if (spec.kind == PolicyKind::Whittle) {
    const auto& w = spec.whittle;
    j["subsidy_lo"] = w.subsidy_lo;
    j["subsidy_hi"] = w.subsidy_hi;
    j["tolerance"] = w.tolerance;
    j["eval_horizon"] = w.eval_horizon;
    j["eval_trajectories"] = w.eval_trajectories;
    j["probe_points"] = w.probe_points;
  }
  return j;
}

RandomInstanceSpec random_spec_from_json(const json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown_keys(j, path, {"n_arms", "n_states", "seed", "increasing_click_prob", "discount"});
  RandomInstanceSpec s;
  s.n_arms = read_count(j, path, "n_arms", s.n_arms);
  s.n_states = read_count(j, path, "n_states", s.n_states);
  s.seed = read_field<std::uint64_t>(j, path, "seed", s.seed);
  s.increasing_click_prob = read_field<bool>(j, path, "increasing_click_prob", s.increasing_click_prob);
  s.discount = read_field<double>(j, path, "discount", s.discount);
  if (s.n_arms < 1) throw ConfigError(join(path, "n_arms"), "must be >= 1");
  if (s.n_states < 2) throw ConfigError(join(path, "n_states"), "must be >= 2");
  if (!(s.discount > 0.0 && s.discount < 1.0)) throw ConfigError(join(path, "discount"), "must lie in (0, 1)");
  return s;
}

json random_spec_to_json(const RandomInstanceSpec& s) {
  return {{"n_arms", s.n_arms},
          {"n_states", s.n_states},
          {"seed", s.seed},
          {"increasing_click_prob", s.increasing_click_prob},
          {"discount", s.discount}};
}

Matrix matrix_from_json(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a non-empty array of rows");
  Matrix m(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto row = read<std::vector<double>>(j[i], index_path(path, i));
    if (row.size() != j.size()) throw ConfigError(index_path(path, i), "row length differs from row count");
    for (std::size_t k = 0; k < row.size(); ++k) m(i, k) = row[k];
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto r = m.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

}  // namespace

PolicySpec parse_policy_spec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  PolicySpec spec;
  spec.kind = parse_kind(head, "policy");
  if (colon == std::string::npos) {
    check_policy(spec, "policy");
    return spec;
  }
  std::stringstream params(text.substr(colon + 1));
  for (std::string item; std::getline(params, item, ',');) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("policy", "expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    const std::string path = "policy." + key;
    auto to_int = [&] {
      try {
        std::size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        throw ConfigError(path, "expected an integer, got '" + value + "'");
      }
    };
    auto to_double = [&] {
      try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
      } catch (const std::exception&) {
        throw ConfigError(path, "expected a number, got '" + value + "'");
      }
    };
    if (key == "label") {
      spec.label = value;
    } else if (spec.kind == PolicyKind::Rollout) {
      if (key == "H" || key == "horizon") spec.rollout.horizon = to_int();
      else if (key == "L" || key == "trajectories") spec.rollout.trajectories = to_int();
      else if (key == "base") spec.rollout.base = parse_base(value, path);
      else if (key == "crn") spec.rollout.common_random_numbers = value == "1" || value == "true";
      else if (key == "beta") spec.rollout.discount_override = to_double();
      else throw ConfigError(path, "unknown mc-rollout parameter");
    } else if (spec.kind == PolicyKind::Whittle) {
      if (key == "horizon") spec.whittle.eval_horizon = to_int();
      else if (key == "trajectories") spec.whittle.eval_trajectories = to_int();
      else if (key == "lo") spec.whittle.subsidy_lo = to_double();
      else if (key == "hi") spec.whittle.subsidy_hi = to_double();
      else if (key == "tol") spec.whittle.tolerance = to_double();
      else if (key == "probes") spec.whittle.probe_points = to_int();
      else throw ConfigError(path, "unknown whittle parameter");
    } else {
      throw ConfigError(path, std::string(kind_name(spec.kind)) + " takes no parameters");
    }
  }
  check_policy(spec, "policy");
  return spec;
}

RandomInstanceSpec parse_random_spec(const std::string& text) {
  RandomInstanceSpec spec;
  std::stringstream params(text);
  for (std::string item; std::getline(params, item, ',');) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("random", "expected key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq), value = item.substr(eq + 1);
    try {
      if (key == "n_arms") spec.n_arms = std::stoul(value);
      else if (key == "n_states") spec.n_states = std::stoul(value);
      else if (key == "seed") spec.seed = std::stoull(value);
      else if (key == "increasing") spec.increasing_click_prob = value == "1" || value == "true";
      else if (key == "beta") spec.discount = std::stod(value);
      else throw ConfigError("random." + key, "unknown parameter");
    } catch (const std::logic_error&) {
      throw ConfigError("random." + key, "invalid value '" + value + "'");
    }
  }
  return random_spec_from_json(random_spec_to_json(spec), "random");
}

namespace {

class LabeledPolicy final : public Policy {
 public:
  LabeledPolicy(std::unique_ptr<Policy> inner, std::string label) : inner_(std::move(inner)), label_(std::move(label)) {}
  std::string name() const override { return label_; }
  bool deterministic() const override { return inner_->deterministic(); }
  PolicyDecision select(std::span<const Belief> beliefs, const BanditInstance& instance, Rng& rng) const override {
    return inner_->select(beliefs, instance, rng);
  }

 private:
  std::unique_ptr<Policy> inner_;
  std::string label_;
};

}  // namespace

std::unique_ptr<Policy> make_policy(const PolicySpec& spec) {
  std::unique_ptr<Policy> p;
  switch (spec.kind) {
    case PolicyKind::Random: p = make_random_policy(); break;
    case PolicyKind::Myopic: p = make_myopic_policy(); break;
    case PolicyKind::Rollout: p = make_rollout_policy(spec.rollout); break;
    case PolicyKind::Whittle: p = make_whittle_policy(spec.whittle); break;
  }
  if (!spec.label.empty()) p = std::make_unique<LabeledPolicy>(std::move(p), spec.label);
  return p;
}

void ExperimentConfig::validate() const {
  if (policies.empty()) throw ConfigError("policies", "at least one policy is required");
  if (episodes < 1) throw ConfigError("episodes", "must be >= 1");
  if (steps < 1) throw ConfigError("steps", "must be >= 1");
  if (beta && !(*beta > 0.0 && *beta < 1.0)) throw ConfigError("beta", "must lie in (0, 1)");
  if (const auto* b = std::get_if<BuiltinRef>(&instance)) {
    bool known = false;
    for (const auto& info : builtin_catalog()) known |= info.name == b->name;
    if (!known) throw ConfigError("instance.builtin", "unknown built-in '" + b->name + "'");
  }
  for (std::size_t i = 0; i < policies.size(); ++i) check_policy(policies[i], index_path("policies", i));
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  require_object(root, "<root>");
  reject_unknown_keys(root, "", {"instance", "beta", "policies", "episodes", "steps", "seed", "output", "traces",
                                 "trace_episodes", "parallel_policies", "threads"});
  ExperimentConfig cfg;

  if (!root.contains("instance")) throw ConfigError("instance", "missing required field");
  const json& inst = require_object(root.at("instance"), "instance");
  if (inst.size() != 1) throw ConfigError("instance", "expected exactly one of builtin, random, file");
  if (inst.contains("builtin")) {
    cfg.instance = BuiltinRef{read<std::string>(inst.at("builtin"), "instance.builtin")};
  } else if (inst.contains("random")) {
    cfg.instance = random_spec_from_json(inst.at("random"), "instance.random");
  } else if (inst.contains("file")) {
    cfg.instance = InstanceFile{read<std::string>(inst.at("file"), "instance.file")};
  } else {
    throw ConfigError("instance", "expected exactly one of builtin, random, file");
  }

  if (root.contains("beta")) cfg.beta = read<double>(root.at("beta"), "beta");
  if (!root.contains("policies")) throw ConfigError("policies", "missing required field");
  const json& pols = root.at("policies");
  if (!pols.is_array()) throw ConfigError("policies", "expected an array");
  for (std::size_t i = 0; i < pols.size(); ++i) cfg.policies.push_back(policy_from_json(pols[i], index_path("policies", i)));
  cfg.episodes = read_count(root, "", "episodes", cfg.episodes);
  cfg.steps = read_count(root, "", "steps", cfg.steps);
  cfg.base_seed = read_field<std::uint64_t>(root, "", "seed", cfg.base_seed);
  cfg.output = read_field<std::string>(root, "", "output", cfg.output.string());
  cfg.write_traces = read_field<bool>(root, "", "traces", cfg.write_traces);
  cfg.trace_episodes = read_count(root, "", "trace_episodes", cfg.trace_episodes);
  cfg.parallel_policies = read_field<bool>(root, "", "parallel_policies", cfg.parallel_policies);
  cfg.threads = static_cast<unsigned>(read_count(root, "", "threads", cfg.threads));
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentConfig cfg = parse_config(buf.str());
  if (auto* f = std::get_if<InstanceFile>(&cfg.instance); f && f->path.is_relative())
    f->path = path.parent_path() / f->path;
  return cfg;
}

std::string serialize_config(const ExperimentConfig& cfg) {
  json root;
  if (const auto* b = std::get_if<BuiltinRef>(&cfg.instance)) root["instance"] = {{"builtin", b->name}};
  else if (const auto* r = std::get_if<RandomInstanceSpec>(&cfg.instance)) root["instance"] = {{"random", random_spec_to_json(*r)}};
  else root["instance"] = {{"file", std::get<InstanceFile>(cfg.instance).path.string()}};
  if (cfg.beta) root["beta"] = *cfg.beta;
  root["policies"] = json::array();
  for (const auto& p : cfg.policies) root["policies"].push_back(policy_to_json(p));
  root["episodes"] = cfg.episodes;
  root["steps"] = cfg.steps;
  root["seed"] = cfg.base_seed;
  root["output"] = cfg.output.string();
  root["traces"] = cfg.write_traces;
  root["trace_episodes"] = cfg.trace_episodes;
  root["parallel_policies"] = cfg.parallel_policies;
  root["threads"] = cfg.threads;
  return root.dump(2) + "\n";
}

BanditInstance parse_instance(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("malformed JSON: ") + e.what());
  }
  require_object(root, "<root>");
  reject_unknown_keys(root, "", {"name", "discount", "arms", "initial_beliefs", "initial_states"});
  BanditInstance inst;
  inst.name = read_field<std::string>(root, "", "name", "custom");
  inst.discount = read_field<double>(root, "", "discount", inst.discount);
  if (!root.contains("arms") || !root.at("arms").is_array()) throw ConfigError("arms", "expected an array of arms");
  const json& arms = root.at("arms");
  for (std::size_t j = 0; j < arms.size(); ++j) {
    const std::string path = index_path("arms", j);
    require_object(arms[j], path);
    reject_unknown_keys(arms[j], path, {"p_active", "p_passive", "click_prob"});
    for (const char* key : {"p_active", "p_passive", "click_prob"})
      if (!arms[j].contains(key)) throw ConfigError(join(path, key), "missing required field");
    inst.arms.push_back(ArmModel{matrix_from_json(arms[j].at("p_active"), join(path, "p_active")),
                                 matrix_from_json(arms[j].at("p_passive"), join(path, "p_passive")),
                                 read<std::vector<double>>(arms[j].at("click_prob"), join(path, "click_prob"))});
  }
  if (!root.contains("initial_beliefs")) throw ConfigError("initial_beliefs", "missing required field");
  const auto beliefs = read<std::vector<std::vector<double>>>(root.at("initial_beliefs"), "initial_beliefs");
  for (std::size_t j = 0; j < beliefs.size(); ++j) {
    try {
      inst.initial_beliefs.emplace_back(beliefs[j]);
    } catch (const ContractViolation& e) {
      throw ConfigError(index_path("initial_beliefs", j), e.what());
    }
  }
  if (!root.contains("initial_states")) throw ConfigError("initial_states", "missing required field");
  const auto states = read<std::vector<long long>>(root.at("initial_states"), "initial_states");
  for (std::size_t j = 0; j < states.size(); ++j) {
    if (states[j] < 1) throw ConfigError(index_path("initial_states", j), "states are 1-based");
    inst.initial_states.push_back(static_cast<std::size_t>(states[j] - 1));
  }
  try {
    inst.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError("<instance>", e.what());
  }
  return inst;
}

std::string serialize_instance(const BanditInstance& inst) {
  json root;
  root["name"] = inst.name;
  root["discount"] = inst.discount;
  root["arms"] = json::array();
  for (const auto& a : inst.arms)
    root["arms"].push_back({{"p_active", matrix_to_json(a.p_active)},
                            {"p_passive", matrix_to_json(a.p_passive)},
                            {"click_prob", a.click_prob}});
  root["initial_beliefs"] = json::array();
  for (const auto& b : inst.initial_beliefs) root["initial_beliefs"].push_back(std::vector<double>(b.begin(), b.end()));
  root["initial_states"] = json::array();
  for (std::size_t x : inst.initial_states) root["initial_states"].push_back(x + 1);
  return root.dump(2) + "\n";
}

BanditInstance resolve_instance(const ExperimentConfig& config) {
  BanditInstance inst;
  if (const auto* b = std::get_if<BuiltinRef>(&config.instance)) {
    inst = builtin_instance(b->name);
  } else if (const auto* r = std::get_if<RandomInstanceSpec>(&config.instance)) {
    inst = generate_instance(*r);
  } else {
    const auto& path = std::get<InstanceFile>(config.instance).path;
    std::ifstream in(path);
    if (!in) throw ConfigError("instance.file", "cannot open instance file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    inst = parse_instance(buf.str());
  }
  if (config.beta) inst.discount = *config.beta;
  inst.validate();
  return inst;
}

}  // namespace rmab
