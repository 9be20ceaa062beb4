#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "rmab/experiments.hpp"

namespace rmab {

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string file_stem_for(const std::string& label) {
  std::string out;
  for (char c : label) out += std::isalnum(static_cast<unsigned char>(c)) || c == '-' ? c : '_';
  return out;
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "': " + std::strerror(errno));
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw std::runtime_error("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

void write_results_csv(std::ostream& out, const std::vector<EvalReport>& reports) {
  const std::size_t n_arms = reports.empty() ? 0 : reports.front().per_arm_play_frequency.size();
  out << kResultsHeaderPrefix;
  for (std::size_t j = 1; j <= n_arms; ++j) out << ",freq_arm_" << j;
  out << '\n';
  const auto old_precision = out.precision(10);
  for (const auto& r : reports) {
    out << csv_field(r.policy_name) << ',' << r.episodes << ',' << r.steps_per_episode << ','
        << r.mean_discounted_return << ',' << r.stderr_return << ',' << r.ci95_lo << ',' << r.ci95_hi;
    for (double f : r.per_arm_play_frequency) out << ',' << f;
    out << '\n';
  }
  out.precision(old_precision);
}

void write_curves_csv(std::ostream& out, const std::vector<EvalReport>& reports) {
  out << kCurvesHeader << '\n';
  const auto old_precision = out.precision(10);
  for (const auto& r : reports) {
    const std::string name = csv_field(r.policy_name);
    for (std::size_t t = 0; t < r.cumulative_discounted_curve.size(); ++t) {
      const double m = r.cumulative_discounted_curve[t];
      const double half = 1.96 * r.cumulative_discounted_stderr[t];
      out << name << ',' << t + 1 << ',' << m << ',' << m - half << ',' << m + half << '\n';
    }
  }
  out.precision(old_precision);
}

void print_summary(std::ostream& out, const BanditInstance& instance, const std::vector<EvalReport>& reports) {
  out << "instance " << instance.name << ": N=" << instance.n_arms() << " S=" << instance.n_states()
      << " beta=" << instance.discount << '\n';
  std::size_t width = 6;
  for (const auto& r : reports) width = std::max(width, r.policy_name.size());
  out << std::left << std::setw(static_cast<int>(width)) << "policy" << std::right << std::setw(10) << "mean"
      << std::setw(9) << "stderr" << std::setw(21) << "95% CI" << "  play frequency by item\n";
  for (const auto& r : reports) {
    std::ostringstream ci;
    ci << std::fixed << std::setprecision(3) << '[' << r.ci95_lo << ", " << r.ci95_hi << ']';
    out << std::left << std::setw(static_cast<int>(width)) << r.policy_name << std::right << std::fixed
        << std::setprecision(4) << std::setw(10) << r.mean_discounted_return << std::setw(9) << r.stderr_return
        << std::setw(21) << ci.str() << " ";
    for (double f : r.per_arm_play_frequency) out << ' ' << std::setprecision(3) << f;
    out << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

RunResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  RunResult result;
  result.instance = resolve_instance(config);

  std::vector<std::unique_ptr<Policy>> policies;
  for (const auto& spec : config.policies) policies.push_back(make_policy(spec));

  const EvalOptions options{config.episodes, config.steps, config.base_seed, config.threads};
  if (config.parallel_policies) {
    std::vector<std::future<EvalReport>> pending;
    for (const auto& p : policies)
      pending.push_back(std::async(std::launch::async, [&, policy = p.get()] {
        return evaluate(result.instance, *policy, options);
      }));
    for (auto& f : pending) result.reports.push_back(f.get());
  } else {
    for (const auto& p : policies) result.reports.push_back(evaluate(result.instance, *p, options));
  }

  std::error_code ec;
  std::filesystem::create_directories(config.output, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + config.output.string() + "': " + ec.message());

  std::ostringstream results, curves;
  write_results_csv(results, result.reports);
  write_curves_csv(curves, result.reports);
  result.files.push_back(config.output / kResultsFile);
  write_file_atomic(result.files.back(), results.str());
  result.files.push_back(config.output / kCurvesFile);
  write_file_atomic(result.files.back(), curves.str());

  if (config.write_traces) {
    for (const auto& p : policies) {
      std::ostringstream trace;
      trace << trace_csv_header(result.instance.n_arms(), result.instance.n_states()) << '\n';
      const std::size_t count = std::min(config.trace_episodes, config.episodes);
      for (std::size_t k = 0; k < count; ++k) {
        const auto ep = run_episode(result.instance, *p, config.steps, config.base_seed + k);
        write_trace_csv_rows(trace, k + 1, ep.records);
      }
      result.files.push_back(config.output / (kTracesPrefix + file_stem_for(p->name()) + ".csv"));
      write_file_atomic(result.files.back(), trace.str());
    }
  }
  return result;
}

}  // namespace rmab
