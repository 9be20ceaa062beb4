#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "rmab/sim.hpp"

namespace rmab {

namespace {

struct EpisodeSummary {
  double discounted_return = 0.0;
  std::vector<double> cumulative;  // per step
  std::vector<std::size_t> plays;  // per arm
};

EpisodeSummary summarize(const BanditInstance& instance, const EpisodeResult& ep) {
  EpisodeSummary s;
  s.discounted_return = ep.discounted_return;
  s.plays.assign(instance.n_arms(), 0);
  s.cumulative.reserve(ep.records.size());
  double acc = 0.0, weight = 1.0;
  for (const auto& r : ep.records) {
    acc += weight * r.reward;
    weight *= instance.discount;
    s.cumulative.push_back(acc);
    ++s.plays[r.arm_played];
  }
  return s;
}

double standard_error(double sum, double sum_sq, std::size_t n) {
  if (n < 2) return 0.0;
  const auto dn = static_cast<double>(n);
  const double mean = sum / dn;
  const double var = std::max(0.0, (sum_sq - dn * mean * mean) / (dn - 1.0));
  return std::sqrt(var / dn);
}

}  // namespace

EvalReport evaluate(const BanditInstance& instance, const Policy& policy, const EvalOptions& options) {
  if (options.episodes < 1) throw ContractViolation("evaluate: episodes must be >= 1");
  if (options.steps < 1) throw ContractViolation("evaluate: steps must be >= 1");
  instance.validate();

  std::vector<EpisodeSummary> summaries(options.episodes);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (std::size_t k = next++; k < options.episodes; k = next++) {
      try {
        summaries[k] = summarize(instance, run_episode(instance, policy, options.steps, options.base_seed + k));
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = options.episodes;
      }
    }
  };

  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, options.episodes));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  // Reduce in episode order so the result is independent of scheduling.
  EvalReport report;
  report.policy_name = policy.name();
  report.episodes = options.episodes;
  report.steps_per_episode = options.steps;
  report.per_arm_play_frequency.assign(instance.n_arms(), 0.0);
  std::vector<double> curve_sum(options.steps, 0.0), curve_sq(options.steps, 0.0);
  double sum = 0.0, sum_sq = 0.0;
  report.episode_returns.reserve(options.episodes);
  for (const auto& s : summaries) {
    sum += s.discounted_return;
    sum_sq += s.discounted_return * s.discounted_return;
    report.episode_returns.push_back(s.discounted_return);
    for (std::size_t j = 0; j < s.plays.size(); ++j) report.per_arm_play_frequency[j] += static_cast<double>(s.plays[j]);
    for (std::size_t t = 0; t < options.steps; ++t) {
      curve_sum[t] += s.cumulative[t];
      curve_sq[t] += s.cumulative[t] * s.cumulative[t];
    }
  }
  const auto n = static_cast<double>(options.episodes);
  report.mean_discounted_return = sum / n;
  report.stderr_return = standard_error(sum, sum_sq, options.episodes);
  report.ci95_lo = report.mean_discounted_return - 1.96 * report.stderr_return;
  report.ci95_hi = report.mean_discounted_return + 1.96 * report.stderr_return;
  const double total_plays = n * static_cast<double>(options.steps);
  for (double& f : report.per_arm_play_frequency) f /= total_plays;
  report.cumulative_discounted_curve.resize(options.steps);
  report.cumulative_discounted_stderr.resize(options.steps);
  for (std::size_t t = 0; t < options.steps; ++t) {
    report.cumulative_discounted_curve[t] = curve_sum[t] / n;
    report.cumulative_discounted_stderr[t] = standard_error(curve_sum[t], curve_sq[t], options.episodes);
  }
  return report;
}

}  // namespace rmab
