#include "robusthalf/agnostic.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

namespace robusthalf {

RunResult single_run(const Dataset& data, MarginGap gap, double delta, std::size_t budget,
                     Rng& rng, const RunOptions& options) {
  if (data.empty()) throw std::invalid_argument("single run on an empty dataset");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  if (budget < 1) throw std::invalid_argument("mistake budget must be >= 1");
  if (options.reference && options.reference->dimension() != data.dimension()) {
    throw std::invalid_argument("reference halfspace dimension mismatch");
  }

  OnlineLearner learner(data.dimension(), data.p(), gap,
                        options.link.value_or(default_link(data.p())));
  std::vector<std::size_t> mistakes;
  mistakes.reserve(data.size());
  std::optional<RunResult> best;
  std::optional<RunResult> last;
  std::size_t consistent_appends = 0;
  bool all_consistent = true;

  for (std::size_t i = 0; i <= budget; ++i) {
    const Halfspace& w = learner.predict();
    mistakes.clear();
    for (std::size_t j = 0; j < data.size(); ++j) {
      if (margin_mistake(w, data[j], gap.threshold)) mistakes.push_back(j);
    }
    RunResult here{w, mistakes.size(), learner.update_count(), i + 1, mistakes.empty()};
    if (mistakes.empty()) return here;
    if (options.policy == RunPolicy::paper) {
      if (rng.coin()) return here;
    } else if (!best || here.threshold_mistakes < best->threshold_mistakes) {
      best = here;
    }
    last = std::move(here);

    const auto& picked = data[mistakes[rng.below(mistakes.size())]];
    if (options.reference) {
      all_consistent = all_consistent && !margin_mistake(*options.reference, picked, gap.target);
      if (all_consistent && ++consistent_appends > budget) {
        throw ContractViolation("online learner exceeded its mistake budget of " +
                                std::to_string(budget) +
                                " on a sequence consistent with the reference halfspace");
      }
    }
    if (!learner.update(picked)) {
      throw std::logic_error("appended sample was not a threshold mistake");
    }
  }
  if (options.policy == RunPolicy::best_prefix) {
    best->iterations = budget + 1;
    return *best;
  }
  return *last;
}

EmpiricalResult learn_empirical(const Dataset& data, double gamma, double nu, double delta,
                                std::size_t restarts, std::uint64_t master_seed,
                                const EmpiricalOptions& options) {
  if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("nu must lie in (0, 1)");
  return learn_empirical(data, MarginGap::relaxed(gamma, nu), delta, restarts, master_seed,
                         options);
}

EmpiricalResult learn_empirical(const Dataset& data, MarginGap gap, double delta,
                                std::size_t restarts, std::uint64_t master_seed,
                                const EmpiricalOptions& options) {
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (data.empty()) throw std::invalid_argument("learning from an empty dataset");
  const std::size_t budget =
      options.budget.value_or(mistake_budget(data.dimension(), data.p(), gap));
  RunOptions run_options;
  run_options.policy = options.policy;
  run_options.link = options.link;
  run_options.reference = options.reference;

  std::vector<std::optional<RunResult>> results(restarts);
  std::vector<std::exception_ptr> failures(restarts);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < restarts; r = next++) {
      try {
        Rng rng(derive_seed(master_seed, r));
        results[r] = single_run(data, gap, delta, budget, rng, run_options);
      } catch (...) {
        failures[r] = std::current_exception();
      }
    }
  };
  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, restarts));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  std::size_t best = 0;
  std::vector<double> errors(restarts);
  const double m = static_cast<double>(data.size());
  for (std::size_t r = 0; r < restarts; ++r) {
    errors[r] = static_cast<double>(results[r]->threshold_mistakes) / m;
    if (results[r]->threshold_mistakes < results[best]->threshold_mistakes) best = r;
  }
  return EmpiricalResult{results[best]->w, errors[best], best, results[best]->updates, budget,
                         std::move(errors)};
}

std::size_t default_restarts(std::size_t budget, double delta, double ceiling) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  const double log_count =
      static_cast<double>(budget + 1) * std::log(4.0 / delta) + std::log(std::log(10.0));
  if (log_count > std::log(ceiling)) {
    throw std::overflow_error("default restart count (4/delta)^(M+1) ln 10 with M=" +
                              std::to_string(budget) + " exceeds the ceiling " +
                              std::to_string(ceiling) +
                              "; pass an explicit restart count or coarsen delta");
  }
  return static_cast<std::size_t>(
      std::ceil(std::pow(4.0 / delta, static_cast<double>(budget + 1)) * std::log(10.0)));
}

std::size_t sample_size(Exponent p, std::size_t dimension, double eps, double nu,
                        double gamma, double constant) {
  dual_exponent(p);
  if (!(eps > 0.0) || !(nu > 0.0) || !(gamma > 0.0) || !(constant > 0.0)) {
    throw std::invalid_argument("sample_size parameters must be positive");
  }
  if (dimension == 0) throw std::invalid_argument("dimension must be >= 1");
  const double scale = p.is_infinite() ? std::log(static_cast<double>(dimension)) : p.value();
  const double m = std::ceil(constant * scale / (eps * eps * nu * nu * gamma * gamma));
  if (!(m < 9.0e18)) throw std::overflow_error("sample size overflows");
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

DistributionResult learn_distribution(const Sampler& sampler, Exponent p,
                                      std::size_t dimension, double gamma, double nu,
                                      double delta, double eps, std::uint64_t seed,
                                      const DistributionOptions& options) {
  if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("nu must lie in (0, 1)");
  const std::size_t m = options.sample_count.value_or(
      sample_size(p, dimension, eps, nu, gamma, options.sample_constant));
  Dataset data(dimension, p);
  for (std::size_t i = 0; i < m; ++i) {
    auto s = sampler();
    if (!s) {
      throw std::runtime_error("sampler exhausted after " + std::to_string(i) + " of " +
                               std::to_string(m) + " samples");
    }
    data.push_back(std::move(*s));
  }
  const MarginGap gap{gamma, (1.0 - nu / 2.0) * gamma};
  const std::size_t restarts = options.restarts
                                    ? *options.restarts
                                    : default_restarts(mistake_budget(dimension, p, gap), delta);
  EmpiricalOptions eo;
  eo.policy = options.policy;
  eo.jobs = options.jobs;
  auto result = learn_empirical(data, gap, delta, restarts, seed, eo);
  return DistributionResult{result.w, m, restarts, std::move(result)};
}

}  // namespace robusthalf
