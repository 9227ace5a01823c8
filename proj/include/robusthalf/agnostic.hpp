#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "robusthalf/online.hpp"
#include "robusthalf/rng.hpp"
#include "robusthalf/vecspace.hpp"

namespace robusthalf {

// How a single run picks its answer.
enum class RunPolicy {
  // Return on T = empty, otherwise return with probability 1/2, otherwise
  // append a uniform draw from T.
  paper,
  // Same trajectory without the early-return coin; keep the hypothesis with
  // the fewest threshold mistakes (earliest on ties).
  best_prefix,
};

// The online sequence of a run contained more than `budget` mistakes that
// were all consistent with the reference halfspace.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct RunOptions {
  RunPolicy policy = RunPolicy::paper;
  std::optional<Link> link;  // defaults to default_link(p)
  // When set, every appended sample is checked for target-margin consistency
  // with this halfspace; budget + 1 consistent mistakes raise ContractViolation.
  std::optional<Halfspace> reference;
};

struct RunResult {
  Halfspace w;
  std::size_t threshold_mistakes = 0;  // |T| for w
  std::size_t updates = 0;             // online updates behind w
  std::size_t iterations = 0;          // loop iterations executed
  bool clean = false;                  // stopped on T = empty
};

// One randomized pass of the online-to-agnostic reduction. `delta` only enters
// the probability bound; it is validated but does not change the procedure.
RunResult single_run(const Dataset& data, MarginGap gap, double delta, std::size_t budget,
                     Rng& rng, const RunOptions& options = {});

struct EmpiricalOptions {
  RunPolicy policy = RunPolicy::best_prefix;
  std::size_t jobs = 1;
  std::optional<std::size_t> budget;  // defaults to mistake_budget(d, p, gap)
  std::optional<Link> link;
  std::optional<Halfspace> reference;
};

struct EmpiricalResult {
  Halfspace w;
  double error = 1.0;  // err at the threshold margin
  std::size_t best_run = 0;
  std::size_t updates = 0;
  std::size_t budget = 0;
  std::vector<double> run_errors;  // per restart, by run index
};

// Best of `restarts` independent single runs at gap (gamma, (1 - nu) gamma).
// Run i draws from Rng(derive_seed(master_seed, i)).
EmpiricalResult learn_empirical(const Dataset& data, double gamma, double nu, double delta,
                                std::size_t restarts, std::uint64_t master_seed,
                                const EmpiricalOptions& options = {});
// Same with an explicit gap.
EmpiricalResult learn_empirical(const Dataset& data, MarginGap gap, double delta,
                                std::size_t restarts, std::uint64_t master_seed,
                                const EmpiricalOptions& options = {});

inline constexpr double kDefaultRestartCeiling = 1e8;

// ceil((4/delta)^(budget+1) ln 10); throws std::overflow_error above `ceiling`.
std::size_t default_restarts(std::size_t budget, double delta,
                             double ceiling = kDefaultRestartCeiling);

inline constexpr double kDefaultSampleConstant = 64.0;

// ceil(c * B / (eps^2 nu^2 gamma^2)) with B = p (finite) or ln d (p = inf).
std::size_t sample_size(Exponent p, std::size_t dimension, double eps, double nu,
                        double gamma, double constant = kDefaultSampleConstant);

// Yields i.i.d. samples; nullopt means the source is exhausted.
using Sampler = std::function<std::optional<LabeledSample>()>;

struct DistributionOptions {
  double sample_constant = kDefaultSampleConstant;
  std::optional<std::size_t> sample_count;  // overrides sample_size
  std::optional<std::size_t> restarts;      // defaults to default_restarts
  RunPolicy policy = RunPolicy::best_prefix;
  std::size_t jobs = 1;
};

struct DistributionResult {
  Halfspace w;
  std::size_t samples_drawn = 0;
  std::size_t restarts = 0;
  EmpiricalResult empirical;
};

// Draws m samples and runs learn_empirical at internal gap (gamma, (1 - nu/2) gamma).
DistributionResult learn_distribution(const Sampler& sampler, Exponent p,
                                      std::size_t dimension, double gamma, double nu,
                                      double delta, double eps, std::uint64_t seed,
                                      const DistributionOptions& options = {});

}  // namespace robusthalf
