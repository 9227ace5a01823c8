#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "robusthalf/vecspace.hpp"

namespace robusthalf {

// (gamma, gamma') margin gap: the comparator is assumed to separate with margin
// `target`; the learner answers for margin `threshold` < target.
struct MarginGap {
  double target;
  double threshold;

  static MarginGap relaxed(double gamma, double nu) { return {gamma, (1.0 - nu) * gamma}; }
  double width() const noexcept { return target - threshold; }
};

enum class Link {
  // Quasi-additive p-norm perceptron. For p = inf it runs at p_eff = 2 ln d and
  // L1-normalizes its predictions.
  pnorm,
  // Exponentiated-gradient (normalized Winnow over +-coordinates) with rate
  // target - threshold; only defined for p = inf.
  exponential,
};

// Default engine per exponent: p-norm for finite p, exponential for p = inf.
Link default_link(Exponent p) noexcept;

// max(2, 2 ln d) for p = inf, p itself otherwise.
double effective_exponent(std::size_t dimension, Exponent p);

// sgn(theta_j)|theta_j|^(r-1) / ||theta||_r^(r-1); unit norm in the dual of r.
std::vector<double> pnorm_link(std::span<const double> theta, double r);

// ceil(K (p_eff - 1) / (gamma - gamma')^2).
std::size_t mistake_budget(std::size_t dimension, Exponent p, MarginGap gap,
                           double constant = 16.0);

// Mistake-driven online learner with a (gamma, gamma') margin gap. Holds the
// dual accumulator theta = sum of y x over update rounds.
class OnlineLearner {
 public:
  OnlineLearner(std::size_t dimension, Exponent p, MarginGap gap);
  OnlineLearner(std::size_t dimension, Exponent p, MarginGap gap, Link link);

  std::size_t dimension() const noexcept { return theta_.size(); }
  Exponent p() const noexcept { return p_; }
  Exponent q() const noexcept { return q_; }
  MarginGap gap() const noexcept { return gap_; }
  Link link() const noexcept { return link_; }
  double effective_exponent() const noexcept { return p_eff_; }
  std::size_t update_count() const noexcept { return updates_; }
  std::span<const double> accumulator() const noexcept { return theta_; }

  // Current hypothesis; zero while theta = 0.
  const Halfspace& predict() const noexcept { return current_; }

  // Feeds one round. Updates and returns true iff the current hypothesis makes
  // a margin-threshold mistake on s.
  bool update(const LabeledSample& s);

 private:
  Halfspace compute_prediction() const;

  Exponent p_;
  Exponent q_;
  MarginGap gap_;
  Link link_;
  double p_eff_;
  std::vector<double> theta_;
  std::size_t updates_ = 0;
  Halfspace current_;
};

// Fresh learner fed `sequence` in order; returns the final prediction.
Halfspace run_sequence(std::span<const LabeledSample> sequence, std::size_t dimension,
                       Exponent p, MarginGap gap);

}  // namespace robusthalf
