#include "robusthalf/online.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace robusthalf {

Link default_link(Exponent p) noexcept {
  return p.is_infinite() ? Link::exponential : Link::pnorm;
}

double effective_exponent(std::size_t dimension, Exponent p) {
  dual_exponent(p);
  if (dimension == 0) throw std::invalid_argument("dimension must be >= 1");
  if (!p.is_infinite()) return p.value();
  return std::max(2.0, 2.0 * std::log(static_cast<double>(dimension)));
}

std::vector<double> pnorm_link(std::span<const double> theta, double r) {
  std::vector<double> w(theta.size(), 0.0);
  double peak = 0.0;
  for (double t : theta) peak = std::max(peak, std::abs(t));
  if (peak == 0.0) return w;
  if (r == 2.0) {
    double acc = 0.0;
    for (double t : theta) acc += (t / peak) * (t / peak);
    const double n = peak * std::sqrt(acc);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = theta[j] / n;
    return w;
  }
  // Scale by the peak first; the ratio is invariant and pow stays finite.
  double acc = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) {
    const double a = std::abs(theta[j]) / peak;
    acc += std::pow(a, r);
    w[j] = (theta[j] < 0 ? -1.0 : 1.0) * std::pow(a, r - 1.0);
  }
  const double denom = std::pow(acc, (r - 1.0) / r);
  for (double& v : w) v /= denom;
  return w;
}

std::size_t mistake_budget(std::size_t dimension, Exponent p, MarginGap gap,
                           double constant) {
  if (!(gap.width() > 0.0)) throw std::invalid_argument("margin gap must be positive");
  const double p_eff = effective_exponent(dimension, p);
  const double m = constant * (p_eff - 1.0) / (gap.width() * gap.width());
  return static_cast<std::size_t>(std::ceil(m));
}

namespace {

void check_gap(MarginGap gap) {
  if (!(gap.threshold >= 0.0) || !(gap.target > gap.threshold)) {
    throw std::invalid_argument("margin gap needs 0 <= gamma' < gamma");
  }
}

}  // namespace

OnlineLearner::OnlineLearner(std::size_t dimension, Exponent p, MarginGap gap)
    : OnlineLearner(dimension, p, gap, default_link(p)) {}

OnlineLearner::OnlineLearner(std::size_t dimension, Exponent p, MarginGap gap, Link link)
    : p_(p),
      q_(dual_exponent(p)),
      gap_(gap),
      link_(link),
      p_eff_(robusthalf::effective_exponent(dimension, p)),
      theta_(dimension, 0.0),
      current_(Halfspace::zero(dimension, q_)) {
  check_gap(gap);
  if (link_ == Link::exponential && !p_.is_infinite()) {
    throw std::invalid_argument("the exponentiated-gradient link needs p = inf");
  }
}

bool OnlineLearner::update(const LabeledSample& s) {
  if (s.x.size() != theta_.size()) {
    throw std::invalid_argument("dimension mismatch in online update");
  }
  if (!margin_mistake(current_, s, gap_.threshold)) return false;
  for (std::size_t j = 0; j < theta_.size(); ++j) theta_[j] += s.y * s.x[j];
  ++updates_;
  current_ = compute_prediction();
  return true;
}

Halfspace OnlineLearner::compute_prediction() const {
  const std::size_t d = theta_.size();
  if (link_ == Link::exponential) {
    // w_i = sinh(eta theta_i) / sum_j cosh(eta theta_j), shifted by the peak.
    const double eta = gap_.width();
    double peak = 0.0;
    for (double t : theta_) peak = std::max(peak, eta * std::abs(t));
    std::vector<double> w(d);
    double z = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double a = eta * theta_[j];
      const double up = std::exp(a - peak);
      const double down = std::exp(-a - peak);
      w[j] = up - down;
      z += up + down;
    }
    for (double& v : w) v /= z;
    return Halfspace(std::move(w), q_);
  }
  auto w = pnorm_link(theta_, p_eff_);
  if (p_.is_infinite()) {
    const double n1 = lp_norm(w, q_);
    if (n1 > 0.0) {
      for (double& v : w) v /= n1;
    }
  } else {
    const double n = lp_norm(w, q_);
    if (n > 1.0) {
      for (double& v : w) v /= n;
    }
  }
  return Halfspace(std::move(w), q_);
}

Halfspace run_sequence(std::span<const LabeledSample> sequence, std::size_t dimension,
                       Exponent p, MarginGap gap) {
  OnlineLearner learner(dimension, p, gap);
  for (const auto& s : sequence) learner.update(s);
  return learner.predict();
}

}  // namespace robusthalf
