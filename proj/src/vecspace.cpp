#include "robusthalf/vecspace.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace robusthalf {

Exponent::Exponent(double value) : value_(value), infinite_(false) {
  if (std::isinf(value) && value > 0) {
    infinite_ = true;
    value_ = 0.0;
    return;
  }
  if (!std::isfinite(value) || value < 1.0) {
    throw std::invalid_argument("norm exponent must lie in [1, inf], got " +
                                std::to_string(value));
  }
}

Exponent Exponent::parse(std::string_view token) {
  if (token == "inf" || token == "Inf" || token == "INF" || token == "infinity") {
    return infinity();
  }
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw std::invalid_argument("cannot parse exponent '" + std::string(token) + "'");
  }
  return Exponent(v);
}

double Exponent::value() const noexcept {
  return infinite_ ? std::numeric_limits<double>::infinity() : value_;
}

std::string Exponent::to_string() const {
  if (infinite_) return "inf";
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value_);
  return std::string(buf, ptr);
}

Exponent dual_exponent(Exponent p) {
  if (!p.is_infinite() && p.value() < 2.0) {
    throw std::invalid_argument("sample exponent p must be >= 2, got " + p.to_string());
  }
  return conjugate_exponent(p);
}

Exponent conjugate_exponent(Exponent e) noexcept {
  if (e.is_infinite()) return Exponent(1.0);
  const double v = e.value();
  if (v == 1.0) return Exponent::infinity();
  if (v == 2.0) return Exponent(2.0);
  return Exponent(v / (v - 1.0));
}

bool same_exponent(Exponent a, Exponent b) noexcept {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() == b.is_infinite();
  return std::abs(a.value() - b.value()) <= 1e-12 * std::max(1.0, a.value());
}

double lp_norm(std::span<const double> v, Exponent p) {
  double peak = 0.0;
  for (double x : v) peak = std::max(peak, std::abs(x));
  if (p.is_infinite() || peak == 0.0) return peak;
  const double e = p.value();
  double acc = 0.0;
  if (e == 1.0) {
    for (double x : v) acc += std::abs(x);
    return acc;
  }
  if (e == 2.0) {
    for (double x : v) {
      const double r = x / peak;
      acc += r * r;
    }
    return peak * std::sqrt(acc);
  }
  for (double x : v) acc += std::pow(std::abs(x) / peak, e);
  return peak * std::pow(acc, 1.0 / e);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dimension mismatch: " + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

Dataset::Dataset(std::size_t dimension, Exponent p, std::vector<LabeledSample> samples)
    : dimension_(dimension), p_(p), samples_(std::move(samples)) {
  dual_exponent(p_);  // rejects p < 2
  if (dimension_ == 0) throw std::invalid_argument("dataset dimension must be >= 1");
  for (const auto& s : samples_) check(s);
}

void Dataset::push_back(LabeledSample s) {
  check(s);
  samples_.push_back(std::move(s));
}

void Dataset::check(const LabeledSample& s) const {
  if (s.x.size() != dimension_) {
    throw std::invalid_argument("sample dimension " + std::to_string(s.x.size()) +
                                " does not match dataset dimension " +
                                std::to_string(dimension_));
  }
  if (s.y != 1 && s.y != -1) {
    throw std::invalid_argument("label must be +1 or -1, got " + std::to_string(s.y));
  }
  for (double v : s.x) {
    if (!std::isfinite(v)) throw std::invalid_argument("sample has a non-finite entry");
  }
  const double n = lp_norm(s.x, p_);
  if (n > 1.0 + kTolerance) {
    throw std::invalid_argument("sample outside the unit " + p_.to_string() +
                                "-ball (norm " + std::to_string(n) + ")");
  }
}

Halfspace::Halfspace(std::vector<double> w, Exponent q) : w_(std::move(w)), q_(q) {
  for (double v : w_) {
    if (!std::isfinite(v)) throw std::invalid_argument("halfspace has a non-finite weight");
  }
  const double n = lp_norm(w_, q_);
  if (n > 1.0 + kTolerance) {
    throw std::invalid_argument("halfspace outside the unit " + q_.to_string() +
                                "-ball (norm " + std::to_string(n) + ")");
  }
}

Halfspace Halfspace::zero(std::size_t dimension, Exponent q) {
  return Halfspace(std::vector<double>(dimension, 0.0), q);
}

bool Halfspace::is_zero() const noexcept {
  return std::all_of(w_.begin(), w_.end(), [](double v) { return v == 0.0; });
}

Halfspace Halfspace::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero halfspace");
  std::vector<double> out(w_);
  for (double& v : out) v /= n;
  // Division can leave the norm a few ulps above one.
  const double again = lp_norm(out, q_);
  if (again > 1.0) {
    for (double& v : out) v /= again;
  }
  return Halfspace(std::move(out), q_);
}

bool margin_mistake(const Halfspace& w, const LabeledSample& s, double gamma) {
  const double score = dot(w.view(), s.x) - s.y * gamma;
  return sign_of(score) != s.y;
}

std::size_t margin_mistake_count(const Halfspace& w, const Dataset& data, double gamma) {
  std::size_t count = 0;
  for (const auto& s : data.samples()) count += margin_mistake(w, s, gamma) ? 1 : 0;
  return count;
}

double margin_error(const Halfspace& w, const Dataset& data, double gamma) {
  if (data.empty()) throw std::invalid_argument("margin error of an empty dataset");
  return static_cast<double>(margin_mistake_count(w, data, gamma)) /
         static_cast<double>(data.size());
}

std::vector<double> worst_case_perturbation(const Halfspace& w, const LabeledSample& s,
                                            double gamma, Exponent p) {
  if (w.dimension() != s.x.size()) {
    throw std::invalid_argument("dimension mismatch between halfspace and sample");
  }
  if (gamma < 0.0) throw std::invalid_argument("perturbation radius must be >= 0");
  if (!same_exponent(w.q(), dual_exponent(p))) {
    throw std::invalid_argument("halfspace exponent q=" + w.q().to_string() +
                                " is not dual to p=" + p.to_string());
  }
  const double n = w.norm();
  if (n == 0.0) throw std::invalid_argument("worst-case perturbation of the zero halfspace");
  if (std::abs(n - 1.0) > kTolerance) {
    throw std::invalid_argument("worst-case perturbation needs a unit-norm halfspace");
  }
  const double q = w.q().value();
  std::vector<double> z(s.x);
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double wi = w.weights()[i];
    if (wi == 0.0) continue;
    const double mag = (q == 1.0) ? 1.0 : std::pow(std::abs(wi), q - 1.0);
    const double t = gamma * (wi > 0 ? 1.0 : -1.0) * mag;
    z[i] -= s.y * t;
  }
  return z;
}

bool robust_misclassified(const Halfspace& w, const LabeledSample& s, double gamma,
                          Exponent p) {
  if (w.is_zero()) throw std::invalid_argument("robust risk of the zero halfspace");
  const auto z = worst_case_perturbation(w.normalized(), s, gamma, p);
  return sign_of(dot(w.view(), z)) != s.y;
}

double robust_error(const Halfspace& w, const Dataset& data, double gamma) {
  if (data.empty()) throw std::invalid_argument("robust error of an empty dataset");
  std::size_t count = 0;
  for (const auto& s : data.samples()) {
    count += robust_misclassified(w, s, gamma, data.p()) ? 1 : 0;
  }
  return static_cast<double>(count) / static_cast<double>(data.size());
}

}  // namespace robusthalf
