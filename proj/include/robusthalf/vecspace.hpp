#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace robusthalf {

// Slack for ball-membership and identity checks.
inline constexpr double kTolerance = 1e-9;

// Norm exponent in [1, inf]. Infinity is a distinguished state, never a large
// float.
class Exponent {
 public:
  explicit Exponent(double value);

  static Exponent infinity() noexcept { return Exponent(); }
  static Exponent parse(std::string_view token);

  bool is_infinite() const noexcept { return infinite_; }
  // +inf for the infinite exponent.
  double value() const noexcept;
  // "inf" or the shortest round-tripping decimal.
  std::string to_string() const;

  friend bool operator==(const Exponent& a, const Exponent& b) noexcept {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  Exponent() noexcept : value_(0.0), infinite_(true) {}
  double value_;
  bool infinite_;
};

// 1/p + 1/q = 1 for sample exponents p >= 2.
Exponent dual_exponent(Exponent p);
// Same identity on the full range [1, inf]; used to go from q back to p.
Exponent conjugate_exponent(Exponent e) noexcept;
// Equality up to float round-off in the finite value.
bool same_exponent(Exponent a, Exponent b) noexcept;

double lp_norm(std::span<const double> v, Exponent p);
double dot(std::span<const double> a, std::span<const double> b);

// sgn(0) = +1.
constexpr int sign_of(double u) noexcept { return u >= 0.0 ? 1 : -1; }

struct LabeledSample {
  std::vector<double> x;
  int y = 1;
};

// Multiset of samples in B_p^d.
class Dataset {
 public:
  Dataset(std::size_t dimension, Exponent p, std::vector<LabeledSample> samples = {});

  std::size_t dimension() const noexcept { return dimension_; }
  Exponent p() const noexcept { return p_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const std::vector<LabeledSample>& samples() const noexcept { return samples_; }
  const LabeledSample& operator[](std::size_t i) const { return samples_[i]; }

  // Validates dimension, label and ball membership.
  void push_back(LabeledSample s);

 private:
  void check(const LabeledSample& s) const;

  std::size_t dimension_;
  Exponent p_;
  std::vector<LabeledSample> samples_;
};

// Weight vector in the dual ball B_q^d.
class Halfspace {
 public:
  // Dimension-0 placeholder.
  Halfspace() : q_(1.0) {}
  Halfspace(std::vector<double> w, Exponent q);

  static Halfspace zero(std::size_t dimension, Exponent q);

  const std::vector<double>& weights() const noexcept { return w_; }
  std::span<const double> view() const noexcept { return w_; }
  Exponent q() const noexcept { return q_; }
  std::size_t dimension() const noexcept { return w_.size(); }
  double norm() const { return lp_norm(w_, q_); }
  bool is_zero() const noexcept;

  // w / ||w||_q; throws on the zero vector.
  Halfspace normalized() const;

 private:
  std::vector<double> w_;
  Exponent q_;
};

bool margin_mistake(const Halfspace& w, const LabeledSample& s, double gamma);
std::size_t margin_mistake_count(const Halfspace& w, const Dataset& data, double gamma);
double margin_error(const Halfspace& w, const Dataset& data, double gamma);

// Optimal L_p attack against a unit-norm halfspace: z = x - y*t with
// t_i = gamma * sgn(w_i) |w_i|^(q-1), t_i = 0 where w_i = 0.
std::vector<double> worst_case_perturbation(const Halfspace& w, const LabeledSample& s,
                                            double gamma, Exponent p);

// Whether some z with ||z - x||_p <= gamma gets h_w(z) != y. Evaluated by
// running the worst-case attack against w / ||w||_q and classifying z with w.
bool robust_misclassified(const Halfspace& w, const LabeledSample& s, double gamma,
                          Exponent p);
double robust_error(const Halfspace& w, const Dataset& data, double gamma);

}  // namespace robusthalf
