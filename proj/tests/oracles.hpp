#pragma once

// Test-side reference computations. Deliberately written without calling the
// library routines they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

namespace oracle_ref {

inline long double norm(const std::vector<double>& v, double p) {
  if (std::isinf(p)) {
    long double m = 0;
    for (double x : v) m = std::max<long double>(m, std::fabs(x));
    return m;
  }
  long double s = 0;
  for (double x : v) s += std::pow(std::fabs(static_cast<long double>(x)), static_cast<long double>(p));
  return std::pow(s, 1.0L / p);
}

inline long double inner(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return s;
}

// Count of i with sgn(<w, x_i> - y_i gamma) != y_i, sgn(0) = +1.
template <class Samples>
std::size_t margin_mistakes(const std::vector<double>& w, const Samples& samples, double gamma) {
  std::size_t count = 0;
  for (const auto& s : samples) {
    double dotv = 0;
    for (std::size_t i = 0; i < w.size(); ++i) dotv += w[i] * s.x[i];
    const double u = dotv - s.y * gamma;
    const int pred = u >= 0 ? 1 : -1;
    if (pred != s.y) ++count;
  }
  return count;
}

// Rademacher-sum tails for every m in [1, m_hi], built by rolling the
// binomial pmf forward one coin at a time (pmf_{m+1}(j) = (pmf_m(j) + pmf_m(j-1))/2).
// tails(c)[m] = Pr[S_m >= c/100 sqrt m].
class RademacherTable {
 public:
  explicit RademacherTable(std::size_t m_hi) : m_hi_(m_hi) {}

  std::vector<long double> tails(unsigned c_percent, std::size_t m_lo) const {
    std::vector<long double> out(m_hi_ + 1, 0.0L);
    std::vector<long double> pmf{1.0L};
    for (std::size_t m = 1; m <= m_hi_; ++m) {
      std::vector<long double> next(m + 1, 0.0L);
      for (std::size_t j = 0; j < pmf.size(); ++j) {
        next[j] += 0.5L * pmf[j];
        next[j + 1] += 0.5L * pmf[j];
      }
      pmf.swap(next);
      if (m < m_lo) continue;
      // S = 2j - m >= threshold, threshold^2 = c^2 m / 10^4; exact in integers.
      long double t = 0;
      for (std::size_t j = m + 1; j-- > 0;) {
        const long long s = 2 * static_cast<long long>(j) - static_cast<long long>(m);
        if (s < 0) break;
        if (10000LL * s * s < static_cast<long long>(c_percent) * c_percent * static_cast<long long>(m)) break;
        t += pmf[j];
      }
      out[m] = t;
    }
    return out;
  }

 private:
  std::size_t m_hi_;
};

}  // namespace oracle_ref
