#include "robusthalf/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>

#include "robusthalf/online.hpp"
#include "robusthalf/rng.hpp"

namespace robusthalf {

namespace {

// a_i = y_i x_i
std::vector<std::vector<double>> signed_rows(const Dataset& data) {
  std::vector<std::vector<double>> a;
  a.reserve(data.size());
  for (const auto& s : data.samples()) {
    std::vector<double> row(s.x);
    if (s.y < 0) {
      for (double& v : row) v = -v;
    }
    a.push_back(std::move(row));
  }
  return a;
}

double min_margin(const std::vector<std::vector<double>>& a, std::span<const double> w) {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& row : a) lo = std::min(lo, dot(row, w));
  return lo;
}

// Rescales w into the closed unit ball of exponent q.
void clamp_to_ball(std::vector<double>& w, Exponent q) {
  for (int pass = 0; pass < 4; ++pass) {
    const double n = lp_norm(w, q);
    if (n <= 1.0) return;
    for (double& v : w) v /= n;
  }
}

bool decided(const MarginOptions& o, double lower, double upper) {
  if (o.decide_at) {
    return lower >= *o.decide_at || upper < *o.decide_at || upper - lower <= 1e-12;
  }
  return upper - lower <= o.tol;
}

// max t  s.t.  t - a_i (w+ - w-) <= 0,  sum (w+ + w-) <= 1,  all >= 0.
// The origin is feasible, so a slack basis starts the tableau; Bland's rule
// keeps the degenerate pivots (zero right-hand sides) from cycling.
MarginCertificate linf_simplex(const std::vector<std::vector<double>>& a, std::size_t d) {
  const std::size_t m = a.size();
  const std::size_t n = 2 * d + 1;
  const std::size_t rows = m + 1;
  const std::size_t cols = n + rows;
  constexpr double eps = 1e-12;

  std::vector<std::vector<double>> tab(rows, std::vector<double>(cols, 0.0));
  std::vector<double> rhs(rows, 0.0);
  std::vector<double> obj(cols, 0.0);
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < m; ++i) {
    tab[i][0] = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      tab[i][1 + j] = -a[i][j];
      tab[i][1 + d + j] = a[i][j];
    }
  }
  for (std::size_t j = 1; j < n; ++j) tab[m][j] = 1.0;
  rhs[m] = 1.0;
  for (std::size_t r = 0; r < rows; ++r) {
    tab[r][n + r] = 1.0;
    basis[r] = n + r;
  }
  obj[0] = -1.0;

  std::size_t pivots = 0;
  const std::size_t cap = 1000 * (rows + cols);
  for (;;) {
    std::size_t enter = cols;
    for (std::size_t c = 0; c < cols; ++c) {
      if (obj[c] < -eps) {
        enter = c;
        break;
      }
    }
    if (enter == cols) break;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < rows; ++r) {
      if (tab[r][enter] > eps) best = std::min(best, rhs[r] / tab[r][enter]);
    }
    std::size_t leave = rows;
    for (std::size_t r = 0; r < rows; ++r) {
      if (tab[r][enter] <= eps || rhs[r] / tab[r][enter] > best + eps) continue;
      if (leave == rows || basis[r] < basis[leave]) leave = r;
    }
    if (leave == rows) throw std::logic_error("margin LP reported unbounded");
    if (++pivots > cap) throw ConvergenceError("margin LP pivot cap reached", 0.0, 1.0);

    const double piv = tab[leave][enter];
    for (double& v : tab[leave]) v /= piv;
    rhs[leave] /= piv;
    for (std::size_t r = 0; r < rows; ++r) {
      if (r == leave) continue;
      const double f = tab[r][enter];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < cols; ++c) tab[r][c] -= f * tab[leave][c];
      rhs[r] -= f * rhs[leave];
    }
    const double f = obj[enter];
    for (std::size_t c = 0; c < cols; ++c) obj[c] -= f * tab[leave][c];
    basis[leave] = enter;
  }

  std::vector<double> x(n, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    if (basis[r] < n) x[basis[r]] = rhs[r];
  }
  std::vector<double> w(d);
  for (std::size_t j = 0; j < d; ++j) w[j] = x[1 + j] - x[1 + d + j];
  const Exponent q(1.0);
  clamp_to_ball(w, q);
  double lower = min_margin(a, w);
  if (!(lower > 0.0)) {
    lower = 0.0;
    std::fill(w.begin(), w.end(), 0.0);
  }

  // Slack reduced costs are the duals; any point of the simplex certifies
  // an upper bound ||sum lambda_i a_i||_inf.
  std::vector<double> lambda(m);
  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    lambda[i] = std::max(0.0, obj[n + i]);
    total += lambda[i];
  }
  if (!(total > 0.0)) {
    std::fill(lambda.begin(), lambda.end(), 1.0);
    total = static_cast<double>(m);
  }
  std::vector<double> z(d, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < d; ++j) z[j] += lambda[i] / total * a[i][j];
  }
  const double upper = std::max(lower, lp_norm(z, Exponent::infinity()));
  return MarginCertificate{lower, upper, Halfspace(std::move(w), q), pivots};
}

void project_simplex(std::vector<double>& v) {
  std::vector<double> u(v);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0;
  double theta = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    cum += u[i];
    const double t = (cum - 1.0) / static_cast<double>(i + 1);
    if (u[i] - t > 0.0) theta = t;
  }
  for (double& x : v) x = std::max(0.0, x - theta);
}

struct DualState {
  std::vector<double> z;
  double norm = 0.0;
  double f = 0.0;  // norm^2 / 2
};

MarginCertificate finite_dual(const std::vector<std::vector<double>>& a, std::size_t d,
                              Exponent p, const MarginOptions& o) {
  const std::size_t m = a.size();
  const double pv = p.value();
  const Exponent q = dual_exponent(p);

  auto eval = [&](const std::vector<double>& lambda) {
    DualState s;
    s.z.assign(d, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      if (lambda[i] == 0.0) continue;
      for (std::size_t j = 0; j < d; ++j) s.z[j] += lambda[i] * a[i][j];
    }
    s.norm = lp_norm(s.z, p);
    s.f = 0.5 * s.norm * s.norm;
    return s;
  };

  double best_lower = 0.0;
  double best_upper = std::numeric_limits<double>::infinity();
  std::vector<double> best_w(d, 0.0);
  std::size_t iterations = 0;

  auto certify = [&](const DualState& s) {
    best_upper = std::min(best_upper, s.norm);
    if (s.norm == 0.0) return;
    auto w = pnorm_link(s.z, pv);
    clamp_to_ball(w, q);
    const double lo = min_margin(a, w);
    if (lo > best_lower) {
      best_lower = lo;
      best_w = std::move(w);
    }
  };

  Rng rng(o.seed);
  for (std::size_t start = 0; start < std::max<std::size_t>(1, o.starts); ++start) {
    std::vector<double> x(m);
    if (start == 0) {
      std::fill(x.begin(), x.end(), 1.0 / static_cast<double>(m));
    } else {
      double total = 0.0;
      for (double& v : x) {
        v = -std::log(1.0 - rng.uniform());
        total += v;
      }
      for (double& v : x) v /= total;
    }
    DualState sx = eval(x);
    certify(sx);
    if (decided(o, best_lower, best_upper)) break;

    std::vector<double> y(x);
    DualState sy = sx;
    double t = 1.0;
    double lip = 1.0;
    for (std::size_t it = 0; it < o.iterations_per_start; ++it) {
      ++iterations;
      std::vector<double> grad(m, 0.0);
      if (sy.norm > 0.0) {
        auto dir = pnorm_link(sy.z, pv);
        for (std::size_t i = 0; i < m; ++i) grad[i] = sy.norm * dot(a[i], dir);
      }
      std::vector<double> xn(m);
      DualState sn;
      for (;;) {
        for (std::size_t i = 0; i < m; ++i) xn[i] = y[i] - grad[i] / lip;
        project_simplex(xn);
        sn = eval(xn);
        double lin = 0.0;
        double sq = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          const double diff = xn[i] - y[i];
          lin += grad[i] * diff;
          sq += diff * diff;
        }
        if (sn.f <= sy.f + lin + 0.5 * lip * sq + 1e-15 || lip > 1e12) break;
        lip *= 2.0;
      }
      certify(sn);
      if (decided(o, best_lower, best_upper)) break;

      // Momentum restart when the step turns against the previous one.
      double turn = 0.0;
      for (std::size_t i = 0; i < m; ++i) turn += (y[i] - xn[i]) * (xn[i] - x[i]);
      if (turn > 0.0) t = 1.0;
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      const double beta = (t - 1.0) / tn;
      for (std::size_t i = 0; i < m; ++i) y[i] = xn[i] + beta * (xn[i] - x[i]);
      x = std::move(xn);
      sx = std::move(sn);
      sy = eval(y);
      t = tn;
    }
    if (decided(o, best_lower, best_upper)) break;
  }
  if (!decided(o, best_lower, best_upper)) {
    throw ConvergenceError("max_min_margin did not converge: bounds [" +
                               std::to_string(best_lower) + ", " + std::to_string(best_upper) +
                               "]",
                           best_lower, best_upper);
  }
  return MarginCertificate{best_lower, std::max(best_lower, best_upper),
                           Halfspace(std::move(best_w), q), iterations};
}

// Calls visit(a) for every integer vector with sum |a_i| = n.
void l1_lattice(std::size_t d, long n, const std::function<void(const std::vector<long>&)>& visit) {
  std::vector<long> a(d, 0);
  std::function<void(std::size_t, long)> rec = [&](std::size_t i, long rest) {
    if (i + 1 == d) {
      a[i] = rest;
      visit(a);
      if (rest != 0) {
        a[i] = -rest;
        visit(a);
      }
      return;
    }
    for (long v = -rest; v <= rest; ++v) {
      a[i] = v;
      rec(i + 1, rest - std::labs(v));
    }
  };
  rec(0, n);
}

std::size_t count_mistakes(const Dataset& data, std::span<const double> w, double gamma,
                           std::size_t stop_at) {
  std::size_t count = 0;
  for (const auto& s : data.samples()) {
    if (sign_of(dot(w, s.x) - s.y * gamma) != s.y && ++count >= stop_at) break;
  }
  return count;
}

}  // namespace

GridResult opt_margin_grid(const Dataset& data, double gamma, double resolution) {
  const std::size_t d = data.dimension();
  if (d > 3) throw std::invalid_argument("grid oracle supports d <= 3, got " + std::to_string(d));
  if (data.empty()) throw std::invalid_argument("grid oracle on an empty dataset");
  if (!(resolution > 0.0 && resolution <= 1.0)) {
    throw std::invalid_argument("grid resolution must lie in (0, 1]");
  }
  const Exponent q = dual_exponent(data.p());
  const long n = static_cast<long>(std::ceil(1.0 / resolution - 1e-12));

  GridResult out;
  out.resolution = resolution;
  out.steps = static_cast<std::size_t>(n);
  out.cell_radius = q.value() == 1.0
                        ? static_cast<double>(d) / static_cast<double>(n)
                        : 2.0 * std::pow(static_cast<double>(d), 2.0 - 1.0 / q.value()) /
                              static_cast<double>(n);

  std::vector<double> zero(d, 0.0);
  std::size_t best = count_mistakes(data, zero, gamma, data.size() + 1);
  std::vector<double> best_w = zero;
  out.evaluated = 1;

  std::vector<double> w(d);
  l1_lattice(d, n, [&](const std::vector<long>& a) {
    if (best == 0) return;
    for (std::size_t j = 0; j < d; ++j) w[j] = static_cast<double>(a[j]) / static_cast<double>(n);
    if (q.value() != 1.0) {
      const double nq = lp_norm(w, q);
      for (double& v : w) v /= nq;
    }
    clamp_to_ball(w, q);
    ++out.evaluated;
    const std::size_t c = count_mistakes(data, w, gamma, best);
    if (c < best) {
      best = c;
      best_w = w;
    }
  });
  out.errors = best;
  out.rate = static_cast<double>(best) / static_cast<double>(data.size());
  out.w = Halfspace(std::move(best_w), q);
  return out;
}

MarginCertificate max_min_margin(const Dataset& data, const MarginOptions& options) {
  if (data.empty()) throw std::invalid_argument("max_min_margin on an empty dataset");
  if (!(options.tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  const auto a = signed_rows(data);
  if (data.p().is_infinite()) return linf_simplex(a, data.dimension());
  return finite_dual(a, data.dimension(), data.p(), options);
}

bool margin_feasible(const Dataset& data, double threshold, Halfspace* witness) {
  if (data.empty()) {
    if (witness) *witness = Halfspace::zero(data.dimension(), dual_exponent(data.p()));
    return true;
  }
  MarginOptions o;
  o.decide_at = threshold;
  const auto cert = max_min_margin(data, o);
  const bool ok = cert.lower >= threshold || (cert.upper >= threshold &&
                                              cert.upper - cert.lower <= 1e-12);
  if (ok && witness) *witness = cert.witness;
  return ok;
}

SubsetResult opt_margin_subset(const Dataset& data, double gamma, double tol) {
  const std::size_t m = data.size();
  if (m == 0) throw std::invalid_argument("subset oracle on an empty dataset");
  if (m > kSubsetCap) {
    throw std::invalid_argument("subset oracle supports |S| <= " + std::to_string(kSubsetCap) +
                                ", got " + std::to_string(m));
  }
  const double threshold = gamma - tol;
  SubsetResult out;
  std::vector<std::size_t> pick;
  for (std::size_t k = 0; k <= m; ++k) {
    pick.resize(k);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    for (;;) {
      Dataset rest(data.dimension(), data.p());
      std::size_t next = 0;
      for (std::size_t i = 0; i < m; ++i) {
        if (next < k && pick[next] == i) {
          ++next;
          continue;
        }
        rest.push_back(data[i]);
      }
      ++out.checked;
      Halfspace w;
      if (margin_feasible(rest, threshold, &w)) {
        out.errors = k;
        out.rate = static_cast<double>(k) / static_cast<double>(m);
        out.w = std::move(w);
        out.error_set = pick;
        return out;
      }
      // Next k-combination in lexicographic order.
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == m - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t j = i; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  }
  throw std::logic_error("subset oracle found no feasible complement");
}

}  // namespace robusthalf
