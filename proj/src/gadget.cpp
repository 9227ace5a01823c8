#include "robusthalf/gadget.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace robusthalf {

namespace {

// log pmf of Binomial(m, 1/2) for K = 0..m by the ratio recurrence.
std::vector<long double> binomial_half_pmf(std::size_t m) {
  std::vector<long double> pmf(m + 1);
  long double logc = 0.0L;
  const long double log_half_m = static_cast<long double>(m) * std::log(2.0L);
  for (std::size_t k = 0; k <= m; ++k) {
    pmf[k] = std::exp(logc - log_half_m);
    if (k < m) {
      logc += std::log(static_cast<long double>(m - k)) - std::log(static_cast<long double>(k + 1));
    }
  }
  return pmf;
}

// Smallest K with s = 2K - m >= 0 and 10^4 s^2 >= c^2 m.
std::size_t tail_start(std::size_t m, unsigned c) {
  const unsigned long long cm = static_cast<unsigned long long>(c) * c * m;
  for (std::size_t k = (m + 1) / 2; k <= m; ++k) {
    const unsigned long long s = 2 * k - m;
    if (10000ULL * s * s >= cm) return k;
  }
  return m + 1;
}

std::vector<long double> suffix_sums(const std::vector<long double>& pmf) {
  std::vector<long double> tail(pmf.size() + 1, 0.0L);
  for (std::size_t k = pmf.size(); k-- > 0;) tail[k] = tail[k + 1] + pmf[k];
  return tail;
}

bool near(double a, double b, double rel = 1e-12) {
  return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

std::size_t ceil_rel(double x) {
  // ceil that ignores round-off just above an integer but keeps tiny x > 0 at 1.
  return static_cast<std::size_t>(std::ceil(x * (1.0 - 1e-12)));
}

std::vector<std::size_t> group_edges(const LabelCoverInstance& inst, std::size_t j) {
  std::vector<std::size_t> e(inst.k());
  for (std::size_t u = 0; u < inst.k(); ++u) e[u] = inst.edge_of(u, j);
  return e;
}

// e_S Pi_hat^j as a 0/1 vector over U x Sigma_U.
std::vector<double> hat_image(const LabelCoverInstance& inst, std::size_t j,
                              const std::vector<std::size_t>& mid) {
  std::vector<char> in_s(inst.k() * inst.sigma_v(), 0);
  for (std::size_t idx : mid) {
    if (idx >= in_s.size()) throw std::out_of_range("subset index outside U x Sigma_V");
    in_s[idx] = 1;
  }
  std::vector<double> out(inst.k() * inst.sigma_u(), 0.0);
  for (std::size_t u = 0; u < inst.k(); ++u) {
    const auto& ed = inst.edges()[inst.edge_of(u, j)];
    for (std::size_t s = 0; s < inst.sigma_u(); ++s) {
      if (in_s[inst.mid_coord(u, ed.pi[s])]) out[inst.left_coord(u, s)] = 1.0;
    }
  }
  return out;
}

std::string describe_set(const char* name, const std::vector<std::size_t>& items) {
  std::ostringstream os;
  os << name << "={";
  for (std::size_t i = 0; i < items.size(); ++i) os << (i ? "," : "") << items[i];
  os << "}";
  return os.str();
}

// Calls visit(subset) for all subsets of {0..n-1} of size <= cap, by size then
// lexicographically.
template <class F>
void for_small_subsets(std::size_t n, std::size_t cap, F&& visit) {
  std::vector<std::size_t> pick;
  for (std::size_t k = 0; k <= std::min(cap, n); ++k) {
    pick.resize(k);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    for (;;) {
      visit(pick);
      std::size_t i = k;
      while (i > 0 && pick[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++pick[i - 1];
      for (std::size_t t = i; t < k; ++t) pick[t] = pick[t - 1] + 1;
    }
  }
}

double subsets_up_to(std::size_t n, std::size_t cap) {
  double total = 0.0;
  double c = 1.0;
  for (std::size_t s = 0; s <= std::min(cap, n); ++s) {
    total += c;
    c = c * static_cast<double>(n - s) / static_cast<double>(s + 1);
  }
  return total;
}

}  // namespace

long double rademacher_tail(std::size_t m, unsigned c_percent) {
  if (m == 0) throw std::invalid_argument("rademacher_tail needs m >= 1");
  const auto pmf = binomial_half_pmf(m);
  const std::size_t start = tail_start(m, c_percent);
  long double tail = 0.0L;
  for (std::size_t k = m + 1; k-- > start;) tail += pmf[k];
  return tail;
}

AntiConcentration anticoncentration_constant(std::size_t m_lo, std::size_t m_hi) {
  if (m_lo < 1 || m_hi < m_lo) throw std::invalid_argument("need 1 <= m_lo <= m_hi");
  unsigned best = 99;
  for (std::size_t m = m_lo; m <= m_hi && best > 0; ++m) {
    const auto tail = suffix_sums(binomial_half_pmf(m));
    while (best > 0 && tail[tail_start(m, best)] < 0.4L) --best;
  }
  AntiConcentration out;
  out.c_percent = best;
  out.C = best / 100.0;
  out.m0 = m_lo;
  if (best == 0) return out;
  out.worst_tail = 2.0L;
  for (std::size_t m = m_lo; m <= m_hi; ++m) {
    const auto tail = suffix_sums(binomial_half_pmf(m));
    const long double t = tail[tail_start(m, best)];
    if (t < out.worst_tail) {
      out.worst_tail = t;
      out.worst_m = m;
    }
  }
  return out;
}

GadgetParams derive_params(std::size_t k, std::size_t n, GadgetMode mode,
                           const GadgetOverrides& ov) {
  if (k < 2) throw std::invalid_argument("gadget needs k >= 2");
  if (n < 1) throw std::invalid_argument("gadget needs n >= 1");
  GadgetParams p;
  p.mode = mode;
  p.k = k;
  p.n = n;
  const double kd = static_cast<double>(k);

  if (mode == GadgetMode::paper) {
    if (ov.delta || ov.gamma || ov.q_lc) {
      throw std::invalid_argument("paper mode does not accept delta, gamma or q_lc overrides");
    }
    if (ov.C && ov.m0) {
      p.C = *ov.C;
      p.m0 = *ov.m0;
    } else {
      const auto ac = anticoncentration_constant(100, 5000);
      p.C = ov.C.value_or(ac.C);
      p.m0 = ov.m0.value_or(ac.m0);
    }
    if (!(p.C > 0.0 && p.C < 1.0)) throw std::invalid_argument("C must lie in (0, 1)");
    p.delta = ceil_rel(1e4 / (p.C * p.C));
    p.gamma = 0.5 * p.C * std::sqrt(static_cast<double>(p.delta) / kd);
    p.k0 = p.m0 * p.delta;
    p.delta_g = std::pow(0.1 / static_cast<double>(p.delta), 4.0);
    p.ell = ceil_rel(p.delta_g * std::sqrt(kd));
    p.q_lc = 0.001 / std::pow(static_cast<double>(n), static_cast<double>(p.ell));
    p.eps = 0.6 * (0.25 * p.q_lc);
    p.mu = 0.01 / (static_cast<double>(p.delta) * static_cast<double>(p.delta - 1));
    if (k < p.k0) {
      p.violations.push_back("k = " + std::to_string(k) + " is below k0 = m0 * Delta = " +
                             std::to_string(p.k0));
    }
    if (k % p.delta != 0) {
      p.violations.push_back("Delta = " + std::to_string(p.delta) + " does not divide k");
    }
    if (!(p.gamma < 0.5)) p.violations.push_back("gamma* >= 0.5");
    if (static_cast<double>(p.ell) / kd + 2.0 * p.gamma > 1.0) {
      p.violations.push_back("l/k + 2 gamma* > 1: step 4a samples leave B_inf");
    }
    if (!(p.q_lc > 0.0)) p.violations.push_back("q_lc = 0.001 / n^l underflows");
    return p;
  }

  if (!ov.delta) throw std::invalid_argument("desk mode requires an explicit Delta");
  p.delta = *ov.delta;
  if (p.delta < 2) throw std::invalid_argument("desk mode needs Delta >= 2");
  if (k % p.delta != 0) {
    throw std::invalid_argument("Delta = " + std::to_string(p.delta) + " must divide k = " +
                                std::to_string(k));
  }
  const std::size_t groups = k / p.delta;
  if (ov.C) {
    p.C = *ov.C;
    p.m0 = ov.m0.value_or(groups);
  } else {
    const auto ac = anticoncentration_constant(groups, groups);
    p.C = ac.C;
    p.m0 = ov.m0.value_or(ac.m0);
  }
  if (!ov.gamma && !(p.C > 0.0 && p.C < 1.0)) {
    throw std::invalid_argument("no anti-concentration constant C in (0, 1) is certified for m = k/Delta = " +
                                std::to_string(groups) + "; override C or gamma");
  }
  p.gamma = ov.gamma.value_or(0.5 * p.C * std::sqrt(static_cast<double>(p.delta) / kd));
  if (!(p.gamma > 0.0 && p.gamma < 0.5)) {
    throw std::invalid_argument("gamma* must lie in (0, 0.5), got " + std::to_string(p.gamma));
  }
  p.k0 = p.m0 * p.delta;
  p.delta_g = std::pow(0.1 / static_cast<double>(p.delta), 4.0);
  p.ell = ceil_rel(p.delta_g * std::sqrt(kd));
  p.q_lc = ov.q_lc.value_or(0.001 / std::pow(static_cast<double>(n), static_cast<double>(p.ell)));
  if (!(p.q_lc > 0.0 && p.q_lc < 1.0)) throw std::invalid_argument("q_lc must lie in (0, 1)");
  p.eps = 0.6 * (0.25 * p.q_lc);
  p.mu = 0.01 / (static_cast<double>(p.delta) * static_cast<double>(p.delta - 1));
  if (static_cast<double>(p.ell) / kd + 2.0 * p.gamma > 1.0) {
    throw std::invalid_argument("l/k + 2 gamma* > 1: step 4a samples would leave B_inf");
  }
  return p;
}

std::vector<std::string> check_params(const GadgetParams& p) {
  std::vector<std::string> bad;
  const double kd = static_cast<double>(p.k);
  const double dd = static_cast<double>(p.delta);
  auto expect = [&](bool ok, const std::string& what) {
    if (!ok) bad.push_back(what);
  };
  if (p.mode == GadgetMode::paper) {
    expect(p.delta == ceil_rel(1e4 / (p.C * p.C)), "Delta != ceil(10^4 / C^2)");
    expect(near(p.gamma, 0.5 * p.C * std::sqrt(dd / kd)), "gamma* != 0.5 C sqrt(Delta/k)");
    expect(near(p.q_lc, 0.001 / std::pow(static_cast<double>(p.n), static_cast<double>(p.ell))),
           "q_lc != 0.001 / n^l");
  }
  expect(p.k0 == p.m0 * p.delta, "k0 != m0 Delta");
  expect(near(p.delta_g, std::pow(0.1 / dd, 4.0)), "delta != (0.1/Delta)^4");
  expect(p.ell == ceil_rel(p.delta_g * std::sqrt(kd)), "l != ceil(delta sqrt(k))");
  expect(near(p.eps, 0.6 * (0.25 * p.q_lc)), "eps* != 0.6 (0.25 q_lc)");
  expect(near(p.mu, 0.01 / (dd * (dd - 1.0))), "mu != 0.01 / (Delta (Delta - 1))");
  return bad;
}

const char* step_name(GadgetStep step) noexcept {
  switch (step) {
    case GadgetStep::constant_lower: return "1";
    case GadgetStep::constant_upper: return "2";
    case GadgetStep::mass_lower: return "3";
    case GadgetStep::exceed: return "4a";
    case GadgetStep::negative: return "4b";
    case GadgetStep::label_cover: return "4c";
  }
  return "?";
}

std::size_t gadget_dimension(const LabelCoverInstance& inst) noexcept {
  return inst.k() * inst.sigma_u() + 1;
}

std::vector<double> mass_lower_sample(const LabelCoverInstance& inst, const GadgetParams& params,
                                      const std::vector<bool>& in_t) {
  if (in_t.size() != inst.k()) throw std::invalid_argument("T must be a mask over U");
  std::vector<double> x(gadget_dimension(inst), 0.0);
  std::size_t size = 0;
  for (std::size_t u = 0; u < inst.k(); ++u) {
    if (!in_t[u]) continue;
    ++size;
    for (std::size_t s = 0; s < inst.sigma_u(); ++s) x[inst.left_coord(u, s)] = 1.0;
  }
  x.back() = -(static_cast<double>(size) / static_cast<double>(inst.k()) - 2.0 * params.gamma);
  return x;
}

std::vector<double> exceed_sample(const LabelCoverInstance& inst, const GadgetParams& params,
                                  std::size_t j, const std::vector<std::size_t>& mid) {
  auto img = hat_image(inst, j, mid);
  std::vector<double> x(gadget_dimension(inst), 0.0);
  for (std::size_t i = 0; i < img.size(); ++i) x[i] = -img[i];
  x.back() = static_cast<double>(mid.size()) / static_cast<double>(inst.k()) + 2.0 * params.gamma;
  return x;
}

std::vector<double> negative_sample(const LabelCoverInstance& inst, const GadgetParams& params,
                                    std::size_t j, const std::vector<std::size_t>& mid) {
  auto img = hat_image(inst, j, mid);
  std::vector<double> x(gadget_dimension(inst), 0.0);
  std::copy(img.begin(), img.end(), x.begin());
  x.back() = 2.0 * params.gamma;
  return x;
}

std::vector<double> label_cover_sample(const LabelCoverInstance& inst, std::size_t j,
                                       const std::vector<int>& signs) {
  if (signs.size() != inst.right_count() * inst.sigma_v()) {
    throw std::invalid_argument("sign vector must cover V x Sigma_V");
  }
  std::vector<double> x(gadget_dimension(inst), 0.0);
  for (std::size_t u = 0; u < inst.k(); ++u) {
    const auto& ed = inst.edges()[inst.edge_of(u, j)];
    for (std::size_t s = 0; s < inst.sigma_u(); ++s) {
      x[inst.left_coord(u, s)] = signs[inst.right_coord(ed.v, ed.pi[s])];
    }
  }
  return x;
}

GadgetSample draw_sample(const LabelCoverInstance& inst, const GadgetParams& params, Rng& rng) {
  GadgetSample out;
  const std::size_t d = gadget_dimension(inst);
  switch (rng.below(4)) {
    case 0:
      out.step = GadgetStep::constant_lower;
      out.x.assign(d, 0.0);
      out.x.back() = 2.0 * params.gamma;
      return out;
    case 1:
      out.step = GadgetStep::constant_upper;
      out.x.assign(d, 2.0 * params.gamma);
      out.x.back() = 0.0;
      return out;
    case 2: {
      out.step = GadgetStep::mass_lower;
      std::vector<bool> in_t(inst.k());
      for (std::size_t u = 0; u < inst.k(); ++u) in_t[u] = rng.coin();
      out.x = mass_lower_sample(inst, params, in_t);
      return out;
    }
    default:
      break;
  }
  out.group = rng.below(inst.groups());
  const double r = rng.uniform();
  if (r < 1.0 - params.q_lc) {
    const std::size_t total = inst.k() * inst.sigma_v();
    const std::size_t size = rng.below(std::min(params.ell, total) + 1);
    // Floyd's sampler: a uniform subset of the given size.
    std::set<std::size_t> chosen;
    for (std::size_t i = total - size; i < total; ++i) {
      const std::size_t t = rng.below(i + 1);
      if (!chosen.insert(t).second) chosen.insert(i);
    }
    const std::vector<std::size_t> mid(chosen.begin(), chosen.end());
    if (r < 0.5 * (1.0 - params.q_lc)) {
      out.step = GadgetStep::exceed;
      out.x = exceed_sample(inst, params, out.group, mid);
    } else {
      out.step = GadgetStep::negative;
      out.x = negative_sample(inst, params, out.group, mid);
    }
    return out;
  }
  out.step = GadgetStep::label_cover;
  std::vector<int> signs(inst.right_count() * inst.sigma_v());
  for (auto& s : signs) s = rng.sign();
  out.x = label_cover_sample(inst, out.group, signs);
  return out;
}

Halfspace intended_halfspace(const LabelCoverInstance& inst, const Labeling& phi) {
  if (value(inst, phi) != 1.0) {
    throw std::invalid_argument("intended halfspace needs a labeling that covers every right vertex");
  }
  std::vector<double> w(gadget_dimension(inst), 0.0);
  const double share = 1.0 / (2.0 * static_cast<double>(inst.k()));
  for (std::size_t u = 0; u < inst.k(); ++u) w[inst.left_coord(u, phi[u])] = share;
  w.back() = 0.5;
  return Halfspace(std::move(w), Exponent(1.0));
}

namespace {

StepCheck check_constant(const char* name, const std::vector<double>& x, const Halfspace& w,
                         double gamma) {
  StepCheck c;
  c.step = name;
  c.worst_margin = dot(w.view(), x) - gamma;
  c.passed = c.worst_margin >= -kMarginSlack;
  c.witness = "the unique sample";
  return c;
}

StepCheck check_mass_lower(const LabelCoverInstance& inst, const GadgetParams& params,
                           const Halfspace& w) {
  const auto& wv = w.weights();
  const double ws = wv.back();
  const double kd = static_cast<double>(inst.k());
  StepCheck c;
  c.step = "3";
  double analytic = 2.0 * params.gamma * ws - params.gamma;
  std::vector<std::size_t> worst_t;
  for (std::size_t u = 0; u < inst.k(); ++u) {
    double signed_mass = 0.0;
    for (std::size_t s = 0; s < inst.sigma_u(); ++s) signed_mass += wv[inst.left_coord(u, s)];
    const double term = signed_mass - ws / kd;
    if (term < 0.0) {
      analytic += term;
      worst_t.push_back(u);
    }
  }
  c.worst_margin = analytic;
  c.witness = describe_set("T", worst_t);
  if (inst.k() <= 20) {
    c.exhaustive = true;
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_mask = 0;
    std::vector<bool> in_t(inst.k());
    for (std::size_t mask = 0; mask < (std::size_t{1} << inst.k()); ++mask) {
      for (std::size_t u = 0; u < inst.k(); ++u) in_t[u] = (mask >> u) & 1;
      const double margin = dot(wv, mass_lower_sample(inst, params, in_t)) - params.gamma;
      ++c.enumerated;
      if (margin < best) {
        best = margin;
        best_mask = mask;
      }
    }
    c.agrees = std::abs(best - analytic) <= 1e-10;
    if (best < c.worst_margin) {
      std::vector<std::size_t> t;
      for (std::size_t u = 0; u < inst.k(); ++u) {
        if ((best_mask >> u) & 1) t.push_back(u);
      }
      c.worst_margin = best;
      c.witness = describe_set("T", t);
    }
  }
  c.passed = c.worst_margin >= -kMarginSlack && c.agrees;
  return c;
}

// Steps 4a (exceed) and 4b (negative) over every group.
StepCheck check_subset_family(const LabelCoverInstance& inst, const GadgetParams& params,
                              const Halfspace& w, bool exceed) {
  const auto& wv = w.weights();
  const double ws = wv.back();
  const double kd = static_cast<double>(inst.k());
  const std::size_t total = inst.k() * inst.sigma_v();
  StepCheck c;
  c.step = exceed ? "4a" : "4b";
  c.worst_margin = std::numeric_limits<double>::infinity();
  const bool enumerate = subsets_up_to(total, params.ell) * inst.groups() <= kExhaustiveSubsetCap;
  c.exhaustive = enumerate;
  for (std::size_t j = 0; j < inst.groups(); ++j) {
    // h = w (Pi_hat^j)^T over U x Sigma_V
    std::vector<double> h(total, 0.0);
    const auto edges = group_edges(inst, j);
    for (std::size_t u = 0; u < inst.k(); ++u) {
      const auto& ed = inst.edges()[edges[u]];
      for (std::size_t s = 0; s < inst.sigma_u(); ++s) {
        h[inst.mid_coord(u, ed.pi[s])] += wv[inst.left_coord(u, s)];
      }
    }
    std::vector<std::pair<double, std::size_t>> terms(total);
    for (std::size_t i = 0; i < total; ++i) terms[i] = {exceed ? ws / kd - h[i] : h[i], i};
    std::sort(terms.begin(), terms.end());
    double analytic = 2.0 * params.gamma * ws - params.gamma;
    std::vector<std::size_t> worst_s;
    for (std::size_t i = 0; i < std::min(params.ell, total) && terms[i].first < 0.0; ++i) {
      analytic += terms[i].first;
      worst_s.push_back(terms[i].second);
    }
    std::sort(worst_s.begin(), worst_s.end());
    if (analytic < c.worst_margin) {
      c.worst_margin = analytic;
      c.witness = "j=" + std::to_string(j) + " " + describe_set("S", worst_s);
    }
    if (enumerate) {
      double best = std::numeric_limits<double>::infinity();
      std::vector<std::size_t> best_s;
      for_small_subsets(total, params.ell, [&](const std::vector<std::size_t>& s) {
        const auto x = exceed ? exceed_sample(inst, params, j, s) : negative_sample(inst, params, j, s);
        const double margin = dot(wv, x) - params.gamma;
        ++c.enumerated;
        if (margin < best) {
          best = margin;
          best_s = s;
        }
      });
      if (std::abs(best - analytic) > 1e-10) c.agrees = false;
      if (best < c.worst_margin) {
        c.worst_margin = best;
        c.witness = "j=" + std::to_string(j) + " " + describe_set("S", best_s);
      }
    }
  }
  c.passed = c.worst_margin >= -kMarginSlack && c.agrees;
  return c;
}

// Pr_s[<g, s> >= threshold] over uniform signs on the support of g.
long double sign_probability(const std::vector<double>& g, double threshold, bool& ok) {
  std::vector<double> nz;
  for (double v : g) {
    if (v != 0.0) nz.push_back(v);
  }
  ok = true;
  if (nz.empty()) return threshold <= 0.0 ? 1.0L : 0.0L;
  if (nz.size() <= 24) {
    const std::size_t patterns = std::size_t{1} << nz.size();
    std::size_t hits = 0;
    for (std::size_t mask = 0; mask < patterns; ++mask) {
      double sum = 0.0;
      for (std::size_t i = 0; i < nz.size(); ++i) sum += ((mask >> i) & 1) ? nz[i] : -nz[i];
      if (sum >= threshold) ++hits;
    }
    return static_cast<long double>(hits) / static_cast<long double>(patterns);
  }
  const double a = std::abs(nz[0]);
  for (double v : nz) {
    if (!near(std::abs(v), a)) {
      ok = false;
      return 0.0L;
    }
  }
  const std::size_t m = nz.size();
  const auto pmf = binomial_half_pmf(m);
  long double tail = 0.0L;
  for (std::size_t k = 0; k <= m; ++k) {
    const double s = 2.0 * static_cast<double>(k) - static_cast<double>(m);
    if (a * s >= threshold) tail += pmf[k];
  }
  return tail;
}

}  // namespace

CompletenessReport verify_halfspace(const LabelCoverInstance& inst, const GadgetParams& params,
                                    const Halfspace& w) {
  if (w.dimension() != gadget_dimension(inst)) {
    throw std::invalid_argument("halfspace dimension does not match the gadget");
  }
  if (!same_exponent(w.q(), Exponent(1.0))) {
    throw std::invalid_argument("gadget halfspaces live in B_1 (q = 1)");
  }
  const auto problems = validate(inst);
  if (!problems.empty()) {
    throw std::invalid_argument("invalid label cover instance: " + problems.front());
  }
  CompletenessReport r;
  r.eps = params.eps;
  const std::size_t d = gadget_dimension(inst);

  std::vector<double> x1(d, 0.0);
  x1.back() = 2.0 * params.gamma;
  std::vector<double> x2(d, 2.0 * params.gamma);
  x2.back() = 0.0;
  r.steps.push_back(check_constant("1", x1, w, params.gamma));
  r.steps.push_back(check_constant("2", x2, w, params.gamma));
  r.steps.push_back(check_mass_lower(inst, params, w));
  r.steps.push_back(check_subset_family(inst, params, w, true));
  r.steps.push_back(check_subset_family(inst, params, w, false));
  r.deterministic_passed = true;
  for (const auto& s : r.steps) {
    if (!s.passed) {
      r.deterministic_passed = false;
      std::ostringstream os;
      os << "step " << s.step << ": worst margin " << s.worst_margin << " at " << s.witness;
      if (!s.agrees) os << " (analytic and enumerated minima disagree)";
      r.failures.push_back(os.str());
    }
  }

  const auto& wv = w.weights();
  auto& lc = r.label_cover;
  lc.min = 1.0L;
  bool all_ok = true;
  for (std::size_t j = 0; j < inst.groups(); ++j) {
    std::vector<double> g(inst.right_count() * inst.sigma_v(), 0.0);
    for (std::size_t u = 0; u < inst.k(); ++u) {
      const auto& ed = inst.edges()[inst.edge_of(u, j)];
      for (std::size_t s = 0; s < inst.sigma_u(); ++s) {
        g[inst.right_coord(ed.v, ed.pi[s])] += wv[inst.left_coord(u, s)];
      }
    }
    bool ok = true;
    const long double pr = sign_probability(g, params.gamma - kMarginSlack, ok);
    if (!ok) {
      all_ok = false;
      r.failures.push_back("step 4c: group " + std::to_string(j) +
                           " has too many unequal coordinates to enumerate");
    }
    lc.per_group.push_back(pr);
    lc.mean += pr;
    lc.min = std::min(lc.min, pr);
  }
  lc.mean /= static_cast<long double>(inst.groups());
  lc.passed = all_ok && lc.min >= 0.4L;
  if (all_ok && !lc.passed) {
    std::ostringstream os;
    os << "step 4c: Pr[margin >= gamma*] = " << static_cast<double>(lc.min) << " < 0.4";
    r.failures.push_back(os.str());
  }
  if (r.deterministic_passed && all_ok) {
    r.error_bound = static_cast<double>(0.25L * params.q_lc * (1.0L - lc.mean));
  }
  r.passed = r.deterministic_passed && lc.passed && r.error_bound <= r.eps * (1.0 + 1e-12);
  return r;
}

CompletenessReport verify_completeness(const LabelCoverInstance& inst, const GadgetParams& params,
                                       const Labeling& phi) {
  return verify_halfspace(inst, params, intended_halfspace(inst, phi));
}

Diagnostics diagnostics(const LabelCoverInstance& inst, const Halfspace& w,
                        const GadgetParams& params) {
  if (w.dimension() != gadget_dimension(inst)) {
    throw std::invalid_argument("halfspace dimension does not match the gadget");
  }
  const auto& wv = w.weights();
  const double kd = static_cast<double>(inst.k());
  const double dg = params.delta_g;
  Diagnostics out;
  out.w_star = wv.back();
  out.w_star_ok = out.w_star >= 0.5 * (1.0 - dg) && out.w_star <= 0.5 * (1.0 + dg);
  for (double v : wv) {
    if (v < 0.0) out.negative_mass -= v;
  }
  out.negative_ok = out.negative_mass <= dg;
  out.mass.assign(inst.k(), 0.0);
  for (std::size_t u = 0; u < inst.k(); ++u) {
    for (std::size_t s = 0; s < inst.sigma_u(); ++s) out.mass[u] += std::abs(wv[inst.left_coord(u, s)]);
    if (out.mass[u] > 1.0 / kd) {
      out.large.push_back(u);
      out.large_mass += out.mass[u];
    }
  }
  out.size_ok = static_cast<double>(out.large.size()) <= 2.0 * dg * kd;
  out.mass_ok = out.large_mass <= 2.0 * dg;
  return out;
}

Labeling decode(const LabelCoverInstance& inst, const Halfspace& w, Rng& rng) {
  if (w.dimension() != gadget_dimension(inst)) {
    throw std::invalid_argument("halfspace dimension does not match the gadget");
  }
  const auto& wv = w.weights();
  const double kd = static_cast<double>(inst.k());
  Labeling phi(inst.k(), 0);
  for (std::size_t u = 0; u < inst.k(); ++u) {
    double mass = 0.0;
    for (std::size_t s = 0; s < inst.sigma_u(); ++s) mass += std::abs(wv[inst.left_coord(u, s)]);
    if (mass > 1.0 / kd || mass == 0.0) continue;
    const double r = rng.uniform() * mass;
    double cum = 0.0;
    std::size_t pick = inst.sigma_u();
    std::size_t last_nonzero = 0;
    for (std::size_t s = 0; s < inst.sigma_u(); ++s) {
      const double a = std::abs(wv[inst.left_coord(u, s)]);
      if (a == 0.0) continue;
      last_nonzero = s;
      cum += a;
      if (cum > r) {
        pick = s;
        break;
      }
    }
    phi[u] = pick < inst.sigma_u() ? pick : last_nonzero;
  }
  return phi;
}

NoMarginReduction reduce_no_margin(const Dataset& data, double eps, double alpha) {
  if (!data.p().is_infinite()) throw std::invalid_argument("no-margin reduction needs p = inf");
  if (data.empty()) throw std::invalid_argument("no-margin reduction of an empty dataset");
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha must exceed 1");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const std::size_t m = data.size();
  const auto heavy = static_cast<std::size_t>(
      std::ceil(alpha * static_cast<double>(m) + 1.0 - 1e-9));
  Dataset out(data.dimension() + 1, Exponent::infinity());
  for (const auto& s : data.samples()) {
    LabeledSample t{s.x, s.y};
    t.x.push_back(static_cast<double>(s.y));
    out.push_back(std::move(t));
  }
  LabeledSample h{std::vector<double>(data.dimension() + 1, 1.0), 1};
  h.x.back() = 0.0;
  for (std::size_t i = 0; i < heavy; ++i) out.push_back(h);
  const double scaled = eps * static_cast<double>(m) / static_cast<double>(m + heavy);
  return NoMarginReduction{std::move(out), scaled, heavy, 0.5};
}

Halfspace lift_no_margin(const std::vector<double>& w) {
  double l1 = 0.0;
  for (double v : w) {
    if (v < 0.0) throw std::invalid_argument("lift needs a nonnegative halfspace");
    l1 += v;
  }
  if (!(l1 > 0.0)) throw std::invalid_argument("lift needs a nonzero halfspace");
  std::vector<double> out(w.size() + 1);
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = 0.5 * w[i] / l1;
  out.back() = 0.5;
  return Halfspace(std::move(out), Exponent(1.0));
}

}  // namespace robusthalf
