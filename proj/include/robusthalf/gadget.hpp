#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "robusthalf/labelcover.hpp"
#include "robusthalf/rng.hpp"
#include "robusthalf/vecspace.hpp"

namespace robusthalf {

// Pr[X_1 + ... + X_m >= c/100 sqrt(m)] for i.i.d. Rademacher X_i. The event
// is decided in integers (10^4 s^2 >= c^2 m), the tail summed in long double.
long double rademacher_tail(std::size_t m, unsigned c_percent);

struct AntiConcentration {
  double C = 0.0;          // c_percent / 100; 0 when no grid value passes
  unsigned c_percent = 0;
  std::size_t m0 = 0;
  long double worst_tail = 0.0L;  // min over m of the tail at C
  std::size_t worst_m = 0;
};

// Largest C on the 0.01 grid in (0, 1) with tail >= 0.4 for every m in
// [m_lo, m_hi]; m0 = m_lo.
AntiConcentration anticoncentration_constant(std::size_t m_lo, std::size_t m_hi);

enum class GadgetMode { paper, desk };

struct GadgetOverrides {
  std::optional<double> C;
  std::optional<std::size_t> m0;
  std::optional<std::size_t> delta;  // desk only; required there
  std::optional<double> gamma;       // desk only
  std::optional<double> q_lc;        // desk only
};

struct GadgetParams {
  GadgetMode mode = GadgetMode::desk;
  std::size_t k = 0;
  std::size_t n = 0;
  double C = 0.0;
  std::size_t m0 = 0;
  std::size_t delta = 0;
  double gamma = 0.0;    // gamma*
  double delta_g = 0.0;  // robustness constant
  std::size_t ell = 0;
  double q_lc = 0.0;
  double eps = 0.0;      // epsilon* = 0.6 (0.25 q_lc)
  double mu = 0.0;
  std::size_t k0 = 0;    // m0 * delta
  // Paper mode records infeasibility here instead of throwing.
  std::vector<std::string> violations;

  bool feasible() const noexcept { return violations.empty(); }
};

// Paper mode: C and m0 default to anticoncentration_constant(100, 5000). Desk
// mode: delta is required, C defaults to the constant certified for m = k/delta,
// gamma and q_lc keep their formulas unless overridden; infeasible desk
// parameters throw std::invalid_argument.
GadgetParams derive_params(std::size_t k, std::size_t n, GadgetMode mode,
                           const GadgetOverrides& overrides = {});

// Mismatches between the stored parameters and their defining formulas.
std::vector<std::string> check_params(const GadgetParams& params);

enum class GadgetStep { constant_lower, constant_upper, mass_lower, exceed, negative, label_cover };

const char* step_name(GadgetStep step) noexcept;  // "1", "2", "3", "4a", "4b", "4c"

struct GadgetSample {
  std::vector<double> x;  // coordinates (U x Sigma_U) then star
  int y = 1;
  GadgetStep step = GadgetStep::constant_lower;
  std::size_t group = 0;  // j for step 4 samples
};

// |U||Sigma_U| + 1
std::size_t gadget_dimension(const LabelCoverInstance& inst) noexcept;

// Sample builders shared by the oracle and the verifier. `mid` indexes
// U x Sigma_V; `signs` is over V x Sigma_V.
std::vector<double> mass_lower_sample(const LabelCoverInstance& inst, const GadgetParams& params,
                                      const std::vector<bool>& in_t);
std::vector<double> exceed_sample(const LabelCoverInstance& inst, const GadgetParams& params,
                                  std::size_t j, const std::vector<std::size_t>& mid);
std::vector<double> negative_sample(const LabelCoverInstance& inst, const GadgetParams& params,
                                    std::size_t j, const std::vector<std::size_t>& mid);
std::vector<double> label_cover_sample(const LabelCoverInstance& inst, std::size_t j,
                                       const std::vector<int>& signs);

// One draw from the reduction's mixture.
GadgetSample draw_sample(const LabelCoverInstance& inst, const GadgetParams& params, Rng& rng);

// w*_star = 1/2, w*_(u, phi*(u)) = 1/(2k); throws unless phi* covers every v.
Halfspace intended_halfspace(const LabelCoverInstance& inst, const Labeling& phi);

inline constexpr double kMarginSlack = 1e-12;
inline constexpr std::size_t kExhaustiveSubsetCap = 2000000;

struct StepCheck {
  std::string step;
  bool passed = true;
  double worst_margin = 0.0;  // min <w, x> - gamma* over the family
  std::string witness;        // argmin sample description
  bool exhaustive = false;    // enumeration ran
  bool agrees = true;         // analytic minimum == enumerated minimum
  std::size_t enumerated = 0;
};

struct LabelCoverCheck {
  std::vector<long double> per_group;  // Pr_s[<w, s Pi^j> >= gamma*]
  long double mean = 0.0L;
  long double min = 0.0L;
  bool passed = false;  // min >= 0.4
};

struct CompletenessReport {
  std::vector<StepCheck> steps;  // 1, 2, 3, 4a, 4b
  LabelCoverCheck label_cover;
  bool deterministic_passed = false;
  double error_bound = 1.0;  // 0.25 q_lc (1 - mean) when the deterministic steps pass
  double eps = 0.0;
  bool passed = false;
  std::vector<std::string> failures;
};

// Checks an arbitrary gadget halfspace against every sample family.
CompletenessReport verify_halfspace(const LabelCoverInstance& inst, const GadgetParams& params,
                                    const Halfspace& w);
// verify_halfspace on intended_halfspace(inst, phi).
CompletenessReport verify_completeness(const LabelCoverInstance& inst, const GadgetParams& params,
                                       const Labeling& phi);

struct Diagnostics {
  double w_star = 0.0;
  bool w_star_ok = false;        // within [0.5(1 - delta_g), 0.5(1 + delta_g)]
  double negative_mass = 0.0;
  bool negative_ok = false;      // <= delta_g
  std::vector<double> mass;      // M_u
  std::vector<std::size_t> large;  // U_large, M_u > 1/k
  bool size_ok = false;          // |U_large| <= 2 delta_g k
  double large_mass = 0.0;
  bool mass_ok = false;          // <= 2 delta_g
};

Diagnostics diagnostics(const LabelCoverInstance& inst, const Halfspace& w,
                        const GadgetParams& params);

// Zeroes U_large, draws phi(u) proportionally to |w_(u, .)| on U_small with
// M_u > 0, label 0 elsewhere.
Labeling decode(const LabelCoverInstance& inst, const Halfspace& w, Rng& rng);

struct NoMarginReduction {
  Dataset data;
  double eps = 0.0;
  std::size_t heavy = 0;  // ceil(alpha m + 1)
  double gamma = 0.5;
};

// (x, y) -> (x o y, y) plus ceil(alpha m + 1) copies of ((1, ..., 1, 0), +1).
NoMarginReduction reduce_no_margin(const Dataset& data, double eps, double alpha);

// (0.5 w / ||w||_1) o 0.5 for a nonnegative nonzero w.
Halfspace lift_no_margin(const std::vector<double>& w);

}  // namespace robusthalf
