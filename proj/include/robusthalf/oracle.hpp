#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "robusthalf/vecspace.hpp"

namespace robusthalf {

// Ground-truth opt_gamma^S for desk-scale datasets.

struct GridResult {
  double rate = 1.0;
  std::size_t errors = 0;
  Halfspace w;
  double resolution = 0.0;
  std::size_t steps = 0;     // N: lattice step 1/N on the L1 sphere
  double cell_radius = 0.0;  // any unit-q vector is within this q-distance of the grid
  std::size_t evaluated = 0;
};

// Scans w = 0 and the unit q-sphere through a lattice of the L1 sphere with
// N = ceil(1/resolution). Because the grid sits inside B_q,
//   opt(gamma) <= rate <= opt(gamma + cell_radius * max ||x||_p).
GridResult opt_margin_grid(const Dataset& data, double gamma, double resolution);

// Iteration cap hit before the bound pair closed.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double lower, double upper)
      : std::runtime_error(what), lower(lower), upper(upper) {}
  double lower;
  double upper;
};

struct MarginOptions {
  double tol = 1e-6;
  // Stop as soon as the pair decides value >= decide_at either way.
  std::optional<double> decide_at;
  std::size_t starts = 8;
  std::size_t iterations_per_start = 20000;
  std::uint64_t seed = 0x5eed;
};

// lower <= max_{||w||_q <= 1} min_i y_i <w, x_i> <= upper, with `witness`
// attaining `lower`. The value is the p-norm distance from 0 to
// conv{y_i x_i}, so it is never negative.
struct MarginCertificate {
  double lower = 0.0;
  double upper = 0.0;
  Halfspace witness;
  std::size_t iterations = 0;
  double value() const noexcept { return lower; }
};

// p = inf: exact simplex over (w+, w-, t). Finite p: accelerated projected
// gradient on the dual (min over the simplex of ||sum lambda_i y_i x_i||_p).
MarginCertificate max_min_margin(const Dataset& data, const MarginOptions& options = {});

// True iff some ||w||_q <= 1 reaches margin >= threshold on every sample.
bool margin_feasible(const Dataset& data, double threshold, Halfspace* witness = nullptr);

inline constexpr std::size_t kSubsetCap = 24;

struct SubsetResult {
  double rate = 1.0;
  std::size_t errors = 0;
  Halfspace w;
  std::vector<std::size_t> error_set;  // indices into the dataset
  std::size_t checked = 0;
};

// Exact opt up to `tol` on the margin boundary: smallest error set (then
// lexicographically first) whose complement is feasible at gamma - tol.
SubsetResult opt_margin_subset(const Dataset& data, double gamma, double tol = 1e-6);

}  // namespace robusthalf
