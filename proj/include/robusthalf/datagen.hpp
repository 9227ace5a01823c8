#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "robusthalf/agnostic.hpp"
#include "robusthalf/rng.hpp"
#include "robusthalf/vecspace.hpp"

namespace robusthalf {

// g / ||g||_q for a standard Gaussian g.
Halfspace random_unit_halfspace(std::size_t dimension, Exponent q, Rng& rng);

// Uniform point of B_p^d (generalized-Gaussian construction; cube for p = inf).
std::vector<double> uniform_ball_point(std::size_t dimension, Exponent p, Rng& rng);

// Point of B_p with |<w, x>| > gamma, labeled sgn(<w, x>). Draws uniformly and
// pushes near-boundary draws toward the extreme point s t of B_p, where t is
// the worst-case perturbation direction of w (<w, t> = 1).
LabeledSample margin_sample(const Halfspace& w, Exponent p, double gamma, Rng& rng,
                            std::size_t max_attempts = 1000);

enum class NoiseMode {
  uniform,   // flipped indices uniform over the sample
  boundary,  // flip the samples with the smallest |<w*, x>|
};

struct PlantedOptions {
  NoiseMode noise = NoiseMode::uniform;
  std::size_t max_attempts = 1000;
};

struct PlantedDataset {
  Dataset data;
  Halfspace w;                        // planted w*, unit q-norm
  std::vector<std::size_t> flipped;   // sorted
};

// m margin samples around a random planted w*, then round(eta m) label flips;
// err_gamma(w*) is exactly flipped.size() / m.
PlantedDataset planted_margin_dataset(std::size_t dimension, Exponent p, double gamma,
                                      std::size_t m, double eta, Rng& rng,
                                      const PlantedOptions& options = {});

// I.i.d. margin samples for w with independent label flips of rate eta.
Sampler planted_sampler(const Halfspace& w, Exponent p, double gamma, double eta,
                        std::uint64_t seed);

// Dataset file: `d p m`, then m lines `y x_1 ... x_d`. Numbers use 17
// significant digits, so the round trip is exact.
void write_dataset(std::ostream& out, const Dataset& data);
Dataset read_dataset(std::istream& in);
void write_dataset(const std::string& path, const Dataset& data);
Dataset read_dataset(const std::string& path);

// Model file: `d q`, then `w_1 ... w_d`.
void write_model(std::ostream& out, const Halfspace& w);
Halfspace read_model(std::istream& in);
void write_model(const std::string& path, const Halfspace& w);
Halfspace read_model(const std::string& path);

}  // namespace robusthalf
