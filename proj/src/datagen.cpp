#include "robusthalf/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>

namespace robusthalf {

Halfspace random_unit_halfspace(std::size_t dimension, Exponent q, Rng& rng) {
  if (dimension == 0) throw std::invalid_argument("dimension must be >= 1");
  for (;;) {
    std::vector<double> g(dimension);
    for (double& v : g) v = rng.normal();
    const double n = lp_norm(g, q);
    if (!(n > 0.0)) continue;
    for (double& v : g) v /= n;
    return Halfspace(std::move(g), q);
  }
}

std::vector<double> uniform_ball_point(std::size_t dimension, Exponent p, Rng& rng) {
  if (dimension == 0) throw std::invalid_argument("dimension must be >= 1");
  std::vector<double> x(dimension);
  if (p.is_infinite()) {
    for (double& v : x) v = rng.uniform(-1.0, 1.0);
    return x;
  }
  const double pv = p.value();
  std::gamma_distribution<double> gamma(1.0 / pv, 1.0);
  std::exponential_distribution<double> expo(1.0);
  double acc = 0.0;
  for (double& v : x) {
    const double g = gamma(rng.engine());
    v = rng.sign() * std::pow(g, 1.0 / pv);
    acc += g;  // |v|^p
  }
  const double scale = std::pow(acc + expo(rng.engine()), 1.0 / pv);
  for (double& v : x) v /= scale;
  return x;
}

namespace {

// t_i = sgn(w_i)|w_i|^(q-1), zero where w_i = 0; unit p-norm, <w, t> = 1.
std::vector<double> push_direction(const Halfspace& w) {
  const double q = w.q().value();
  std::vector<double> t(w.dimension(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double wi = w.weights()[i];
    if (wi == 0.0) continue;
    t[i] = (wi > 0 ? 1.0 : -1.0) * (q == 1.0 ? 1.0 : std::pow(std::abs(wi), q - 1.0));
  }
  return t;
}

}  // namespace

LabeledSample margin_sample(const Halfspace& w, Exponent p, double gamma, Rng& rng,
                            std::size_t max_attempts) {
  if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in [0, 1)");
  if (!same_exponent(w.q(), dual_exponent(p))) {
    throw std::invalid_argument("planted halfspace exponent is not dual to p");
  }
  const auto t = push_direction(w);
  const double m_ext = dot(w.view(), t);
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    auto x = uniform_ball_point(w.dimension(), p, rng);
    double m = dot(w.view(), x);
    if (std::abs(m) <= gamma && gamma > 0.0) {
      // Reflect |m| to gamma + min(gamma, 1 - gamma)(gamma - |m|)/gamma along
      // a convex combination with the extreme point s t, which stays in B_p.
      const int s = sign_of(m);
      const double a = std::abs(m);
      const double target = gamma + std::min(gamma, 1.0 - gamma) * (gamma - a) / gamma;
      const double lambda = (target - a) / (m_ext - a);
      if (!(lambda > 0.0 && lambda <= 1.0)) continue;
      for (std::size_t i = 0; i < x.size(); ++i) x[i] = (1.0 - lambda) * x[i] + lambda * s * t[i];
      if (lp_norm(x, p) > 1.0) continue;
      m = dot(w.view(), x);
    }
    if (std::abs(m) > gamma) return LabeledSample{std::move(x), sign_of(m)};
  }
  throw std::runtime_error("margin sampler exceeded " + std::to_string(max_attempts) +
                           " attempts; gamma is too large for this (d, p)");
}

PlantedDataset planted_margin_dataset(std::size_t dimension, Exponent p, double gamma,
                                      std::size_t m, double eta, Rng& rng,
                                      const PlantedOptions& options) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0, 1)");
  if (!(eta >= 0.0 && eta < 0.5)) throw std::invalid_argument("eta must lie in [0, 1/2)");
  auto w = random_unit_halfspace(dimension, dual_exponent(p), rng);
  std::vector<LabeledSample> samples;
  samples.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    samples.push_back(margin_sample(w, p, gamma, rng, options.max_attempts));
  }
  const auto flips =
      static_cast<std::size_t>(std::llround(eta * static_cast<double>(m)));
  std::vector<std::size_t> flipped;
  if (options.noise == NoiseMode::uniform) {
    std::set<std::size_t> chosen;
    for (std::size_t i = m - flips; i < m; ++i) {
      const std::size_t t = rng.below(i + 1);
      if (!chosen.insert(t).second) chosen.insert(i);
    }
    flipped.assign(chosen.begin(), chosen.end());
  } else {
    std::vector<std::size_t> order(m);
    for (std::size_t i = 0; i < m; ++i) order[i] = i;
    std::vector<double> margin(m);
    for (std::size_t i = 0; i < m; ++i) margin[i] = std::abs(dot(w.view(), samples[i].x));
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return margin[a] < margin[b]; });
    flipped.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(flips));
    std::sort(flipped.begin(), flipped.end());
  }
  for (std::size_t i : flipped) samples[i].y = -samples[i].y;
  return PlantedDataset{Dataset(dimension, p, std::move(samples)), std::move(w),
                        std::move(flipped)};
}

Sampler planted_sampler(const Halfspace& w, Exponent p, double gamma, double eta,
                        std::uint64_t seed) {
  if (!(eta >= 0.0 && eta < 0.5)) throw std::invalid_argument("eta must lie in [0, 1/2)");
  auto rng = std::make_shared<Rng>(seed);
  return [w, p, gamma, eta, rng]() -> std::optional<LabeledSample> {
    auto s = margin_sample(w, p, gamma, *rng);
    if (eta > 0.0 && rng->uniform() < eta) s.y = -s.y;
    return s;
  };
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + msg);
}

double parse_double(const std::string& tok, std::size_t line) {
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (tok.empty() || end != tok.c_str() + tok.size() || !std::isfinite(v)) {
    fail(line, "bad number '" + tok + "'");
  }
  return v;
}

std::size_t parse_count(const std::string& tok, std::size_t line, const char* what) {
  char* end = nullptr;
  const long long v = std::strtoll(tok.c_str(), &end, 10);
  if (tok.empty() || end != tok.c_str() + tok.size() || v < 0) {
    fail(line, std::string("bad ") + what + " '" + tok + "'");
  }
  return static_cast<std::size_t>(v);
}

// Next non-empty, non-comment line split into tokens.
bool next_tokens(std::istream& in, std::size_t& lineno, std::vector<std::string>& tok) {
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    tok.clear();
    for (std::string s; ls >> s;) tok.push_back(s);
    if (!tok.empty() && tok[0][0] != '#') return true;
  }
  return false;
}

template <class F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& data) {
  out << data.dimension() << ' ' << data.p().to_string() << ' ' << data.size() << '\n';
  for (const auto& s : data.samples()) {
    out << (s.y > 0 ? "1" : "-1");
    for (double v : s.x) out << ' ' << fmt(v);
    out << '\n';
  }
}

Dataset read_dataset(std::istream& in) {
  std::size_t lineno = 0;
  std::vector<std::string> tok;
  if (!next_tokens(in, lineno, tok)) throw std::runtime_error("dataset file is empty");
  if (tok.size() != 3) fail(lineno, "header must be 'd p m'");
  const std::size_t d = parse_count(tok[0], lineno, "dimension");
  Exponent p(2.0);
  try {
    p = Exponent::parse(tok[1]);
  } catch (const std::invalid_argument& e) {
    fail(lineno, e.what());
  }
  const std::size_t m = parse_count(tok[2], lineno, "sample count");
  std::unique_ptr<Dataset> data;
  try {
    data = std::make_unique<Dataset>(d, p);
  } catch (const std::invalid_argument& e) {
    fail(lineno, e.what());
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!next_tokens(in, lineno, tok)) {
      throw std::runtime_error("dataset ends after " + std::to_string(i) + " of " +
                               std::to_string(m) + " samples");
    }
    if (tok.size() != d + 1) {
      fail(lineno, "expected label and " + std::to_string(d) + " coordinates, got " +
                       std::to_string(tok.size()) + " fields");
    }
    LabeledSample s;
    if (tok[0] == "1" || tok[0] == "+1") {
      s.y = 1;
    } else if (tok[0] == "-1") {
      s.y = -1;
    } else {
      fail(lineno, "label must be 1 or -1, got '" + tok[0] + "'");
    }
    s.x.resize(d);
    for (std::size_t j = 0; j < d; ++j) s.x[j] = parse_double(tok[j + 1], lineno);
    try {
      data->push_back(std::move(s));
    } catch (const std::invalid_argument& e) {
      fail(lineno, e.what());
    }
  }
  if (next_tokens(in, lineno, tok)) fail(lineno, "trailing data after the declared samples");
  return std::move(*data);
}

void write_dataset(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_dataset(out, data);
}

Dataset read_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return with_path(path, [&] { return read_dataset(in); });
}

void write_model(std::ostream& out, const Halfspace& w) {
  out << w.dimension() << ' ' << w.q().to_string() << '\n';
  for (std::size_t i = 0; i < w.dimension(); ++i) out << (i ? " " : "") << fmt(w.weights()[i]);
  out << '\n';
}

Halfspace read_model(std::istream& in) {
  std::size_t lineno = 0;
  std::vector<std::string> tok;
  if (!next_tokens(in, lineno, tok)) throw std::runtime_error("model file is empty");
  if (tok.size() != 2) fail(lineno, "header must be 'd q'");
  const std::size_t d = parse_count(tok[0], lineno, "dimension");
  Exponent q(2.0);
  try {
    q = Exponent::parse(tok[1]);
  } catch (const std::invalid_argument& e) {
    fail(lineno, e.what());
  }
  if (!next_tokens(in, lineno, tok)) throw std::runtime_error("model file has no weight line");
  if (tok.size() != d) {
    fail(lineno, "expected " + std::to_string(d) + " weights, got " + std::to_string(tok.size()));
  }
  std::vector<double> w(d);
  for (std::size_t j = 0; j < d; ++j) w[j] = parse_double(tok[j], lineno);
  if (next_tokens(in, lineno, tok)) fail(lineno, "trailing data after the weights");
  try {
    return Halfspace(std::move(w), q);
  } catch (const std::invalid_argument& e) {
    fail(lineno, e.what());
  }
}

void write_model(const std::string& path, const Halfspace& w) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_model(out, w);
}

Halfspace read_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return with_path(path, [&] { return read_model(in); });
}

}  // namespace robusthalf
