// robusthalf: learn / eval / oracle / gadget front end.
//
// Reports are JSON on stdout (schema 1), diagnostics go to stderr.
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "robusthalf/agnostic.hpp"
#include "robusthalf/datagen.hpp"
#include "robusthalf/gadget.hpp"
#include "robusthalf/labelcover.hpp"
#include "robusthalf/oracle.hpp"
#include "robusthalf/vecspace.hpp"

using json = nlohmann::ordered_json;
using namespace robusthalf;

namespace {

constexpr int kSchema = 1;
constexpr std::uint64_t kDefaultSeed = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void emit(const json& report) { std::cout << report.dump(2) << '\n'; }

json header(const std::string& command) {
  json j;
  j["schema"] = kSchema;
  j["command"] = command;
  return j;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ROBUSTHALF_SEED")) {
    const std::string s(env);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || end != s.c_str() + s.size() || s[0] == '-') {
      throw UsageError("ROBUSTHALF_SEED must be a non-negative integer, got '" + s + "'");
    }
    return v;
  }
  return kDefaultSeed;
}

// Decimal in [lo, hi]; CLI11 already rejects non-numbers.
void check_range(double v, double lo, double hi, const char* name, bool open_lo = false,
                 bool open_hi = false) {
  const bool ok = (open_lo ? v > lo : v >= lo) && (open_hi ? v < hi : v <= hi);
  if (!ok) {
    std::ostringstream os;
    os << name << " must lie in " << (open_lo ? '(' : '[') << lo << ", " << hi
       << (open_hi ? ')' : ']') << ", got " << v;
    throw UsageError(os.str());
  }
}

Exponent parse_exponent(const std::string& s) {
  try {
    return Exponent::parse(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--p: ") + e.what());
  }
}

// A --p flag, when present, has to agree with the dataset header.
void check_p(const std::optional<std::string>& flag, Exponent actual) {
  if (!flag) return;
  const Exponent p = parse_exponent(*flag);
  if (!same_exponent(p, actual)) {
    throw UsageError("--p " + p.to_string() + " does not match the dataset exponent " +
                     actual.to_string());
  }
}

json weights_json(const Halfspace& w) {
  json j;
  j["q"] = w.q().to_string();
  j["w"] = w.weights();
  return j;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- learn ----

struct LearnArgs {
  std::optional<std::string> data;
  std::optional<std::string> planted;
  std::optional<std::string> p;
  double gamma = 0.0;
  double nu = 0.5;
  double delta = 0.5;
  double eps = 0.1;
  std::optional<std::size_t> restarts;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> save_data;
  std::optional<std::string> csv;
  std::size_t jobs = 1;
  std::string policy = "best_prefix";
  bool boundary_noise = false;
};

struct PlantedSpec {
  std::size_t d = 0;
  Exponent p{2.0};
  double gamma = 0.0;
  std::optional<std::size_t> m;  // nullopt: auto
  double eta = 0.0;
};

PlantedSpec parse_planted(const std::string& s) {
  std::vector<std::string> f;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, ',');) f.push_back(tok);
  if (f.size() != 5) throw UsageError("--planted expects d,p,gamma,m,eta");
  PlantedSpec spec;
  try {
    std::size_t pos = 0;
    const long long d = std::stoll(f[0], &pos);
    if (pos != f[0].size() || d < 1) throw UsageError("--planted: bad dimension '" + f[0] + "'");
    spec.d = static_cast<std::size_t>(d);
    spec.p = Exponent::parse(f[1]);
    spec.gamma = std::stod(f[2], &pos);
    if (pos != f[2].size()) throw UsageError("--planted: bad gamma '" + f[2] + "'");
    if (f[3] != "auto") {
      const long long m = std::stoll(f[3], &pos);
      if (pos != f[3].size() || m < 1) throw UsageError("--planted: bad m '" + f[3] + "'");
      spec.m = static_cast<std::size_t>(m);
    }
    spec.eta = std::stod(f[4], &pos);
    if (pos != f[4].size()) throw UsageError("--planted: bad eta '" + f[4] + "'");
  } catch (const std::logic_error& e) {
    if (auto* u = dynamic_cast<const UsageError*>(&e)) throw *u;
    throw UsageError(std::string("--planted: ") + e.what());
  }
  if (!spec.p.is_infinite() && spec.p.value() < 2.0) throw UsageError("--planted: p must be >= 2");
  check_range(spec.gamma, 0.0, 1.0, "--planted gamma", true, true);
  check_range(spec.eta, 0.0, 0.5, "--planted eta", false, true);
  return spec;
}

RunPolicy parse_policy(const std::string& s) {
  if (s == "paper") return RunPolicy::paper;
  if (s == "best_prefix") return RunPolicy::best_prefix;
  throw UsageError("--policy must be paper or best_prefix");
}

void write_csv(const std::string& path, const std::vector<double>& run_errors) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << "restart,error\n";
  char buf[40];
  for (std::size_t i = 0; i < run_errors.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", run_errors[i]);
    out << i << ',' << buf << '\n';
  }
}

int run_learn(const LearnArgs& a) {
  if (a.data.has_value() == a.planted.has_value()) {
    throw UsageError("exactly one of --data or --planted is required");
  }
  check_range(a.gamma, 0.0, 1.0, "--gamma", true, true);
  check_range(a.nu, 0.0, 1.0, "--nu", true, true);
  check_range(a.delta, 0.0, 1.0, "--delta", true, true);
  check_range(a.eps, 0.0, 1.0, "--eps", true, true);
  if (a.jobs < 1) throw UsageError("--jobs must be >= 1");
  if (a.restarts && *a.restarts < 1) throw UsageError("--restarts must be >= 1");
  const RunPolicy policy = parse_policy(a.policy);
  if (a.boundary_noise && !a.planted) throw UsageError("--boundary-noise needs --planted");
  const std::uint64_t seed = resolve_seed(a.seed);

  json report = header("learn");
  report["seed"] = seed;
  const auto t0 = std::chrono::steady_clock::now();

  std::optional<Dataset> data;
  std::optional<Halfspace> planted_w;
  std::optional<double> planted_error;
  std::size_t restarts_used = 0;
  std::size_t mistakes = 0;
  std::size_t budget = 0;
  std::size_t best_run = 0;
  Halfspace w;
  std::vector<double> run_errors;
  bool learned = false;  // m = auto learns while drawing

  if (a.planted) {
    const PlantedSpec spec = parse_planted(*a.planted);
    check_p(a.p, spec.p);
    Rng rng(derive_seed(seed, 0xda7a));
    report["planted"] = {{"d", spec.d},
                         {"p", spec.p.to_string()},
                         {"gamma", spec.gamma},
                         {"m", spec.m ? json(*spec.m) : json("auto")},
                         {"eta", spec.eta},
                         {"noise", a.boundary_noise ? "boundary" : "uniform"}};
    if (spec.m) {
      PlantedOptions opts;
      opts.noise = a.boundary_noise ? NoiseMode::boundary : NoiseMode::uniform;
      auto pd = planted_margin_dataset(spec.d, spec.p, spec.gamma, *spec.m, spec.eta, rng, opts);
      planted_error = margin_error(pd.w, pd.data, spec.gamma);
      planted_w = pd.w;
      data = std::move(pd.data);
    } else {
      if (a.boundary_noise) throw UsageError("--boundary-noise needs a fixed m");
      const Halfspace w_star = random_unit_halfspace(spec.d, dual_exponent(spec.p), rng);
      planted_w = w_star;
      auto inner = planted_sampler(w_star, spec.p, spec.gamma, spec.eta, derive_seed(seed, 0x5a));
      Dataset drawn(spec.d, spec.p);
      Sampler recording = [&]() -> std::optional<LabeledSample> {
        auto s = inner();
        if (s) drawn.push_back(*s);
        return s;
      };
      DistributionOptions dopts;
      dopts.policy = policy;
      dopts.jobs = a.jobs;
      dopts.restarts = a.restarts;
      auto res = learn_distribution(recording, spec.p, spec.d, a.gamma, a.nu, a.delta, a.eps,
                                    seed, dopts);
      w = res.w;
      restarts_used = res.restarts;
      mistakes = res.empirical.updates;
      budget = res.empirical.budget;
      best_run = res.empirical.best_run;
      run_errors = res.empirical.run_errors;
      learned = true;
      report["samples_drawn"] = res.samples_drawn;
      report["internal_threshold"] = (1.0 - a.nu / 2.0) * a.gamma;
      planted_error = margin_error(w_star, drawn, spec.gamma);
      data = std::move(drawn);
    }
  } else {
    data = read_dataset(*a.data);
    check_p(a.p, data->p());
    if (data->empty()) throw std::runtime_error(*a.data + ": dataset has no samples");
  }

  if (!learned) {
    const MarginGap gap = MarginGap::relaxed(a.gamma, a.nu);
    budget = mistake_budget(data->dimension(), data->p(), gap);
    restarts_used = a.restarts ? *a.restarts : default_restarts(budget, a.delta);
    EmpiricalOptions eopts;
    eopts.policy = policy;
    eopts.jobs = a.jobs;
    auto res = learn_empirical(*data, gap, a.delta, restarts_used, seed, eopts);
    w = res.w;
    mistakes = res.updates;
    best_run = res.best_run;
    run_errors = std::move(res.run_errors);
  }

  if (a.save_data) write_dataset(*a.save_data, *data);
  if (a.out) write_model(*a.out, w);
  if (a.csv) write_csv(*a.csv, run_errors);

  const double threshold = (1.0 - a.nu) * a.gamma;
  report["d"] = data->dimension();
  report["p"] = data->p().to_string();
  report["m"] = data->size();
  report["gamma"] = a.gamma;
  report["nu"] = a.nu;
  report["delta"] = a.delta;
  report["threshold"] = threshold;
  report["policy"] = a.policy;
  report["err_margin_train"] = margin_error(w, *data, a.gamma);
  report["err_margin_gap"] = margin_error(w, *data, threshold);
  if (planted_error) report["planted_err_margin"] = *planted_error;
  report["restarts_used"] = restarts_used;
  report["best_run"] = best_run;
  report["mistakes"] = mistakes;
  report["mistake_budget"] = budget;
  report["model"] = weights_json(w);
  report["wallclock"] = seconds_since(t0);
  emit(report);
  return 0;
}

// ---- eval ----

struct EvalArgs {
  std::string model;
  std::string data;
  double gamma = 0.0;
  std::optional<std::string> p;
  bool robust = false;
};

int run_eval(const EvalArgs& a) {
  check_range(a.gamma, 0.0, 1.0, "--gamma", false, true);
  const Halfspace w = read_model(a.model);
  const Dataset data = read_dataset(a.data);
  check_p(a.p, data.p());
  if (data.empty()) throw std::runtime_error(a.data + ": dataset has no samples");
  if (w.dimension() != data.dimension()) {
    throw std::runtime_error("dimension mismatch: model has d = " + std::to_string(w.dimension()) +
                             ", data has d = " + std::to_string(data.dimension()));
  }
  if (!same_exponent(w.q(), dual_exponent(data.p()))) {
    throw std::runtime_error("model exponent q = " + w.q().to_string() +
                             " is not dual to the data exponent p = " + data.p().to_string());
  }
  json report = header("eval");
  report["d"] = data.dimension();
  report["p"] = data.p().to_string();
  report["m"] = data.size();
  report["gamma"] = a.gamma;
  report["margin_mistakes"] = margin_mistake_count(w, data, a.gamma);
  report["margin_error"] = margin_error(w, data, a.gamma);
  int code = 0;
  if (a.robust) {
    const double robust = robust_error(w, data, a.gamma);
    // Robust risk of h_w equals the margin error of w / ||w||_q.
    const double unit = w.is_zero() ? margin_error(w, data, a.gamma)
                                    : margin_error(w.normalized(), data, a.gamma);
    report["robust_error"] = robust;
    report["margin_error_unit"] = unit;
    report["robust_equals_margin"] = robust == unit;
    if (robust != unit) {
      std::cerr << "robusthalf: robust error " << robust << " differs from unit margin error "
                << unit << '\n';
      code = 1;
    }
  }
  emit(report);
  return code;
}

// ---- oracle ----

struct OracleArgs {
  std::string data;
  double gamma = 0.0;
  std::optional<std::string> p;
  std::string method = "subset";
  double resolution = 1e-3;
  double tol = 1e-6;
};

int run_oracle(const OracleArgs& a) {
  check_range(a.gamma, 0.0, 1.0, "--gamma", false, true);
  const Dataset data = read_dataset(a.data);
  check_p(a.p, data.p());
  if (data.empty()) throw std::runtime_error(a.data + ": dataset has no samples");
  json report = header("oracle");
  report["method"] = a.method;
  report["d"] = data.dimension();
  report["p"] = data.p().to_string();
  report["m"] = data.size();
  report["gamma"] = a.gamma;
  if (a.method == "grid") {
    check_range(a.resolution, 0.0, 1.0, "--resolution", true, false);
    const auto r = opt_margin_grid(data, a.gamma, a.resolution);
    report["opt"] = r.rate;
    report["errors"] = r.errors;
    report["resolution"] = r.resolution;
    report["steps"] = r.steps;
    report["cell_radius"] = r.cell_radius;
    report["evaluated"] = r.evaluated;
    report["witness"] = weights_json(r.w);
  } else if (a.method == "subset") {
    check_range(a.tol, 0.0, 1.0, "--tol", true, true);
    const auto r = opt_margin_subset(data, a.gamma, a.tol);
    report["opt"] = r.rate;
    report["errors"] = r.errors;
    report["tol"] = a.tol;
    report["error_set"] = r.error_set;
    report["checked"] = r.checked;
    report["witness"] = weights_json(r.w);
  } else {
    throw UsageError("--method must be grid or subset");
  }
  emit(report);
  return 0;
}

// ---- gadget ----

struct GadgetArgs {
  std::size_t k = 0;
  std::optional<std::size_t> delta_right;
  std::string mode = "desk";
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string in;
  std::optional<std::string> model;
  std::size_t sigma_u = 2;
  std::size_t sigma_v = 2;
  std::size_t samples = 1000;
  std::optional<double> C;
  std::optional<std::size_t> m0;
  std::optional<double> gamma;
  std::optional<double> q_lc;
};

GadgetMode parse_mode(const std::string& s) {
  if (s == "paper") return GadgetMode::paper;
  if (s == "desk") return GadgetMode::desk;
  throw UsageError("--mode must be paper or desk");
}

const char* mode_name(GadgetMode m) { return m == GadgetMode::paper ? "paper" : "desk"; }

json params_json(const GadgetParams& p) {
  json j;
  j["mode"] = mode_name(p.mode);
  j["k"] = p.k;
  j["n"] = p.n;
  j["C"] = p.C;
  j["m0"] = p.m0;
  j["Delta"] = p.delta;
  j["gamma_star"] = p.gamma;
  j["delta_g"] = p.delta_g;
  j["ell"] = p.ell;
  j["q_lc"] = p.q_lc;
  j["eps_star"] = p.eps;
  j["mu"] = p.mu;
  j["k0"] = p.k0;
  j["feasible"] = p.feasible();
  j["violations"] = p.violations;
  return j;
}

GadgetOverrides overrides_of(const GadgetArgs& a, GadgetMode mode) {
  GadgetOverrides ov;
  ov.C = a.C;
  ov.m0 = a.m0;
  ov.gamma = a.gamma;
  ov.q_lc = a.q_lc;
  if (mode == GadgetMode::desk) ov.delta = a.delta_right;
  return ov;
}

json overrides_json(const GadgetOverrides& ov) {
  json j = json::object();
  if (ov.C) j["C"] = *ov.C;
  if (ov.m0) j["m0"] = *ov.m0;
  if (ov.gamma) j["gamma"] = *ov.gamma;
  if (ov.q_lc) j["q_lc"] = *ov.q_lc;
  return j;
}

// Desk n is known up front: |V| = (k/Delta)^2. Paper mode needs Delta first.
GadgetParams params_for(std::size_t k, std::size_t sigma_u, std::size_t sigma_v, GadgetMode mode,
                        const GadgetOverrides& ov) {
  auto n_of = [&](std::size_t delta) {
    const std::size_t right = (delta > 0 && k % delta == 0) ? (k / delta) * (k / delta) : 0;
    return k * sigma_u + right * sigma_v;
  };
  if (mode == GadgetMode::desk) return derive_params(k, n_of(*ov.delta), mode, ov);
  const GadgetParams first = derive_params(k, 1, mode, ov);
  return derive_params(k, n_of(first.delta), mode, ov);
}

json report_json(const CompletenessReport& r) {
  json j;
  json steps = json::array();
  for (const auto& s : r.steps) {
    steps.push_back({{"step", s.step},
                     {"passed", s.passed},
                     {"worst_margin", s.worst_margin},
                     {"witness", s.witness},
                     {"exhaustive", s.exhaustive},
                     {"agrees", s.agrees},
                     {"enumerated", s.enumerated}});
  }
  j["steps"] = steps;
  std::vector<double> per_group(r.label_cover.per_group.begin(), r.label_cover.per_group.end());
  j["label_cover"] = {{"per_group", per_group},
                      {"mean", static_cast<double>(r.label_cover.mean)},
                      {"min", static_cast<double>(r.label_cover.min)},
                      {"passed", r.label_cover.passed}};
  j["deterministic_passed"] = r.deterministic_passed;
  j["error_bound"] = r.error_bound;
  j["eps_star"] = r.eps;
  j["passed"] = r.passed;
  j["failures"] = r.failures;
  return j;
}

int run_gadget_gen(const GadgetArgs& a) {
  const GadgetMode mode = parse_mode(a.mode);
  if (mode == GadgetMode::desk && !a.delta_right) throw UsageError("desk mode needs --delta-right");
  if (mode == GadgetMode::paper && a.delta_right) {
    throw UsageError("paper mode derives Delta; drop --delta-right");
  }
  if (mode == GadgetMode::paper && (a.gamma || a.q_lc)) {
    throw UsageError("paper mode does not accept --gamma or --q-lc");
  }
  if (a.sigma_u < 1 || a.sigma_v < 1) throw UsageError("alphabet sizes must be >= 1");
  const std::uint64_t seed = resolve_seed(a.seed);
  const GadgetOverrides ov = overrides_of(a, mode);
  const GadgetParams params = params_for(a.k, a.sigma_u, a.sigma_v, mode, ov);

  json report = header("gadget gen");
  report["seed"] = seed;
  report["params"] = params_json(params);
  if (!params.feasible()) {
    emit(report);
    std::cerr << "robusthalf: refusing to generate: parameters are infeasible\n";
    for (const auto& v : params.violations) std::cerr << "  " << v << '\n';
    return 1;
  }

  Rng rng(derive_seed(seed, 0x1c));
  auto gen = random_instance(a.k, params.delta, a.sigma_u, a.sigma_v, true, rng);
  const LabelCoverInstance& inst = gen.instance;
  const Labeling& phi = *gen.planted;

  Rng draw(derive_seed(seed, 0x5a));
  Dataset samples(gadget_dimension(inst), Exponent::infinity());
  std::vector<std::size_t> counts(6, 0);
  for (std::size_t i = 0; i < a.samples; ++i) {
    auto s = draw_sample(inst, params, draw);
    ++counts[static_cast<std::size_t>(s.step)];
    samples.push_back(LabeledSample{std::move(s.x), s.y});
  }

  write_instance(a.out + ".instance", inst);
  write_labeling(a.out + ".labeling", phi);
  write_dataset(a.out + ".samples", samples);
  write_model(a.out + ".model", intended_halfspace(inst, phi));

  json meta = header("gadget gen");
  meta["seed"] = seed;
  meta["k"] = a.k;
  meta["sigma_u"] = a.sigma_u;
  meta["sigma_v"] = a.sigma_v;
  meta["mode"] = mode_name(mode);
  meta["delta_right"] = params.delta;
  meta["overrides"] = overrides_json(ov);
  meta["params"] = params_json(params);
  json prov = json::object();
  const GadgetStep steps[] = {GadgetStep::constant_lower, GadgetStep::constant_upper,
                              GadgetStep::mass_lower,     GadgetStep::exceed,
                              GadgetStep::negative,       GadgetStep::label_cover};
  for (GadgetStep s : steps) prov[step_name(s)] = counts[static_cast<std::size_t>(s)];
  meta["samples"] = a.samples;
  meta["step_counts"] = prov;
  {
    std::ofstream out(a.out + ".meta.json");
    if (!out) throw std::runtime_error("cannot open " + a.out + ".meta.json for writing");
    out << meta.dump(2) << '\n';
  }

  report["files"] = {a.out + ".instance", a.out + ".labeling", a.out + ".samples",
                     a.out + ".model", a.out + ".meta.json"};
  report["groups"] = inst.groups();
  report["right_vertices"] = inst.right_count();
  report["dimension"] = samples.dimension();
  report["samples"] = a.samples;
  report["step_counts"] = prov;
  emit(report);
  return 0;
}

struct Loaded {
  LabelCoverInstance inst;
  GadgetParams params;
  json meta;
};

Loaded load_prefix(const std::string& prefix) {
  std::ifstream in(prefix + ".meta.json");
  if (!in) throw std::runtime_error("cannot open " + prefix + ".meta.json");
  json meta;
  try {
    meta = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(prefix + ".meta.json: " + e.what());
  }
  auto inst = read_instance(prefix + ".instance");
  const GadgetMode mode = parse_mode(meta.at("mode").get<std::string>());
  GadgetOverrides ov;
  const auto& o = meta.at("overrides");
  if (o.contains("C")) ov.C = o["C"].get<double>();
  if (o.contains("m0")) ov.m0 = o["m0"].get<std::size_t>();
  if (o.contains("gamma")) ov.gamma = o["gamma"].get<double>();
  if (o.contains("q_lc")) ov.q_lc = o["q_lc"].get<double>();
  if (mode == GadgetMode::desk) ov.delta = meta.at("delta_right").get<std::size_t>();
  auto params = derive_params(inst.k(), inst.size(), mode, ov);
  if (params.delta != inst.delta()) {
    throw std::runtime_error("instance right degree " + std::to_string(inst.delta()) +
                             " does not match Delta = " + std::to_string(params.delta));
  }
  return Loaded{std::move(inst), std::move(params), std::move(meta)};
}

int run_gadget_verify(const GadgetArgs& a) {
  auto loaded = load_prefix(a.in);
  json report = header("gadget verify");
  report["params"] = params_json(loaded.params);
  CompletenessReport r;
  if (a.model) {
    const Halfspace w = read_model(*a.model);
    if (w.dimension() != gadget_dimension(loaded.inst)) {
      throw std::runtime_error("model dimension does not match the gadget");
    }
    r = verify_halfspace(loaded.inst, loaded.params, w);
    report["model"] = *a.model;
  } else {
    const Labeling phi = read_labeling(a.in + ".labeling");
    r = verify_completeness(loaded.inst, loaded.params, phi);
    report["labeling"] = a.in + ".labeling";
  }
  report["report"] = report_json(r);
  emit(report);
  return r.passed ? 0 : 1;
}

int run_gadget_decode(const GadgetArgs& a) {
  auto loaded = load_prefix(a.in);
  const std::uint64_t seed = resolve_seed(a.seed);
  const std::string model_path = a.model ? *a.model : a.in + ".model";
  const Halfspace w = read_model(model_path);
  if (w.dimension() != gadget_dimension(loaded.inst)) {
    throw std::runtime_error("model dimension does not match the gadget");
  }
  Rng rng(derive_seed(seed, 0xdc));
  const Labeling phi = decode(loaded.inst, w, rng);
  const auto diag = diagnostics(loaded.inst, w, loaded.params);
  json report = header("gadget decode");
  report["seed"] = seed;
  report["model"] = model_path;
  report["labeling"] = phi;
  report["weak_value"] = weak_value(loaded.inst, phi);
  report["value"] = value(loaded.inst, phi);
  report["diagnostics"] = {{"w_star", diag.w_star},
                           {"w_star_ok", diag.w_star_ok},
                           {"negative_mass", diag.negative_mass},
                           {"negative_ok", diag.negative_ok},
                           {"large", diag.large},
                           {"size_ok", diag.size_ok},
                           {"large_mass", diag.large_mass},
                           {"mass_ok", diag.mass_ok}};
  emit(report);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust proper agnostic learning of L_p-margin halfspaces"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "robusthalf 0.1.0");

  LearnArgs la;
  auto* learn = app.add_subcommand("learn", "Run the online-to-agnostic learner");
  auto* src = learn->add_option_group("source");
  src->add_option("--data", la.data, "Dataset file");
  src->add_option("--planted", la.planted, "Planted margin data: d,p,gamma,m,eta (m may be auto)");
  src->require_option(1);
  learn->add_option("--p", la.p, "Sample exponent (checked against the data)");
  learn->add_option("--gamma", la.gamma, "Comparator margin")->required();
  learn->add_option("--nu", la.nu, "Robustness slack; output is judged at (1 - nu) gamma");
  learn->add_option("--delta", la.delta, "Failure probability / approximation slack");
  learn->add_option("--eps", la.eps, "Additive error (sample size for m = auto)");
  learn->add_option("--restarts", la.restarts, "Independent runs (default: the union bound count)");
  learn->add_option("--seed", la.seed, "Master seed (fallback: ROBUSTHALF_SEED)");
  learn->add_option("--out", la.out, "Write the model here");
  learn->add_option("--save-data", la.save_data, "Write the training set here");
  learn->add_option("--csv", la.csv, "Write restart,error rows here");
  learn->add_option("--jobs", la.jobs, "Worker threads for restarts");
  learn->add_option("--policy", la.policy, "paper | best_prefix");
  learn->add_flag("--boundary-noise", la.boundary_noise, "Flip the lowest-margin labels");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Margin (and robust) error of a model");
  eval->add_option("--model", ea.model, "Model file")->required();
  eval->add_option("--data", ea.data, "Dataset file")->required();
  eval->add_option("--gamma", ea.gamma, "Margin / perturbation radius")->required();
  eval->add_option("--p", ea.p, "Sample exponent (checked against the data)");
  eval->add_flag("--robust", ea.robust, "Also run the worst-case attack");

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Exact empirical opt_gamma (desk scale)");
  oracle->add_option("--data", oa.data, "Dataset file")->required();
  oracle->add_option("--gamma", oa.gamma, "Margin")->required();
  oracle->add_option("--p", oa.p, "Sample exponent (checked against the data)");
  oracle->add_option("--method", oa.method, "grid | subset");
  oracle->add_option("--resolution", oa.resolution, "Grid resolution (grid)");
  oracle->add_option("--tol", oa.tol, "Boundary tolerance (subset)");

  GadgetArgs ga;
  auto* gadget = app.add_subcommand("gadget", "Label Cover hardness gadget");
  gadget->require_subcommand(1);
  auto add_params = [&](CLI::App* c) {
    c->add_option("--k", ga.k, "Left vertices |U|")->required();
    c->add_option("--delta-right", ga.delta_right, "Right degree Delta (desk)");
    c->add_option("--mode", ga.mode, "paper | desk");
    c->add_option("--sigma-u", ga.sigma_u, "|Sigma_U|");
    c->add_option("--sigma-v", ga.sigma_v, "|Sigma_V|");
    c->add_option("--C", ga.C, "Anti-concentration constant override");
    c->add_option("--m0", ga.m0, "m0 override");
    c->add_option("--gamma", ga.gamma, "gamma* override (desk)");
    c->add_option("--q-lc", ga.q_lc, "Step-4c weight override (desk)");
  };
  auto* gen = gadget->add_subcommand("gen", "Generate instance, labeling, samples and sidecar");
  add_params(gen);
  gen->add_option("--seed", ga.seed, "Seed (fallback: ROBUSTHALF_SEED)");
  gen->add_option("--samples", ga.samples, "Oracle draws to emit");
  gen->add_option("--out", ga.out, "Output prefix")->required();
  auto* verify = gadget->add_subcommand("verify", "Completeness check of a generated gadget");
  verify->add_option("--in", ga.in, "Prefix written by gen")->required();
  verify->add_option("--model", ga.model, "Check this halfspace instead of the planted labeling");
  auto* dec = gadget->add_subcommand("decode", "Decode a model into a labeling");
  dec->add_option("--in", ga.in, "Prefix written by gen")->required();
  dec->add_option("--model", ga.model, "Model file (default: PREFIX.model)");
  dec->add_option("--seed", ga.seed, "Seed (fallback: ROBUSTHALF_SEED)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (learn->parsed()) return run_learn(la);
    if (eval->parsed()) return run_eval(ea);
    if (oracle->parsed()) return run_oracle(oa);
    if (gen->parsed()) return run_gadget_gen(ga);
    if (verify->parsed()) return run_gadget_verify(ga);
    if (dec->parsed()) return run_gadget_decode(ga);
  } catch (const UsageError& e) {
    std::cerr << "robusthalf: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "robusthalf: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
