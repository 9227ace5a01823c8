#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "robusthalf/gadget.hpp"
#include "robusthalf/labelcover.hpp"

using namespace robusthalf;

namespace {

GadgetParams desk(std::size_t k, std::size_t delta, std::size_t n, GadgetOverrides ov = {}) {
  ov.delta = delta;
  return derive_params(k, n, GadgetMode::desk, ov);
}

GeneratedInstance k15(std::uint64_t seed = 4) {
  Rng rng(seed);
  return random_instance(15, 3, 2, 2, true, rng);
}

std::vector<double> without_star(const Halfspace& w) {
  return std::vector<double>(w.weights().begin(), w.weights().end() - 1);
}

}  // namespace

TEST_SUITE("gadget") {
  TEST_CASE("rademacher tail, small m") {
    CHECK(rademacher_tail(2, 50) == doctest::Approx(0.25));
    CHECK(rademacher_tail(2, 0) == doctest::Approx(0.75));
    // m = 4: only S = 2, 4 clear a positive threshold below 1.
    CHECK(rademacher_tail(4, 99) == doctest::Approx(5.0 / 16));
    CHECK(rademacher_tail(5, 44) == doctest::Approx(0.5));
    CHECK(rademacher_tail(5, 45) == doctest::Approx(6.0 / 32));
    CHECK_THROWS(rademacher_tail(0, 10));
  }

  TEST_CASE("anti-concentration constant over [100, 5000] matches a rolled pmf") {
    const auto ac = anticoncentration_constant(100, 5000);
    CHECK(ac.c_percent == 16);
    CHECK(ac.C == 0.16);
    CHECK(ac.m0 == 100);
    const oracle_ref::RademacherTable table(5000);
    const auto at = table.tails(ac.c_percent, 100);
    const auto above = table.tails(ac.c_percent + 1, 100);
    long double worst = 2;
    std::size_t worst_m = 0;
    bool above_fails = false;
    for (std::size_t m = 100; m <= 5000; ++m) {
      if (at[m] < worst) {
        worst = at[m];
        worst_m = m;
      }
      above_fails = above_fails || above[m] < 0.4L;
    }
    CHECK(worst >= 0.4L);
    CHECK(above_fails);
    CHECK(ac.worst_m == worst_m);
    CHECK(static_cast<double>(ac.worst_tail) == doctest::Approx(static_cast<double>(worst)).epsilon(1e-12));
    for (std::size_t m : {100u, 158u, 999u, 5000u})
      CHECK(static_cast<double>(rademacher_tail(m, 16)) ==
            doctest::Approx(static_cast<double>(at[m])).epsilon(1e-12));
  }

  TEST_CASE("paper-mode parameters") {
    const auto p = derive_params(1000, 10, GadgetMode::paper);
    CHECK(p.C == 0.16);
    CHECK(p.delta == 390625);
    CHECK(p.k0 == 39062500);
    CHECK_FALSE(p.feasible());
    CHECK(check_params(p).empty());
    GadgetOverrides c2;
    c2.C = 0.2;
    const auto q = derive_params(1000, 10, GadgetMode::paper, c2);
    CHECK(q.delta == 250000);
    CHECK(q.mu == doctest::Approx(0.01 / (250000.0 * 249999.0)));
    GadgetOverrides bad;
    bad.delta = 3;
    CHECK_THROWS(derive_params(1000, 10, GadgetMode::paper, bad));
    auto tampered = p;
    tampered.gamma *= 1.01;
    CHECK(check_params(tampered).size() == 1);
  }

  TEST_CASE("desk-mode parameters") {
    const auto p = desk(15, 3, 100);
    CHECK(p.C == 0.44);
    CHECK(p.mu == doctest::Approx(1.0 / 600));
    CHECK(p.gamma == doctest::Approx(0.5 * 0.44 * std::sqrt(3.0 / 15)));
    CHECK(p.ell == 1);
    CHECK(p.q_lc == doctest::Approx(1e-5));
    CHECK(p.eps == doctest::Approx(0.15 * 1e-5));
    CHECK(check_params(p).empty());
    // m = 4 certifies no C in (0, 1).
    CHECK_THROWS_AS(desk(12, 3, 100), std::invalid_argument);
    GadgetOverrides g;
    g.gamma = 0.1;
    CHECK(desk(12, 3, 100, g).gamma == 0.1);
    CHECK_THROWS(derive_params(12, 100, GadgetMode::desk));
    CHECK_THROWS(desk(12, 5, 100));
    CHECK_THROWS(desk(12, 1, 100));
  }

  TEST_CASE("sample shapes") {
    auto g = k15();
    const auto p = desk(15, 3, g.instance.size());
    const std::size_t d = gadget_dimension(g.instance);
    CHECK(d == 31);
    Rng rng(5);
    for (int i = 0; i < 5000; ++i) {
      const auto s = draw_sample(g.instance, p, rng);
      REQUIRE(s.x.size() == d);
      CHECK(s.y == 1);
      for (double v : s.x) CHECK(std::abs(v) <= 1.0 + 1e-12);
      if (s.step == GadgetStep::label_cover) {
        CHECK(s.x.back() == 0.0);
        for (std::size_t c = 0; c + 1 < d; ++c) CHECK(std::abs(s.x[c]) == 1.0);
      }
      if (s.step == GadgetStep::constant_lower) CHECK(s.x.back() == 2 * p.gamma);
      if (s.step == GadgetStep::negative) CHECK(s.x.back() == 2 * p.gamma);
    }
    CHECK(std::string(step_name(GadgetStep::label_cover)) == "4c");
    CHECK(std::string(step_name(GadgetStep::mass_lower)) == "3");
  }

  TEST_CASE("sample builders") {
    auto g = k15();
    const auto p = desk(15, 3, g.instance.size());
    std::vector<bool> t(15, false);
    t[2] = t[7] = true;
    const auto a = mass_lower_sample(g.instance, p, t);
    CHECK(a.back() == doctest::Approx(-(2.0 / 15 - 2 * p.gamma)));
    CHECK(a[g.instance.left_coord(2, 1)] == 1.0);
    CHECK(a[g.instance.left_coord(3, 0)] == 0.0);
    // mid = {(u = 0, s_v = 1)}: the image is the preimage of label 1 under pi_(0, v^0(0)).
    const std::vector<std::size_t> mid{g.instance.mid_coord(0, 1)};
    const auto& ed = g.instance.edges()[g.instance.edge_of(0, 0)];
    const auto b = exceed_sample(g.instance, p, 0, mid);
    const auto c = negative_sample(g.instance, p, 0, mid);
    for (std::size_t s = 0; s < 2; ++s) {
      const double want = ed.pi[s] == 1 ? 1.0 : 0.0;
      CHECK(c[g.instance.left_coord(0, s)] == want);
      CHECK(b[g.instance.left_coord(0, s)] == -want);
    }
    CHECK(b.back() == doctest::Approx(1.0 / 15 + 2 * p.gamma));
    CHECK_THROWS(mass_lower_sample(g.instance, p, std::vector<bool>(3)));
    CHECK_THROWS(label_cover_sample(g.instance, 0, std::vector<int>(3, 1)));
  }

  TEST_CASE("mixture frequencies: chi-square over 10^6 draws") {
    auto g = k15(9);
    GadgetOverrides ov;
    ov.q_lc = 0.2;
    const auto p = desk(15, 3, g.instance.size(), ov);
    const std::array<double, 6> expect{0.25, 0.25, 0.25, 0.1, 0.1, 0.05};
    std::array<double, 6> seen{};
    std::vector<double> groups(g.instance.groups(), 0.0);
    Rng rng(123);
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
      const auto s = draw_sample(g.instance, p, rng);
      seen[static_cast<int>(s.step)] += 1;
      if (static_cast<int>(s.step) >= 3) groups[s.group] += 1;
    }
    double chi = 0;
    for (int i = 0; i < 6; ++i) chi += std::pow(seen[i] - n * expect[i], 2) / (n * expect[i]);
    // 5 degrees of freedom, 0.999 quantile 20.52.
    CHECK(chi < 20.52);
    double total = 0;
    for (double c : groups) total += c;
    double chi_g = 0;
    for (double c : groups) chi_g += std::pow(c - total / groups.size(), 2) / (total / groups.size());
    // 4 degrees of freedom, 0.999 quantile 18.47.
    CHECK(chi_g < 18.47);
  }

  TEST_CASE("intended halfspace") {
    auto g = k15();
    const auto w = intended_halfspace(g.instance, *g.planted);
    CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(w.weights().back() == 0.5);
    const auto body = without_star(w);
    for (std::size_t j = 0; j < g.instance.groups(); ++j) {
      const auto img = projections(g.instance, j).pi.apply(body);
      std::size_t hits = 0;
      for (double v : img) {
        if (v == 0.0) continue;
        ++hits;
        CHECK(v == doctest::Approx(3.0 / 30));
      }
      CHECK(hits == 5);
    }
    Labeling bad = *g.planted;
    bad[0] = 1 - bad[0];
    if (value(g.instance, bad) != 1.0) CHECK_THROWS(intended_halfspace(g.instance, bad));
  }

  TEST_CASE("completeness of the planted labeling, k = 15, Delta = 3") {
    auto g = k15();
    const auto p = desk(15, 3, g.instance.size());
    const auto r = verify_completeness(g.instance, p, *g.planted);
    CHECK(r.passed);
    CHECK(r.deterministic_passed);
    REQUIRE(r.steps.size() == 5);
    for (const auto& s : r.steps) {
      CHECK(s.passed);
      CHECK(s.agrees);
    }
    CHECK(r.steps[2].exhaustive);
    CHECK(r.steps[2].enumerated == (1u << 15));
    for (auto pr : r.label_cover.per_group) CHECK(static_cast<double>(pr) == doctest::Approx(0.5));
    CHECK(r.error_bound == doctest::Approx(0.25 * p.q_lc * 0.5));
    CHECK(r.error_bound <= r.eps);
  }

  TEST_CASE("mutated halfspaces fail verification") {
    auto g = k15();
    const auto p = desk(15, 3, g.instance.size());
    const auto w = intended_halfspace(g.instance, *g.planted);
    // Less weight on star breaks step 1.
    auto v = w.weights();
    v.back() = 0.45;
    auto r = verify_halfspace(g.instance, p, Halfspace(v, Exponent(1.0)));
    CHECK_FALSE(r.passed);
    CHECK_FALSE(r.steps[0].passed);
    // A negative coordinate breaks step 4b.
    v = w.weights();
    v[g.instance.left_coord(0, 1 - (*g.planted)[0])] = -0.01;
    v.back() = 0.49;
    r = verify_halfspace(g.instance, p, Halfspace(v, Exponent(1.0)));
    CHECK_FALSE(r.passed);
    CHECK_FALSE(r.steps[4].passed);
    CHECK_FALSE(r.failures.empty());
    CHECK_THROWS(verify_halfspace(g.instance, p, Halfspace::zero(5, Exponent(1.0))));
  }

  TEST_CASE("step 4c shortfall when m = 4") {
    Rng rng(2);
    auto g = random_instance(12, 3, 2, 2, true, rng);
    GadgetOverrides ov;
    ov.gamma = 0.5 * 0.01 * std::sqrt(3.0 / 12);
    const auto p = desk(12, 3, g.instance.size(), ov);
    const auto r = verify_completeness(g.instance, p, *g.planted);
    CHECK(r.deterministic_passed);
    CHECK(static_cast<double>(r.label_cover.min) == doctest::Approx(5.0 / 16));
    CHECK_FALSE(r.label_cover.passed);
    CHECK_FALSE(r.passed);
  }

  TEST_CASE("diagnostics and decoding") {
    auto g = k15();
    const auto p = desk(15, 3, g.instance.size());
    const auto w = intended_halfspace(g.instance, *g.planted);
    const auto dg = diagnostics(g.instance, w, p);
    CHECK(dg.w_star_ok);
    CHECK(dg.negative_ok);
    CHECK(dg.large.empty());
    CHECK(dg.size_ok);
    CHECK(dg.mass_ok);
    for (double m : dg.mass) CHECK(m == doctest::Approx(1.0 / 30));
    Rng rng(1);
    CHECK(decode(g.instance, w, rng) == *g.planted);

    // Split every u evenly over both labels; u = 0 is overweight and gets label 0.
    std::vector<double> split(31, 1.0 / 120);
    split[0] = 0.2;
    split[1] = 0.0;
    split.back() = 0.0;
    double l1 = 0;
    for (double v : split) l1 += v;
    for (double& v : split) v /= l1;
    const Halfspace hs(split, Exponent(1.0));
    const auto d2 = diagnostics(g.instance, hs, p);
    CHECK(d2.large == std::vector<std::size_t>{0});
    CHECK_FALSE(d2.w_star_ok);
    const int n = 20000;
    int zeros = 0;
    for (int i = 0; i < n; ++i) {
      const auto phi = decode(g.instance, hs, rng);
      CHECK(phi[0] == 0);
      zeros += phi[1] == 0;
    }
    const double sigma = std::sqrt(n * 0.25);
    CHECK(std::abs(zeros - n * 0.5) <= 3 * sigma);
  }

  TEST_CASE("no-margin reduction") {
    const Dataset data(2, Exponent::infinity(),
                       {{{0.5, -0.2}, 1}, {{0.1, 0.3}, -1}, {{-1.0, 1.0}, 1}, {{0.0, 0.0}, -1}});
    const auto red = reduce_no_margin(data, 0.01, 1.5);
    CHECK(red.heavy == 7);
    CHECK(red.data.size() == 11);
    CHECK(red.eps == doctest::Approx(0.01 * 4 / 11));
    CHECK(red.gamma == 0.5);
    CHECK(red.data[1].x == std::vector<double>{0.1, 0.3, -1.0});
    CHECK(red.data[0].x.back() == 1.0);
    for (std::size_t i = 4; i < 11; ++i) {
      CHECK(red.data[i].x == std::vector<double>{1.0, 1.0, 0.0});
      CHECK(red.data[i].y == 1);
    }
    const auto lift = lift_no_margin({1.0, 3.0});
    CHECK(lift.weights() == std::vector<double>{0.125, 0.375, 0.5});
    CHECK_FALSE(margin_mistake(lift, red.data[4], 0.5 - 1e-9));
    CHECK_THROWS(lift_no_margin({1.0, -1.0}));
    CHECK_THROWS(lift_no_margin({0.0, 0.0}));
    CHECK_THROWS(reduce_no_margin(Dataset(2, Exponent(2.0), {{{0.1, 0.1}, 1}}), 0.1, 1.5));
    CHECK_THROWS(reduce_no_margin(data, 0.1, 1.0));
  }
}
