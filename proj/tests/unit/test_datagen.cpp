#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "robusthalf/datagen.hpp"
#include "robusthalf/oracle.hpp"

using namespace robusthalf;

namespace {

const Exponent kInf = Exponent::infinity();

bool throws_with(const std::string& text, const std::string& needle) {
  std::stringstream ss(text);
  try {
    read_dataset(ss);
  } catch (const std::runtime_error& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_SUITE("datagen") {
  TEST_CASE("uniform ball points") {
    Rng rng(1);
    for (auto p : {Exponent(1.0), Exponent(2.0), Exponent(3.0), kInf}) {
      for (int i = 0; i < 500; ++i) {
        const auto x = uniform_ball_point(4, p, rng);
        CHECK(oracle_ref::norm(x, p.is_infinite() ? INFINITY : p.value()) <= 1.0L);
      }
    }
    // Volume fraction: Pr[||x||_2 <= 1/2] = 1/4 in the disc.
    int inner = 0;
    const int n = 40000;
    for (int i = 0; i < n; ++i) inner += lp_norm(uniform_ball_point(2, Exponent(2.0), rng), Exponent(2.0)) <= 0.5;
    CHECK(std::abs(inner - n / 4.0) <= 4 * std::sqrt(n * 0.25 * 0.75));
    CHECK_THROWS(uniform_ball_point(0, Exponent(2.0), rng));
  }

  TEST_CASE("random unit halfspace") {
    Rng rng(2);
    for (auto q : {Exponent(1.0), Exponent(1.5), Exponent(2.0)}) {
      const auto w = random_unit_halfspace(7, q, rng);
      CHECK(w.q().value() == q.value());
      CHECK(w.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  TEST_CASE("margin samples clear the margin") {
    Rng rng(3);
    for (auto p : {Exponent(2.0), Exponent(4.0), kInf}) {
      const auto w = random_unit_halfspace(5, dual_exponent(p), rng);
      for (int i = 0; i < 300; ++i) {
        const auto s = margin_sample(w, p, 0.4, rng);
        const double m = dot(w.view(), s.x);
        CHECK(std::abs(m) > 0.4);
        CHECK(s.y == sign_of(m));
        CHECK(lp_norm(s.x, p) <= 1.0 + 1e-9);
      }
    }
    const auto w = random_unit_halfspace(3, Exponent(2.0), rng);
    CHECK_THROWS(margin_sample(w, kInf, 0.2, rng));
  }

  TEST_CASE("planted data: noise-free and exact flip count") {
    Rng rng(4);
    auto clean = planted_margin_dataset(6, Exponent(2.0), 0.2, 400, 0.0, rng);
    CHECK(clean.flipped.empty());
    CHECK(margin_error(clean.w, clean.data, 0.2) == 0.0);
    auto noisy = planted_margin_dataset(6, kInf, 0.2, 1000, 0.05, rng);
    CHECK(noisy.flipped.size() == 50);
    CHECK(std::is_sorted(noisy.flipped.begin(), noisy.flipped.end()));
    CHECK(margin_error(noisy.w, noisy.data, 0.2) == 0.05);
    for (std::size_t i : noisy.flipped) CHECK(margin_mistake(noisy.w, noisy.data[i], 0.2));
    CHECK_THROWS(planted_margin_dataset(6, kInf, 0.2, 10, 0.5, rng));
    CHECK_THROWS(planted_margin_dataset(6, kInf, 0.0, 10, 0.1, rng));
  }

  TEST_CASE("planted opt is at most the flip rate") {
    Rng rng(5);
    for (int trial = 0; trial < 10; ++trial) {
      auto pd = planted_margin_dataset(2, kInf, 0.25, 16, 0.125, rng);
      const auto opt = opt_margin_subset(pd.data, 0.25);
      CHECK(opt.rate <= static_cast<double>(pd.flipped.size()) / 16 + 1e-12);
    }
  }

  TEST_CASE("boundary noise flips the smallest margins") {
    Rng rng(6);
    PlantedOptions o;
    o.noise = NoiseMode::boundary;
    auto pd = planted_margin_dataset(3, Exponent(3.0), 0.2, 200, 0.1, rng, o);
    REQUIRE(pd.flipped.size() == 20);
    double flipped_max = 0, kept_min = 1e300;
    for (std::size_t i = 0; i < 200; ++i) {
      const double a = std::abs(dot(pd.w.view(), pd.data[i].x));
      if (std::binary_search(pd.flipped.begin(), pd.flipped.end(), i))
        flipped_max = std::max(flipped_max, a);
      else
        kept_min = std::min(kept_min, a);
    }
    CHECK(flipped_max <= kept_min);
  }

  TEST_CASE("planted sampler is seeded and flips at rate eta") {
    Rng rng(7);
    const auto w = random_unit_halfspace(4, Exponent(2.0), rng);
    auto a = planted_sampler(w, Exponent(2.0), 0.1, 0.2, 99);
    auto b = planted_sampler(w, Exponent(2.0), 0.1, 0.2, 99);
    int wrong = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
      const auto s = a();
      const auto t = b();
      REQUIRE(s);
      CHECK(s->x == t->x);
      wrong += s->y != sign_of(dot(w.view(), s->x));
    }
    CHECK(std::abs(wrong - 0.2 * n) <= 4 * std::sqrt(n * 0.2 * 0.8));
  }

  TEST_CASE("dataset round trip is bit exact") {
    Rng rng(8);
    for (int t = 0; t < 20; ++t) {
      const Exponent p = std::vector<Exponent>{Exponent(2.0), Exponent(2.5), kInf, Exponent(3.0)}[t % 4];
      auto pd = planted_margin_dataset(1 + t % 5, p, 0.1, 30, 0.1, rng);
      std::stringstream ss;
      write_dataset(ss, pd.data);
      const auto back = read_dataset(ss);
      CHECK(back.dimension() == pd.data.dimension());
      CHECK(back.p().is_infinite() == p.is_infinite());
      if (!p.is_infinite()) CHECK(back.p().value() == p.value());
      REQUIRE(back.size() == pd.data.size());
      for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].x == pd.data[i].x);
        CHECK(back[i].y == pd.data[i].y);
      }
    }
  }

  TEST_CASE("dataset parsing") {
    std::stringstream ok("# comment\n2 inf 2\n+1 0.5 -1\n\n-1 0 0\n");
    const auto d = read_dataset(ok);
    CHECK(d.p().is_infinite());
    CHECK(d[0].y == 1);
    CHECK(d[1].y == -1);
    CHECK(throws_with("2 inf 2\n1 0.5 0.5\n-1 1.5 0\n", "line 3"));
    CHECK(throws_with("2 2 1\n0 0.1 0.1\n", "line 2: label"));
    CHECK(throws_with("2 2 1\n1 0.1\n", "line 2: expected"));
    CHECK(throws_with("2 2 1\n1 0.1 x\n", "bad number"));
    CHECK(throws_with("2 2 2\n1 0.1 0.1\n", "ends after 1 of 2"));
    CHECK(throws_with("2 2 1\n1 0.1 0.1\n1 0 0\n", "line 3: trailing"));
    CHECK(throws_with("2 1.5 1\n1 0.1 0.1\n", "line 1"));
    CHECK(throws_with("", "empty"));
    CHECK_THROWS_WITH_AS(read_dataset(std::string("/nonexistent/x.data")),
                         doctest::Contains("/nonexistent/x.data"), std::runtime_error);
  }

  TEST_CASE("model round trip and parsing") {
    Rng rng(9);
    const auto w = random_unit_halfspace(5, Exponent(1.5), rng);
    std::stringstream ss;
    write_model(ss, w);
    const auto back = read_model(ss);
    CHECK(back.weights() == w.weights());
    CHECK(back.q().value() == w.q().value());
    std::stringstream bad("2 2\n0.9 0.9\n");
    CHECK_THROWS_WITH(read_model(bad), doctest::Contains("line 2"));
    std::stringstream shortw("3 1\n0.1 0.1\n");
    CHECK_THROWS_WITH(read_model(shortw), doctest::Contains("expected 3 weights"));
  }
}
