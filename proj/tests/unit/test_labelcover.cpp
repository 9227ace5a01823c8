#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "robusthalf/labelcover.hpp"

using namespace robusthalf;

namespace {

// k = 4, Delta = 2, t = 2, |Sigma_U| = 3, |Sigma_V| = 2.
// V_0 = {0: {u0, u1}, 1: {u2, u3}}, V_1 = {2: {u0, u2}, 3: {u1, u3}}.
LabelCoverInstance hand_built(bool drop_last = false) {
  std::vector<LabelEdge> edges{
      {0, 0, {0, 1, 1}}, {1, 0, {1, 0, 0}}, {2, 1, {0, 0, 1}}, {3, 1, {1, 1, 0}},
      {0, 2, {1, 0, 1}}, {2, 2, {0, 1, 0}}, {1, 3, {0, 0, 0}}, {3, 3, {1, 0, 1}},
  };
  if (drop_last) edges.pop_back();
  return LabelCoverInstance(4, 2, 2, 3, 2, {0, 0, 1, 1}, edges);
}

std::vector<std::string> matching(const std::vector<std::string>& v, const std::string& needle) {
  std::vector<std::string> out;
  for (const auto& s : v)
    if (s.find(needle) != std::string::npos) out.push_back(s);
  return out;
}

// Independent recount: for every v, collect (u, projected label) by scanning
// all edges.
std::pair<double, double> recount(const LabelCoverInstance& inst, const Labeling& phi) {
  std::size_t full = 0, weak = 0;
  for (std::size_t v = 0; v < inst.right_count(); ++v) {
    std::vector<std::size_t> labels;
    for (const auto& e : inst.edges())
      if (e.v == v) labels.push_back(e.pi[phi[e.u]]);
    bool all = !labels.empty();
    bool pair = false;
    for (std::size_t a = 0; a < labels.size(); ++a) {
      if (labels[a] != labels[0]) all = false;
      for (std::size_t b = a + 1; b < labels.size(); ++b) pair = pair || labels[a] == labels[b];
    }
    full += all;
    weak += pair;
  }
  const double n = static_cast<double>(inst.right_count());
  return {full / n, weak / n};
}

long long entry(const SparseMatrix& m, std::size_t r, std::size_t c) {
  for (const auto& e : m.entries)
    if (e.row == r && e.col == c) return e.value;
  return 0;
}

}  // namespace

TEST_SUITE("labelcover") {
  TEST_CASE("hand-built instance is valid and decomposable") {
    const auto inst = hand_built();
    CHECK(validate(inst).empty());
    CHECK(inst.size() == 4 * 3 + 4 * 2);
    CHECK(v_of(inst, 0, 0) == 0);
    CHECK(v_of(inst, 0, 1) == 2);
    CHECK(v_of(inst, 3, 0) == 1);
    CHECK(v_of(inst, 3, 1) == 3);
    for (std::size_t u = 0; u < 4; ++u)
      for (std::size_t j = 0; j < 2; ++j) CHECK(inst.group_of(v_of(inst, u, j)) == j);
    CHECK_THROWS(v_of(inst, 0, 2));
  }

  TEST_CASE("deleted edge reports degree and decomposability violations") {
    const auto inst = hand_built(true);
    const auto bad = validate(inst);
    CHECK(matching(bad, "right vertex 3 has degree 1").size() == 1);
    CHECK(matching(bad, "left vertex 3 has 0 neighbors in group 1").size() == 1);
    CHECK_THROWS_AS(v_of(inst, 3, 1), std::domain_error);
  }

  TEST_CASE("other violations") {
    std::vector<LabelEdge> edges{{0, 0, {0, 5}}, {1, 0, {0}}};
    const LabelCoverInstance inst(2, 1, 2, 2, 2, {0}, edges);
    const auto bad = validate(inst);
    CHECK(matching(bad, "outside Sigma_V").size() == 1);
    CHECK(matching(bad, "projection has 1 entries").size() == 1);
    CHECK_THROWS(LabelCoverInstance(2, 1, 2, 2, 2, {1}, edges));
  }

  TEST_CASE("projection matrices on the hand-built instance") {
    const auto inst = hand_built();
    for (std::size_t j = 0; j < 2; ++j) {
      const auto pr = projections(inst, j);
      CHECK(pr.pi.rows == 8);
      CHECK(pr.pi.cols == 12);
      CHECK(pr.pi_hat.rows == 8);
      CHECK(pr.pi_tilde.cols == 8);
      // Definition, entry by entry.
      for (std::size_t v = 0; v < 4; ++v)
        for (std::size_t sv = 0; sv < 2; ++sv)
          for (std::size_t u = 0; u < 4; ++u)
            for (std::size_t su = 0; su < 3; ++su) {
              long long want = 0;
              for (const auto& e : inst.edges())
                if (e.u == u && e.v == v && inst.group_of(v) == j && e.pi[su] == sv) want = 1;
              CHECK(entry(pr.pi, inst.right_coord(v, sv), inst.left_coord(u, su)) == want);
            }
      CHECK(multiply(pr.pi_tilde, pr.pi_hat) == pr.pi);
      for (auto c : pr.pi_hat.col_sums()) CHECK(c == 1);
      const auto rows = pr.pi_tilde.row_sums();
      for (std::size_t v = 0; v < 4; ++v)
        for (std::size_t sv = 0; sv < 2; ++sv)
          CHECK(rows[inst.right_coord(v, sv)] == (inst.group_of(v) == j ? 2 : 0));
    }
    CHECK_THROWS(projections(inst, 2));
  }

  TEST_CASE("sparse matrix basics") {
    const auto a = SparseMatrix::from_entries(2, 3, {{1, 2, 1}, {0, 0, 1}, {1, 2, 1}, {0, 1, 0}});
    CHECK(a.entries.size() == 2);
    CHECK(a.entries[0].row == 0);
    CHECK(a.entries[1].value == 2);
    CHECK(a.apply({1, 1, 1}) == std::vector<double>{1, 2});
    CHECK(a.apply_left({1, 1}) == std::vector<double>{1, 0, 2});
    CHECK(a.row_sums() == std::vector<long long>{1, 2});
    CHECK(a.col_sums() == std::vector<long long>{1, 0, 2});
    CHECK_THROWS(SparseMatrix::from_entries(2, 2, {{2, 0, 1}}));
    CHECK_THROWS(multiply(a, a));
  }

  TEST_CASE("value and weak value") {
    const auto inst = hand_built();
    // Enumerate every labeling of the hand-built instance.
    Labeling phi(4, 0);
    for (int code = 0; code < 81; ++code) {
      int c = code;
      for (auto& s : phi) {
        s = c % 3;
        c /= 3;
      }
      const auto [full, weak] = recount(inst, phi);
      CHECK(value(inst, phi) == full);
      CHECK(weak_value(inst, phi) == weak);
      CHECK(value(inst, phi) <= weak_value(inst, phi));
    }
    CHECK_THROWS(value(inst, Labeling{0, 0, 0}));
    CHECK_THROWS(value(inst, Labeling{0, 0, 0, 3}));
  }

  TEST_CASE("generator contract over 100 seeds") {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      Rng rng(seed);
      const std::size_t delta = 2 + seed % 3;
      const std::size_t k = delta * (1 + seed % 4);
      auto g = random_instance(k, delta, 3, 2, true, rng);
      CHECK(validate(g.instance).empty());
      CHECK(g.instance.groups() == k / delta);
      CHECK(g.instance.right_count() == (k / delta) * (k / delta));
      REQUIRE(g.planted);
      CHECK(value(g.instance, *g.planted) == 1.0);
      CHECK(weak_value(g.instance, *g.planted) == 1.0);
      Labeling random(k);
      for (auto& s : random) s = rng.below(3);
      const auto [full, weak] = recount(g.instance, random);
      CHECK(value(g.instance, random) == full);
      CHECK(weak_value(g.instance, random) == weak);
      for (std::size_t j = 0; j < g.instance.groups(); ++j) {
        const auto pr = projections(g.instance, j);
        CHECK(multiply(pr.pi_tilde, pr.pi_hat) == pr.pi);
      }
    }
    Rng rng(1);
    CHECK_THROWS(random_instance(5, 2, 2, 2, true, rng));
    CHECK_THROWS(random_instance(4, 2, 2, 3, true, rng));
    CHECK_FALSE(random_instance(4, 2, 2, 2, false, rng).planted.has_value());
  }

  TEST_CASE("brute force finds the planted optimum") {
    Rng rng(3);
    auto g = random_instance(6, 3, 3, 2, true, rng);
    const auto [best, phi] = brute_force_value(g.instance);
    CHECK(best == 1.0);
    CHECK(value(g.instance, phi) == 1.0);
    auto big = random_instance(10, 2, 2, 2, false, rng);
    CHECK_THROWS(brute_force_value(big.instance));
  }

  TEST_CASE("instance and labeling round trip") {
    Rng rng(8);
    auto g = random_instance(6, 2, 3, 3, true, rng);
    std::stringstream ss;
    write_instance(ss, g.instance);
    const auto back = read_instance(ss);
    CHECK(back.k() == 6);
    CHECK(back.groups() == g.instance.groups());
    CHECK(back.delta() == 2);
    CHECK(back.right_count() == g.instance.right_count());
    REQUIRE(back.edges().size() == g.instance.edges().size());
    for (std::size_t e = 0; e < back.edges().size(); ++e) {
      CHECK(back.edges()[e].u == g.instance.edges()[e].u);
      CHECK(back.edges()[e].v == g.instance.edges()[e].v);
      CHECK(back.edges()[e].pi == g.instance.edges()[e].pi);
    }
    for (std::size_t v = 0; v < back.right_count(); ++v) CHECK(back.group_of(v) == g.instance.group_of(v));
    std::stringstream ls;
    write_labeling(ls, *g.planted);
    CHECK(read_labeling(ls) == *g.planted);
  }

  TEST_CASE("instance parse errors carry line numbers") {
    auto fails_with = [](const std::string& text, const std::string& needle) {
      std::stringstream ss(text);
      try {
        read_instance(ss);
      } catch (const std::runtime_error& e) {
        return std::string(e.what()).find(needle) != std::string::npos;
      }
      return false;
    };
    CHECK(fails_with("2 1 2 2\n", "line 1"));
    CHECK(fails_with("# c\n2 1 2 2 2\n0 0 0\n1 0 x\n", "line 4"));
    CHECK(fails_with("2 1 2 2 2\n0 0 0\n1 0 0\n0 0 0->1\n1 0 0->0 1->0\n", "line 4: projection is not total"));
    CHECK(fails_with("2 1 2 2 2\n0 0 0\n0 0 0->1 1->1\n1 0 0->0 1->0\n", "no matching"));
    CHECK(fails_with("", "empty"));
  }
}
