#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "robusthalf/rng.hpp"

namespace robusthalf {

// Constraint edge (u, v) with projection pi[sigma_u] = sigma_v.
struct LabelEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  std::vector<std::size_t> pi;
};

// Label Cover instance with V = V_1 u ... u V_t. Vertices are indices:
// U = {0..k-1}, V = {0..group_of.size()-1}; groups are 0-based.
class LabelCoverInstance {
 public:
  LabelCoverInstance(std::size_t k, std::size_t t, std::size_t delta, std::size_t sigma_u,
                     std::size_t sigma_v, std::vector<std::size_t> group_of,
                     std::vector<LabelEdge> edges);

  std::size_t k() const noexcept { return k_; }
  std::size_t groups() const noexcept { return t_; }
  std::size_t delta() const noexcept { return delta_; }
  std::size_t sigma_u() const noexcept { return sigma_u_; }
  std::size_t sigma_v() const noexcept { return sigma_v_; }
  std::size_t right_count() const noexcept { return group_of_.size(); }
  std::size_t group_of(std::size_t v) const { return group_of_.at(v); }
  const std::vector<LabelEdge>& edges() const noexcept { return edges_; }
  const std::vector<std::size_t>& left_edges(std::size_t u) const { return left_.at(u); }
  const std::vector<std::size_t>& right_edges(std::size_t v) const { return right_.at(v); }
  // n = |U||Sigma_U| + |V||Sigma_V|
  std::size_t size() const noexcept {
    return k_ * sigma_u_ + group_of_.size() * sigma_v_;
  }

  // Coordinate index maps: (u, s) -> u |Sigma_U| + s, (v, s) -> v |Sigma_V| + s,
  // and (u, s_v) -> u |Sigma_V| + s_v for the U x Sigma_V side.
  std::size_t left_coord(std::size_t u, std::size_t s) const noexcept { return u * sigma_u_ + s; }
  std::size_t right_coord(std::size_t v, std::size_t s) const noexcept { return v * sigma_v_ + s; }
  std::size_t mid_coord(std::size_t u, std::size_t s) const noexcept { return u * sigma_v_ + s; }

  // Edge index of (u, v^j(u)); throws std::domain_error unless unique.
  std::size_t edge_of(std::size_t u, std::size_t j) const;

 private:
  std::size_t k_;
  std::size_t t_;
  std::size_t delta_;
  std::size_t sigma_u_;
  std::size_t sigma_v_;
  std::vector<std::size_t> group_of_;
  std::vector<LabelEdge> edges_;
  std::vector<std::vector<std::size_t>> left_;
  std::vector<std::vector<std::size_t>> right_;
};

using Labeling = std::vector<std::size_t>;

// Bi-regularity, right degree delta, |N(u) cap V_j| = 1, totality of every pi.
std::vector<std::string> validate(const LabelCoverInstance& inst);

// v^j(u); throws std::domain_error when N(u) cap V_j is not a single vertex.
std::size_t v_of(const LabelCoverInstance& inst, std::size_t u, std::size_t j);

// 0/1 (or integer, after products) matrix in coordinate form, entries sorted
// by (row, col) with no zeros stored.
struct SparseMatrix {
  struct Entry {
    std::size_t row;
    std::size_t col;
    long long value;
    friend bool operator==(const Entry&, const Entry&) = default;
  };
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<Entry> entries;

  static SparseMatrix from_entries(std::size_t rows, std::size_t cols, std::vector<Entry> e);
  std::vector<long long> row_sums() const;
  std::vector<long long> col_sums() const;
  // A v (v over columns).
  std::vector<double> apply(const std::vector<double>& v) const;
  // v^T A (v over rows).
  std::vector<double> apply_left(const std::vector<double>& v) const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;
};

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b);

struct Projections {
  SparseMatrix pi;        // (V x Sigma_V) x (U x Sigma_U)
  SparseMatrix pi_hat;    // (U x Sigma_V) x (U x Sigma_U)
  SparseMatrix pi_tilde;  // (V x Sigma_V) x (U x Sigma_V)
};

Projections projections(const LabelCoverInstance& inst, std::size_t j);

// Fraction of v whose neighbors all project to one label.
double value(const LabelCoverInstance& inst, const Labeling& phi);
// Fraction of v with two distinct neighbors projecting to the same label.
double weak_value(const LabelCoverInstance& inst, const Labeling& phi);

struct GeneratedInstance {
  LabelCoverInstance instance;
  std::optional<Labeling> planted;
};

// t = k / delta groups; group j chunks a uniform permutation of U into blocks
// of delta, one right vertex per block. Planted instances draw phi* and a
// label per right vertex, then force pi(phi*(u)) to that label.
GeneratedInstance random_instance(std::size_t k, std::size_t delta, std::size_t sigma_u,
                                  std::size_t sigma_v, bool planted, Rng& rng);

// Best value over all |Sigma_U|^k labelings (k <= 8).
std::pair<double, Labeling> brute_force_value(const LabelCoverInstance& inst);

// Text formats; see docs/formats.md.
void write_instance(std::ostream& out, const LabelCoverInstance& inst);
LabelCoverInstance read_instance(std::istream& in);
void write_instance(const std::string& path, const LabelCoverInstance& inst);
LabelCoverInstance read_instance(const std::string& path);

void write_labeling(std::ostream& out, const Labeling& phi);
Labeling read_labeling(std::istream& in);
void write_labeling(const std::string& path, const Labeling& phi);
Labeling read_labeling(const std::string& path);

}  // namespace robusthalf
