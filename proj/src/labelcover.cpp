#include "robusthalf/labelcover.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <stdexcept>

namespace robusthalf {

LabelCoverInstance::LabelCoverInstance(std::size_t k, std::size_t t, std::size_t delta,
                                       std::size_t sigma_u, std::size_t sigma_v,
                                       std::vector<std::size_t> group_of,
                                       std::vector<LabelEdge> edges)
    : k_(k),
      t_(t),
      delta_(delta),
      sigma_u_(sigma_u),
      sigma_v_(sigma_v),
      group_of_(std::move(group_of)),
      edges_(std::move(edges)),
      left_(k),
      right_(group_of_.size()) {
  if (k_ == 0 || t_ == 0 || delta_ == 0 || sigma_u_ == 0 || sigma_v_ == 0) {
    throw std::invalid_argument("label cover sizes k, t, delta, |Sigma_U|, |Sigma_V| must be >= 1");
  }
  for (std::size_t v = 0; v < group_of_.size(); ++v) {
    if (group_of_[v] >= t_) {
      throw std::invalid_argument("right vertex " + std::to_string(v) + " has group " +
                                  std::to_string(group_of_[v]) + " >= t");
    }
  }
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const auto& ed = edges_[e];
    if (ed.u >= k_ || ed.v >= group_of_.size()) {
      throw std::invalid_argument("edge " + std::to_string(e) + " has an endpoint out of range");
    }
    left_[ed.u].push_back(e);
    right_[ed.v].push_back(e);
  }
}

std::size_t LabelCoverInstance::edge_of(std::size_t u, std::size_t j) const {
  if (u >= k_) throw std::out_of_range("left vertex out of range");
  if (j >= t_) throw std::out_of_range("group index out of range");
  std::size_t found = edges_.size();
  std::size_t count = 0;
  for (std::size_t e : left_[u]) {
    if (group_of_[edges_[e].v] == j) {
      found = e;
      ++count;
    }
  }
  if (count != 1) {
    throw std::domain_error("left vertex " + std::to_string(u) + " has " +
                            std::to_string(count) + " neighbors in group " +
                            std::to_string(j) + "; instance is not decomposable");
  }
  return found;
}

std::vector<std::string> validate(const LabelCoverInstance& inst) {
  std::vector<std::string> out;
  const auto& edges = inst.edges();
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto& ed = edges[e];
    const std::string name = "edge (" + std::to_string(ed.u) + "," + std::to_string(ed.v) + ")";
    if (!seen.insert({ed.u, ed.v}).second) out.push_back(name + " is duplicated");
    if (ed.pi.size() != inst.sigma_u()) {
      out.push_back(name + " projection has " + std::to_string(ed.pi.size()) +
                    " entries, expected " + std::to_string(inst.sigma_u()));
    }
    for (std::size_t s = 0; s < ed.pi.size(); ++s) {
      if (ed.pi[s] >= inst.sigma_v()) {
        out.push_back(name + " maps label " + std::to_string(s) + " outside Sigma_V");
      }
    }
  }
  for (std::size_t v = 0; v < inst.right_count(); ++v) {
    const auto deg = inst.right_edges(v).size();
    if (deg != inst.delta()) {
      out.push_back("right vertex " + std::to_string(v) + " has degree " + std::to_string(deg) +
                    ", expected " + std::to_string(inst.delta()));
    }
  }
  for (std::size_t u = 0; u < inst.k(); ++u) {
    const auto deg = inst.left_edges(u).size();
    if (deg != inst.groups()) {
      out.push_back("left vertex " + std::to_string(u) + " has degree " + std::to_string(deg) +
                    ", expected " + std::to_string(inst.groups()));
    }
    std::vector<std::size_t> per_group(inst.groups(), 0);
    for (std::size_t e : inst.left_edges(u)) ++per_group[inst.group_of(edges[e].v)];
    for (std::size_t j = 0; j < inst.groups(); ++j) {
      if (per_group[j] != 1) {
        out.push_back("left vertex " + std::to_string(u) + " has " +
                      std::to_string(per_group[j]) + " neighbors in group " +
                      std::to_string(j) + ", expected 1");
      }
    }
  }
  return out;
}

std::size_t v_of(const LabelCoverInstance& inst, std::size_t u, std::size_t j) {
  return inst.edges()[inst.edge_of(u, j)].v;
}

SparseMatrix SparseMatrix::from_entries(std::size_t rows, std::size_t cols,
                                        std::vector<Entry> e) {
  std::sort(e.begin(), e.end(), [](const Entry& a, const Entry& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });
  SparseMatrix m;
  m.rows = rows;
  m.cols = cols;
  for (const auto& x : e) {
    if (x.row >= rows || x.col >= cols) throw std::out_of_range("sparse entry out of range");
    if (!m.entries.empty() && m.entries.back().row == x.row && m.entries.back().col == x.col) {
      m.entries.back().value += x.value;
    } else {
      m.entries.push_back(x);
    }
  }
  std::erase_if(m.entries, [](const Entry& x) { return x.value == 0; });
  return m;
}

std::vector<long long> SparseMatrix::row_sums() const {
  std::vector<long long> s(rows, 0);
  for (const auto& e : entries) s[e.row] += e.value;
  return s;
}

std::vector<long long> SparseMatrix::col_sums() const {
  std::vector<long long> s(cols, 0);
  for (const auto& e : entries) s[e.col] += e.value;
  return s;
}

std::vector<double> SparseMatrix::apply(const std::vector<double>& v) const {
  if (v.size() != cols) throw std::invalid_argument("sparse apply: size mismatch");
  std::vector<double> out(rows, 0.0);
  for (const auto& e : entries) out[e.row] += static_cast<double>(e.value) * v[e.col];
  return out;
}

std::vector<double> SparseMatrix::apply_left(const std::vector<double>& v) const {
  if (v.size() != rows) throw std::invalid_argument("sparse apply_left: size mismatch");
  std::vector<double> out(cols, 0.0);
  for (const auto& e : entries) out[e.col] += static_cast<double>(e.value) * v[e.row];
  return out;
}

SparseMatrix multiply(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols != b.rows) throw std::invalid_argument("sparse multiply: inner size mismatch");
  std::vector<std::vector<std::pair<std::size_t, long long>>> brow(b.rows);
  for (const auto& e : b.entries) brow[e.row].push_back({e.col, e.value});
  std::vector<SparseMatrix::Entry> out;
  for (const auto& e : a.entries) {
    for (const auto& [c, val] : brow[e.col]) out.push_back({e.row, c, e.value * val});
  }
  return SparseMatrix::from_entries(a.rows, b.cols, std::move(out));
}

Projections projections(const LabelCoverInstance& inst, std::size_t j) {
  if (j >= inst.groups()) throw std::out_of_range("group index out of range");
  const std::size_t su = inst.sigma_u();
  const std::size_t sv = inst.sigma_v();
  const std::size_t left = inst.k() * su;
  const std::size_t mid = inst.k() * sv;
  const std::size_t right = inst.right_count() * sv;
  std::vector<SparseMatrix::Entry> pi, hat, tilde;
  for (std::size_t u = 0; u < inst.k(); ++u) {
    const auto& ed = inst.edges()[inst.edge_of(u, j)];
    for (std::size_t s = 0; s < su; ++s) {
      pi.push_back({inst.right_coord(ed.v, ed.pi.at(s)), inst.left_coord(u, s), 1});
      hat.push_back({inst.mid_coord(u, ed.pi.at(s)), inst.left_coord(u, s), 1});
    }
    for (std::size_t s = 0; s < sv; ++s) {
      tilde.push_back({inst.right_coord(ed.v, s), inst.mid_coord(u, s), 1});
    }
  }
  return Projections{SparseMatrix::from_entries(right, left, std::move(pi)),
                     SparseMatrix::from_entries(mid, left, std::move(hat)),
                     SparseMatrix::from_entries(right, mid, std::move(tilde))};
}

namespace {

void check_labeling(const LabelCoverInstance& inst, const Labeling& phi) {
  if (phi.size() != inst.k()) {
    throw std::invalid_argument("labeling has " + std::to_string(phi.size()) +
                                " entries, expected " + std::to_string(inst.k()));
  }
  for (std::size_t s : phi) {
    if (s >= inst.sigma_u()) throw std::invalid_argument("labeling uses a label outside Sigma_U");
  }
}

// Projected labels of v's neighbors, one per edge.
std::vector<std::size_t> projected(const LabelCoverInstance& inst, const Labeling& phi,
                                   std::size_t v) {
  std::vector<std::size_t> labels;
  for (std::size_t e : inst.right_edges(v)) {
    const auto& ed = inst.edges()[e];
    labels.push_back(ed.pi.at(phi[ed.u]));
  }
  return labels;
}

}  // namespace

double value(const LabelCoverInstance& inst, const Labeling& phi) {
  check_labeling(inst, phi);
  if (inst.right_count() == 0) return 0.0;
  std::size_t covered = 0;
  for (std::size_t v = 0; v < inst.right_count(); ++v) {
    const auto labels = projected(inst, phi, v);
    if (!labels.empty() &&
        std::all_of(labels.begin(), labels.end(), [&](std::size_t s) { return s == labels[0]; })) {
      ++covered;
    }
  }
  return static_cast<double>(covered) / static_cast<double>(inst.right_count());
}

double weak_value(const LabelCoverInstance& inst, const Labeling& phi) {
  check_labeling(inst, phi);
  if (inst.right_count() == 0) return 0.0;
  std::size_t covered = 0;
  for (std::size_t v = 0; v < inst.right_count(); ++v) {
    std::map<std::size_t, std::set<std::size_t>> by_label;
    for (std::size_t e : inst.right_edges(v)) {
      const auto& ed = inst.edges()[e];
      by_label[ed.pi.at(phi[ed.u])].insert(ed.u);
    }
    for (const auto& [label, us] : by_label) {
      if (us.size() >= 2) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(inst.right_count());
}

GeneratedInstance random_instance(std::size_t k, std::size_t delta, std::size_t sigma_u,
                                  std::size_t sigma_v, bool planted, Rng& rng) {
  if (k == 0 || delta == 0 || sigma_u == 0 || sigma_v == 0) {
    throw std::invalid_argument("random_instance sizes must be >= 1");
  }
  if (k % delta != 0) {
    throw std::invalid_argument("right degree " + std::to_string(delta) + " must divide k = " +
                                std::to_string(k));
  }
  if (sigma_v > sigma_u) throw std::invalid_argument("random_instance needs |Sigma_V| <= |Sigma_U|");
  const std::size_t t = k / delta;
  const std::size_t blocks = k / delta;

  Labeling phi(k, 0);
  if (planted) {
    for (auto& s : phi) s = rng.below(sigma_u);
  }
  std::vector<std::size_t> group_of;
  std::vector<LabelEdge> edges;
  std::vector<std::size_t> perm(k);
  for (std::size_t j = 0; j < t; ++j) {
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = k; i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    for (std::size_t b = 0; b < blocks; ++b) {
      const std::size_t v = group_of.size();
      group_of.push_back(j);
      const std::size_t target = planted ? rng.below(sigma_v) : 0;
      for (std::size_t i = 0; i < delta; ++i) {
        LabelEdge ed;
        ed.u = perm[b * delta + i];
        ed.v = v;
        ed.pi.resize(sigma_u);
        for (auto& s : ed.pi) s = rng.below(sigma_v);
        if (planted) ed.pi[phi[ed.u]] = target;
        edges.push_back(std::move(ed));
      }
    }
  }
  std::stable_sort(edges.begin(), edges.end(), [&](const LabelEdge& a, const LabelEdge& b) {
    return a.u != b.u ? a.u < b.u : group_of[a.v] < group_of[b.v];
  });
  LabelCoverInstance inst(k, t, delta, sigma_u, sigma_v, std::move(group_of), std::move(edges));
  std::optional<Labeling> out;
  if (planted) out = std::move(phi);
  return GeneratedInstance{std::move(inst), std::move(out)};
}

std::pair<double, Labeling> brute_force_value(const LabelCoverInstance& inst) {
  if (inst.k() > 8) throw std::invalid_argument("brute force supports k <= 8");
  const double total = std::pow(static_cast<double>(inst.sigma_u()), static_cast<double>(inst.k()));
  if (total > 2e7) throw std::invalid_argument("brute force labeling space too large");
  Labeling phi(inst.k(), 0);
  Labeling best = phi;
  double best_value = -1.0;
  for (;;) {
    const double v = value(inst, phi);
    if (v > best_value) {
      best_value = v;
      best = phi;
    }
    std::size_t i = inst.k();
    while (i > 0 && phi[i - 1] + 1 == inst.sigma_u()) phi[--i] = 0;
    if (i == 0) break;
    ++phi[i - 1];
  }
  return {best_value, best};
}

void write_instance(std::ostream& out, const LabelCoverInstance& inst) {
  out << inst.k() << ' ' << inst.groups() << ' ' << inst.delta() << ' ' << inst.sigma_u() << ' '
      << inst.sigma_v() << '\n';
  for (std::size_t u = 0; u < inst.k(); ++u) {
    std::vector<std::pair<std::size_t, std::size_t>> nb;
    for (std::size_t e : inst.left_edges(u)) {
      const auto v = inst.edges()[e].v;
      nb.push_back({inst.group_of(v), v});
    }
    std::sort(nb.begin(), nb.end());
    for (const auto& [j, v] : nb) out << u << ' ' << j << ' ' << v << '\n';
  }
  for (const auto& ed : inst.edges()) {
    out << ed.u << ' ' << ed.v;
    for (std::size_t s = 0; s < ed.pi.size(); ++s) out << ' ' << s << "->" << ed.pi[s];
    out << '\n';
  }
}

namespace {

std::size_t parse_index(const std::string& tok, std::size_t line, const char* what) {
  std::size_t pos = 0;
  unsigned long long v = 0;
  try {
    if (tok.empty() || tok[0] == '-') throw std::invalid_argument(tok);
    v = std::stoull(tok, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != tok.size() || tok.empty()) {
    throw std::runtime_error("line " + std::to_string(line) + ": bad " + what + " '" + tok + "'");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

LabelCoverInstance read_instance(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::size_t> header;
  std::map<std::size_t, std::size_t> group;  // v -> j
  std::set<std::pair<std::size_t, std::size_t>> claimed;  // (u, v) from neighbor lines
  std::vector<LabelEdge> edges;
  std::vector<std::size_t> edge_lines;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::vector<std::string> tok;
    for (std::string s; ls >> s;) tok.push_back(s);
    if (tok.empty() || tok[0][0] == '#') continue;
    if (header.empty()) {
      if (tok.size() != 5) {
        throw std::runtime_error("line " + std::to_string(lineno) +
                                 ": header must be 'k t delta |Sigma_U| |Sigma_V|'");
      }
      for (const auto& s : tok) header.push_back(parse_index(s, lineno, "header field"));
      continue;
    }
    const bool is_edge = tok.size() > 2 && tok[2].find("->") != std::string::npos;
    if (!is_edge) {
      if (tok.size() != 3) {
        throw std::runtime_error("line " + std::to_string(lineno) + ": expected 'u j v'");
      }
      const auto u = parse_index(tok[0], lineno, "left vertex");
      const auto j = parse_index(tok[1], lineno, "group");
      const auto v = parse_index(tok[2], lineno, "right vertex");
      auto [it, fresh] = group.insert({v, j});
      if (!fresh && it->second != j) {
        throw std::runtime_error("line " + std::to_string(lineno) + ": right vertex " +
                                 std::to_string(v) + " assigned to two groups");
      }
      claimed.insert({u, v});
      continue;
    }
    LabelEdge ed;
    ed.u = parse_index(tok[0], lineno, "left vertex");
    ed.v = parse_index(tok[1], lineno, "right vertex");
    ed.pi.assign(header[3], 0);
    std::vector<bool> set(header[3], false);
    for (std::size_t i = 2; i < tok.size(); ++i) {
      const auto arrow = tok[i].find("->");
      if (arrow == std::string::npos) {
        throw std::runtime_error("line " + std::to_string(lineno) + ": expected 'a->b', got '" +
                                 tok[i] + "'");
      }
      const auto a = parse_index(tok[i].substr(0, arrow), lineno, "label");
      const auto b = parse_index(tok[i].substr(arrow + 2), lineno, "label");
      if (a >= header[3] || set[a]) {
        throw std::runtime_error("line " + std::to_string(lineno) + ": label " +
                                 std::to_string(a) + " out of range or repeated");
      }
      ed.pi[a] = b;
      set[a] = true;
    }
    if (std::find(set.begin(), set.end(), false) != set.end()) {
      throw std::runtime_error("line " + std::to_string(lineno) +
                               ": projection is not total on Sigma_U");
    }
    edges.push_back(std::move(ed));
    edge_lines.push_back(lineno);
  }
  if (header.empty()) throw std::runtime_error("instance file is empty");
  std::size_t right = 0;
  for (const auto& [v, j] : group) right = std::max(right, v + 1);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    if (!group.count(edges[e].v)) {
      throw std::runtime_error("line " + std::to_string(edge_lines[e]) + ": right vertex " +
                               std::to_string(edges[e].v) + " has no group line");
    }
    if (!claimed.erase({edges[e].u, edges[e].v})) {
      throw std::runtime_error("line " + std::to_string(edge_lines[e]) +
                               ": edge has no matching 'u j v' line");
    }
  }
  if (!claimed.empty()) {
    throw std::runtime_error("neighbor line (" + std::to_string(claimed.begin()->first) + ", " +
                             std::to_string(claimed.begin()->second) + ") has no edge line");
  }
  std::vector<std::size_t> group_of(right, 0);
  for (std::size_t v = 0; v < right; ++v) {
    auto it = group.find(v);
    if (it == group.end()) {
      throw std::runtime_error("right vertex " + std::to_string(v) + " is missing");
    }
    group_of[v] = it->second;
  }
  try {
    return LabelCoverInstance(header[0], header[1], header[2], header[3], header[4],
                              std::move(group_of), std::move(edges));
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("invalid instance: ") + e.what());
  }
}

void write_instance(const std::string& path, const LabelCoverInstance& inst) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_instance(out, inst);
}

LabelCoverInstance read_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  try {
    return read_instance(in);
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

void write_labeling(std::ostream& out, const Labeling& phi) {
  out << phi.size() << '\n';
  for (std::size_t i = 0; i < phi.size(); ++i) out << (i ? " " : "") << phi[i];
  out << '\n';
}

Labeling read_labeling(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw std::runtime_error("labeling file is empty");
  const auto k = parse_index(tok, 1, "labeling size");
  Labeling phi(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (!(in >> tok)) throw std::runtime_error("labeling ends after " + std::to_string(i) + " labels");
    phi[i] = parse_index(tok, 2, "label");
  }
  if (in >> tok) throw std::runtime_error("labeling has trailing data '" + tok + "'");
  return phi;
}

void write_labeling(const std::string& path, const Labeling& phi) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_labeling(out, phi);
}

Labeling read_labeling(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_labeling(in);
}

}  // namespace robusthalf
