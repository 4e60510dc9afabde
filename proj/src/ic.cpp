#include "clgl/ic.hpp"

#include <algorithm>
#include <stdexcept>

namespace clgl::causal {

PatternGraph::PatternGraph(std::vector<std::string> n) : names(std::move(n)) {
  marks.assign(names.size() * names.size(), EdgeMark::kNone);
}

std::size_t PatternGraph::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  throw std::invalid_argument("pattern: unknown vertex " + name);
}

bool PatternGraph::adjacent(std::size_t a, std::size_t b) const {
  return mark(a, b) != EdgeMark::kNone || mark(b, a) != EdgeMark::kNone;
}

void PatternGraph::set_undirected(std::size_t a, std::size_t b) {
  marks[a * names.size() + b] = EdgeMark::kUndirected;
  marks[b * names.size() + a] = EdgeMark::kUndirected;
}

void PatternGraph::set_directed(std::size_t from, std::size_t to) {
  marks[from * names.size() + to] = EdgeMark::kDirected;
  marks[to * names.size() + from] = EdgeMark::kNone;
}

void PatternGraph::set_dashed(std::size_t a, std::size_t b) {
  marks[a * names.size() + b] = EdgeMark::kDashedBidirected;
  marks[b * names.size() + a] = EdgeMark::kDashedBidirected;
}

void PatternGraph::clear_edge(std::size_t a, std::size_t b) {
  marks[a * names.size() + b] = EdgeMark::kNone;
  marks[b * names.size() + a] = EdgeMark::kNone;
}

std::string PatternGraph::describe() const {
  std::string out;
  for (std::size_t a = 0; a < names.size(); ++a) {
    for (std::size_t b = 0; b < names.size(); ++b) {
      if (mark(a, b) == EdgeMark::kDirected) out += names[a] + " -> " + names[b] + "; ";
      if (b > a && mark(a, b) == EdgeMark::kUndirected) out += names[a] + " -- " + names[b] + "; ";
      if (b > a && mark(a, b) == EdgeMark::kDashedBidirected) out += names[a] + " <-dashed-> " + names[b] + "; ";
    }
  }
  return out;
}

namespace {

// Descendants of v through directed edges, v included.
std::vector<char> descendants(const PatternGraph& g, std::size_t v) {
  const std::size_t n = g.names.size();
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack{v};
  seen[v] = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t w = 0; w < n; ++w) {
      if (!seen[w] && g.mark(u, w) == EdgeMark::kDirected) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

bool path_blocked(const PatternGraph& g, const std::vector<std::size_t>& path, const std::vector<char>& in_z) {
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    const std::size_t prev = path[i - 1], v = path[i], next = path[i + 1];
    const bool collider = g.mark(prev, v) == EdgeMark::kDirected && g.mark(next, v) == EdgeMark::kDirected;
    if (collider) {
      const auto desc = descendants(g, v);
      bool opened = false;
      for (std::size_t w = 0; w < g.names.size(); ++w) {
        if (desc[w] && in_z[w]) {
          opened = true;
          break;
        }
      }
      if (!opened) return true;
    } else if (in_z[v]) {
      return true;
    }
  }
  return false;
}

bool all_paths_blocked(const PatternGraph& g, std::size_t a, std::size_t b, const std::vector<char>& in_z,
                       std::vector<std::size_t>& path, std::vector<char>& on_path) {
  const std::size_t u = path.back();
  if (u == b) return path_blocked(g, path, in_z);
  for (std::size_t w = 0; w < g.names.size(); ++w) {
    if (on_path[w] || !g.adjacent(u, w)) continue;
    path.push_back(w);
    on_path[w] = 1;
    const bool ok = all_paths_blocked(g, a, b, in_z, path, on_path);
    on_path[w] = 0;
    path.pop_back();
    if (!ok) return false;
  }
  return true;
}

}  // namespace

bool d_separated(const PatternGraph& dag, std::size_t a, std::size_t b, const std::vector<std::size_t>& given) {
  for (std::size_t i = 0; i < dag.names.size(); ++i)
    for (std::size_t j = 0; j < dag.names.size(); ++j)
      if (dag.mark(i, j) != EdgeMark::kNone && dag.mark(i, j) != EdgeMark::kDirected)
        throw std::invalid_argument("d_separated: pattern must be a directed subgraph");
  std::vector<char> in_z(dag.names.size(), 0);
  for (std::size_t z : given) in_z[z] = 1;
  std::vector<std::size_t> path{a};
  std::vector<char> on_path(dag.names.size(), 0);
  on_path[a] = 1;
  return all_paths_blocked(dag, a, b, in_z, path, on_path);
}

bool d_separated(const PatternGraph& dag, const std::string& a, const std::string& b,
                 const std::vector<std::string>& given) {
  std::vector<std::size_t> z;
  for (const std::string& name : given) z.push_back(dag.index_of(name));
  return d_separated(dag, dag.index_of(a), dag.index_of(b), z);
}

namespace {

// Subsets of `pool` in order of increasing size, then lexicographic.
std::vector<std::vector<std::size_t>> subsets_by_size(const std::vector<std::size_t>& pool) {
  std::vector<std::vector<std::size_t>> out;
  const std::size_t n = pool.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<std::size_t> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) s.push_back(pool[i]);
    out.push_back(std::move(s));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& x, const auto& y) { return x.size() < y.size(); });
  return out;
}

}  // namespace

PatternGraph ic_discover(const CiOracle& oracle, const std::vector<std::string>& names,
                         const std::vector<BackgroundOrientation>& background) {
  const std::size_t n = names.size();
  PatternGraph g(names);

  // Step 1: skeleton by exhaustive separating-set search.
  std::vector<std::vector<std::vector<std::size_t>>> sepset(n, std::vector<std::vector<std::size_t>>(n));
  std::vector<std::vector<char>> separated(n, std::vector<char>(n, 0));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      std::vector<std::size_t> pool;
      for (std::size_t v = 0; v < n; ++v)
        if (v != a && v != b) pool.push_back(v);
      bool found = false;
      for (const auto& s : subsets_by_size(pool)) {
        const bool ab = oracle(a, b, s);
        const bool ba = oracle(b, a, s);
        if (ab != ba) throw std::invalid_argument("ic_discover: oracle answers are asymmetric");
        if (ab) {
          sepset[a][b] = s;
          sepset[b][a] = s;
          separated[a][b] = separated[b][a] = 1;
          found = true;
          break;
        }
      }
      if (!found) g.set_undirected(a, b);
    }
  }

  // Step 2: v-structures a -> c <- b for nonadjacent a, b with c not in S_ab.
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (g.adjacent(a, b) || !separated[a][b]) continue;
      for (std::size_t c = 0; c < n; ++c) {
        if (c == a || c == b || !g.adjacent(a, c) || !g.adjacent(b, c)) continue;
        const auto& s = sepset[a][b];
        if (std::find(s.begin(), s.end(), c) == s.end()) {
          if (g.mark(a, c) == EdgeMark::kUndirected) g.set_directed(a, c);
          if (g.mark(b, c) == EdgeMark::kUndirected) g.set_directed(b, c);
        }
      }
    }
  }
  // Background knowledge (causes fixed by definition).
  for (const BackgroundOrientation& bg : background) {
    const std::size_t from = g.index_of(bg.from), to = g.index_of(bg.to);
    if (g.mark(from, to) == EdgeMark::kUndirected) g.set_directed(from, to);
  }

  // Step 3: Meek rule 1 — a -> b, b -- c, a and c nonadjacent gives b -> c.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (g.mark(a, b) != EdgeMark::kDirected) continue;
        for (std::size_t c = 0; c < n; ++c) {
          if (c == a || c == b) continue;
          if (g.mark(b, c) == EdgeMark::kUndirected && !g.adjacent(a, c)) {
            g.set_directed(b, c);
            changed = true;
          }
        }
      }
    }
  }

  // Remaining undirected edges have no determinable orientation.
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = a + 1; b < n; ++b)
      if (g.mark(a, b) == EdgeMark::kUndirected) g.set_dashed(a, b);

  return g;
}

CiOracle ci_oracle_from_joint(const JointTable& joint, const std::vector<std::string>& names) {
  return [&joint, names](std::size_t a, std::size_t b, const std::vector<std::size_t>& cond) {
    std::vector<std::string> given;
    for (std::size_t c : cond) given.push_back(names[c]);
    return mutual_information(joint, {names[a]}, {names[b]}, given) <= 1e-12;
  };
}

PatternGraph figure3_dag() {
  PatternGraph g({"S~", "S*", "C", "X", "G", "R", "T~", "T"});
  g.set_directed(g.index_of("S~"), g.index_of("X"));
  g.set_directed(g.index_of("S*"), g.index_of("X"));
  g.set_directed(g.index_of("X"), g.index_of("G"));
  g.set_directed(g.index_of("C"), g.index_of("G"));
  g.set_directed(g.index_of("G"), g.index_of("R"));
  g.set_directed(g.index_of("G"), g.index_of("T~"));
  g.set_directed(g.index_of("R"), g.index_of("T"));
  return g;
}

PatternGraph figure3_expected_pattern() {
  PatternGraph g = figure3_dag();
  g.set_dashed(g.index_of("S~"), g.index_of("S*"));
  return g;
}

}  // namespace clgl::causal
