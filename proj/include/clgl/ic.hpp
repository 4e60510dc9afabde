#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "clgl/scm.hpp"

namespace clgl::causal {

enum class EdgeMark : std::uint8_t { kNone, kUndirected, kDirected, kDashedBidirected };

// Mixed graph over named vertices. mark(a, b) == kDirected means a -> b;
// undirected and dashed marks are stored symmetrically.
struct PatternGraph {
  std::vector<std::string> names;
  std::vector<EdgeMark> marks;  // row-major names.size() x names.size()

  explicit PatternGraph(std::vector<std::string> n);
  std::size_t index_of(const std::string& name) const;

  EdgeMark mark(std::size_t a, std::size_t b) const { return marks[a * names.size() + b]; }
  bool adjacent(std::size_t a, std::size_t b) const;
  void set_undirected(std::size_t a, std::size_t b);
  void set_directed(std::size_t from, std::size_t to);
  void set_dashed(std::size_t a, std::size_t b);
  void clear_edge(std::size_t a, std::size_t b);

  bool operator==(const PatternGraph& o) const { return names == o.names && marks == o.marks; }
  std::string describe() const;
};

// Standard path-blocking d-separation over all simple paths. The pattern must
// contain directed edges only.
bool d_separated(const PatternGraph& dag, std::size_t a, std::size_t b, const std::vector<std::size_t>& given);
bool d_separated(const PatternGraph& dag, const std::string& a, const std::string& b,
                 const std::vector<std::string>& given);

// Answers "a independent of b given cond?" exactly.
using CiOracle = std::function<bool(std::size_t a, std::size_t b, const std::vector<std::size_t>& cond)>;

struct BackgroundOrientation {
  std::string from, to;
};

// Inductive-causation discovery: exhaustive separating-set search, v-structure
// orientation plus background orientations, then the first Meek rule. Edges
// still undirected at the end are reported as dashed-bidirected.
PatternGraph ic_discover(const CiOracle& oracle, const std::vector<std::string>& names,
                         const std::vector<BackgroundOrientation>& background = {});

// Exact CI oracle over an enumerated joint (conditional MI <= 1e-12).
CiOracle ci_oracle_from_joint(const JointTable& joint, const std::vector<std::string>& names);

// The Figure-3 DAG over {S~, S*, C, X, G, R, T~, T} (no dashed edge), used for
// the d-separation table.
PatternGraph figure3_dag();

// The expected discovery output: all seven directed edges plus the dashed
// S~ -- S* edge.
PatternGraph figure3_expected_pattern();

}  // namespace clgl::causal
