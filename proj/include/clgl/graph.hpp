#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace clgl::graphs {

enum class Split { kTrain, kVal, kTest };

std::string split_name(Split s);
Split split_from_name(const std::string& name);

inline constexpr std::size_t kFeatureWidth = 4;
inline constexpr int kNumClasses = 3;
inline constexpr int kNumMorphologyClasses = 4;

// Morphology classes of the connection point, the value space of the
// accessible causal factor. Order: acyclic-low, acyclic-high, cyclic-low,
// cyclic-high.
enum Morphology : int {
  kAcyclicLow = 0,
  kAcyclicHigh = 1,
  kCyclicLow = 2,
  kCyclicHigh = 3,
};

// One attributed graph: a class-determining motif stitched to a
// label-irrelevant confounder by a single bridge edge.
struct GraphSample {
  std::int64_t id = 0;
  std::uint32_t num_nodes = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // u < v, unique
  std::vector<std::array<double, kFeatureWidth>> node_features;
  int label = 0;             // equals motif_class
  int motif_class = 0;
  int confounder_class = 0;
  std::uint32_t connection_node = 0;  // motif-side endpoint of the bridge
  std::vector<std::uint32_t> embodiment_nodes;  // sorted
  Split split = Split::kTrain;
};

std::vector<std::vector<std::uint32_t>> adjacency(const GraphSample& g);

// Closed radius-hop neighborhood of the connection node.
std::vector<std::uint32_t> embodiment_of(const GraphSample& g, std::uint32_t radius);

// True when the connection node lies on a cycle (necessarily on the motif
// side, since the bridge is a cut edge).
bool connection_on_cycle(const GraphSample& g);

// Degree of the connection node with the bridge edge excluded.
std::uint32_t connection_motif_degree(const GraphSample& g);

// 4-way class from (on-cycle) x (motif-side degree >= 3).
int morphology_class(const GraphSample& g);

bool is_connected(const GraphSample& g);

}  // namespace clgl::graphs
