#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clgl/graph.hpp"

namespace clgl::expert {

inline constexpr double kSmoothing = 0.05;  // epsilon in the target distribution

// Per-intervention-type tempering exponents; flatter targets for more
// invasive interventions.
inline constexpr double kGammas[3] = {1.0, 0.5, 0.25};
inline constexpr int kNumInterventionTypes = 3;

// Structural summary of the connection point, computed once per graph.
struct MorphologyDescriptor {
  std::uint32_t degree = 0;            // bridge edge excluded
  bool on_cycle = false;
  std::vector<std::uint32_t> neighbor_degrees;  // within the embodiment subgraph, sorted
  double clustering = 0.0;             // of the connection node
};

// r^E: descriptor of the connection-point morphology.
MorphologyDescriptor expert_embed(const graphs::GraphSample& g);

int descriptor_class(const MorphologyDescriptor& d);

// r^P: smoothed one-hot distribution over the morphology classes,
// (1-eps) * onehot + eps * uniform.
std::vector<double> expert_project(const MorphologyDescriptor& d, double eps = kSmoothing);

// r^I: tempered target p^gamma_j / Z for intervention type j in {1..K}.
std::vector<double> expert_intervened(const std::vector<double>& p, int type_index);

// Precomputed targets for one graph.
struct ExpertTargets {
  std::int64_t graph_id = 0;
  std::vector<double> rp;
  std::vector<std::vector<double>> ri;  // one per intervention type
};

ExpertTargets targets_for(const graphs::GraphSample& g, int k_types = kNumInterventionTypes);

// Optional JSON-lines cache of precomputed targets.
void save_targets(const std::vector<ExpertTargets>& targets, const std::string& path);
std::vector<ExpertTargets> load_targets(const std::string& path);

}  // namespace clgl::expert
