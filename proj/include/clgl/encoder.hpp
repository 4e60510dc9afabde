#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clgl/graph.hpp"
#include "clgl/rng.hpp"
#include "clgl/tape.hpp"

namespace clgl::gnn {

enum class LayerKind { kLocalExtremum, kMeanAggregate };

std::string layer_kind_name(LayerKind k);
LayerKind layer_kind_from_name(const std::string& name);

struct EncoderConfig {
  std::vector<std::size_t> widths{4, 32, 32, 32};
  LayerKind kind = LayerKind::kLocalExtremum;
  std::size_t m = 2;  // embodiment tap layer
  std::size_t num_label_classes = 3;
  std::size_t num_factor_classes = 4;
  std::size_t proj_hidden = 32;

  std::size_t num_layers() const { return widths.size(); }
  void validate() const;
};

// All learnable tensors, in a fixed order so initialization and checkpoints
// are reproducible. Storage is never resized after construction; tapes hold
// pointers into it for the duration of one batch.
struct ModelParams {
  EncoderConfig cfg;
  std::vector<Parameter> params;

  Parameter& by_name(const std::string& name);
  const Parameter& by_name(const std::string& name) const;
  void zero_grads();
  std::uint64_t value_hash() const;  // FNV over raw bytes, for determinism checks
};

ModelParams init_params(const EncoderConfig& cfg, std::uint64_t seed);

// Per-graph constant tensors consumed by the encoder.
struct GraphTensors {
  Tensor features;       // n x 4
  Tensor anorm;          // row-normalized adjacency (local-extremum)
  Tensor pnorm;          // row-normalized adjacency + self loops (mean-aggregate)
  std::vector<double> degree_mask;  // 1 if deg > 0 else 0
  bool has_isolated = false;
  std::vector<std::uint32_t> embodiment;
  std::vector<std::uint32_t> non_embodiment;
  std::uint32_t num_nodes = 0;
};

GraphTensors graph_tensors(const graphs::GraphSample& g);

// Value-only per-layer representations (layer 0 = raw features).
struct NodeRepresentations {
  std::vector<Tensor> layers;
};

// Tape-resident encoder output for one graph.
struct EncodeNodes {
  std::vector<Tape::NodeId> layers;
};

// f^E
EncodeNodes encode_on_tape(Tape& tape, const GraphTensors& gt, ModelParams& mp);
NodeRepresentations encode(const graphs::GraphSample& g, ModelParams& mp);

// f^H: global mean pool over the last layer, then an affine map to logits.
Tape::NodeId classify_on_tape(Tape& tape, const EncodeNodes& enc, ModelParams& mp);
std::vector<double> classify(const NodeRepresentations& reps, ModelParams& mp);

// f^P: mean pool of layer-m embodiment rows -> 2-layer perceptron -> softmax.
Tape::NodeId project_on_tape(Tape& tape, const EncodeNodes& enc, const std::vector<std::uint32_t>& embodiment,
                             ModelParams& mp);
std::vector<double> project_embodiment(const NodeRepresentations& reps, const std::vector<std::uint32_t>& embodiment,
                                       ModelParams& mp);

// Auxiliary label head used by the CLGL-D mode.
Tape::NodeId aux_classify_on_tape(Tape& tape, const EncodeNodes& enc, ModelParams& mp);

enum class InterventionSource { kSameGraph, kCrossGraph, kBatchMean };

struct InterventionPlan {
  int type_index = 1;
  double rho = 0.25;
  InterventionSource source = InterventionSource::kSameGraph;
  std::vector<std::uint32_t> replaced_positions;  // indices into the embodiment list
  std::vector<std::uint32_t> source_rows;         // node ids in the source graph
  std::size_t source_graph = 0;                   // batch position (cross-graph)
  bool fallback = false;                          // fell back to the batch mean
};

// Default (rho, source) schedule per type index.
double plan_rho(int type_index);
InterventionSource plan_source(int type_index);

// Draw a seeded plan for graph `batch_pos` of a batch. Node-sourced types
// fall back to the batch mean when no valid source exists.
InterventionPlan make_plan(int type_index, const std::vector<const GraphTensors*>& batch, std::size_t batch_pos,
                           Rng& rng);

// Shared context for batch-level interventions over one tape.
struct BatchContext {
  std::vector<const GraphTensors*> graphs;
  std::vector<EncodeNodes> encodes;
  Tape::NodeId batch_mean = UINT32_MAX;  // lazily built over layer-m rows

  Tape::NodeId mean_row(Tape& tape, std::size_t m);
};

// f^I_j: same head as f^P after replacing planned embodiment rows.
Tape::NodeId intervene_on_tape(Tape& tape, BatchContext& ctx, std::size_t batch_pos, const InterventionPlan& plan,
                               ModelParams& mp);
std::vector<double> intervene_project(const graphs::GraphSample& g, const InterventionPlan& plan, ModelParams& mp);

// Checkpoint I/O: JSON-lines of named tensors, 17-significant-digit floats.
void save_checkpoint(const ModelParams& mp, const std::string& path);
void load_checkpoint(ModelParams& mp, const std::string& path);

}  // namespace clgl::gnn
