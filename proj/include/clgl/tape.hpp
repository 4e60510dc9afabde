#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "clgl/tensor.hpp"

namespace clgl {

// A named learnable tensor. Gradients accumulate into `grad` when a tape
// referencing the parameter runs backward.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v) : name(std::move(n)), value(v), grad(Tensor::zeros(v.shape)) {}

  void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), 0.0); }
};

// Define-by-run reverse-mode tape over a fixed primitive set. Each call
// evaluates immediately and records what backward() needs. Rebuilding a tape
// from identical inputs reproduces identical values bit for bit.
class Tape {
 public:
  using NodeId = std::uint32_t;

  // Leaves.
  NodeId input(Tensor value);           // constant, no gradient
  NodeId param(Parameter& p);           // learnable leaf

  // Primitives.
  NodeId matmul(NodeId a, NodeId b);
  NodeId add(NodeId a, NodeId b);                       // same shape
  NodeId add_rowvec(NodeId m, NodeId row);              // broadcast row over matrix rows
  NodeId mul(NodeId a, NodeId b);                       // Hadamard, same shape
  NodeId scale(NodeId a, double c);
  NodeId log_(NodeId a);                                // elementwise ln, input must be positive
  NodeId exp_(NodeId a);
  NodeId relu(NodeId a);
  NodeId gather_rows(NodeId a, std::vector<std::uint32_t> rows);
  NodeId replace_rows(NodeId dst, std::vector<std::uint32_t> rows, NodeId src);  // distinct row indices
  NodeId concat_rows(const std::vector<NodeId>& parts);
  NodeId scale_rows(NodeId a, std::vector<double> weights);  // constant per-row factor
  NodeId sum(NodeId a);        // -> scalar {1}
  NodeId mean(NodeId a);       // -> scalar {1}
  NodeId mean_rows(NodeId a);  // {r,c} -> {1,c}
  NodeId softmax(NodeId a);    // over a vector or a 1-row matrix
  NodeId kl_to(Tensor target_p, NodeId q);              // KL(p||floor_normalize(q)) -> scalar
  NodeId cross_entropy(NodeId logits, std::size_t label);  // -> scalar

  // Convenience compositions (no new primitives).
  NodeId sub(NodeId a, NodeId b) { return add(a, scale(b, -1.0)); }
  NodeId affine(NodeId m, NodeId w, NodeId b) { return add_rowvec(matmul(m, w), b); }

  const Tensor& value(NodeId id) const { return nodes_[id].value; }
  std::size_t size() const { return nodes_.size(); }

  // Reverse pass from a scalar root (seed 1), or with an explicit seed of the
  // root's shape. Requires the forward pass (node construction) to have run.
  void backward(NodeId root);
  void backward(NodeId root, const Tensor& seed);

  // Gradient w.r.t. any node; valid after backward. Zero tensor when the node
  // did not participate.
  Tensor grad_of(NodeId id) const;

 private:
  enum class Op : std::uint8_t {
    kInput, kParam, kMatMul, kAdd, kAddRowVec, kMul, kScale, kLog, kExp, kRelu,
    kGatherRows, kReplaceRows, kConcatRows, kScaleRows, kSum, kMean, kMeanRows,
    kSoftmax, kKlToConst, kCrossEntropy,
  };

  struct Node {
    Op op;
    NodeId in0 = 0, in1 = 0;
    Tensor value;
    Tensor grad;           // allocated during backward
    bool grad_ready = false;
    double scalar = 0.0;   // scale factor
    std::size_t label = 0; // cross-entropy class
    std::vector<std::uint32_t> idx;   // gather/replace row lists
    std::vector<NodeId> multi;        // concat inputs
    std::vector<double> weights;      // scale_rows factors / kl target / saved softmax
    Parameter* parameter = nullptr;
  };

  NodeId push(Node n);
  void check_matrix(NodeId id, const char* op) const;
  void accumulate(NodeId id, const Tensor& g);
  [[noreturn]] void fail(const char* op, NodeId at, const std::string& what) const;

  std::vector<Node> nodes_;
  bool ran_backward_ = false;
};

}  // namespace clgl
