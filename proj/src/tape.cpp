#include "clgl/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace clgl {

namespace {

void matmul_plain(const Tensor& a, const Tensor& b, Tensor& out) {
  const std::size_t r = a.shape[0], k = a.shape[1], c = b.shape[1];
  for (std::size_t i = 0; i < r; ++i) {
    double* orow = &out.data[i * c];
    const double* arow = &a.data[i * k];
    for (std::size_t t = 0; t < k; ++t) {
      const double av = arow[t];
      if (av == 0.0) continue;
      const double* brow = &b.data[t * c];
      for (std::size_t j = 0; j < c; ++j) orow[j] += av * brow[j];
    }
  }
}

}  // namespace

void Tape::fail(const char* op, NodeId at, const std::string& what) const {
  throw std::invalid_argument(std::string("tape: ") + op + " at node " + std::to_string(at) + ": " + what);
}

Tape::NodeId Tape::push(Node n) {
  if (ran_backward_) throw std::logic_error("tape: cannot extend after backward");
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

void Tape::check_matrix(NodeId id, const char* op) const {
  if (nodes_[id].value.rank() != 2) fail(op, static_cast<NodeId>(nodes_.size()), "expected rank-2 operand " + nodes_[id].value.shape_str());
}

Tape::NodeId Tape::input(Tensor value) {
  Node n;
  n.op = Op::kInput;
  n.value = std::move(value);
  return push(std::move(n));
}

Tape::NodeId Tape::param(Parameter& p) {
  Node n;
  n.op = Op::kParam;
  n.value = p.value;
  n.parameter = &p;
  return push(std::move(n));
}

Tape::NodeId Tape::matmul(NodeId a, NodeId b) {
  check_matrix(a, "matmul");
  check_matrix(b, "matmul");
  const Tensor& va = nodes_[a].value;
  const Tensor& vb = nodes_[b].value;
  if (va.shape[1] != vb.shape[0])
    fail("matmul", static_cast<NodeId>(nodes_.size()), "inner dims " + va.shape_str() + " x " + vb.shape_str());
  Node n;
  n.op = Op::kMatMul;
  n.in0 = a;
  n.in1 = b;
  n.value = Tensor::zeros({va.shape[0], vb.shape[1]});
  matmul_plain(va, vb, n.value);
  return push(std::move(n));
}

Tape::NodeId Tape::add(NodeId a, NodeId b) {
  const Tensor& va = nodes_[a].value;
  const Tensor& vb = nodes_[b].value;
  if (!va.same_shape(vb)) fail("add", static_cast<NodeId>(nodes_.size()), va.shape_str() + " vs " + vb.shape_str());
  Node n;
  n.op = Op::kAdd;
  n.in0 = a;
  n.in1 = b;
  n.value = va;
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data[i] += vb.data[i];
  return push(std::move(n));
}

Tape::NodeId Tape::add_rowvec(NodeId m, NodeId row) {
  check_matrix(m, "add_rowvec");
  const Tensor& vm = nodes_[m].value;
  const Tensor& vr = nodes_[row].value;
  if (vr.rank() != 1 || vr.shape[0] != vm.shape[1])
    fail("add_rowvec", static_cast<NodeId>(nodes_.size()), vm.shape_str() + " vs " + vr.shape_str());
  Node n;
  n.op = Op::kAddRowVec;
  n.in0 = m;
  n.in1 = row;
  n.value = vm;
  const std::size_t c = vm.shape[1];
  for (std::size_t i = 0; i < vm.shape[0]; ++i)
    for (std::size_t j = 0; j < c; ++j) n.value.data[i * c + j] += vr.data[j];
  return push(std::move(n));
}

Tape::NodeId Tape::mul(NodeId a, NodeId b) {
  const Tensor& va = nodes_[a].value;
  const Tensor& vb = nodes_[b].value;
  if (!va.same_shape(vb)) fail("mul", static_cast<NodeId>(nodes_.size()), va.shape_str() + " vs " + vb.shape_str());
  Node n;
  n.op = Op::kMul;
  n.in0 = a;
  n.in1 = b;
  n.value = va;
  for (std::size_t i = 0; i < n.value.size(); ++i) n.value.data[i] *= vb.data[i];
  return push(std::move(n));
}

Tape::NodeId Tape::scale(NodeId a, double c) {
  Node n;
  n.op = Op::kScale;
  n.in0 = a;
  n.scalar = c;
  n.value = nodes_[a].value;
  for (double& v : n.value.data) v *= c;
  return push(std::move(n));
}

Tape::NodeId Tape::log_(NodeId a) {
  Node n;
  n.op = Op::kLog;
  n.in0 = a;
  n.value = nodes_[a].value;
  for (double& v : n.value.data) {
    if (v <= 0.0) fail("log", static_cast<NodeId>(nodes_.size()), "non-positive input");
    v = std::log(v);
  }
  return push(std::move(n));
}

Tape::NodeId Tape::exp_(NodeId a) {
  Node n;
  n.op = Op::kExp;
  n.in0 = a;
  n.value = nodes_[a].value;
  for (double& v : n.value.data) v = std::exp(v);
  return push(std::move(n));
}

Tape::NodeId Tape::relu(NodeId a) {
  Node n;
  n.op = Op::kRelu;
  n.in0 = a;
  n.value = nodes_[a].value;
  for (double& v : n.value.data) v = v > 0.0 ? v : 0.0;
  return push(std::move(n));
}

Tape::NodeId Tape::gather_rows(NodeId a, std::vector<std::uint32_t> rows) {
  check_matrix(a, "gather_rows");
  const Tensor& va = nodes_[a].value;
  for (std::uint32_t r : rows)
    if (r >= va.shape[0]) fail("gather_rows", static_cast<NodeId>(nodes_.size()), "row index out of range");
  Node n;
  n.op = Op::kGatherRows;
  n.in0 = a;
  const std::size_t c = va.shape[1];
  n.value = Tensor::zeros({rows.size(), c});
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy_n(&va.data[rows[i] * c], c, &n.value.data[i * c]);
  n.idx = std::move(rows);
  return push(std::move(n));
}

Tape::NodeId Tape::replace_rows(NodeId dst, std::vector<std::uint32_t> rows, NodeId src) {
  check_matrix(dst, "replace_rows");
  check_matrix(src, "replace_rows");
  const Tensor& vd = nodes_[dst].value;
  const Tensor& vs = nodes_[src].value;
  if (vs.shape[0] != rows.size() || vs.shape[1] != vd.shape[1])
    fail("replace_rows", static_cast<NodeId>(nodes_.size()), "source shape " + vs.shape_str());
  std::vector<std::uint32_t> sorted = rows;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    fail("replace_rows", static_cast<NodeId>(nodes_.size()), "duplicate target row");
  for (std::uint32_t r : rows)
    if (r >= vd.shape[0]) fail("replace_rows", static_cast<NodeId>(nodes_.size()), "row index out of range");
  Node n;
  n.op = Op::kReplaceRows;
  n.in0 = dst;
  n.in1 = src;
  n.value = vd;
  const std::size_t c = vd.shape[1];
  for (std::size_t i = 0; i < rows.size(); ++i)
    std::copy_n(&vs.data[i * c], c, &n.value.data[rows[i] * c]);
  n.idx = std::move(rows);
  return push(std::move(n));
}

Tape::NodeId Tape::concat_rows(const std::vector<NodeId>& parts) {
  if (parts.empty()) fail("concat_rows", static_cast<NodeId>(nodes_.size()), "no inputs");
  const std::size_t c = nodes_[parts[0]].value.shape[1];
  std::size_t total = 0;
  for (NodeId p : parts) {
    check_matrix(p, "concat_rows");
    if (nodes_[p].value.shape[1] != c) fail("concat_rows", static_cast<NodeId>(nodes_.size()), "column mismatch");
    total += nodes_[p].value.shape[0];
  }
  Node n;
  n.op = Op::kConcatRows;
  n.value = Tensor::zeros({total, c});
  std::size_t row = 0;
  for (NodeId p : parts) {
    const Tensor& vp = nodes_[p].value;
    std::copy(vp.data.begin(), vp.data.end(), &n.value.data[row * c]);
    row += vp.shape[0];
  }
  n.multi = parts;
  return push(std::move(n));
}

Tape::NodeId Tape::scale_rows(NodeId a, std::vector<double> weights) {
  check_matrix(a, "scale_rows");
  const Tensor& va = nodes_[a].value;
  if (weights.size() != va.shape[0]) fail("scale_rows", static_cast<NodeId>(nodes_.size()), "weight count");
  Node n;
  n.op = Op::kScaleRows;
  n.in0 = a;
  n.value = va;
  const std::size_t c = va.shape[1];
  for (std::size_t i = 0; i < va.shape[0]; ++i)
    for (std::size_t j = 0; j < c; ++j) n.value.data[i * c + j] *= weights[i];
  n.weights = std::move(weights);
  return push(std::move(n));
}

Tape::NodeId Tape::sum(NodeId a) {
  Node n;
  n.op = Op::kSum;
  n.in0 = a;
  double s = 0.0;
  for (double v : nodes_[a].value.data) s += v;
  n.value = Tensor::vector({s});
  return push(std::move(n));
}

Tape::NodeId Tape::mean(NodeId a) {
  Node n;
  n.op = Op::kMean;
  n.in0 = a;
  double s = 0.0;
  for (double v : nodes_[a].value.data) s += v;
  n.value = Tensor::vector({s / static_cast<double>(nodes_[a].value.size())});
  return push(std::move(n));
}

Tape::NodeId Tape::mean_rows(NodeId a) {
  check_matrix(a, "mean_rows");
  const Tensor& va = nodes_[a].value;
  const std::size_t r = va.shape[0], c = va.shape[1];
  if (r == 0) fail("mean_rows", static_cast<NodeId>(nodes_.size()), "empty matrix");
  Node n;
  n.op = Op::kMeanRows;
  n.in0 = a;
  n.value = Tensor::zeros({1, c});
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) n.value.data[j] += va.data[i * c + j];
  for (double& v : n.value.data) v /= static_cast<double>(r);
  return push(std::move(n));
}

Tape::NodeId Tape::softmax(NodeId a) {
  const Tensor& va = nodes_[a].value;
  if (!(va.rank() == 1 || (va.rank() == 2 && va.shape[0] == 1)))
    fail("softmax", static_cast<NodeId>(nodes_.size()), "expected a vector, got " + va.shape_str());
  Node n;
  n.op = Op::kSoftmax;
  n.in0 = a;
  n.value = va;
  const double mx = *std::max_element(va.data.begin(), va.data.end());
  double total = 0.0;
  for (double& v : n.value.data) {
    v = std::exp(v - mx);
    total += v;
  }
  for (double& v : n.value.data) v /= total;
  n.weights.assign(n.value.data.begin(), n.value.data.end());  // saved output
  return push(std::move(n));
}

Tape::NodeId Tape::kl_to(Tensor target_p, NodeId q) {
  const Tensor& vq = nodes_[q].value;
  if (target_p.size() != vq.size())
    fail("kl_to", static_cast<NodeId>(nodes_.size()), "length mismatch");
  double psum = 0.0;
  for (double v : target_p.data) {
    if (v < 0.0) fail("kl_to", static_cast<NodeId>(nodes_.size()), "negative target entry");
    psum += v;
  }
  if (std::abs(psum - 1.0) > 1e-6) fail("kl_to", static_cast<NodeId>(nodes_.size()), "target not normalized");
  Node n;
  n.op = Op::kKlToConst;
  n.in0 = q;
  n.weights.assign(target_p.data.begin(), target_p.data.end());
  double total = 0.0;
  for (double v : vq.data) total += std::max(v, 1e-8);
  double kl = 0.0;
  for (std::size_t i = 0; i < vq.size(); ++i) {
    const double p = n.weights[i];
    if (p > 0.0) kl += p * std::log(p * total / std::max(vq.data[i], 1e-8));
  }
  n.value = Tensor::vector({std::max(kl, 0.0)});
  return push(std::move(n));
}

Tape::NodeId Tape::cross_entropy(NodeId logits, std::size_t label) {
  const Tensor& vz = nodes_[logits].value;
  if (label >= vz.size()) fail("cross_entropy", static_cast<NodeId>(nodes_.size()), "label out of range");
  Node n;
  n.op = Op::kCrossEntropy;
  n.in0 = logits;
  n.label = label;
  const double mx = *std::max_element(vz.data.begin(), vz.data.end());
  double lse = 0.0;
  for (double z : vz.data) lse += std::exp(z - mx);
  n.value = Tensor::vector({mx + std::log(lse) - vz.data[label]});
  // saved softmax for the backward pass
  n.weights.resize(vz.size());
  for (std::size_t i = 0; i < vz.size(); ++i) n.weights[i] = std::exp(vz.data[i] - mx) / lse;
  return push(std::move(n));
}

void Tape::accumulate(NodeId id, const Tensor& g) {
  Node& n = nodes_[id];
  if (!n.grad_ready) {
    n.grad = Tensor::zeros(n.value.shape);
    n.grad_ready = true;
  }
  for (std::size_t i = 0; i < g.size(); ++i) n.grad.data[i] += g.data[i];
}

void Tape::backward(NodeId root) {
  if (root >= nodes_.size()) throw std::logic_error("tape: backward before forward");
  backward(root, Tensor::full(nodes_[root].value.shape, 1.0));
}

void Tape::backward(NodeId root, const Tensor& seed) {
  if (root >= nodes_.size()) throw std::logic_error("tape: backward before forward");
  if (!seed.same_shape(nodes_[root].value))
    throw std::invalid_argument("tape: seed gradient shape mismatch");
  ran_backward_ = true;
  accumulate(root, seed);

  for (std::size_t pos = root + 1; pos-- > 0;) {
    Node& n = nodes_[pos];
    if (!n.grad_ready) continue;
    const Tensor& g = n.grad;
    switch (n.op) {
      case Op::kInput:
        break;
      case Op::kParam:
        for (std::size_t i = 0; i < g.size(); ++i) n.parameter->grad.data[i] += g.data[i];
        break;
      case Op::kMatMul: {
        const Tensor& a = nodes_[n.in0].value;
        const Tensor& b = nodes_[n.in1].value;
        const std::size_t r = a.shape[0], k = a.shape[1], c = b.shape[1];
        Tensor da = Tensor::zeros(a.shape);
        Tensor db = Tensor::zeros(b.shape);
        // da = g . b^T ; db = a^T . g
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t t = 0; t < k; ++t) {
            double acc = 0.0;
            const double* grow = &g.data[i * c];
            const double* brow = &b.data[t * c];
            for (std::size_t j = 0; j < c; ++j) acc += grow[j] * brow[j];
            da.data[i * k + t] = acc;
          }
        for (std::size_t i = 0; i < r; ++i) {
          const double* arow = &a.data[i * k];
          const double* grow = &g.data[i * c];
          for (std::size_t t = 0; t < k; ++t) {
            const double av = arow[t];
            if (av == 0.0) continue;
            double* drow = &db.data[t * c];
            for (std::size_t j = 0; j < c; ++j) drow[j] += av * grow[j];
          }
        }
        accumulate(n.in0, da);
        accumulate(n.in1, db);
        break;
      }
      case Op::kAdd:
        accumulate(n.in0, g);
        accumulate(n.in1, g);
        break;
      case Op::kAddRowVec: {
        accumulate(n.in0, g);
        const std::size_t c = g.shape[1];
        Tensor dr = Tensor::zeros({c});
        for (std::size_t i = 0; i < g.shape[0]; ++i)
          for (std::size_t j = 0; j < c; ++j) dr.data[j] += g.data[i * c + j];
        accumulate(n.in1, dr);
        break;
      }
      case Op::kMul: {
        const Tensor& a = nodes_[n.in0].value;
        const Tensor& b = nodes_[n.in1].value;
        Tensor da = g, db = g;
        for (std::size_t i = 0; i < g.size(); ++i) {
          da.data[i] *= b.data[i];
          db.data[i] *= a.data[i];
        }
        accumulate(n.in0, da);
        accumulate(n.in1, db);
        break;
      }
      case Op::kScale: {
        Tensor da = g;
        for (double& v : da.data) v *= n.scalar;
        accumulate(n.in0, da);
        break;
      }
      case Op::kLog: {
        Tensor da = g;
        const Tensor& a = nodes_[n.in0].value;
        for (std::size_t i = 0; i < g.size(); ++i) da.data[i] /= a.data[i];
        accumulate(n.in0, da);
        break;
      }
      case Op::kExp: {
        Tensor da = g;
        for (std::size_t i = 0; i < g.size(); ++i) da.data[i] *= n.value.data[i];
        accumulate(n.in0, da);
        break;
      }
      case Op::kRelu: {
        Tensor da = g;
        const Tensor& a = nodes_[n.in0].value;
        for (std::size_t i = 0; i < g.size(); ++i)
          if (a.data[i] <= 0.0) da.data[i] = 0.0;
        accumulate(n.in0, da);
        break;
      }
      case Op::kGatherRows: {
        const Tensor& a = nodes_[n.in0].value;
        Tensor da = Tensor::zeros(a.shape);
        const std::size_t c = a.shape[1];
        for (std::size_t i = 0; i < n.idx.size(); ++i)
          for (std::size_t j = 0; j < c; ++j) da.data[n.idx[i] * c + j] += g.data[i * c + j];
        accumulate(n.in0, da);
        break;
      }
      case Op::kReplaceRows: {
        const std::size_t c = g.shape[1];
        Tensor dd = g;
        Tensor ds = Tensor::zeros({n.idx.size(), c});
        for (std::size_t i = 0; i < n.idx.size(); ++i) {
          for (std::size_t j = 0; j < c; ++j) {
            ds.data[i * c + j] = g.data[n.idx[i] * c + j];
            dd.data[n.idx[i] * c + j] = 0.0;
          }
        }
        accumulate(n.in0, dd);
        accumulate(n.in1, ds);
        break;
      }
      case Op::kConcatRows: {
        const std::size_t c = g.shape[1];
        std::size_t row = 0;
        for (NodeId p : n.multi) {
          const std::size_t pr = nodes_[p].value.shape[0];
          Tensor dp = Tensor::zeros({pr, c});
          std::copy_n(&g.data[row * c], pr * c, dp.data.begin());
          accumulate(p, dp);
          row += pr;
        }
        break;
      }
      case Op::kScaleRows: {
        Tensor da = g;
        const std::size_t c = g.shape[1];
        for (std::size_t i = 0; i < g.shape[0]; ++i)
          for (std::size_t j = 0; j < c; ++j) da.data[i * c + j] *= n.weights[i];
        accumulate(n.in0, da);
        break;
      }
      case Op::kSum: {
        accumulate(n.in0, Tensor::full(nodes_[n.in0].value.shape, g.data[0]));
        break;
      }
      case Op::kMean: {
        const double f = g.data[0] / static_cast<double>(nodes_[n.in0].value.size());
        accumulate(n.in0, Tensor::full(nodes_[n.in0].value.shape, f));
        break;
      }
      case Op::kMeanRows: {
        const Tensor& a = nodes_[n.in0].value;
        const std::size_t r = a.shape[0], c = a.shape[1];
        Tensor da = Tensor::zeros(a.shape);
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) da.data[i * c + j] = g.data[j] / static_cast<double>(r);
        accumulate(n.in0, da);
        break;
      }
      case Op::kSoftmax: {
        // ds = s o (g - <g, s>)
        double dot = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) dot += g.data[i] * n.weights[i];
        Tensor da = g;
        for (std::size_t i = 0; i < g.size(); ++i) da.data[i] = n.weights[i] * (g.data[i] - dot);
        accumulate(n.in0, da);
        break;
      }
      case Op::kKlToConst: {
        const Tensor& q = nodes_[n.in0].value;
        double total = 0.0;
        for (double v : q.data) total += std::max(v, 1e-8);
        Tensor dq = Tensor::zeros(q.shape);
        const double gs = g.data[0];
        for (std::size_t i = 0; i < q.size(); ++i) {
          if (q.data[i] <= 1e-8) continue;  // clamped entries carry no gradient
          dq.data[i] = gs * (1.0 / total - n.weights[i] / q.data[i]);
        }
        accumulate(n.in0, dq);
        break;
      }
      case Op::kCrossEntropy: {
        const double gs = g.data[0];
        Tensor dz = Tensor::zeros(nodes_[n.in0].value.shape);
        for (std::size_t i = 0; i < dz.size(); ++i) dz.data[i] = gs * n.weights[i];
        dz.data[n.label] -= gs;
        accumulate(n.in0, dz);
        break;
      }
    }
  }
}

Tensor Tape::grad_of(NodeId id) const {
  if (!ran_backward_) throw std::logic_error("tape: grad_of before backward");
  const Node& n = nodes_[id];
  return n.grad_ready ? n.grad : Tensor::zeros(n.value.shape);
}

}  // namespace clgl
