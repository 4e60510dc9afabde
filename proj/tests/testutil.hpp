#pragma once

// Shared test oracles: central finite differences against the tape, and a
// seeded generator of random composed computation records.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "clgl/rng.hpp"
#include "clgl/tape.hpp"

namespace clgl::testutil {

// A replayable program over the tape primitives. Operand index i refers to
// parameter i while i < params, otherwise to the output of op i - params.
struct RecOp {
  enum Kind {
    kMatMul, kAdd, kAddRowVec, kMul, kScale, kExp, kLog, kRelu, kSoftmax,
    kMeanRows, kGatherRows, kSum, kMean, kKlTo, kCrossEntropy,
  };
  Kind kind = kSum;
  int a = -1, b = -1;
  double scalar = 0.0;
  std::size_t label = 0;
  std::vector<std::uint32_t> idx;
  Tensor aux;  // KL target

  RecOp() = default;
  RecOp(Kind k, int a_in, int b_in = -1) : kind(k), a(a_in), b(b_in) {}
};

struct RandomRecord {
  std::vector<Tensor> init_values;
  std::vector<RecOp> ops;
  int root = -1;  // operand index of the final scalar
};

inline Tape::NodeId run_record(Tape& tape, const RandomRecord& rec, std::vector<Parameter>& params) {
  std::vector<Tape::NodeId> ids;
  for (Parameter& p : params) ids.push_back(tape.param(p));
  auto at = [&](int i) { return ids[static_cast<std::size_t>(i)]; };
  for (const RecOp& op : rec.ops) {
    Tape::NodeId out = 0;
    switch (op.kind) {
      case RecOp::kMatMul: out = tape.matmul(at(op.a), at(op.b)); break;
      case RecOp::kAdd: out = tape.add(at(op.a), at(op.b)); break;
      case RecOp::kAddRowVec: out = tape.add_rowvec(at(op.a), at(op.b)); break;
      case RecOp::kMul: out = tape.mul(at(op.a), at(op.b)); break;
      case RecOp::kScale: out = tape.scale(at(op.a), op.scalar); break;
      case RecOp::kExp: out = tape.exp_(at(op.a)); break;
      case RecOp::kLog: out = tape.log_(at(op.a)); break;
      case RecOp::kRelu: out = tape.relu(at(op.a)); break;
      case RecOp::kSoftmax: out = tape.softmax(at(op.a)); break;
      case RecOp::kMeanRows: out = tape.mean_rows(at(op.a)); break;
      case RecOp::kGatherRows: out = tape.gather_rows(at(op.a), op.idx); break;
      case RecOp::kSum: out = tape.sum(at(op.a)); break;
      case RecOp::kMean: out = tape.mean(at(op.a)); break;
      case RecOp::kKlTo: out = tape.kl_to(op.aux, at(op.a)); break;
      case RecOp::kCrossEntropy: out = tape.cross_entropy(at(op.a), op.label); break;
    }
    ids.push_back(out);
  }
  return at(rec.root);
}

inline double eval_record(const RandomRecord& rec, const std::vector<Tensor>& values) {
  std::vector<Parameter> params;
  for (std::size_t i = 0; i < values.size(); ++i) params.emplace_back("p" + std::to_string(i), values[i]);
  Tape tape;
  return tape.value(run_record(tape, rec, params)).data[0];
}

// Structural choices are guarded by node values observed while generating, so
// the recorded program replays identically under small perturbations.
inline RandomRecord make_random_record(std::uint64_t seed) {
  Rng rng(seed);
  RandomRecord rec;

  const std::size_t nparams = 2 + rng.next_below(2);
  struct Info {
    std::vector<std::size_t> shape;
    double max_abs;
    double min_val;
  };
  std::vector<Info> info;
  std::vector<Tensor> current;

  auto push_param = [&](std::vector<std::size_t> shape) {
    Tensor t = Tensor::zeros(shape);
    for (double& v : t.data) v = rng.next_range(-1.0, 1.0);
    double mx = 0.0, mn = 1e300;
    for (double v : t.data) {
      mx = std::max(mx, std::abs(v));
      mn = std::min(mn, v);
    }
    rec.init_values.push_back(t);
    current.push_back(t);
    info.push_back({shape, mx, mn});
  };
  for (std::size_t i = 0; i < nparams; ++i) {
    const std::size_t r = 2 + rng.next_below(2), c = 2 + rng.next_below(2);
    if (rng.next_bernoulli(0.4)) {
      push_param({r});
    } else {
      push_param({r, c});
    }
  }

  auto stats = [](const Tensor& t) {
    double mx = 0.0, mn = 1e300;
    for (double v : t.data) {
      mx = std::max(mx, std::abs(v));
      mn = std::min(mn, v);
    }
    return std::pair<double, double>(mx, mn);
  };

  auto apply = [&](RecOp op) {
    std::vector<Parameter> params;
    for (std::size_t i = 0; i < rec.init_values.size(); ++i)
      params.emplace_back("p" + std::to_string(i), rec.init_values[i]);
    RandomRecord probe = rec;
    probe.ops.push_back(op);
    probe.root = static_cast<int>(rec.init_values.size() + probe.ops.size() - 1);
    Tape tape;
    const Tensor out = tape.value(run_record(tape, probe, params));
    rec.ops.push_back(op);
    current.push_back(out);
    const auto [mx, mn] = stats(out);
    info.push_back({out.shape, mx, mn});
  };

  const std::size_t nops = 3 + rng.next_below(6);
  for (std::size_t step = 0; step < nops; ++step) {
    // Collect applicable ops against the current pool.
    struct Cand {
      RecOp op;
    };
    std::vector<Cand> cands;
    const int pool = static_cast<int>(current.size());
    for (int a = 0; a < pool; ++a) {
      const auto& ia = info[static_cast<std::size_t>(a)];
      const bool is_vec = ia.shape.size() == 1;
      const bool is_mat = ia.shape.size() == 2;
      if (ia.max_abs < 2.5) {
        RecOp e{RecOp::kExp, a};
        cands.push_back({e});
      }
      if (ia.min_val > 0.05) cands.push_back({RecOp{RecOp::kLog, a}});
      cands.push_back({RecOp{RecOp::kRelu, a}});
      {
        RecOp s{RecOp::kScale, a};
        s.scalar = -1.5;
        cands.push_back({s});
      }
      if (is_mat) {
        cands.push_back({RecOp{RecOp::kMeanRows, a}});
        RecOp gth{RecOp::kGatherRows, a};
        const std::size_t rows = ia.shape[0];
        for (std::size_t k = 0; k < rows; ++k)
          gth.idx.push_back(static_cast<std::uint32_t>(rng.next_below(rows)));
        cands.push_back({gth});
      }
      if (is_vec && ia.shape[0] >= 2) {
        cands.push_back({RecOp{RecOp::kSoftmax, a}});
        RecOp ce{RecOp::kCrossEntropy, a};
        ce.label = rng.next_below(ia.shape[0]);
        cands.push_back({ce});
      }
      for (int b = 0; b < pool; ++b) {
        const auto& ib = info[static_cast<std::size_t>(b)];
        if (ia.shape == ib.shape) {
          cands.push_back({RecOp{RecOp::kAdd, a, b}});
          cands.push_back({RecOp{RecOp::kMul, a, b}});
        }
        if (is_mat && ib.shape.size() == 2 && ia.shape[1] == ib.shape[0] && ia.max_abs * ib.max_abs < 50.0)
          cands.push_back({RecOp{RecOp::kMatMul, a, b}});
        if (is_mat && ib.shape.size() == 1 && ib.shape[0] == ia.shape[1])
          cands.push_back({RecOp{RecOp::kAddRowVec, a, b}});
      }
    }
    apply(cands[rng.next_below(cands.size())].op);
  }

  // Reduce every sink to a scalar and add them up.
  std::vector<int> scalars;
  for (int i = 0; i < static_cast<int>(current.size()); ++i) {
    const auto& sh = info[static_cast<std::size_t>(i)].shape;
    const bool scalar = Tensor::count(sh) == 1 && sh.size() == 1;
    if (scalar) scalars.push_back(i);
  }
  {
    // Fold the most recent non-scalar through sum or mean or KL.
    const int last = static_cast<int>(current.size()) - 1;
    if (Tensor::count(info.back().shape) != 1 || info.back().shape.size() != 1) {
      const auto& sh = info.back().shape;
      if (sh.size() == 1 && sh[0] >= 2 && rng.next_bernoulli(0.5)) {
        // Softmax then KL against a random target keeps the KL primitive hot.
        apply(RecOp{RecOp::kSoftmax, last});
        RecOp kl{RecOp::kKlTo, static_cast<int>(current.size()) - 1};
        std::vector<double> target(sh[0]);
        double total = 0.0;
        for (double& v : target) {
          v = rng.next_range(0.1, 1.0);
          total += v;
        }
        for (double& v : target) v /= total;
        kl.aux = Tensor::vector(target);
        apply(kl);
      } else {
        apply(RecOp{rng.next_bernoulli(0.5) ? RecOp::kSum : RecOp::kMean, last});
      }
      scalars.push_back(static_cast<int>(current.size()) - 1);
    }
  }
  int acc = scalars[0];
  for (std::size_t i = 1; i < scalars.size(); ++i) {
    apply(RecOp{RecOp::kAdd, acc, scalars[i]});
    acc = static_cast<int>(current.size()) - 1;
  }
  rec.root = acc;
  return rec;
}

struct GradCheckResult {
  bool pass = true;
  double worst_rel = 0.0;
  std::size_t checked = 0;
  std::string detail;
};

// Central finite differences with step h over every parameter entry.
inline GradCheckResult finite_difference_check(const RandomRecord& rec, double h = 1e-5, double tol = 1e-4,
                                               double min_magnitude = 1e-6) {
  GradCheckResult res;
  std::vector<Parameter> params;
  for (std::size_t i = 0; i < rec.init_values.size(); ++i)
    params.emplace_back("p" + std::to_string(i), rec.init_values[i]);
  Tape tape;
  const Tape::NodeId root = run_record(tape, rec, params);
  tape.backward(root);

  std::vector<Tensor> values = rec.init_values;
  for (std::size_t p = 0; p < params.size(); ++p) {
    for (std::size_t i = 0; i < values[p].size(); ++i) {
      const double keep = values[p].data[i];
      values[p].data[i] = keep + h;
      const double f1 = eval_record(rec, values);
      values[p].data[i] = keep - h;
      const double f0 = eval_record(rec, values);
      values[p].data[i] = keep;
      const double numeric = (f1 - f0) / (2.0 * h);
      const double analytic = params[p].grad.data[i];
      if (std::abs(analytic) <= min_magnitude && std::abs(numeric) <= min_magnitude) continue;
      const double rel = std::abs(analytic - numeric) / std::max(std::abs(analytic), std::abs(numeric));
      res.worst_rel = std::max(res.worst_rel, rel);
      ++res.checked;
      if (rel > tol) {
        res.pass = false;
        res.detail = "param " + std::to_string(p) + "[" + std::to_string(i) + "]: analytic " +
                     std::to_string(analytic) + " vs numeric " + std::to_string(numeric);
        return res;
      }
    }
  }
  return res;
}

}  // namespace clgl::testutil
