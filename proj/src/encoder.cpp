#include "clgl/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace clgl::gnn {

std::string layer_kind_name(LayerKind k) {
  return k == LayerKind::kLocalExtremum ? "local-extremum" : "mean-aggregate";
}

LayerKind layer_kind_from_name(const std::string& name) {
  if (name == "local-extremum") return LayerKind::kLocalExtremum;
  if (name == "mean-aggregate") return LayerKind::kMeanAggregate;
  throw std::invalid_argument("unknown layer kind: " + name);
}

void EncoderConfig::validate() const {
  if (widths.size() < 2) throw std::invalid_argument("encoder: need at least one layer");
  if (widths[0] != graphs::kFeatureWidth) throw std::invalid_argument("encoder: widths[0] must equal feature width");
  if (m >= widths.size()) throw std::invalid_argument("encoder: m must be < number of layers");
}

Parameter& ModelParams::by_name(const std::string& name) {
  for (Parameter& p : params)
    if (p.name == name) return p;
  throw std::invalid_argument("unknown parameter: " + name);
}

const Parameter& ModelParams::by_name(const std::string& name) const {
  for (const Parameter& p : params)
    if (p.name == name) return p;
  throw std::invalid_argument("unknown parameter: " + name);
}

void ModelParams::zero_grads() {
  for (Parameter& p : params) p.zero_grad();
}

std::uint64_t ModelParams::value_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const void* data, std::size_t n) {
    const unsigned char* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h ^= b[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const Parameter& p : params) {
    mix(p.name.data(), p.name.size());
    mix(p.value.data.data(), p.value.data.size() * sizeof(double));
  }
  return h;
}

namespace {

Tensor glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t = Tensor::zeros({fan_in, fan_out});
  for (double& v : t.data) v = rng.next_range(-a, a);
  return t;
}

}  // namespace

ModelParams init_params(const EncoderConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ModelParams mp;
  mp.cfg = cfg;
  Rng rng = Rng::derive(seed, 0x70617261);
  auto& ps = mp.params;

  for (std::size_t l = 0; l + 1 < cfg.widths.size(); ++l) {
    const std::size_t in = cfg.widths[l], out = cfg.widths[l + 1];
    const std::string tag = "enc" + std::to_string(l);
    if (cfg.kind == LayerKind::kLocalExtremum) {
      ps.emplace_back(tag + ".w1", glorot(in, out, rng));
      ps.emplace_back(tag + ".w2", glorot(in, out, rng));
      ps.emplace_back(tag + ".w3", glorot(in, out, rng));
    } else {
      ps.emplace_back(tag + ".w", glorot(in, out, rng));
    }
  }
  const std::size_t last = cfg.widths.back();
  ps.emplace_back("head.w", glorot(last, cfg.num_label_classes, rng));
  ps.emplace_back("head.b", Tensor::zeros({cfg.num_label_classes}));
  ps.emplace_back("proj.w1", glorot(cfg.widths[cfg.m], cfg.proj_hidden, rng));
  ps.emplace_back("proj.b1", Tensor::zeros({cfg.proj_hidden}));
  ps.emplace_back("proj.w2", glorot(cfg.proj_hidden, cfg.num_factor_classes, rng));
  ps.emplace_back("proj.b2", Tensor::zeros({cfg.num_factor_classes}));
  ps.emplace_back("aux.w", glorot(last, cfg.num_label_classes, rng));
  ps.emplace_back("aux.b", Tensor::zeros({cfg.num_label_classes}));
  return mp;
}

GraphTensors graph_tensors(const graphs::GraphSample& g) {
  if (g.node_features.size() != g.num_nodes) throw std::invalid_argument("graph_tensors: feature row count");
  GraphTensors gt;
  gt.num_nodes = g.num_nodes;
  const std::size_t n = g.num_nodes;
  gt.features = Tensor::zeros({n, graphs::kFeatureWidth});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < graphs::kFeatureWidth; ++k) gt.features.at(i, k) = g.node_features[i][k];

  const auto adj = graphs::adjacency(g);
  gt.anorm = Tensor::zeros({n, n});
  gt.pnorm = Tensor::zeros({n, n});
  gt.degree_mask.assign(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t deg = adj[i].size();
    if (deg == 0) {
      gt.degree_mask[i] = 0.0;
      gt.has_isolated = true;
      gt.pnorm.at(i, i) = 1.0;  // self only
      continue;
    }
    const double w = 1.0 / static_cast<double>(deg);
    const double wp = 1.0 / static_cast<double>(deg + 1);
    for (std::uint32_t j : adj[i]) {
      gt.anorm.at(i, j) = w;
      gt.pnorm.at(i, j) = wp;
    }
    gt.pnorm.at(i, i) = wp;
  }

  gt.embodiment = g.embodiment_nodes;
  std::vector<char> in_emb(n, 0);
  for (std::uint32_t e : gt.embodiment) {
    if (e >= n) throw std::invalid_argument("graph_tensors: embodiment node out of range");
    in_emb[e] = 1;
  }
  for (std::uint32_t i = 0; i < n; ++i)
    if (!in_emb[i]) gt.non_embodiment.push_back(i);
  return gt;
}

EncodeNodes encode_on_tape(Tape& tape, const GraphTensors& gt, ModelParams& mp) {
  const EncoderConfig& cfg = mp.cfg;
  if (gt.features.shape[1] != cfg.widths[0]) throw std::invalid_argument("encode: feature width mismatch");
  EncodeNodes enc;
  Tape::NodeId h = tape.input(gt.features);
  enc.layers.push_back(h);

  Tape::NodeId anorm = UINT32_MAX, pnorm = UINT32_MAX;
  const std::size_t nlayers = cfg.widths.size() - 1;
  for (std::size_t l = 0; l < nlayers; ++l) {
    const std::string tag = "enc" + std::to_string(l);
    Tape::NodeId z;
    if (cfg.kind == LayerKind::kLocalExtremum) {
      if (anorm == UINT32_MAX) anorm = tape.input(gt.anorm);
      Tape::NodeId self = tape.matmul(h, tape.param(mp.by_name(tag + ".w1")));
      Tape::NodeId centre = tape.matmul(h, tape.param(mp.by_name(tag + ".w2")));
      if (gt.has_isolated) centre = tape.scale_rows(centre, gt.degree_mask);
      Tape::NodeId nbr = tape.matmul(tape.matmul(anorm, h), tape.param(mp.by_name(tag + ".w3")));
      z = tape.add(self, tape.sub(centre, nbr));
    } else {
      if (pnorm == UINT32_MAX) pnorm = tape.input(gt.pnorm);
      z = tape.matmul(tape.matmul(pnorm, h), tape.param(mp.by_name(tag + ".w")));
    }
    h = (l + 1 < nlayers) ? tape.relu(z) : z;
    enc.layers.push_back(h);
  }
  return enc;
}

NodeRepresentations encode(const graphs::GraphSample& g, ModelParams& mp) {
  Tape tape;
  const GraphTensors gt = graph_tensors(g);
  const EncodeNodes enc = encode_on_tape(tape, gt, mp);
  NodeRepresentations reps;
  for (Tape::NodeId id : enc.layers) reps.layers.push_back(tape.value(id));
  return reps;
}

Tape::NodeId classify_on_tape(Tape& tape, const EncodeNodes& enc, ModelParams& mp) {
  Tape::NodeId pooled = tape.mean_rows(enc.layers.back());
  return tape.affine(pooled, tape.param(mp.by_name("head.w")), tape.param(mp.by_name("head.b")));
}

Tape::NodeId aux_classify_on_tape(Tape& tape, const EncodeNodes& enc, ModelParams& mp) {
  Tape::NodeId pooled = tape.mean_rows(enc.layers.back());
  return tape.affine(pooled, tape.param(mp.by_name("aux.w")), tape.param(mp.by_name("aux.b")));
}

std::vector<double> classify(const NodeRepresentations& reps, ModelParams& mp) {
  Tape tape;
  EncodeNodes enc;
  for (const Tensor& t : reps.layers) enc.layers.push_back(tape.input(t));
  const Tensor& out = tape.value(classify_on_tape(tape, enc, mp));
  return out.data;
}

namespace {

Tape::NodeId projection_head(Tape& tape, Tape::NodeId emb_rows, ModelParams& mp) {
  Tape::NodeId pooled = tape.mean_rows(emb_rows);
  Tape::NodeId hidden =
      tape.relu(tape.affine(pooled, tape.param(mp.by_name("proj.w1")), tape.param(mp.by_name("proj.b1"))));
  Tape::NodeId logits = tape.affine(hidden, tape.param(mp.by_name("proj.w2")), tape.param(mp.by_name("proj.b2")));
  return tape.softmax(logits);
}

}  // namespace

Tape::NodeId project_on_tape(Tape& tape, const EncodeNodes& enc, const std::vector<std::uint32_t>& embodiment,
                             ModelParams& mp) {
  if (embodiment.empty()) throw std::invalid_argument("project_embodiment: empty embodiment");
  Tape::NodeId rows = tape.gather_rows(enc.layers[mp.cfg.m], embodiment);
  return projection_head(tape, rows, mp);
}

std::vector<double> project_embodiment(const NodeRepresentations& reps, const std::vector<std::uint32_t>& embodiment,
                                       ModelParams& mp) {
  Tape tape;
  EncodeNodes enc;
  for (const Tensor& t : reps.layers) enc.layers.push_back(tape.input(t));
  return tape.value(project_on_tape(tape, enc, embodiment, mp)).data;
}

double plan_rho(int type_index) {
  switch (std::min(type_index, 3)) {
    case 1: return 0.25;
    case 2: return 0.5;
    default: return 0.75;
  }
}

InterventionSource plan_source(int type_index) {
  switch (std::min(type_index, 3)) {
    case 1: return InterventionSource::kSameGraph;
    case 2: return InterventionSource::kCrossGraph;
    default: return InterventionSource::kBatchMean;
  }
}

InterventionPlan make_plan(int type_index, const std::vector<const GraphTensors*>& batch, std::size_t batch_pos,
                           Rng& rng) {
  if (type_index < 1) throw std::invalid_argument("make_plan: type index must be >= 1");
  const GraphTensors& gt = *batch[batch_pos];
  InterventionPlan plan;
  plan.type_index = type_index;
  plan.rho = plan_rho(type_index);
  plan.source = plan_source(type_index);
  plan.source_graph = batch_pos;

  const std::size_t emb_n = gt.embodiment.size();
  const std::size_t replace_n = static_cast<std::size_t>(std::ceil(plan.rho * static_cast<double>(emb_n)));

  // Distinct embodiment positions via partial Fisher-Yates.
  std::vector<std::uint32_t> positions(emb_n);
  for (std::size_t i = 0; i < emb_n; ++i) positions[i] = static_cast<std::uint32_t>(i);
  for (std::size_t i = 0; i < replace_n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(emb_n - i));
    std::swap(positions[i], positions[j]);
  }
  plan.replaced_positions.assign(positions.begin(), positions.begin() + static_cast<std::ptrdiff_t>(replace_n));

  if (plan.source == InterventionSource::kSameGraph) {
    if (gt.non_embodiment.empty()) {
      plan.source = InterventionSource::kBatchMean;
      plan.fallback = true;
    } else {
      for (std::size_t i = 0; i < replace_n; ++i)
        plan.source_rows.push_back(gt.non_embodiment[rng.next_below(gt.non_embodiment.size())]);
    }
  } else if (plan.source == InterventionSource::kCrossGraph) {
    if (batch.size() < 2) {
      plan.source = InterventionSource::kBatchMean;
      plan.fallback = true;
    } else {
      std::size_t other = rng.next_below(batch.size() - 1);
      if (other >= batch_pos) ++other;
      plan.source_graph = other;
      const std::uint32_t other_n = batch[other]->num_nodes;
      for (std::size_t i = 0; i < replace_n; ++i)
        plan.source_rows.push_back(static_cast<std::uint32_t>(rng.next_below(other_n)));
    }
  }
  return plan;
}

Tape::NodeId BatchContext::mean_row(Tape& tape, std::size_t m) {
  if (batch_mean == UINT32_MAX) {
    std::vector<Tape::NodeId> parts;
    for (const EncodeNodes& e : encodes) parts.push_back(e.layers[m]);
    batch_mean = tape.mean_rows(tape.concat_rows(parts));
  }
  return batch_mean;
}

Tape::NodeId intervene_on_tape(Tape& tape, BatchContext& ctx, std::size_t batch_pos, const InterventionPlan& plan,
                               ModelParams& mp) {
  const GraphTensors& gt = *ctx.graphs[batch_pos];
  const EncodeNodes& enc = ctx.encodes[batch_pos];
  if (gt.embodiment.empty()) throw std::invalid_argument("intervene: empty embodiment");
  const std::size_t m = mp.cfg.m;

  Tape::NodeId rows = tape.gather_rows(enc.layers[m], gt.embodiment);
  const std::size_t k = plan.replaced_positions.size();
  if (k > 0) {
    Tape::NodeId src = UINT32_MAX;
    switch (plan.source) {
      case InterventionSource::kSameGraph:
        src = tape.gather_rows(enc.layers[m], plan.source_rows);
        break;
      case InterventionSource::kCrossGraph: {
        std::vector<std::uint32_t> src_rows = plan.source_rows;
        if (src_rows.empty()) throw std::invalid_argument("intervene: cross-graph plan has no source rows");
        src = tape.gather_rows(ctx.encodes[plan.source_graph].layers[m], src_rows);
        break;
      }
      case InterventionSource::kBatchMean: {
        Tape::NodeId mean = ctx.mean_row(tape, m);
        src = tape.gather_rows(mean, std::vector<std::uint32_t>(k, 0));
        break;
      }
    }
    rows = tape.replace_rows(rows, plan.replaced_positions, src);
  }
  return projection_head(tape, rows, mp);
}

std::vector<double> intervene_project(const graphs::GraphSample& g, const InterventionPlan& plan, ModelParams& mp) {
  Tape tape;
  BatchContext ctx;
  const GraphTensors gt = graph_tensors(g);
  ctx.graphs.push_back(&gt);
  ctx.encodes.push_back(encode_on_tape(tape, gt, mp));
  return tape.value(intervene_on_tape(tape, ctx, 0, plan, mp)).data;
}

void save_checkpoint(const ModelParams& mp, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
  char buf[40];
  for (const Parameter& p : mp.params) {
    std::string s = "{\"name\":\"" + p.name + "\",\"shape\":[";
    for (std::size_t i = 0; i < p.value.shape.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(p.value.shape[i]);
    }
    s += "],\"values\":[";
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      if (i) s += ",";
      std::snprintf(buf, sizeof(buf), "%.17g", p.value.data[i]);
      s += buf;
    }
    s += "]}";
    out << s << '\n';
  }
}

void load_checkpoint(ModelParams& mp, const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  std::string line;
  std::size_t lineno = 0, loaded = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const nlohmann::json j = nlohmann::json::parse(line);
      Parameter& p = mp.by_name(j.at("name").get<std::string>());
      const auto shape = j.at("shape").get<std::vector<std::size_t>>();
      if (shape != p.value.shape) throw std::invalid_argument("shape mismatch for " + p.name);
      const auto values = j.at("values").get<std::vector<double>>();
      if (values.size() != p.value.size()) throw std::invalid_argument("value count mismatch for " + p.name);
      p.value.data = values;
      ++loaded;
    } catch (const std::exception& e) {
      throw std::runtime_error("load_checkpoint: " + path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (loaded != mp.params.size())
    throw std::runtime_error("load_checkpoint: expected " + std::to_string(mp.params.size()) + " tensors, got " +
                             std::to_string(loaded));
}

}  // namespace clgl::gnn
