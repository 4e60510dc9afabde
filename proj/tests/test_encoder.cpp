#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "clgl/encoder.hpp"
#include "clgl/generate.hpp"
#include "clgl/rng.hpp"

using namespace clgl;
using namespace clgl::gnn;

namespace {

void set_zero(ModelParams& mp) {
  for (Parameter& p : mp.params) std::fill(p.value.data.begin(), p.value.data.end(), 0.0);
}

graphs::GraphSample single_node_graph() {
  graphs::GraphSample g;
  g.num_nodes = 1;
  g.node_features = {{1.0, 0.25, 0.5, 0.75}};
  g.connection_node = 0;
  g.embodiment_nodes = {0};
  return g;
}

// Straight-line reimplementation of the update equations, heads included.
// Plain nested loops, no tensors, different summation order than the tape.
struct PlainForward {
  std::vector<std::vector<std::vector<double>>> layers;  // [layer][node][dim]
  std::vector<double> logits;
  std::vector<double> fp;

  PlainForward(const graphs::GraphSample& g, const ModelParams& mp) {
    const auto& cfg = mp.cfg;
    const auto adj = graphs::adjacency(g);
    const std::size_t n = g.num_nodes;

    layers.emplace_back(n);
    for (std::size_t i = 0; i < n; ++i)
      layers[0][i].assign(g.node_features[i].begin(), g.node_features[i].end());

    auto matvec = [](const Tensor& w, const std::vector<double>& h) {
      std::vector<double> out(w.shape[1], 0.0);
      for (std::size_t k = 0; k < w.shape[1]; ++k)
        for (std::size_t t = 0; t < w.shape[0]; ++t) out[k] += h[t] * w.at(t, k);
      return out;
    };

    const std::size_t nlayers = cfg.widths.size() - 1;
    for (std::size_t l = 0; l < nlayers; ++l) {
      const std::string tag = "enc" + std::to_string(l);
      std::vector<std::vector<double>> next(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> acc;
        if (cfg.kind == LayerKind::kLocalExtremum) {
          acc = matvec(mp.by_name(tag + ".w1").value, layers[l][i]);
          const double deg = static_cast<double>(adj[i].size());
          if (deg > 0) {
            const auto w2h = matvec(mp.by_name(tag + ".w2").value, layers[l][i]);
            std::vector<double> nbr(acc.size(), 0.0);
            for (std::uint32_t j : adj[i]) {
              const auto w3h = matvec(mp.by_name(tag + ".w3").value, layers[l][j]);
              for (std::size_t k = 0; k < nbr.size(); ++k) nbr[k] += (w2h[k] - w3h[k]) / deg;
            }
            for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += nbr[k];
          }
        } else {
          std::vector<double> pooled(layers[l][i]);
          for (std::uint32_t j : adj[i])
            for (std::size_t k = 0; k < pooled.size(); ++k) pooled[k] += layers[l][j][k];
          for (double& v : pooled) v /= static_cast<double>(adj[i].size() + 1);
          acc = matvec(mp.by_name(tag + ".w").value, pooled);
        }
        if (l + 1 < nlayers)
          for (double& v : acc) v = v > 0.0 ? v : 0.0;
        next[i] = acc;
      }
      layers.push_back(std::move(next));
    }

    // Head: global mean pool + affine.
    const auto& last = layers.back();
    std::vector<double> pooled(cfg.widths.back(), 0.0);
    for (const auto& row : last)
      for (std::size_t k = 0; k < pooled.size(); ++k) pooled[k] += row[k];
    for (double& v : pooled) v /= static_cast<double>(n);
    logits = matvec(mp.by_name("head.w").value, pooled);
    for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += mp.by_name("head.b").value.data[k];

    // f^P: mean pool of layer-m embodiment rows, relu perceptron, softmax.
    std::vector<double> emb_pool(cfg.widths[cfg.m], 0.0);
    for (std::uint32_t e : g.embodiment_nodes)
      for (std::size_t k = 0; k < emb_pool.size(); ++k) emb_pool[k] += layers[cfg.m][e][k];
    for (double& v : emb_pool) v /= static_cast<double>(g.embodiment_nodes.size());
    auto hidden = matvec(mp.by_name("proj.w1").value, emb_pool);
    for (std::size_t k = 0; k < hidden.size(); ++k) {
      hidden[k] += mp.by_name("proj.b1").value.data[k];
      hidden[k] = hidden[k] > 0.0 ? hidden[k] : 0.0;
    }
    auto zl = matvec(mp.by_name("proj.w2").value, hidden);
    double mx = -1e300;
    for (std::size_t k = 0; k < zl.size(); ++k) {
      zl[k] += mp.by_name("proj.b2").value.data[k];
      mx = std::max(mx, zl[k]);
    }
    double total = 0.0;
    for (double& v : zl) {
      v = std::exp(v - mx);
      total += v;
    }
    for (double& v : zl) v /= total;
    fp = zl;
  }
};

graphs::GraphSample permuted(const graphs::GraphSample& g, Rng& rng) {
  std::vector<std::uint32_t> perm(g.num_nodes);
  for (std::uint32_t i = 0; i < g.num_nodes; ++i) perm[i] = i;
  rng.shuffle(perm);
  graphs::GraphSample out = g;
  out.edges.clear();
  for (const auto& [u, v] : g.edges) {
    const auto a = perm[u], b = perm[v];
    out.edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(out.edges.begin(), out.edges.end());
  out.node_features.assign(g.num_nodes, {});
  for (std::uint32_t i = 0; i < g.num_nodes; ++i) out.node_features[perm[i]] = g.node_features[i];
  out.connection_node = perm[g.connection_node];
  out.embodiment_nodes = graphs::embodiment_of(out, 1);
  return out;
}

graphs::GraphSample first_generated() {
  graphs::DatasetSpec spec;
  spec.count = 10;
  spec.bias = 0.9;
  spec.seed = 0;
  return graphs::generate_dataset(spec)[0];
}

}  // namespace

TEST_CASE("encoder config validation") {
  EncoderConfig cfg;
  cfg.m = 4;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = EncoderConfig{};
  cfg.widths = {3, 8};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("encode: zero weights give zero hidden layers") {
  ModelParams mp = init_params(EncoderConfig{}, 7);
  set_zero(mp);
  const auto g = first_generated();
  const auto reps = encode(g, mp);
  REQUIRE(reps.layers.size() == 4);
  for (std::size_t l = 1; l < reps.layers.size(); ++l)
    for (double v : reps.layers[l].data) CHECK(v == 0.0);
}

TEST_CASE("encode: single node with identity mean-aggregate weights is a fixed point") {
  EncoderConfig cfg;
  cfg.widths = {4, 4, 4, 4};
  cfg.kind = LayerKind::kMeanAggregate;
  ModelParams mp = init_params(cfg, 1);
  for (std::size_t l = 0; l < 3; ++l) {
    Parameter& w = mp.by_name("enc" + std::to_string(l) + ".w");
    std::fill(w.value.data.begin(), w.value.data.end(), 0.0);
    for (std::size_t k = 0; k < 4; ++k) w.value.at(k, k) = 1.0;
  }
  const auto g = single_node_graph();
  const auto reps = encode(g, mp);
  for (const Tensor& layer : reps.layers) {
    REQUIRE(layer.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) CHECK(layer.data[k] == doctest::Approx(g.node_features[0][k]).epsilon(1e-15));
  }
}

TEST_CASE("encode: matches an independent straight-line forward pass within 1e-12") {
  for (auto kind : {LayerKind::kLocalExtremum, LayerKind::kMeanAggregate}) {
    EncoderConfig cfg;
    cfg.kind = kind;
    ModelParams mp = init_params(cfg, 0);
    const auto g = first_generated();
    const PlainForward oracle(g, mp);
    const auto reps = encode(g, mp);
    REQUIRE(reps.layers.size() == oracle.layers.size());
    for (std::size_t l = 0; l < reps.layers.size(); ++l)
      for (std::size_t i = 0; i < g.num_nodes; ++i)
        for (std::size_t k = 0; k < reps.layers[l].shape[1]; ++k)
          CHECK(reps.layers[l].at(i, k) == doctest::Approx(oracle.layers[l][i][k]).epsilon(1e-12));
    const auto logits = classify(reps, mp);
    for (std::size_t k = 0; k < 3; ++k) CHECK(logits[k] == doctest::Approx(oracle.logits[k]).epsilon(1e-12));
    const auto fp = project_embodiment(reps, g.embodiment_nodes, mp);
    for (std::size_t k = 0; k < 4; ++k) CHECK(fp[k] == doctest::Approx(oracle.fp[k]).epsilon(1e-12));
  }
}

TEST_CASE("classify: zero head on zero reps gives zero logits") {
  ModelParams mp = init_params(EncoderConfig{}, 3);
  set_zero(mp);
  const auto g = first_generated();
  const auto logits = classify(encode(g, mp), mp);
  CHECK(logits == std::vector<double>{0.0, 0.0, 0.0});
}

TEST_CASE("classify: invariant to node relabelling (50 permutations of 20 graphs)") {
  graphs::DatasetSpec spec;
  spec.count = 20;
  spec.bias = 0.9;
  spec.seed = 77;
  const auto corpus = graphs::generate_dataset(spec);
  ModelParams mp = init_params(EncoderConfig{}, 5);
  Rng rng(123);
  std::size_t permutations = 0;
  while (permutations < 50) {
    for (const auto& g : corpus) {
      if (permutations >= 50) break;
      const auto base = classify(encode(g, mp), mp);
      const auto pg = permuted(g, rng);
      const auto moved = classify(encode(pg, mp), mp);
      for (std::size_t k = 0; k < 3; ++k) CHECK(moved[k] == doctest::Approx(base[k]).epsilon(1e-9));
      ++permutations;
    }
  }
}

TEST_CASE("classify: duplicating every node representation keeps logits") {
  ModelParams mp = init_params(EncoderConfig{}, 9);
  const auto g = first_generated();
  auto reps = encode(g, mp);
  const auto base = classify(reps, mp);
  NodeRepresentations doubled;
  for (const Tensor& layer : reps.layers) {
    Tensor two = Tensor::zeros({layer.shape[0] * 2, layer.shape[1]});
    std::copy(layer.data.begin(), layer.data.end(), two.data.begin());
    std::copy(layer.data.begin(), layer.data.end(), two.data.begin() + static_cast<std::ptrdiff_t>(layer.size()));
    doubled.layers.push_back(two);
  }
  const auto dup = classify(doubled, mp);
  for (std::size_t k = 0; k < 3; ++k) CHECK(dup[k] == doctest::Approx(base[k]).epsilon(1e-12));
}

TEST_CASE("project_embodiment: zero perceptron gives the uniform distribution") {
  ModelParams mp = init_params(EncoderConfig{}, 11);
  for (const char* name : {"proj.w1", "proj.b1", "proj.w2", "proj.b2"}) {
    Parameter& p = mp.by_name(name);
    std::fill(p.value.data.begin(), p.value.data.end(), 0.0);
  }
  const auto g = first_generated();
  const auto fp = project_embodiment(encode(g, mp), g.embodiment_nodes, mp);
  CHECK(fp == std::vector<double>{0.25, 0.25, 0.25, 0.25});
}

TEST_CASE("project_embodiment: rejects an empty embodiment and always normalizes") {
  ModelParams mp = init_params(EncoderConfig{}, 13);
  const auto g = first_generated();
  auto reps = encode(g, mp);
  CHECK_THROWS_AS(project_embodiment(reps, {}, mp), std::invalid_argument);
  graphs::DatasetSpec spec;
  spec.count = 50;
  spec.bias = 0.9;
  spec.seed = 131;
  for (const auto& sample : graphs::generate_dataset(spec)) {
    const auto fp = project_embodiment(encode(sample, mp), sample.embodiment_nodes, mp);
    double total = 0.0;
    for (double v : fp) {
      CHECK(v >= 0.0);
      total += v;
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }
}

TEST_CASE("intervene_project: rho 0 equals project_embodiment bit for bit") {
  ModelParams mp = init_params(EncoderConfig{}, 17);
  const auto g = first_generated();
  InterventionPlan plan;
  plan.type_index = 1;
  plan.rho = 0.0;  // no rows replaced
  const auto fi = intervene_project(g, plan, mp);
  const auto fp = project_embodiment(encode(g, mp), g.embodiment_nodes, mp);
  CHECK(fi == fp);
}

TEST_CASE("intervene_project: replacing rows with themselves is the identity") {
  ModelParams mp = init_params(EncoderConfig{}, 19);
  const auto g = first_generated();
  InterventionPlan plan;
  plan.type_index = 1;
  plan.source = InterventionSource::kSameGraph;
  for (std::uint32_t i = 0; i < g.embodiment_nodes.size(); ++i) {
    plan.replaced_positions.push_back(i);
    plan.source_rows.push_back(g.embodiment_nodes[i]);
  }
  const auto fi = intervene_project(g, plan, mp);
  const auto fp = project_embodiment(encode(g, mp), g.embodiment_nodes, mp);
  for (std::size_t k = 0; k < 4; ++k) CHECK(fi[k] == doctest::Approx(fp[k]).epsilon(1e-15));
}

TEST_CASE("intervene_project: batch mean over identical rows is the identity") {
  ModelParams mp = init_params(EncoderConfig{}, 23);
  const auto g = single_node_graph();
  InterventionPlan plan;
  plan.type_index = 3;
  plan.source = InterventionSource::kBatchMean;
  plan.replaced_positions = {0};
  const auto fi = intervene_project(g, plan, mp);
  const auto fp = project_embodiment(encode(g, mp), g.embodiment_nodes, mp);
  for (std::size_t k = 0; k < 4; ++k) CHECK(fi[k] == doctest::Approx(fp[k]).epsilon(1e-12));
}

TEST_CASE("make_plan: respects the source taxonomy and falls back to the batch mean") {
  const auto g = first_generated();
  const auto gt = graph_tensors(g);
  Rng rng(7);
  std::vector<const GraphTensors*> batch{&gt};

  // Same-graph sources avoid the embodiment.
  auto plan1 = make_plan(1, batch, 0, rng);
  CHECK(plan1.source == InterventionSource::kSameGraph);
  CHECK(plan1.replaced_positions.size() ==
        static_cast<std::size_t>(std::ceil(0.25 * static_cast<double>(gt.embodiment.size()))));
  for (std::uint32_t src : plan1.source_rows)
    CHECK(std::find(gt.embodiment.begin(), gt.embodiment.end(), src) == gt.embodiment.end());

  // Cross-graph with a single-graph batch falls back.
  auto plan2 = make_plan(2, batch, 0, rng);
  CHECK(plan2.source == InterventionSource::kBatchMean);
  CHECK(plan2.fallback);

  // Whole-graph embodiment leaves no same-graph source.
  auto tiny = single_node_graph();
  const auto tiny_gt = graph_tensors(tiny);
  std::vector<const GraphTensors*> tb{&tiny_gt};
  auto plan3 = make_plan(1, tb, 0, rng);
  CHECK(plan3.source == InterventionSource::kBatchMean);
  CHECK(plan3.fallback);

  // A two-graph batch gives cross-graph sources within the other graph.
  graphs::DatasetSpec spec;
  spec.count = 2;
  spec.seed = 3;
  spec.bias = 0.9;
  const auto two = graphs::generate_dataset(spec);
  const auto gt0 = graph_tensors(two[0]);
  const auto gt1 = graph_tensors(two[1]);
  std::vector<const GraphTensors*> batch2{&gt0, &gt1};
  auto plan4 = make_plan(2, batch2, 0, rng);
  CHECK(plan4.source == InterventionSource::kCrossGraph);
  CHECK(plan4.source_graph == 1);
  for (std::uint32_t src : plan4.source_rows) CHECK(src < two[1].num_nodes);
}

TEST_CASE("gradients of all four heads pass the finite-difference check") {
  EncoderConfig cfg;
  cfg.widths = {4, 6, 6, 6};
  cfg.proj_hidden = 6;
  ModelParams mp = init_params(cfg, 29);
  graphs::DatasetSpec spec;
  spec.count = 2;
  spec.seed = 31;
  spec.bias = 0.9;
  const auto two = graphs::generate_dataset(spec);
  const auto gt0 = graph_tensors(two[0]);
  const auto gt1 = graph_tensors(two[1]);

  Rng plan_rng(41);
  std::vector<const GraphTensors*> batch{&gt0, &gt1};
  std::vector<InterventionPlan> plans;
  for (int j = 1; j <= 3; ++j) plans.push_back(make_plan(j, batch, 0, plan_rng));

  const Tensor target = Tensor::vector({0.0125, 0.0125, 0.9625, 0.0125});

  auto build = [&](Tape& tape) {
    BatchContext ctx;
    ctx.graphs = batch;
    ctx.encodes.push_back(encode_on_tape(tape, gt0, mp));
    ctx.encodes.push_back(encode_on_tape(tape, gt1, mp));
    Tape::NodeId loss = tape.cross_entropy(classify_on_tape(tape, ctx.encodes[0], mp),
                                           static_cast<std::size_t>(two[0].label));
    loss = tape.add(loss, tape.cross_entropy(aux_classify_on_tape(tape, ctx.encodes[1], mp), 1));
    loss = tape.add(loss, tape.kl_to(target, project_on_tape(tape, ctx.encodes[0], gt0.embodiment, mp)));
    for (const auto& plan : plans)
      loss = tape.add(loss, tape.kl_to(target, intervene_on_tape(tape, ctx, 0, plan, mp)));
    return loss;
  };

  mp.zero_grads();
  Tape tape;
  tape.backward(build(tape));

  const double h = 1e-5;
  std::size_t checked = 0;
  for (Parameter& p : mp.params) {
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double keep = p.value.data[i];
      p.value.data[i] = keep + h;
      Tape t1;
      const double f1 = t1.value(build(t1)).data[0];
      p.value.data[i] = keep - h;
      Tape t0;
      const double f0 = t0.value(build(t0)).data[0];
      p.value.data[i] = keep;
      const double numeric = (f1 - f0) / (2 * h);
      const double analytic = p.grad.data[i];
      if (std::abs(analytic) <= 1e-6 && std::abs(numeric) <= 1e-6) continue;
      const double rel = std::abs(analytic - numeric) / std::max(std::abs(analytic), std::abs(numeric));
      INFO(p.name, "[", i, "] analytic ", analytic, " numeric ", numeric);
      CHECK(rel < 1e-4);
      ++checked;
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("checkpoint: save and load round-trip bit-exactly") {
  ModelParams mp = init_params(EncoderConfig{}, 37);
  const std::string path = (std::filesystem::temp_directory_path() / "clgl_ckpt_test.jsonl").string();
  save_checkpoint(mp, path);
  ModelParams loaded = init_params(EncoderConfig{}, 999);  // different values
  load_checkpoint(loaded, path);
  CHECK(loaded.value_hash() == mp.value_hash());
  std::filesystem::remove(path);
}
