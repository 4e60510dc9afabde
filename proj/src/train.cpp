#include "clgl/train.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "clgl/stats.hpp"

namespace clgl::train {

std::string mode_name(Mode m) {
  switch (m) {
    case Mode::kErm: return "ERM";
    case Mode::kClgl: return "CLGL";
    case Mode::kClglA: return "CLGL-A";
    case Mode::kClglD: return "CLGL-D";
  }
  return "ERM";
}

Mode mode_from_name(const std::string& name) {
  if (name == "ERM") return Mode::kErm;
  if (name == "CLGL") return Mode::kClgl;
  if (name == "CLGL-A") return Mode::kClglA;
  if (name == "CLGL-D") return Mode::kClglD;
  throw std::invalid_argument("unknown mode: " + name);
}

void TrainConfig::validate() const {
  if (lambda < 0.0) throw std::invalid_argument("train: lambda must be >= 0");
  if (batch_size == 0) throw std::invalid_argument("train: batch size must be positive");
  if (min_epochs > max_epochs) throw std::invalid_argument("train: min epochs must be <= max epochs");
  if (k_types == 0) throw std::invalid_argument("train: k must be >= 1");
  encoder.validate();
}

Adam::Adam(const gnn::ModelParams& mp, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const Parameter& p : mp.params) {
    m_.push_back(Tensor::zeros(p.value.shape));
    v_.push_back(Tensor::zeros(p.value.shape));
    t_.push_back(0);
  }
}

void Adam::step(gnn::ModelParams& mp, const std::vector<std::size_t>& indices) {
  for (std::size_t idx : indices) {
    Parameter& p = mp.params[idx];
    Tensor& m = m_[idx];
    Tensor& v = v_[idx];
    const std::uint64_t t = ++t_[idx];
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t));
    for (std::size_t i = 0; i < p.value.size(); ++i) {
      const double g = p.grad.data[i];
      m.data[i] = beta1_ * m.data[i] + (1.0 - beta1_) * g;
      v.data[i] = beta2_ * v.data[i] + (1.0 - beta2_) * g * g;
      const double mhat = m.data[i] / c1;
      const double vhat = v.data[i] / c2;
      p.value.data[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
    }
  }
}

namespace {

using gnn::BatchContext;
using gnn::EncodeNodes;
using gnn::GraphTensors;
using gnn::InterventionPlan;
using gnn::ModelParams;
using graphs::GraphSample;
using graphs::Split;

struct LossParts {
  Tape::NodeId node = UINT32_MAX;
  double lg = 0.0, lc = 0.0, ld = 0.0;
  std::size_t hits = 0;       // argmax f^H correct
  double cos_sum = 0.0;       // cosine(r^P, f^P) over counted graphs
  std::size_t cos_n = 0;
  std::size_t fallbacks = 0;
  std::size_t skipped = 0;
};

// Mean cross-entropy of f^H over the batch; CLGL-D adds the expert-label head.
LossParts build_lg(Tape& tape, BatchContext& ctx, const std::vector<const GraphSample*>& batch, ModelParams& mp,
                   bool with_aux, const std::vector<int>& aux_labels) {
  LossParts out;
  std::vector<Tape::NodeId> terms;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    Tape::NodeId logits = classify_on_tape(tape, ctx.encodes[i], mp);
    const auto& z = tape.value(logits).data;
    if (std::max_element(z.begin(), z.end()) - z.begin() == batch[i]->label) ++out.hits;
    Tape::NodeId ce = tape.cross_entropy(logits, static_cast<std::size_t>(batch[i]->label));
    if (with_aux) {
      Tape::NodeId aux_logits = aux_classify_on_tape(tape, ctx.encodes[i], mp);
      ce = tape.add(ce, tape.cross_entropy(aux_logits, static_cast<std::size_t>(aux_labels[i])));
    }
    terms.push_back(ce);
  }
  Tape::NodeId total = terms[0];
  for (std::size_t i = 1; i < terms.size(); ++i) total = tape.add(total, terms[i]);
  out.node = tape.scale(total, 1.0 / static_cast<double>(terms.size()));
  out.lg = tape.value(out.node).data[0];
  return out;
}

// L_c (+ lambda * L_d when plans are provided). Graphs without embodiments are
// skipped and counted.
LossParts build_la(Tape& tape, BatchContext& ctx, const std::vector<const GraphSample*>& batch,
                   const std::vector<const expert::ExpertTargets*>& targets, ModelParams& mp,
                   const std::vector<std::vector<InterventionPlan>>* plans, double lambda) {
  LossParts out;
  std::vector<Tape::NodeId> lc_terms;
  std::vector<Tape::NodeId> ld_terms;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (ctx.graphs[i]->embodiment.empty()) {
      ++out.skipped;
      continue;
    }
    Tape::NodeId fp = project_on_tape(tape, ctx.encodes[i], ctx.graphs[i]->embodiment, mp);
    out.cos_sum += cosine_similarity(targets[i]->rp, tape.value(fp).data);
    ++out.cos_n;
    lc_terms.push_back(tape.kl_to(Tensor::vector(targets[i]->rp), fp));
    if (plans != nullptr) {
      for (const InterventionPlan& plan : (*plans)[i]) {
        out.fallbacks += plan.fallback ? 1 : 0;
        Tape::NodeId fi = intervene_on_tape(tape, ctx, i, plan, mp);
        ld_terms.push_back(tape.kl_to(Tensor::vector(targets[i]->ri[static_cast<std::size_t>(plan.type_index - 1)]), fi));
      }
    }
  }
  if (lc_terms.empty()) return out;  // node stays invalid; caller skips the batch
  const double denom = static_cast<double>(lc_terms.size());

  Tape::NodeId lc = lc_terms[0];
  for (std::size_t i = 1; i < lc_terms.size(); ++i) lc = tape.add(lc, lc_terms[i]);
  lc = tape.scale(lc, 1.0 / denom);
  out.lc = tape.value(lc).data[0];

  if (!ld_terms.empty()) {
    Tape::NodeId ld = ld_terms[0];
    for (std::size_t i = 1; i < ld_terms.size(); ++i) ld = tape.add(ld, ld_terms[i]);
    ld = tape.scale(ld, 1.0 / denom);  // mean over graphs, summed over types
    out.ld = tape.value(ld).data[0];
    out.node = tape.add(lc, tape.scale(ld, lambda));
  } else {
    out.node = lc;
  }
  return out;
}

BatchContext make_context(Tape& tape, const std::vector<const GraphTensors*>& gts, ModelParams& mp) {
  BatchContext ctx;
  ctx.graphs = gts;
  for (const GraphTensors* gt : gts) ctx.encodes.push_back(encode_on_tape(tape, *gt, mp));
  return ctx;
}

std::vector<std::vector<InterventionPlan>> draw_plans(const std::vector<const GraphTensors*>& gts,
                                                      std::size_t k_types, Rng& rng) {
  std::vector<std::vector<InterventionPlan>> plans(gts.size());
  for (std::size_t i = 0; i < gts.size(); ++i) {
    if (gts[i]->embodiment.empty()) continue;
    for (std::size_t j = 1; j <= k_types; ++j)
      plans[i].push_back(gnn::make_plan(static_cast<int>(j), gts, i, rng));
  }
  return plans;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

}  // namespace

double loss_lg(const std::vector<const GraphSample*>& batch, gnn::ModelParams& mp, bool with_aux) {
  if (batch.empty()) throw std::invalid_argument("loss_lg: empty batch");
  Tape tape;
  std::vector<GraphTensors> storage;
  storage.reserve(batch.size());
  std::vector<const GraphTensors*> gts;
  std::vector<int> aux_labels;
  for (const GraphSample* g : batch) {
    storage.push_back(gnn::graph_tensors(*g));
    gts.push_back(&storage.back());
    aux_labels.push_back(with_aux ? graphs::morphology_class(*g) % static_cast<int>(mp.cfg.num_label_classes) : 0);
  }
  BatchContext ctx = make_context(tape, gts, mp);
  return build_lg(tape, ctx, batch, mp, with_aux, aux_labels).lg;
}

double loss_lc(const std::vector<const GraphSample*>& batch, gnn::ModelParams& mp) {
  if (batch.empty()) throw std::invalid_argument("loss_lc: empty batch");
  Tape tape;
  std::vector<GraphTensors> storage;
  storage.reserve(batch.size());
  std::vector<const GraphTensors*> gts;
  std::vector<expert::ExpertTargets> tstore;
  tstore.reserve(batch.size());
  std::vector<const expert::ExpertTargets*> targets;
  for (const GraphSample* g : batch) {
    storage.push_back(gnn::graph_tensors(*g));
    gts.push_back(&storage.back());
    tstore.push_back(expert::targets_for(*g));
    targets.push_back(&tstore.back());
  }
  BatchContext ctx = make_context(tape, gts, mp);
  return build_la(tape, ctx, batch, targets, mp, nullptr, 0.0).lc;
}

double loss_ld(const std::vector<const GraphSample*>& batch, gnn::ModelParams& mp,
               const std::vector<std::vector<InterventionPlan>>& plans) {
  if (batch.empty()) throw std::invalid_argument("loss_ld: empty batch");
  std::size_t max_type = 0;
  for (const auto& per_graph : plans)
    for (const InterventionPlan& p : per_graph) max_type = std::max<std::size_t>(max_type, static_cast<std::size_t>(p.type_index));
  Tape tape;
  std::vector<GraphTensors> storage;
  storage.reserve(batch.size());
  std::vector<const GraphTensors*> gts;
  std::vector<expert::ExpertTargets> tstore;
  tstore.reserve(batch.size());
  std::vector<const expert::ExpertTargets*> targets;
  for (const GraphSample* g : batch) {
    storage.push_back(gnn::graph_tensors(*g));
    gts.push_back(&storage.back());
    tstore.push_back(expert::targets_for(*g, static_cast<int>(std::max<std::size_t>(max_type, 1))));
    targets.push_back(&tstore.back());
  }
  BatchContext ctx = make_context(tape, gts, mp);
  return build_la(tape, ctx, batch, targets, mp, &plans, 1.0).ld;
}

double loss_la(const std::vector<const GraphSample*>& batch, gnn::ModelParams& mp,
               const std::vector<std::vector<InterventionPlan>>& plans, double lambda) {
  return loss_lc(batch, mp) + lambda * loss_ld(batch, mp, plans);
}

namespace {

struct SplitEval {
  MetricsRow row;
  EvalResult eval;
};

SplitEval eval_split(const std::vector<GraphSample>& corpus, const std::vector<GraphTensors>& gts,
                     const std::vector<expert::ExpertTargets>& targets, const std::vector<std::size_t>& idx,
                     ModelParams& mp, const TrainConfig& cfg, Rng eval_rng, bool with_aux) {
  SplitEval out;
  std::array<std::size_t, 3> per_class_hit{0, 0, 0}, per_class_n{0, 0, 0};
  double lg_sum = 0.0, lc_sum = 0.0, ld_sum = 0.0, cos_sum = 0.0;
  std::size_t hits = 0, lc_n = 0;

  for (std::size_t start = 0; start < idx.size(); start += cfg.batch_size) {
    const std::size_t end = std::min(idx.size(), start + cfg.batch_size);
    Tape tape;
    std::vector<const GraphTensors*> batch_gts;
    std::vector<const GraphSample*> batch;
    std::vector<const expert::ExpertTargets*> batch_targets;
    for (std::size_t i = start; i < end; ++i) {
      batch_gts.push_back(&gts[idx[i]]);
      batch.push_back(&corpus[idx[i]]);
      batch_targets.push_back(&targets[idx[i]]);
    }
    BatchContext ctx = make_context(tape, batch_gts, mp);

    for (std::size_t i = 0; i < batch.size(); ++i) {
      const Tensor& logits = tape.value(classify_on_tape(tape, ctx.encodes[i], mp));
      lg_sum += cross_entropy(logits.data, static_cast<std::size_t>(batch[i]->label));
      if (with_aux) {
        const Tensor& aux = tape.value(aux_classify_on_tape(tape, ctx.encodes[i], mp));
        lg_sum += cross_entropy(aux.data, static_cast<std::size_t>(graphs::morphology_class(*batch[i]) %
                                                                   static_cast<int>(mp.cfg.num_label_classes)));
      }
      const std::size_t pred = argmax(logits.data);
      const std::size_t truth = static_cast<std::size_t>(batch[i]->label);
      ++per_class_n[truth];
      if (pred == truth) {
        ++hits;
        ++per_class_hit[truth];
      }
      if (!batch_gts[i]->embodiment.empty()) {
        const Tensor& fp = tape.value(project_on_tape(tape, ctx.encodes[i], batch_gts[i]->embodiment, mp));
        lc_sum += kl_divergence(batch_targets[i]->rp, fp.data);
        cos_sum += cosine_similarity(batch_targets[i]->rp, fp.data);
        ++lc_n;
      }
    }
    const auto plans = draw_plans(batch_gts, cfg.k_types, eval_rng);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (batch_gts[i]->embodiment.empty()) continue;
      for (const InterventionPlan& plan : plans[i]) {
        out.row.fallbacks += plan.fallback ? 1 : 0;
        const Tensor& fi = tape.value(intervene_on_tape(tape, ctx, i, plan, mp));
        ld_sum += kl_divergence(batch_targets[i]->ri[static_cast<std::size_t>(plan.type_index - 1)], fi.data);
      }
    }
  }

  const double n = static_cast<double>(idx.size());
  out.row.accuracy = n > 0 ? static_cast<double>(hits) / n : 0.0;
  out.row.loss_lg = n > 0 ? lg_sum / n : 0.0;
  out.row.loss_lc = lc_n > 0 ? lc_sum / static_cast<double>(lc_n) : 0.0;
  out.row.loss_ld = lc_n > 0 ? ld_sum / static_cast<double>(lc_n) : 0.0;
  out.row.loss_la = out.row.loss_lc + cfg.lambda * out.row.loss_ld;
  out.row.cosine_sim = lc_n > 0 ? cos_sum / static_cast<double>(lc_n) : 0.0;
  out.eval.accuracy = out.row.accuracy;
  for (std::size_t c = 0; c < 3; ++c)
    out.eval.per_class[c] = per_class_n[c] > 0 ? static_cast<double>(per_class_hit[c]) / static_cast<double>(per_class_n[c]) : 0.0;
  return out;
}

}  // namespace

TrainResult train(const std::vector<GraphSample>& corpus, const TrainConfig& cfg) {
  cfg.validate();

  std::array<std::vector<std::size_t>, 3> split_idx;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    split_idx[static_cast<std::size_t>(corpus[i].split)].push_back(i);
  for (std::size_t s = 0; s < 3; ++s)
    if (split_idx[s].empty()) throw std::invalid_argument("train: empty split " + split_name(static_cast<Split>(s)));

  // Precomputed per-graph constants and expert targets.
  std::vector<GraphTensors> gts;
  gts.reserve(corpus.size());
  std::vector<expert::ExpertTargets> targets;
  targets.reserve(corpus.size());
  for (const GraphSample& g : corpus) {
    gts.push_back(gnn::graph_tensors(g));
    targets.push_back(expert::targets_for(g, static_cast<int>(cfg.k_types)));
  }

  TrainResult res;
  ModelParams mp = gnn::init_params(cfg.encoder, cfg.seed);
  Adam adam(mp, cfg.lr, cfg.beta1, cfg.beta2, cfg.adam_eps);

  // Parameter groups per objective.
  std::vector<std::size_t> lg_params, la_params;
  for (std::size_t i = 0; i < mp.params.size(); ++i) {
    const std::string& name = mp.params[i].name;
    const bool enc = name.rfind("enc", 0) == 0;
    if (enc || name.rfind("head.", 0) == 0) lg_params.push_back(i);
    if (cfg.mode == Mode::kClglD && name.rfind("aux.", 0) == 0) lg_params.push_back(i);
    if (enc || name.rfind("proj.", 0) == 0) la_params.push_back(i);
  }

  Rng shuffle_rng = Rng::derive(cfg.seed, 0x73687566);
  Rng plan_rng = Rng::derive(cfg.seed, 0x706c616e);

  const bool wants_la_mode = cfg.mode == Mode::kClgl || cfg.mode == Mode::kClglA;
  const bool with_aux = cfg.mode == Mode::kClglD;

  std::size_t best_epoch = 0;
  double best_val = -1.0;
  ModelParams best_params = mp;
  double test_at_best = 0.0;
  std::size_t global_batch = 0;

  std::vector<std::size_t> order = split_idx[0];
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);

    double lg_sum = 0.0, lc_sum = 0.0, ld_sum = 0.0, la_sum = 0.0, cos_sum = 0.0;
    std::size_t lg_batches = 0, la_batches = 0, train_fallbacks = 0;
    std::size_t train_hits = 0, train_seen = 0, cos_n = 0;

    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size, ++global_batch) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      std::vector<const GraphSample*> batch;
      std::vector<const GraphTensors*> batch_gts;
      std::vector<const expert::ExpertTargets*> batch_targets;
      std::vector<int> aux_labels;
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(&corpus[order[i]]);
        batch_gts.push_back(&gts[order[i]]);
        batch_targets.push_back(&targets[order[i]]);
        aux_labels.push_back(with_aux ? graphs::morphology_class(corpus[order[i]]) %
                                            static_cast<int>(cfg.encoder.num_label_classes)
                                      : 0);
      }

      const bool la_slot = cfg.alternation == Alternation::kPerBatch ? (global_batch % 2 == 1) : (epoch % 2 == 0);
      const bool la_step = wants_la_mode && cfg.la_updates && la_slot;

      if (la_step) {
        Tape tape;
        BatchContext ctx = make_context(tape, batch_gts, mp);
        std::vector<std::vector<InterventionPlan>> plans;
        const bool use_plans = cfg.mode == Mode::kClgl;
        if (use_plans) plans = draw_plans(batch_gts, cfg.k_types, plan_rng);
        mp.zero_grads();
        LossParts parts = build_la(tape, ctx, batch, batch_targets, mp, use_plans ? &plans : nullptr, cfg.lambda);
        res.skipped_graphs += parts.skipped;
        if (parts.node != UINT32_MAX) {
          tape.backward(parts.node);
          adam.step(mp, la_params);
          lc_sum += parts.lc;
          ld_sum += parts.ld;
          la_sum += parts.lc + cfg.lambda * parts.ld;
          cos_sum += parts.cos_sum;
          cos_n += parts.cos_n;
          train_fallbacks += parts.fallbacks;
          ++la_batches;
        }
      } else {
        Tape tape;
        BatchContext ctx = make_context(tape, batch_gts, mp);
        mp.zero_grads();
        LossParts parts = build_lg(tape, ctx, batch, mp, with_aux, aux_labels);
        tape.backward(parts.node);
        adam.step(mp, lg_params);
        lg_sum += parts.lg;
        train_hits += parts.hits;
        train_seen += batch.size();
        ++lg_batches;

        if (la_slot) {
          // The expertise loss is tracked for every mode; modes that do not
          // step on it only run the forward pass.
          Tape diag_tape;
          BatchContext diag_ctx = make_context(diag_tape, batch_gts, mp);
          std::vector<std::vector<InterventionPlan>> plans;
          const bool use_plans = cfg.mode != Mode::kClglA;
          if (use_plans) plans = draw_plans(batch_gts, cfg.k_types, plan_rng);
          LossParts parts_d =
              build_la(diag_tape, diag_ctx, batch, batch_targets, mp, use_plans ? &plans : nullptr, cfg.lambda);
          res.skipped_graphs += parts_d.skipped;
          if (parts_d.node != UINT32_MAX) {
            lc_sum += parts_d.lc;
            ld_sum += parts_d.ld;
            la_sum += parts_d.lc + cfg.lambda * parts_d.ld;
            cos_sum += parts_d.cos_sum;
            cos_n += parts_d.cos_n;
            train_fallbacks += parts_d.fallbacks;
            ++la_batches;
          }
        }
      }
    }

    // The train row aggregates the epoch's batch statistics; val and test come
    // from forward passes at epoch end.
    MetricsRow train_row;
    train_row.epoch = epoch;
    train_row.split = Split::kTrain;
    train_row.mode = cfg.mode;
    train_row.seed = cfg.seed;
    train_row.accuracy = train_seen > 0 ? static_cast<double>(train_hits) / static_cast<double>(train_seen) : 0.0;
    train_row.loss_lg = lg_batches > 0 ? lg_sum / static_cast<double>(lg_batches) : 0.0;
    train_row.loss_lc = la_batches > 0 ? lc_sum / static_cast<double>(la_batches) : 0.0;
    train_row.loss_ld = la_batches > 0 ? ld_sum / static_cast<double>(la_batches) : 0.0;
    train_row.loss_la = la_batches > 0 ? la_sum / static_cast<double>(la_batches) : 0.0;
    train_row.cosine_sim = cos_n > 0 ? cos_sum / static_cast<double>(cos_n) : 0.0;
    train_row.fallbacks = train_fallbacks;
    res.history.push_back(train_row);

    SplitEval val = eval_split(corpus, gts, targets, split_idx[1], mp, cfg,
                               Rng::derive(cfg.seed, 0xe0000000ULL + epoch * 8 + 1), with_aux);
    val.row.epoch = epoch;
    val.row.split = Split::kVal;
    val.row.mode = cfg.mode;
    val.row.seed = cfg.seed;
    res.history.push_back(val.row);

    SplitEval test = eval_split(corpus, gts, targets, split_idx[2], mp, cfg,
                                Rng::derive(cfg.seed, 0xe0000000ULL + epoch * 8 + 2), with_aux);
    test.row.epoch = epoch;
    test.row.split = Split::kTest;
    test.row.mode = cfg.mode;
    test.row.seed = cfg.seed;
    res.history.push_back(test.row);

    res.fallback_total += train_fallbacks;
    res.epochs_run = epoch;

    if (val.row.accuracy > best_val) {
      best_val = val.row.accuracy;
      best_epoch = epoch;
      best_params = mp;
      test_at_best = test.row.accuracy;
    }
    if (epoch >= cfg.min_epochs && epoch - best_epoch >= cfg.patience) break;
  }

  res.best_params = std::move(best_params);
  res.best_epoch = best_epoch;
  res.best_val_accuracy = best_val;
  res.test_accuracy_at_best = test_at_best;
  return res;
}

EvalResult evaluate(gnn::ModelParams& mp, const std::vector<GraphSample>& corpus, Split split) {
  EvalResult out;
  std::array<std::size_t, 3> hit{0, 0, 0}, n{0, 0, 0};
  std::size_t hits = 0, total = 0;
  for (const GraphSample& g : corpus) {
    if (g.split != split) continue;
    const auto reps = gnn::encode(g, mp);
    const auto logits = gnn::classify(reps, mp);
    const std::size_t pred = argmax(logits);
    const std::size_t truth = static_cast<std::size_t>(g.label);
    ++total;
    ++n[truth];
    if (pred == truth) {
      ++hits;
      ++hit[truth];
    }
  }
  out.accuracy = total > 0 ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
  for (std::size_t c = 0; c < 3; ++c)
    out.per_class[c] = n[c] > 0 ? static_cast<double>(hit[c]) / static_cast<double>(n[c]) : 0.0;
  return out;
}

double expert_similarity(gnn::ModelParams& mp, const std::vector<GraphSample>& corpus, Split split) {
  double total = 0.0;
  std::size_t count = 0;
  for (const GraphSample& g : corpus) {
    if (g.split != split || g.embodiment_nodes.empty()) continue;
    const auto reps = gnn::encode(g, mp);
    const auto fp = gnn::project_embodiment(reps, g.embodiment_nodes, mp);
    const auto rp = expert::expert_project(expert::expert_embed(g));
    total += cosine_similarity(rp, fp);
    ++count;
  }
  return count > 0 ? total / static_cast<double>(count) : 0.0;
}

std::string metrics_csv_header() {
  return "epoch,split,mode,seed,accuracy,loss_lg,loss_lc,loss_ld,loss_la,cosine_sim,fallbacks";
}

void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_metrics_csv: cannot open " + path);
  out << metrics_csv_header() << '\n';
  char buf[256];
  for (const MetricsRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%zu,%s,%s,%llu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%zu", r.epoch,
                  split_name(r.split).c_str(), mode_name(r.mode).c_str(),
                  static_cast<unsigned long long>(r.seed), r.accuracy, r.loss_lg, r.loss_lc, r.loss_ld, r.loss_la,
                  r.cosine_sim, r.fallbacks);
    out << buf << '\n';
  }
}

}  // namespace clgl::train
