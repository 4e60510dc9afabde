#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "clgl/encoder.hpp"
#include "clgl/expert.hpp"
#include "clgl/graph.hpp"

namespace clgl::train {

enum class Mode { kErm, kClgl, kClglA, kClglD };

std::string mode_name(Mode m);
Mode mode_from_name(const std::string& name);

enum class Alternation { kPerBatch, kPerEpoch };

struct TrainConfig {
  Mode mode = Mode::kClgl;
  double lambda = 1.0;
  std::size_t k_types = 3;
  double lr = 1e-3;
  std::size_t batch_size = 32;
  std::size_t min_epochs = 60;
  std::size_t patience = 5;
  std::size_t max_epochs = 120;
  std::uint64_t seed = 0;
  gnn::EncoderConfig encoder;
  Alternation alternation = Alternation::kPerBatch;
  // Diagnostic switch: with updates disabled the expertise loss is still
  // computed and logged, but every batch steps on L_g; this reproduces ERM
  // bit for bit.
  bool la_updates = true;
  double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;

  void validate() const;
};

struct MetricsRow {
  std::size_t epoch = 0;
  graphs::Split split = graphs::Split::kTrain;
  Mode mode = Mode::kErm;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double loss_lg = 0.0;
  double loss_lc = 0.0;
  double loss_ld = 0.0;
  double loss_la = 0.0;
  double cosine_sim = 0.0;
  std::size_t fallbacks = 0;
};

struct EvalResult {
  double accuracy = 0.0;
  std::array<double, 3> per_class{0.0, 0.0, 0.0};
};

struct TrainResult {
  gnn::ModelParams best_params;
  std::vector<MetricsRow> history;
  std::size_t best_epoch = 0;
  double best_val_accuracy = 0.0;
  double test_accuracy_at_best = 0.0;
  std::size_t epochs_run = 0;
  std::size_t skipped_graphs = 0;  // graphs without embodiments seen by L_c/L_d
  std::size_t fallback_total = 0;
};

// Adam with per-parameter step counters, so parameters touched only by one of
// the alternating objectives keep unbiased moment corrections.
class Adam {
 public:
  Adam(const gnn::ModelParams& mp, double lr, double beta1, double beta2, double eps);
  void step(gnn::ModelParams& mp, const std::vector<std::size_t>& indices);

 private:
  double lr_, beta1_, beta2_, eps_;
  std::vector<Tensor> m_, v_;
  std::vector<std::uint64_t> t_;
};

// Batch-level losses (forward values). Plans are indexed [graph][type-1].
double loss_lg(const std::vector<const graphs::GraphSample*>& batch, gnn::ModelParams& mp, bool with_aux = false);
double loss_lc(const std::vector<const graphs::GraphSample*>& batch, gnn::ModelParams& mp);
double loss_ld(const std::vector<const graphs::GraphSample*>& batch, gnn::ModelParams& mp,
               const std::vector<std::vector<gnn::InterventionPlan>>& plans);
double loss_la(const std::vector<const graphs::GraphSample*>& batch, gnn::ModelParams& mp,
               const std::vector<std::vector<gnn::InterventionPlan>>& plans, double lambda);

TrainResult train(const std::vector<graphs::GraphSample>& corpus, const TrainConfig& cfg);

EvalResult evaluate(gnn::ModelParams& mp, const std::vector<graphs::GraphSample>& corpus, graphs::Split split);

// Mean cosine similarity between expert targets and f^P outputs on a split.
double expert_similarity(gnn::ModelParams& mp, const std::vector<graphs::GraphSample>& corpus, graphs::Split split);

std::string metrics_csv_header();
void write_metrics_csv(const std::vector<MetricsRow>& rows, const std::string& path);

}  // namespace clgl::train
