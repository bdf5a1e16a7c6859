#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "satfed/archmodel.hpp"
#include "satfed/parallel.hpp"
#include "satfed/topology.hpp"

namespace satfed::fed {

struct Dataset {
  int num_samples = 0;
  int dim = 0;
  int num_classes = 0;
  std::vector<double> features;  // row-major num_samples x dim
  std::vector<int> labels;

  const double* row(int i) const { return features.data() + static_cast<std::size_t>(i) * dim; }
};

// Multinomial logistic regression when hidden_units == 0, otherwise one
// tanh hidden layer. Weights live in one flat vector:
//   logistic: [W (K x d) | b (K)]
//   mlp:      [W1 (H x d) | b1 (H) | W2 (K x H) | b2 (K)]
struct ModelLayout {
  int dim = 0;
  int num_classes = 0;
  int hidden_units = 0;

  std::size_t size() const;
  friend bool operator==(const ModelLayout&, const ModelLayout&) = default;
};

struct Model {
  ModelLayout layout;
  std::vector<double> weights;
};

Model zero_model(ModelLayout layout);

// Zero weights for the convex logistic model; seeded uniform [-0.1, 0.1]
// when a hidden layer is present.
Model init_model(ModelLayout layout, std::uint64_t seed);

// Gaussian class blobs with unit within-class variance and class-mean
// separation 3.0 (exact pairwise for dim >= classes, minimum otherwise).
// Classes are balanced to within one sample.
Dataset make_synthetic(int num_samples, int dim, int num_classes, std::uint64_t seed);

// Seeded uniform shuffle followed by round-robin assignment: shards are
// disjoint, cover the dataset exactly, and differ in size by at most one.
std::vector<Dataset> partition_iid(const Dataset& ds, int n, std::uint64_t seed);

// Mean cross-entropy over the given rows (all rows when batch is empty).
double cross_entropy_loss(const Model& m, const Dataset& ds, const std::vector<int>& batch = {});

// Analytic gradient of cross_entropy_loss at m over the same rows.
std::vector<double> cross_entropy_gradient(const Model& m, const Dataset& ds,
                                           const std::vector<int>& batch = {});

// Mini-batch SGD on cross-entropy; batch order is a seeded shuffle per
// epoch. Returns an updated copy, the input model is untouched.
Model local_train(const Model& model, const Dataset& shard, int epochs, int batch_size,
                  double lr, std::uint64_t seed);

// Element-wise weighted average, weights normalized to sum 1.
Model fedavg(const std::vector<Model>& updates, const std::vector<double>& weights);

// Fraction of argmax-correct predictions; ties break toward the smallest
// class index.
double evaluate(const Model& m, const Dataset& ds);

// Everything training_round_comm_ms needs; one static snapshot serves the
// whole run.
struct CommSetup {
  topo::LinkGraph graph;
  topo::NodeId gs_node{topo::NodeKind::Ground, 0};
  arch::CommSizes sizes;
  double bandwidth_bps = 100e6;
};

struct TrainConfig {
  int n_clients = 10;
  int rounds = 50;
  int local_epochs = 1;
  int batch_size = 32;
  double learning_rate = 0.1;
  std::uint64_t seed = 0;
  double compute_ms_per_batch = 5.0;
  arch::ArchitectureKind arch = arch::ArchitectureKind::Federated;
  CommSetup comm;

  double ground_compute_speedup = 16.0;  // ground runs this much faster per batch
  double holdout_fraction = 0.2;
  int hidden_units = 0;

  void validate() const;
};

struct TraceRecord {
  int round = 0;
  double accuracy = 0.0;
  double elapsed_ms = 0.0;
  std::uint64_t exposure_bytes = 0;
};

struct TrainingTrace {
  std::vector<TraceRecord> records;
};

// columns: round,accuracy,elapsed_ms,exposure_bytes
std::string trace_csv(const TrainingTrace& trace);
TrainingTrace trace_from_csv(const std::string& text);

using RoundObserver = std::function<void(int round, const Model& global)>;

// Pooled-data baseline: one local_train pass over the full training split
// per round, ground-side compute clock, centralized telemetry exposure.
TrainingTrace run_centralized(const Dataset& ds, const TrainConfig& cfg,
                              par::Mode mode = par::default_mode(),
                              const RoundObserver& observer = {});

// Synchronous FedAvg: static IID shards, every client trains from the
// current global model each round, shard-size-weighted averaging. Clients
// within a round run in parallel; aggregation consumes results in client
// index order so traces stay bit-reproducible.
TrainingTrace run_federated(const Dataset& ds, const TrainConfig& cfg,
                            par::Mode mode = par::default_mode(),
                            const RoundObserver& observer = {});

struct TimeToAccuracy {
  bool reached = false;
  double elapsed_ms = 0.0;
  double best_accuracy = 0.0;
};

// Simulated elapsed time of the first record at or above target.
TimeToAccuracy time_to_accuracy(const TrainingTrace& trace, double target);

}  // namespace satfed::fed
