#include "satfed/fedsim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "satfed/rng.hpp"

namespace satfed::fed {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Fixed stream ids so every consumer of the run seed draws from its own
// decorrelated sequence.
constexpr std::uint64_t kHoldoutStream = 1;
constexpr std::uint64_t kPartitionStream = 2;
constexpr std::uint64_t kInitStream = 3;
constexpr std::uint64_t kRoundStreamBase = 16;

std::uint64_t round_client_stream(int round, int client) {
  return kRoundStreamBase + static_cast<std::uint64_t>(round) * 65536ULL +
         static_cast<std::uint64_t>(client);
}

struct Forward {
  std::vector<double> hidden;  // tanh activations, empty for logistic
  std::vector<double> probs;   // softmax outputs, size K
};

void softmax_inplace(std::vector<double>& z) {
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (double& v : z) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (double& v : z) v /= sum;
}

Forward forward(const Model& m, const double* x) {
  const int d = m.layout.dim;
  const int k = m.layout.num_classes;
  const int h = m.layout.hidden_units;
  const double* w = m.weights.data();

  Forward f;
  if (h == 0) {
    f.probs.resize(static_cast<std::size_t>(k));
    const double* bias = w + static_cast<std::size_t>(k) * d;
    for (int c = 0; c < k; ++c) {
      double z = bias[c];
      const double* row = w + static_cast<std::size_t>(c) * d;
      for (int j = 0; j < d; ++j) z += row[j] * x[j];
      f.probs[static_cast<std::size_t>(c)] = z;
    }
  } else {
    const double* w1 = w;
    const double* b1 = w1 + static_cast<std::size_t>(h) * d;
    const double* w2 = b1 + h;
    const double* b2 = w2 + static_cast<std::size_t>(k) * h;
    f.hidden.resize(static_cast<std::size_t>(h));
    for (int u = 0; u < h; ++u) {
      double z = b1[u];
      const double* row = w1 + static_cast<std::size_t>(u) * d;
      for (int j = 0; j < d; ++j) z += row[j] * x[j];
      f.hidden[static_cast<std::size_t>(u)] = std::tanh(z);
    }
    f.probs.resize(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
      double z = b2[c];
      const double* row = w2 + static_cast<std::size_t>(c) * h;
      for (int u = 0; u < h; ++u) z += row[u] * f.hidden[static_cast<std::size_t>(u)];
      f.probs[static_cast<std::size_t>(c)] = z;
    }
  }
  softmax_inplace(f.probs);
  return f;
}

void check_compatible(const Model& m, const Dataset& ds) {
  require(m.layout.dim == ds.dim, "model/dataset feature dimension mismatch");
  require(m.layout.num_classes == ds.num_classes, "model/dataset class count mismatch");
}

std::vector<int> all_rows(const Dataset& ds) {
  std::vector<int> idx(static_cast<std::size_t>(ds.num_samples));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

Dataset subset(const Dataset& ds, const std::vector<int>& rows) {
  Dataset out;
  out.num_samples = static_cast<int>(rows.size());
  out.dim = ds.dim;
  out.num_classes = ds.num_classes;
  out.features.reserve(rows.size() * static_cast<std::size_t>(ds.dim));
  out.labels.reserve(rows.size());
  for (int r : rows) {
    const double* src = ds.row(r);
    out.features.insert(out.features.end(), src, src + ds.dim);
    out.labels.push_back(ds.labels[static_cast<std::size_t>(r)]);
  }
  return out;
}

int batches_per_epoch(int samples, int batch_size) {
  return (samples + batch_size - 1) / batch_size;
}

struct HoldoutSplit {
  Dataset train;
  Dataset holdout;
};

HoldoutSplit split_holdout(const Dataset& ds, double fraction, std::uint64_t seed) {
  auto idx = all_rows(ds);
  rng::Engine eng(seed);
  eng.shuffle(idx);
  const int n_hold = static_cast<int>(fraction * ds.num_samples);
  const std::vector<int> hold_rows(idx.begin(), idx.begin() + n_hold);
  const std::vector<int> train_rows(idx.begin() + n_hold, idx.end());
  return HoldoutSplit{subset(ds, train_rows), subset(ds, hold_rows)};
}

// Shared synchronous-round driver; run_centralized is the single-shard,
// ground-clock specialization.
TrainingTrace run_rounds(const Dataset& ds, const TrainConfig& cfg, bool centralized,
                         par::Mode mode, const RoundObserver& observer) {
  cfg.validate();
  require(ds.num_samples >= 2, "training requires at least 2 samples");

  const auto split = split_holdout(ds, cfg.holdout_fraction, rng::derive(cfg.seed, kHoldoutStream));
  const Dataset& eval_set = split.holdout.num_samples > 0 ? split.holdout : split.train;

  const int n_shards = centralized ? 1 : cfg.n_clients;
  const auto shards = partition_iid(split.train, n_shards, rng::derive(cfg.seed, kPartitionStream));
  std::vector<double> shard_sizes;
  shard_sizes.reserve(shards.size());
  for (const Dataset& s : shards) shard_sizes.push_back(static_cast<double>(s.num_samples));

  Model global = init_model(ModelLayout{split.train.dim, split.train.num_classes,
                                        cfg.hidden_units},
                            rng::derive(cfg.seed, kInitStream));

  const arch::ArchitectureKind comm_kind =
      centralized ? arch::ArchitectureKind::Centralized : arch::ArchitectureKind::Federated;
  const double comm_ms = arch::training_round_comm_ms(comm_kind, cfg.comm.graph, cfg.comm.gs_node,
                                                      cfg.comm.sizes, cfg.comm.bandwidth_bps);

  double compute_ms = 0.0;
  if (centralized) {
    const int batches = cfg.local_epochs * batches_per_epoch(split.train.num_samples,
                                                             cfg.batch_size);
    compute_ms = batches * cfg.compute_ms_per_batch / cfg.ground_compute_speedup;
  } else {
    for (const Dataset& s : shards) {
      const int batches = cfg.local_epochs * batches_per_epoch(s.num_samples, cfg.batch_size);
      compute_ms = std::max(compute_ms, batches * cfg.compute_ms_per_batch);
    }
  }

  const std::uint64_t exposure_per_round =
      centralized ? arch::telemetry_exposure_bytes(arch::ArchitectureKind::Centralized,
                                                   cfg.comm.sizes, cfg.n_clients, 1)
                  : 0;

  TrainingTrace trace;
  double elapsed = 0.0;
  std::uint64_t exposure = 0;
  trace.records.push_back(TraceRecord{0, evaluate(global, eval_set), elapsed, exposure});
  if (observer) observer(0, global);

  std::vector<Model> updates(shards.size());
  for (int round = 1; round <= cfg.rounds; ++round) {
    par::for_index(shards.size(), mode, [&](std::size_t c) {
      updates[c] = local_train(global, shards[c], cfg.local_epochs, cfg.batch_size,
                               cfg.learning_rate,
                               rng::derive(cfg.seed, round_client_stream(round, static_cast<int>(c))));
    });
    global = fedavg(updates, shard_sizes);

    elapsed += compute_ms + comm_ms;
    exposure += exposure_per_round;
    trace.records.push_back(TraceRecord{round, evaluate(global, eval_set), elapsed, exposure});
    if (observer) observer(round, global);
  }
  return trace;
}

}  // namespace

std::size_t ModelLayout::size() const {
  const auto d = static_cast<std::size_t>(dim);
  const auto k = static_cast<std::size_t>(num_classes);
  const auto h = static_cast<std::size_t>(hidden_units);
  if (hidden_units == 0) return k * d + k;
  return h * d + h + k * h + k;
}

Model zero_model(ModelLayout layout) {
  require(layout.dim >= 1 && layout.num_classes >= 1 && layout.hidden_units >= 0,
          "ModelLayout fields out of range");
  return Model{layout, std::vector<double>(layout.size(), 0.0)};
}

Model init_model(ModelLayout layout, std::uint64_t seed) {
  Model m = zero_model(layout);
  if (layout.hidden_units > 0) {
    rng::Engine eng(seed);
    for (double& w : m.weights) w = eng.uniform(-0.1, 0.1);
  }
  return m;
}

Dataset make_synthetic(int num_samples, int dim, int num_classes, std::uint64_t seed) {
  require(num_samples >= 1 && dim >= 1 && num_classes >= 1,
          "make_synthetic: all counts must be >= 1");
  require(num_classes <= num_samples, "make_synthetic: num_classes must be <= num_samples");

  constexpr double kSeparation = 3.0;
  // dim >= classes: scaled-simplex means, every pair exactly kSeparation
  // apart. Otherwise a coordinate ladder that keeps the minimum pairwise
  // distance at kSeparation.
  std::vector<std::vector<double>> means(static_cast<std::size_t>(num_classes),
                                         std::vector<double>(static_cast<std::size_t>(dim), 0.0));
  if (dim >= num_classes) {
    const double scale = kSeparation / std::sqrt(2.0);
    for (int c = 0; c < num_classes; ++c) means[c][static_cast<std::size_t>(c)] = scale;
  } else {
    for (int c = 0; c < num_classes; ++c) {
      means[c][static_cast<std::size_t>(c % dim)] = kSeparation * (1.0 + c / dim);
    }
  }

  Dataset ds;
  ds.num_samples = num_samples;
  ds.dim = dim;
  ds.num_classes = num_classes;
  ds.features.resize(static_cast<std::size_t>(num_samples) * dim);
  ds.labels.resize(static_cast<std::size_t>(num_samples));

  rng::Engine eng(rng::mix(seed));
  for (int i = 0; i < num_samples; ++i) {
    const int label = i % num_classes;
    ds.labels[static_cast<std::size_t>(i)] = label;
    double* row = ds.features.data() + static_cast<std::size_t>(i) * dim;
    for (int j = 0; j < dim; ++j) {
      row[j] = means[static_cast<std::size_t>(label)][static_cast<std::size_t>(j)] + eng.gauss();
    }
  }
  return ds;
}

std::vector<Dataset> partition_iid(const Dataset& ds, int n, std::uint64_t seed) {
  require(n >= 1, "partition_iid: n must be >= 1");
  if (n > ds.num_samples) {
    throw std::invalid_argument("partition_iid: n exceeds the number of samples");
  }

  auto idx = all_rows(ds);
  rng::Engine eng(seed);
  eng.shuffle(idx);

  std::vector<std::vector<int>> rows(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    rows[i % static_cast<std::size_t>(n)].push_back(idx[i]);
  }

  std::vector<Dataset> shards;
  shards.reserve(rows.size());
  for (const auto& r : rows) shards.push_back(subset(ds, r));
  return shards;
}

double cross_entropy_loss(const Model& m, const Dataset& ds, const std::vector<int>& batch) {
  check_compatible(m, ds);
  const std::vector<int>& rows = batch.empty() ? all_rows(ds) : batch;
  require(!rows.empty(), "cross_entropy_loss: empty dataset");

  double loss = 0.0;
  for (int r : rows) {
    const Forward f = forward(m, ds.row(r));
    const double p = f.probs[static_cast<std::size_t>(ds.labels[static_cast<std::size_t>(r)])];
    loss -= std::log(std::max(p, 1e-300));
  }
  return loss / static_cast<double>(rows.size());
}

std::vector<double> cross_entropy_gradient(const Model& m, const Dataset& ds,
                                           const std::vector<int>& batch) {
  check_compatible(m, ds);
  const std::vector<int>& rows = batch.empty() ? all_rows(ds) : batch;
  require(!rows.empty(), "cross_entropy_gradient: empty dataset");

  const int d = m.layout.dim;
  const int k = m.layout.num_classes;
  const int h = m.layout.hidden_units;
  std::vector<double> grad(m.weights.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(rows.size());

  for (int r : rows) {
    const double* x = ds.row(r);
    const int label = ds.labels[static_cast<std::size_t>(r)];
    const Forward f = forward(m, x);

    std::vector<double> dz(f.probs);
    dz[static_cast<std::size_t>(label)] -= 1.0;

    if (h == 0) {
      double* gw = grad.data();
      double* gb = gw + static_cast<std::size_t>(k) * d;
      for (int c = 0; c < k; ++c) {
        const double g = dz[static_cast<std::size_t>(c)] * inv_n;
        double* row = gw + static_cast<std::size_t>(c) * d;
        for (int j = 0; j < d; ++j) row[j] += g * x[j];
        gb[c] += g;
      }
    } else {
      const double* w2 = m.weights.data() + static_cast<std::size_t>(h) * d + h;
      double* gw1 = grad.data();
      double* gb1 = gw1 + static_cast<std::size_t>(h) * d;
      double* gw2 = gb1 + h;
      double* gb2 = gw2 + static_cast<std::size_t>(k) * h;

      for (int c = 0; c < k; ++c) {
        const double g = dz[static_cast<std::size_t>(c)] * inv_n;
        double* row = gw2 + static_cast<std::size_t>(c) * h;
        for (int u = 0; u < h; ++u) row[u] += g * f.hidden[static_cast<std::size_t>(u)];
        gb2[c] += g;
      }
      for (int u = 0; u < h; ++u) {
        double dh = 0.0;
        for (int c = 0; c < k; ++c) {
          dh += dz[static_cast<std::size_t>(c)] * w2[static_cast<std::size_t>(c) * h + u];
        }
        const double hu = f.hidden[static_cast<std::size_t>(u)];
        const double g = dh * (1.0 - hu * hu) * inv_n;
        double* row = gw1 + static_cast<std::size_t>(u) * d;
        for (int j = 0; j < d; ++j) row[j] += g * x[j];
        gb1[u] += g;
      }
    }
  }
  return grad;
}

Model local_train(const Model& model, const Dataset& shard, int epochs, int batch_size,
                  double lr, std::uint64_t seed) {
  check_compatible(model, shard);
  require(shard.num_samples >= 1, "local_train: shard must be nonempty");
  require(epochs >= 1, "local_train: epochs must be >= 1");
  require(batch_size >= 1, "local_train: batch_size must be >= 1");
  require(lr >= 0.0, "local_train: lr must be >= 0");

  Model out = model;
  rng::Engine eng(seed);
  auto order = all_rows(shard);
  std::vector<int> batch;
  batch.reserve(static_cast<std::size_t>(batch_size));

  for (int e = 0; e < epochs; ++e) {
    eng.shuffle(order);
    for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch_size)) {
      const std::size_t stop = std::min(order.size(), start + static_cast<std::size_t>(batch_size));
      batch.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                   order.begin() + static_cast<std::ptrdiff_t>(stop));
      const auto grad = cross_entropy_gradient(out, shard, batch);
      for (std::size_t i = 0; i < grad.size(); ++i) out.weights[i] -= lr * grad[i];
    }
  }
  return out;
}

Model fedavg(const std::vector<Model>& updates, const std::vector<double>& weights) {
  require(!updates.empty(), "fedavg: updates must be nonempty");
  require(updates.size() == weights.size(), "fedavg: one weight per update required");

  double sum = 0.0;
  for (double w : weights) {
    require(w >= 0.0, "fedavg: weights must be nonnegative");
    sum += w;
  }
  require(sum > 0.0, "fedavg: weights must sum to > 0");

  const ModelLayout layout = updates.front().layout;
  for (const Model& m : updates) {
    if (!(m.layout == layout)) throw std::invalid_argument("fedavg: model layout mismatch");
  }

  Model out = zero_model(layout);
  for (std::size_t c = 0; c < updates.size(); ++c) {
    const double coeff = weights[c] / sum;
    const auto& w = updates[c].weights;
    for (std::size_t i = 0; i < w.size(); ++i) out.weights[i] += coeff * w[i];
  }
  return out;
}

double evaluate(const Model& m, const Dataset& ds) {
  check_compatible(m, ds);
  require(ds.num_samples >= 1, "evaluate: empty dataset");

  int correct = 0;
  for (int i = 0; i < ds.num_samples; ++i) {
    const Forward f = forward(m, ds.row(i));
    int best = 0;
    for (int c = 1; c < ds.num_classes; ++c) {
      if (f.probs[static_cast<std::size_t>(c)] > f.probs[static_cast<std::size_t>(best)]) best = c;
    }
    if (best == ds.labels[static_cast<std::size_t>(i)]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(ds.num_samples);
}

void TrainConfig::validate() const {
  require(n_clients >= 1, "TrainConfig.n_clients must be >= 1");
  require(rounds >= 0, "TrainConfig.rounds must be >= 0");
  require(local_epochs >= 1, "TrainConfig.local_epochs must be >= 1");
  require(batch_size >= 1, "TrainConfig.batch_size must be >= 1");
  require(learning_rate > 0.0, "TrainConfig.learning_rate must be positive");
  require(compute_ms_per_batch >= 0.0, "TrainConfig.compute_ms_per_batch must be >= 0");
  require(ground_compute_speedup > 0.0, "TrainConfig.ground_compute_speedup must be positive");
  require(holdout_fraction >= 0.0 && holdout_fraction < 1.0,
          "TrainConfig.holdout_fraction must lie in [0, 1)");
  require(hidden_units >= 0, "TrainConfig.hidden_units must be >= 0");
}

std::string trace_csv(const TrainingTrace& trace) {
  std::string out = "round,accuracy,elapsed_ms,exposure_bytes\n";
  char buf[128];
  for (const TraceRecord& r : trace.records) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%llu\n", r.round, r.accuracy, r.elapsed_ms,
                  static_cast<unsigned long long>(r.exposure_bytes));
    out += buf;
  }
  return out;
}

TrainingTrace trace_from_csv(const std::string& text) {
  TrainingTrace trace;
  std::istringstream in(text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {  // header
      first = false;
      continue;
    }
    if (line.empty()) continue;
    TraceRecord r;
    unsigned long long exposure = 0;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf,%llu", &r.round, &r.accuracy, &r.elapsed_ms,
                    &exposure) != 4) {
      throw std::invalid_argument("trace_from_csv: malformed row: " + line);
    }
    r.exposure_bytes = exposure;
    trace.records.push_back(r);
  }
  return trace;
}

TrainingTrace run_centralized(const Dataset& ds, const TrainConfig& cfg, par::Mode mode,
                              const RoundObserver& observer) {
  return run_rounds(ds, cfg, /*centralized=*/true, mode, observer);
}

TrainingTrace run_federated(const Dataset& ds, const TrainConfig& cfg, par::Mode mode,
                            const RoundObserver& observer) {
  return run_rounds(ds, cfg, /*centralized=*/false, mode, observer);
}

TimeToAccuracy time_to_accuracy(const TrainingTrace& trace, double target) {
  require(target >= 0.0 && target <= 1.0, "time_to_accuracy: target must lie in [0, 1]");
  require(!trace.records.empty(), "time_to_accuracy: empty trace");

  TimeToAccuracy result;
  for (const TraceRecord& r : trace.records) {
    result.best_accuracy = std::max(result.best_accuracy, r.accuracy);
    if (!result.reached && r.accuracy >= target) {
      result.reached = true;
      result.elapsed_ms = r.elapsed_ms;
    }
  }
  return result;
}

}  // namespace satfed::fed
