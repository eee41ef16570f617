#pragma once

// Training loop (batch size 1, seeded document order) and evaluation of the
// word-labeling and word-grouping heads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "formgraph/data/corpus.hpp"
#include "formgraph/gcn.hpp"
#include "formgraph/geometry.hpp"
#include "formgraph/nn/params.hpp"
#include "formgraph/tasks/experiment.hpp"
#include "formgraph/tasks/metrics.hpp"
#include "formgraph/tasks/shuffle.hpp"

namespace formgraph {

struct TrainedModel {
  ExperimentConfig config;
  LabelSchema schema;
  nn::ParamStore params;
};

struct EpochSummary {
  int epoch = 0;
  double mean_loss = 0.0;
  double labeling_f1 = -1.0;  // -1 when not evaluated
  double grouping_f1 = -1.0;
};

struct TrainLog {
  std::vector<double> step_loss;
  std::vector<EpochSummary> epochs;
};

struct PreparedDoc {
  DocGraph graph;
  GraphInputs inputs;
};

inline PreparedDoc prepare_doc(const Document& d, const ExperimentConfig& cfg) {
  PreparedDoc p;
  p.graph = build_doc_graph(d);
  p.inputs = prepare_inputs(d, p.graph, cfg.gcn, cfg.text);
  return p;
}

inline std::vector<PreparedDoc> prepare_corpus(const Corpus& c, const ExperimentConfig& cfg) {
  std::vector<PreparedDoc> out;
  out.reserve(c.docs.size());
  for (const auto& d : c.docs) out.push_back(prepare_doc(d, cfg));
  return out;
}

inline void check_schema(const Corpus& c, const ExperimentConfig& cfg) {
  if (static_cast<int>(c.schema.size()) != cfg.gcn.n_classes)
    throw SchemaMismatch("corpus '" + c.name + "' has " + std::to_string(c.schema.size()) +
                         " classes, model expects " + std::to_string(cfg.gcn.n_classes));
}

struct LabelPredictions {
  std::vector<int> predicted;
  std::vector<double> probability;  // symmetrized same-entity probability per undirected edge
};

inline double sigmoid(double z) {
  return z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

inline LabelPredictions predict(const GcnModel& model, const nn::ParamStore& params,
                                const GraphInputs& in) {
  Tape t(false);
  const auto o = model.run(t, params, in);
  LabelPredictions p;
  const Tensor& z = t.value(o.node_logits);
  p.predicted.resize(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    Eigen::Index best;
    z.row(r).maxCoeff(&best);
    p.predicted[static_cast<std::size_t>(r)] = static_cast<int>(best);
  }
  const Tensor& e = t.value(o.edge_logits);
  for (Eigen::Index r = 0; r < e.rows(); ++r) p.probability.push_back(sigmoid(e(r, 0)));
  return p;
}

struct EvalResult {
  MetricsReport labeling;
  MetricsReport grouping;
};

inline EvalResult evaluate_prepared(const TrainedModel& m, const std::vector<PreparedDoc>& docs,
                                    double threshold = 0.5) {
  GcnModel model(m.config.gcn);
  LabelConfusion labels(m.schema.names);
  BinaryConfusion groups;
  for (const auto& doc : docs) {
    const auto p = predict(model, m.params, doc.inputs);
    if (!doc.inputs.labels.empty())
      for (std::size_t v = 0; v < p.predicted.size(); ++v)
        labels.add(doc.inputs.labels[v], p.predicted[v]);
    for (std::size_t k = 0; k < doc.inputs.edge_labels.size(); ++k)
      groups.add(doc.inputs.edge_labels[k] == 1, p.probability[k] >= threshold);
  }
  return {labels.report(), groups.report()};
}

inline EvalResult evaluate(const TrainedModel& m, const Corpus& c) {
  check_schema(c, m.config);
  return evaluate_prepared(m, prepare_corpus(c, m.config));
}

inline MetricsReport evaluate_labeling(const TrainedModel& m, const Corpus& c) {
  check_schema(c, m.config);
  for (const auto& d : c.docs)
    if (!d.labels) throw DataError("document '" + d.id + "' has no labels");
  return evaluate(m, c).labeling;
}

inline MetricsReport evaluate_grouping(const TrainedModel& m, const Corpus& c) {
  check_schema(c, m.config);
  for (const auto& d : c.docs)
    if (!d.entities) throw DataError("document '" + d.id + "' has no entity annotations");
  return evaluate(m, c).grouping;
}

using TrainCallback = std::function<void(const EpochSummary&)>;

inline TrainedModel init_model(const ExperimentConfig& cfg, const LabelSchema& schema) {
  TrainedModel m{cfg, schema, nn::ParamStore(cfg.seed)};
  GcnModel(cfg.gcn).init(m.params);
  return m;
}

// One optimizer step per document; documents visited in a per-epoch seeded
// permutation. Throws NumericError on a non-finite loss.
inline TrainedModel train(const Corpus& corpus, const ExperimentConfig& cfg, TrainLog* log = nullptr,
                          const Corpus* eval_corpus = nullptr, const TrainCallback& on_epoch = {}) {
  cfg.validate();
  if (corpus.docs.empty()) throw DataError("training corpus is empty");
  check_schema(corpus, cfg);

  Corpus train_docs = corpus;
  if (cfg.shuffle_fraction > 0.0 && !cfg.shuffle_test_only)
    train_docs = shuffle_corpus(corpus, cfg.shuffle_fraction, cfg.seed);
  const auto prepared = prepare_corpus(train_docs, cfg);
  std::vector<PreparedDoc> eval_prepared;
  if (eval_corpus) {
    check_schema(*eval_corpus, cfg);
    Corpus ev = *eval_corpus;
    if (cfg.shuffle_fraction > 0.0) ev = shuffle_corpus(ev, cfg.shuffle_fraction, cfg.seed + 1);
    eval_prepared = prepare_corpus(ev, cfg);
  }

  TrainedModel m = init_model(cfg, corpus.schema);
  const GcnModel model(cfg.gcn);
  nn::AdamConfig adam;
  adam.lr = cfg.lr;
  adam.warmup_proportion = cfg.warmup_proportion;
  adam.clip_norm = cfg.clip_norm;
  adam.total_steps = static_cast<long>(cfg.epochs) * static_cast<long>(prepared.size());
  if (cfg.max_steps > 0) adam.total_steps = std::min(adam.total_steps, cfg.max_steps);

  std::mt19937_64 order_rng(cfg.seed ^ 0x0bd3'c0deULL);
  std::vector<std::size_t> order(prepared.size());
  for (int epoch = 1; epoch <= cfg.epochs && m.params.step() < adam.total_steps; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    nn::fisher_yates(order.begin(), order.end(), order_rng);
    double sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t idx : order) {
      if (m.params.step() >= adam.total_steps) break;
      ++seen;
      const auto& in = prepared[idx].inputs;
      Tape t;
      const auto o = model.run(t, m.params, in);
      const Var loss = model.joint_loss(t, o, in);
      const double l = t.value(loss)(0, 0);
      if (!std::isfinite(l))
        throw NumericError("non-finite loss at step " + std::to_string(m.params.step() + 1));
      t.backward(loss);
      m.params.adam_step(t.param_grads(), adam);
      sum += l;
      if (log) log->step_loss.push_back(l);
    }
    const bool last = epoch == cfg.epochs || m.params.step() >= adam.total_steps;
    EpochSummary s{epoch, sum / static_cast<double>(seen)};
    if (eval_corpus && cfg.eval_every_epochs > 0 && (epoch % cfg.eval_every_epochs == 0 || last)) {
      const auto r = evaluate_prepared(m, eval_prepared);
      s.labeling_f1 = r.labeling.micro.f1;
      s.grouping_f1 = r.grouping.micro.f1;
    }
    if (log) log->epochs.push_back(s);
    if (on_epoch) on_epoch(s);
  }
  return m;
}

// Connected components over edges with probability >= threshold. Clusters
// are sorted by their smallest vertex; each cluster is sorted ascending.
inline std::vector<std::vector<int>> decode_groups(int n_vertices,
                                                   const std::vector<VertexPair>& edges,
                                                   const std::vector<double>& probability,
                                                   double threshold = 0.5) {
  if (edges.size() != probability.size())
    throw UsageError("decode_groups: one probability per edge required");
  std::vector<int> parent(static_cast<std::size_t>(n_vertices));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (!(probability[k] >= threshold)) continue;
    const int a = find(edges[k].first), b = find(edges[k].second);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::vector<int>> clusters;
  std::vector<int> slot(static_cast<std::size_t>(n_vertices), -1);
  for (int v = 0; v < n_vertices; ++v) {
    const int r = find(v);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(slot[r])].push_back(v);
  }
  return clusters;
}

}  // namespace formgraph
