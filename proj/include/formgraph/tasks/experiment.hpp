#pragma once

// Experiment configuration and its JSON echo.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "formgraph/features.hpp"
#include "formgraph/gcn.hpp"
#include "formgraph/rope.hpp"

namespace formgraph {

struct ExperimentConfig {
  std::string dataset = "synthetic";
  GcnConfig gcn;
  TextEmbedderConfig text;
  std::uint64_t seed = 1;
  int epochs = 20;
  long max_steps = 0;  // optimizer step cap; 0 means epochs x documents
  double lr = 1e-4;
  double warmup_proportion = 0.01;
  double clip_norm = 5.0;
  int batch_size = 1;
  int eval_every_epochs = 1;  // 0 disables periodic evaluation
  double shuffle_fraction = 0.0;
  bool shuffle_test_only = false;

  void validate() const {
    gcn.validate();
    if (epochs < 1) throw UsageError("epochs must be >= 1");
    if (max_steps < 0) throw UsageError("step cap must be >= 0");
    if (!(lr > 0.0)) throw UsageError("learning rate must be positive");
    if (warmup_proportion < 0.0 || warmup_proportion > 1.0)
      throw UsageError("warmup proportion must lie in [0, 1]");
    if (batch_size != 1) throw UsageError("only batch size 1 is supported");
    if (shuffle_fraction < 0.0 || shuffle_fraction > 1.0)
      throw UsageError("shuffle fraction must lie in [0, 1]");
  }
};

// Defaults from the reference setup: 128-wide model, 4 x 32 attention heads,
// 3 attention layers, 2-layer MLP update, Adam at 1e-4 with 1% warmup,
// batch size 1. Hops: 2 for FUNSD, 7 otherwise.
inline ExperimentConfig default_experiment(const std::string& dataset) {
  ExperimentConfig c;
  c.dataset = dataset;
  c.gcn.hops = dataset == "funsd" ? 2 : 7;
  c.gcn.n_classes = dataset == "funsd" ? 4 : 14;
  return c;
}

inline nlohmann::json to_json(const RopeEncodingConfig& r) {
  return {{"mode", std::string(to_string(r.mode))},
          {"n_frequencies", r.n_frequencies},
          {"frequency_base", r.frequency_base},
          {"index_scale", r.index_scale}};
}

inline RopeEncodingConfig rope_from_json(const nlohmann::json& j) {
  RopeEncodingConfig r;
  r.mode = parse_rope_mode(j.at("mode").get<std::string>());
  r.n_frequencies = j.at("n_frequencies").get<int>();
  r.frequency_base = j.at("frequency_base").get<double>();
  r.index_scale = j.at("index_scale").get<double>();
  return r;
}

inline nlohmann::json to_json(const GcnConfig& g) {
  return {{"hops", g.hops},
          {"heads", g.heads},
          {"head_size", g.head_size},
          {"attention_layers", g.attention_layers},
          {"mlp_hidden", g.mlp_hidden},
          {"use_edge_geo", g.use_edge_geo},
          {"rope", to_json(g.rope)},
          {"n_classes", g.n_classes}};
}

inline GcnConfig gcn_from_json(const nlohmann::json& j) {
  GcnConfig g;
  g.hops = j.at("hops").get<int>();
  g.heads = j.at("heads").get<int>();
  g.head_size = j.at("head_size").get<int>();
  g.attention_layers = j.at("attention_layers").get<int>();
  g.mlp_hidden = j.at("mlp_hidden").get<int>();
  g.use_edge_geo = j.at("use_edge_geo").get<bool>();
  g.rope = rope_from_json(j.at("rope"));
  g.n_classes = j.at("n_classes").get<int>();
  return g;
}

inline nlohmann::json to_json(const ExperimentConfig& c) {
  return {{"dataset", c.dataset},
          {"gcn", to_json(c.gcn)},
          {"text", {{"dimension", c.text.dimension}, {"seed", c.text.seed}, {"ngram", c.text.ngram}}},
          {"seed", c.seed},
          {"epochs", c.epochs},
          {"max_steps", c.max_steps},
          {"lr", c.lr},
          {"warmup_proportion", c.warmup_proportion},
          {"clip_norm", c.clip_norm},
          {"batch_size", c.batch_size},
          {"eval_every_epochs", c.eval_every_epochs},
          {"shuffle_fraction", c.shuffle_fraction},
          {"shuffle_test_only", c.shuffle_test_only},
          {"feature_layout", kFeatureLayoutVersion}};
}

inline ExperimentConfig experiment_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.dataset = j.at("dataset").get<std::string>();
  c.gcn = gcn_from_json(j.at("gcn"));
  const auto& t = j.at("text");
  c.text.dimension = t.at("dimension").get<int>();
  c.text.seed = t.at("seed").get<std::uint64_t>();
  c.text.ngram = t.at("ngram").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.epochs = j.at("epochs").get<int>();
  c.max_steps = j.value("max_steps", 0L);
  c.lr = j.at("lr").get<double>();
  c.warmup_proportion = j.at("warmup_proportion").get<double>();
  c.clip_norm = j.at("clip_norm").get<double>();
  c.batch_size = j.at("batch_size").get<int>();
  c.eval_every_epochs = j.at("eval_every_epochs").get<int>();
  c.shuffle_fraction = j.at("shuffle_fraction").get<double>();
  c.shuffle_test_only = j.at("shuffle_test_only").get<bool>();
  if (j.value("feature_layout", std::string()) != kFeatureLayoutVersion)
    throw VersionMismatch("feature layout '" + j.value("feature_layout", std::string()) +
                          "' but this build uses '" + kFeatureLayoutVersion + "'");
  return c;
}

}  // namespace formgraph
