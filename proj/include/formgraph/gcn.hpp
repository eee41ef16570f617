#pragma once

// Graph message-passing network over DocGraphs.
//
// Each hop builds one message per directed edge j -> i from
// [h_j | EdgeGeo(j -> i) | rope(code)] projected to the model width, runs a
// stack of multi-head self-attention layers over {h_i} U messages(i), takes
// the target slot as the aggregate and updates h_i with a 2-layer MLP over
// [h_i | aggregate]. Parameters are shared across hops.

#include <string>
#include <vector>

#include "formgraph/docmodel.hpp"
#include "formgraph/features.hpp"
#include "formgraph/geometry.hpp"
#include "formgraph/nn/layers.hpp"
#include "formgraph/nn/tape.hpp"
#include "formgraph/rope.hpp"

namespace formgraph {

using nn::Segment;
using nn::Tape;
using nn::Tensor;
using nn::Var;

struct GcnConfig {
  int hops = 7;
  int heads = 4;
  int head_size = 32;
  int attention_layers = 3;
  int mlp_hidden = nn::kMlpHidden;
  bool use_edge_geo = true;
  RopeEncodingConfig rope;
  int n_classes = 14;

  int width() const { return heads * head_size; }
  int edge_geo_width() const { return use_edge_geo ? kEdgeGeoDim : 0; }
  int message_input_width() const { return width() + edge_geo_width() + rope.width(); }
  int edge_head_input_width() const { return 3 * width() + edge_geo_width(); }

  void validate() const {
    if (hops < 1) throw UsageError("hops must be >= 1");
    if (heads < 1 || head_size < 1) throw UsageError("heads and head size must be positive");
    if (attention_layers < 1) throw UsageError("need at least one attention layer");
    if (n_classes < 2) throw UsageError("need at least two classes");
  }
};

// Per-document tensors and index lists consumed by the network.
struct GraphInputs {
  int n = 0;
  Tensor node_feats;  // n x 74
  Tensor edge_geo;    // 2E x edge_geo_width
  Tensor rope;        // 2E x rope width
  std::vector<int> src, dst;
  std::vector<int> slot_index;         // rows of [h ; messages] in slot order
  std::vector<Segment> slot_segments;  // one per target vertex
  std::vector<int> target_slots;       // first row of each segment
  std::vector<Segment> target_segments;
  std::vector<int> fwd, bwd;  // directed edge ids of undirected edge k
  std::vector<int> labels;       // per vertex, empty if unlabeled
  std::vector<int> edge_labels;  // per undirected edge, empty if no entities
};

inline Tensor rope_tensor(const RopeAssignment& codes, const RopeEncodingConfig& cfg) {
  const int w = cfg.width();
  Tensor t(static_cast<Eigen::Index>(codes.codes.size()), w);
  for (std::size_t e = 0; e < codes.codes.size(); ++e) {
    const auto v = rope_edge_encoding(codes.codes[e], cfg);
    for (int c = 0; c < w; ++c) t(static_cast<Eigen::Index>(e), c) = v[static_cast<std::size_t>(c)];
  }
  return t;
}

// Same-entity gold label for every undirected skeleton edge.
inline std::vector<int> grouping_labels(const Document& d, const DocGraph& g) {
  std::vector<int> out;
  if (!d.entities) return out;
  std::vector<int> owner(d.size(), -1);
  for (std::size_t e = 0; e < d.entities->size(); ++e)
    for (std::size_t idx : (*d.entities)[e].tokens)
      if (auto pos = position_of(d, idx)) owner[*pos] = static_cast<int>(e);
  out.reserve(g.skeleton.undirected_edges.size());
  for (auto [i, j] : g.skeleton.undirected_edges)
    out.push_back(owner[i] >= 0 && owner[i] == owner[j] ? 1 : 0);
  return out;
}

inline GraphInputs prepare_inputs(const Document& d, const DocGraph& g, const GcnConfig& cfg,
                                  const TextEmbedderConfig& text = {}) {
  GraphInputs in;
  in.n = g.n_vertices();
  if (static_cast<std::size_t>(in.n) != d.size())
    throw DataError("graph/document size mismatch for '" + d.id + "'");
  in.node_feats.resize(in.n, kNodeFeatureDim);
  for (int v = 0; v < in.n; ++v) {
    const auto f = node_features(d, static_cast<std::size_t>(v), text);
    for (int c = 0; c < kNodeFeatureDim; ++c) in.node_feats(v, c) = f[static_cast<std::size_t>(c)];
  }
  const auto E2 = static_cast<Eigen::Index>(g.directed_edges.size());
  in.edge_geo.resize(E2, cfg.edge_geo_width());
  for (Eigen::Index e = 0; e < E2; ++e) {
    const auto& de = g.directed_edges[static_cast<std::size_t>(e)];
    in.src.push_back(de.src);
    in.dst.push_back(de.dst);
    if (cfg.use_edge_geo) {
      const auto f = edge_geo_features(d, static_cast<std::size_t>(de.src),
                                       static_cast<std::size_t>(de.dst));
      for (int c = 0; c < kEdgeGeoDim; ++c) in.edge_geo(e, c) = f[static_cast<std::size_t>(c)];
    }
  }
  const auto order = reading_order_of(d);
  in.rope = rope_tensor(rope_codes(g, order), cfg.rope);

  int row = 0;
  for (int v = 0; v < in.n; ++v) {
    const int len = 1 + static_cast<int>(g.incoming[v].size());
    in.slot_segments.push_back({row, len});
    in.target_slots.push_back(row);
    in.target_segments.push_back({v, 1});
    in.slot_index.push_back(v);
    for (int e : g.incoming[v]) in.slot_index.push_back(in.n + e);
    row += len;
  }
  for (std::size_t k = 0; k < g.skeleton.undirected_edges.size(); ++k) {
    in.fwd.push_back(static_cast<int>(2 * k));
    in.bwd.push_back(static_cast<int>(2 * k + 1));
  }
  if (d.labels) in.labels = *d.labels;
  in.edge_labels = grouping_labels(d, g);
  return in;
}

// Zeroes the displacement slots of EdgeGeo, keeping the ratio slots.
inline void zero_edge_distances(GraphInputs& in) {
  if (in.edge_geo.cols() >= kEdgeDistanceDim) in.edge_geo.leftCols(kEdgeDistanceDim).setZero();
}

class GcnModel {
 public:
  explicit GcnModel(GcnConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

  const GcnConfig& config() const { return cfg_; }

  void init(nn::ParamStore& s) const {
    const int w = cfg_.width();
    nn::init_linear(s, "input", kNodeFeatureDim, w);
    nn::init_linear(s, "message", cfg_.message_input_width(), w);
    for (int l = 0; l < cfg_.attention_layers; ++l)
      nn::init_attention(s, "attn" + std::to_string(l), attention_shape());
    nn::init_mlp2(s, "update", 2 * w, w, cfg_.mlp_hidden);
    nn::init_linear(s, "node_head", w, cfg_.n_classes);
    nn::init_linear(s, "edge_head", cfg_.edge_head_input_width(), 1);
  }

  nn::AttentionShape attention_shape() const { return {cfg_.heads, cfg_.head_size}; }

  // [h_j | edge_geo | rope] -> width
  Var build_messages(Tape& t, const nn::ParamStore& s, Var h, Var edge_geo, Var rope,
                     const GraphInputs& in) const {
    Var hj = nn::gather_rows(t, h, in.src);
    std::vector<Var> parts{hj};
    if (t.value(edge_geo).cols() > 0) parts.push_back(edge_geo);
    if (t.value(rope).cols() > 0) parts.push_back(rope);
    Var x = nn::concat_cols(t, parts);
    if (t.value(x).cols() != cfg_.message_input_width())
      throw ShapeMismatch("message width " + std::to_string(t.value(x).cols()) + ", expected " +
                          std::to_string(cfg_.message_input_width()));
    return nn::linear(t, s, "message", x);
  }

  // Attention pooling over {h_i} U messages into i; returns n x width.
  Var aggregate(Tape& t, const nn::ParamStore& s, Var h, Var messages,
                const GraphInputs& in) const {
    Var pool = nn::concat_rows(t, {h, messages});
    Var x = nn::gather_rows(t, pool, in.slot_index);
    const auto shape = attention_shape();
    for (int l = 0; l + 1 < cfg_.attention_layers; ++l)
      x = nn::multi_head_attention(t, s, "attn" + std::to_string(l), x, x, in.slot_segments,
                                   in.slot_segments, shape);
    // Only the target slot of the last layer is read, so only it is queried.
    Var q = nn::gather_rows(t, x, in.target_slots);
    return nn::multi_head_attention(t, s, "attn" + std::to_string(cfg_.attention_layers - 1), q,
                                    x, in.target_segments, in.slot_segments, shape);
  }

  // Final-hop node states, n x width.
  Var forward(Tape& t, const nn::ParamStore& s, const GraphInputs& in) const {
    Var feats = t.constant(in.node_feats);
    Var edge_geo = t.constant(in.edge_geo);
    Var rope = t.constant(in.rope);
    if (t.value(rope).cols() != cfg_.rope.width() ||
        t.value(edge_geo).cols() != cfg_.edge_geo_width())
      throw ShapeMismatch("graph inputs were prepared for a different ablation config");
    Var h = nn::linear(t, s, "input", feats);
    for (int k = 0; k < cfg_.hops; ++k) {
      Var msgs = build_messages(t, s, h, edge_geo, rope, in);
      Var agg = aggregate(t, s, h, msgs, in);
      h = nn::mlp2(t, s, "update", nn::concat_cols(t, {h, agg}));
    }
    return h;
  }

  Var node_head(Tape& t, const nn::ParamStore& s, Var h) const {
    return nn::linear(t, s, "node_head", h);
  }

  // Symmetrized logit per undirected edge, E x 1.
  Var edge_head(Tape& t, const nn::ParamStore& s, Var h, const GraphInputs& in) const {
    Var hi = nn::gather_rows(t, h, in.src);
    Var hj = nn::gather_rows(t, h, in.dst);
    std::vector<Var> parts{hi, hj, nn::mul(t, hi, hj)};
    if (cfg_.use_edge_geo) parts.push_back(t.constant(in.edge_geo));
    Var z = nn::linear(t, s, "edge_head", nn::concat_cols(t, parts));
    Var zf = nn::gather_rows(t, z, in.fwd);
    Var zb = nn::gather_rows(t, z, in.bwd);
    return nn::scale(t, nn::add(t, zf, zb), 0.5);
  }

  struct Output {
    Var states;
    Var node_logits;
    Var edge_logits;
  };

  Output run(Tape& t, const nn::ParamStore& s, const GraphInputs& in) const {
    Output o;
    o.states = forward(t, s, in);
    o.node_logits = node_head(t, s, o.states);
    o.edge_logits = edge_head(t, s, o.states, in);
    return o;
  }

  Var labeling_loss(Tape& t, const Output& o, const GraphInputs& in) const {
    return nn::cross_entropy(t, o.node_logits, in.labels);
  }

  // Undefined for graphs without edges; callers check has_grouping_loss.
  Var grouping_loss(Tape& t, const Output& o, const GraphInputs& in) const {
    return nn::binary_cross_entropy(t, o.edge_logits, in.edge_labels);
  }

  static bool has_grouping_loss(const GraphInputs& in) {
    return !in.edge_labels.empty() && !in.fwd.empty();
  }

  // Joint objective: labeling CE plus grouping BCE when entities exist.
  Var joint_loss(Tape& t, const Output& o, const GraphInputs& in) const {
    Var l = labeling_loss(t, o, in);
    if (has_grouping_loss(in)) l = nn::add(t, l, grouping_loss(t, o, in));
    return l;
  }

 private:
  GcnConfig cfg_;
};

}  // namespace formgraph
