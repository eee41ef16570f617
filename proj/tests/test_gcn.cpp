#include <gtest/gtest.h>

#include <cmath>

#include "formgraph/gcn.hpp"
#include "formgraph/nn/gradcheck.hpp"

using namespace formgraph;

namespace {

Document small_doc(int n) {
  Document d;
  d.id = "g";
  d.page_width = 200;
  d.page_height = 100;
  const char* words[] = {"Invoice", "Date:", "3/18/97", "Total:", "$12.00", "Terms", "Net", "30"};
  for (int i = 0; i < n; ++i) {
    const double x = 10.0 + 45.0 * (i % 4), y = 10.0 + 30.0 * (i / 4) + 3.0 * (i % 2);
    d.tokens.push_back({static_cast<std::size_t>(i), words[i % 8], {x, y, x + 35.0, y + 12.0}});
  }
  std::vector<int> labels;
  std::vector<Entity> ents;
  for (int i = 0; i < n; ++i) {
    labels.push_back(i % 3);
    ents.push_back({i % 3, {static_cast<std::size_t>(i)}});
  }
  // merge tokens 0 and 1 into one entity
  if (n >= 2) {
    labels[1] = labels[0];
    ents[0].tokens.push_back(1);
    ents.erase(ents.begin() + 1);
  }
  d.labels = labels;
  d.entities = ents;
  return d;
}

GcnConfig small_config(bool geo, RopeMode mode) {
  GcnConfig c;
  c.hops = 2;
  c.heads = 2;
  c.head_size = 4;
  c.attention_layers = 2;
  c.mlp_hidden = 8;
  c.use_edge_geo = geo;
  c.rope.mode = mode;
  c.n_classes = 3;
  return c;
}

}  // namespace

TEST(GcnConfig, Widths) {
  GcnConfig c;
  EXPECT_EQ(c.width(), 128);
  EXPECT_EQ(c.message_input_width(), 145);
  c.use_edge_geo = false;
  c.rope.mode = RopeMode::Off;
  EXPECT_EQ(c.message_input_width(), 128);
  c.hops = 0;
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(Gcn, OutputShapes) {
  const auto d = small_doc(6);
  const auto g = build_doc_graph(d);
  const auto cfg = small_config(true, RopeMode::Combined);
  const auto in = prepare_inputs(d, g, cfg, {});
  nn::ParamStore s(1);
  GcnModel m(cfg);
  m.init(s);
  Tape t;
  const auto o = m.run(t, s, in);
  EXPECT_EQ(t.value(o.states).rows(), 6);
  EXPECT_EQ(t.value(o.states).cols(), 8);
  EXPECT_EQ(t.value(o.node_logits).cols(), 3);
  EXPECT_EQ(static_cast<std::size_t>(t.value(o.edge_logits).rows()), g.skeleton.undirected_edges.size());
  EXPECT_EQ(in.edge_labels.size(), g.skeleton.undirected_edges.size());
}

TEST(Gcn, SingleToken) {
  const auto d = small_doc(1);
  const auto g = build_doc_graph(d);
  GcnConfig cfg;
  cfg.n_classes = 3;
  const auto in = prepare_inputs(d, g, cfg, {});
  nn::ParamStore s(1);
  GcnModel m(cfg);
  m.init(s);
  Tape t;
  const auto o = m.run(t, s, in);
  EXPECT_EQ(t.value(o.states).rows(), 1);
  EXPECT_EQ(t.value(o.states).cols(), 128);
  EXPECT_TRUE(t.value(o.states).allFinite());
  EXPECT_FALSE(GcnModel::has_grouping_loss(in));
  t.backward(m.joint_loss(t, o, in));
}

TEST(Gcn, ZeroHeadsGiveUniform) {
  const auto d = small_doc(5);
  const auto g = build_doc_graph(d);
  auto cfg = small_config(true, RopeMode::Index);
  cfg.n_classes = 14;
  auto in = prepare_inputs(d, g, cfg, {});
  nn::ParamStore s(1);
  GcnModel m(cfg);
  m.init(s);
  s.value("node_head.W").setZero();
  s.value("edge_head.W").setZero();
  Tape t;
  const auto o = m.run(t, s, in);
  EXPECT_NEAR(t.value(m.labeling_loss(t, o, in))(0, 0), std::log(14.0), 1e-12);
  for (Eigen::Index r = 0; r < t.value(o.edge_logits).rows(); ++r)
    EXPECT_EQ(t.value(o.edge_logits)(r, 0), 0.0);
}

TEST(Gcn, EdgeHeadSymmetric) {
  const auto d = small_doc(7);
  const auto g = build_doc_graph(d);
  const auto cfg = small_config(true, RopeMode::Combined);
  auto in = prepare_inputs(d, g, cfg, {});
  nn::ParamStore s(4);
  GcnModel m(cfg);
  m.init(s);
  Tape t;
  const auto o = m.run(t, s, in);
  const Tensor z1 = t.value(o.edge_logits);
  // Swap the orientation of every undirected edge.
  std::swap(in.fwd, in.bwd);
  Tape u;
  const Tensor z2 = u.value(m.run(u, s, in).edge_logits);
  EXPECT_TRUE(z1.isApprox(z2, 1e-14));
}

TEST(Gcn, MessageOrderDoesNotMatter) {
  const auto d = small_doc(8);
  const auto g = build_doc_graph(d);
  const auto cfg = small_config(true, RopeMode::Combined);
  auto in = prepare_inputs(d, g, cfg, {});
  nn::ParamStore s(5);
  GcnModel m(cfg);
  m.init(s);
  Tape t;
  const Tensor a = t.value(m.run(t, s, in).node_logits);
  // Reverse the message slots after each target slot.
  for (const auto& seg : in.slot_segments)
    std::reverse(in.slot_index.begin() + seg.start + 1, in.slot_index.begin() + seg.start + seg.length);
  Tape u;
  const Tensor b = u.value(m.run(u, s, in).node_logits);
  EXPECT_TRUE(a.isApprox(b, 1e-12));
}

TEST(Gcn, ConfigMismatchDetected) {
  const auto d = small_doc(4);
  const auto g = build_doc_graph(d);
  const auto in = prepare_inputs(d, g, small_config(true, RopeMode::Index), {});
  GcnModel m(small_config(true, RopeMode::Combined));
  nn::ParamStore s(1);
  m.init(s);
  Tape t;
  EXPECT_THROW(m.run(t, s, in), ShapeMismatch);
}

TEST(Gcn, GradientMatchesFiniteDifferences) {
  const auto d = small_doc(5);
  const auto g = build_doc_graph(d);
  for (bool geo : {false, true}) {
    for (auto mode : {RopeMode::Off, RopeMode::Combined}) {
      const auto cfg = small_config(geo, mode);
      const auto in = prepare_inputs(d, g, cfg, {});
      GcnModel m(cfg);
      nn::ParamStore s(9);
      m.init(s);
      for (auto& [_, p] : s.params())
        for (Eigen::Index i = 0; i < p.value.size(); ++i) p.value.data()[i] += 0.01 * std::sin(1.0 + i);
      auto loss_of = [&](const nn::ParamStore& p) {
        Tape t(false);
        const auto o = m.run(t, p, in);
        return t.value(m.joint_loss(t, o, in))(0, 0);
      };
      Tape t;
      const auto o = m.run(t, s, in);
      t.backward(m.joint_loss(t, o, in));
      const auto r = nn::grad_check(loss_of, s, t.param_grads());
      EXPECT_LE(r.max_rel_error, 1e-4) << "geo " << geo << " rope " << to_string(mode) << " worst "
                                       << r.worst_param << "[" << r.worst_index << "] "
                                       << r.worst_analytic << " vs " << r.worst_numeric;
    }
  }
}

TEST(Gcn, ParameterCountDefault) {
  nn::ParamStore s(1);
  GcnModel(GcnConfig{}).init(s);
  EXPECT_EQ(s.parameter_count(), 278041u);
}
