#include <gtest/gtest.h>

#include "formgraph/rope.hpp"

using namespace formgraph;

namespace {

// Star: vertex 0 is the target, vertices 1..3 its neighbors.
DocGraph star(int leaves) {
  SkeletonGraph s{leaves + 1, {}};
  for (int v = 1; v <= leaves; ++v) s.undirected_edges.push_back({0, v});
  return make_doc_graph(s);
}

int code_of(const DocGraph& g, const RopeAssignment& a, int src, int dst) {
  for (std::size_t e = 0; e < g.directed_edges.size(); ++e)
    if (g.directed_edges[e].src == src && g.directed_edges[e].dst == dst) return a.codes[e];
  return -1;
}

}  // namespace

TEST(RopeCodes, RankByReadingIndex) {
  const auto g = star(3);
  const std::vector<std::size_t> order{0, 12, 3, 7};
  const auto a = rope_codes(g, order);
  EXPECT_EQ(code_of(g, a, 2, 0), 0);
  EXPECT_EQ(code_of(g, a, 3, 0), 1);
  EXPECT_EQ(code_of(g, a, 1, 0), 2);
  for (int v = 1; v <= 3; ++v) EXPECT_EQ(code_of(g, a, 0, v), 0);
}

TEST(RopeCodes, ShiftInvariant) {
  const auto g = star(3);
  const std::vector<std::size_t> a{0, 12, 3, 7}, b{100, 112, 103, 107};
  EXPECT_EQ(rope_codes(g, a), rope_codes(g, b));
}

TEST(RopeCodes, LengthMismatch) {
  const auto g = star(2);
  const std::vector<std::size_t> order{0, 1};
  EXPECT_THROW(rope_codes(g, order), DataError);
}

TEST(Sinusoid, ZeroAndOne) {
  const auto z = sinusoidal_encode(0);
  const std::vector<double> zero{0, 1, 0, 1, 0, 1};
  EXPECT_EQ(z, zero);
  const auto v = sinusoidal_encode(1);
  const double expect[] = {0.841471, 0.540302, 0.046399, 0.998923, 0.002154, 0.999998};
  for (int k = 0; k < 6; ++k) EXPECT_NEAR(v[k], expect[k], 5e-7) << k;
}

TEST(RopeEncoding, Modes) {
  RopeEncodingConfig c;
  c.mode = RopeMode::Off;
  EXPECT_TRUE(rope_edge_encoding(5, c).empty());
  c.mode = RopeMode::Index;
  ASSERT_EQ(rope_edge_encoding(5, c).size(), 1u);
  EXPECT_DOUBLE_EQ(rope_edge_encoding(5, c)[0], 0.5);
  c.mode = RopeMode::Combined;
  const auto v = rope_edge_encoding(2, c);
  const double expect[] = {0.2, 0.909297, -0.416147, 0.092698, 0.995694, 0.004309, 0.999991};
  ASSERT_EQ(v.size(), 7u);
  ASSERT_EQ(c.width(), 7);
  for (int k = 0; k < 7; ++k) EXPECT_NEAR(v[k], expect[k], 1e-6) << k;
}

TEST(RopeMode, ParseAndPrint) {
  for (auto m : {RopeMode::Off, RopeMode::Index, RopeMode::Sinusoidal, RopeMode::Combined})
    EXPECT_EQ(parse_rope_mode(to_string(m)), m);
  EXPECT_THROW(parse_rope_mode("cosine"), UsageError);
}
