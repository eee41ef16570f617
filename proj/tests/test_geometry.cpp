#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "formgraph/geometry.hpp"
#include "formgraph/nn/tensor.hpp"

using namespace formgraph;

namespace {

std::set<VertexPair> edge_set(const SkeletonGraph& g) {
  return {g.undirected_edges.begin(), g.undirected_edges.end()};
}

std::vector<Point> random_points(std::mt19937_64& rng, int n, bool lattice) {
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) {
    double x = nn::uniform01(rng) * 100.0, y = nn::uniform01(rng) * 100.0;
    if (lattice) {
      x = std::floor(x / 20.0);
      y = std::floor(y / 20.0);
    }
    pts.push_back({x, y});
  }
  return pts;
}

}  // namespace

TEST(BetaSkeleton, TwoPoints) {
  std::vector<Point> p{{0, 0}, {5, 5}};
  EXPECT_EQ(beta_skeleton(p).undirected_edges.size(), 1u);
}

TEST(BetaSkeleton, OnePointAndEmpty) {
  std::vector<Point> p{{1, 1}};
  EXPECT_TRUE(beta_skeleton(p).undirected_edges.empty());
  EXPECT_THROW(beta_skeleton(std::vector<Point>{}), UsageError);
}

TEST(BetaSkeleton, BlockedByNearCenterPoint) {
  std::vector<Point> p{{0, 0}, {2, 0}, {1, 0.1}};
  EXPECT_EQ(edge_set(beta_skeleton(p)), (std::set<VertexPair>{{0, 2}, {1, 2}}));
}

TEST(BetaSkeleton, SquareBoundaryDoesNotBlock) {
  std::vector<Point> p{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  EXPECT_EQ(beta_skeleton(p).undirected_edges.size(), 6u);
}

TEST(BetaSkeleton, Collinear) {
  std::vector<Point> p{{0, 0}, {1, 0}, {2, 0}};
  EXPECT_EQ(edge_set(beta_skeleton(p)), (std::set<VertexPair>{{0, 1}, {1, 2}}));
}

TEST(BetaSkeleton, OnlyGabriel) {
  std::vector<Point> p{{0, 0}, {1, 1}};
  EXPECT_THROW(beta_skeleton(p, 2.0), UnsupportedBeta);
}

TEST(BetaSkeleton, NonFiniteRejected) {
  std::vector<Point> p{{0, 0}, {std::nan(""), 1}};
  EXPECT_THROW(beta_skeleton(p), DataError);
}

TEST(BetaSkeleton, MatchesBruteForce) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + static_cast<int>(nn::uniform_below(rng, 39));
    const auto pts = random_points(rng, n, trial % 3 == 0);
    ASSERT_EQ(edge_set(beta_skeleton(pts)), edge_set(gabriel_bruteforce(pts))) << "trial " << trial;
  }
}

TEST(BetaSkeleton, EdgesSortedAndConnected) {
  std::mt19937_64 rng(5);
  const auto pts = random_points(rng, 40, false);
  const auto g = beta_skeleton(pts);
  EXPECT_TRUE(std::is_sorted(g.undirected_edges.begin(), g.undirected_edges.end()));
  // Gabriel graphs of distinct points contain the minimum spanning tree.
  std::vector<int> comp(40);
  std::iota(comp.begin(), comp.end(), 0);
  for (int round = 0; round < 40; ++round)
    for (auto [i, j] : g.undirected_edges) comp[i] = comp[j] = std::min(comp[i], comp[j]);
  EXPECT_TRUE(std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; }));
  EXPECT_LT(g.undirected_edges.size(), 40u * 39u / 2u);
}

TEST(DocGraph, DirectedLayout) {
  Document d;
  d.page_width = d.page_height = 100;
  d.tokens = {{0, "a", {0, 0, 10, 10}}};
  EXPECT_TRUE(build_doc_graph(d).directed_edges.empty());
  d.tokens.push_back({1, "b", {20, 0, 30, 10}});
  const auto g = build_doc_graph(d);
  ASSERT_EQ(g.directed_edges.size(), 2u);
  EXPECT_EQ(g.directed_edges[0].src, 0);
  EXPECT_EQ(g.directed_edges[0].dst, 1);
  EXPECT_EQ(g.directed_edges[1].src, 1);
  EXPECT_EQ(g.directed_edges[1].dst, 0);
  EXPECT_EQ(g.incoming[0], std::vector<int>{1});
  EXPECT_EQ(g.incoming[1], std::vector<int>{0});
}
