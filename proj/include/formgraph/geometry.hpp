#pragma once

// Gabriel (beta = 1 skeleton) graphs over word-box centers.
//
// Edge (i, j) exists iff no third point lies strictly inside the disk whose
// diameter is the segment p_i p_j. The strict-interior test is the sign of
// (p_i - p_k) . (p_j - p_k) < 0 (Thales), evaluated in double precision with
// no epsilon. Points exactly on the circle, and coincident points, never block.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "formgraph/docmodel.hpp"
#include "formgraph/error.hpp"

namespace formgraph {

using VertexPair = std::pair<int, int>;

struct SkeletonGraph {
  int n_vertices = 0;
  std::vector<VertexPair> undirected_edges;  // i < j, sorted lexicographically
};

struct DirectedEdge {
  int src = 0;
  int dst = 0;
  bool operator==(const DirectedEdge&) const = default;
};

struct DocGraph {
  SkeletonGraph skeleton;
  // Edge 2k is (i -> j) and edge 2k + 1 is (j -> i) for undirected edge k = (i, j).
  std::vector<DirectedEdge> directed_edges;
  // incoming[v] lists ids into directed_edges whose dst == v, ascending.
  std::vector<std::vector<int>> incoming;

  int n_vertices() const { return skeleton.n_vertices; }
};

namespace detail {

inline bool strictly_inside_diameter_disk(const Point& a, const Point& b, const Point& k) {
  const double ux = a.x - k.x, uy = a.y - k.y;
  const double vx = b.x - k.x, vy = b.y - k.y;
  return ux * vx + uy * vy < 0.0;
}

inline void require_finite(std::span<const Point> pts) {
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (!std::isfinite(pts[i].x) || !std::isfinite(pts[i].y))
      throw DataError("non-finite point coordinate at vertex " + std::to_string(i));
}

}  // namespace detail

// Reference O(n^3) construction.
inline SkeletonGraph gabriel_bruteforce(std::span<const Point> pts) {
  detail::require_finite(pts);
  const int n = static_cast<int>(pts.size());
  SkeletonGraph g{n, {}};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      bool blocked = false;
      for (int k = 0; k < n && !blocked; ++k) {
        if (k == i || k == j) continue;
        blocked = detail::strictly_inside_diameter_disk(pts[i], pts[j], pts[k]);
      }
      if (!blocked) g.undirected_edges.emplace_back(i, j);
    }
  }
  return g;
}

// Production path: same predicate, but candidate blockers are restricted to
// the x-slab that can intersect the diameter disk (points sorted by x).
inline SkeletonGraph beta_skeleton(std::span<const Point> pts, double beta = 1.0) {
  if (beta != 1.0)
    throw UnsupportedBeta("only beta = 1 (Gabriel) is supported, got " + std::to_string(beta));
  if (pts.empty()) throw UsageError("beta_skeleton needs at least one point");
  detail::require_finite(pts);

  const int n = static_cast<int>(pts.size());
  std::vector<int> by_x(n);
  std::iota(by_x.begin(), by_x.end(), 0);
  std::stable_sort(by_x.begin(), by_x.end(),
                   [&](int a, int b) { return pts[a].x < pts[b].x; });
  std::vector<double> xs(n);
  for (int r = 0; r < n; ++r) xs[r] = pts[by_x[r]].x;

  SkeletonGraph g{n, {}};
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Point& a = pts[i];
      const Point& b = pts[j];
      const double cx = 0.5 * (a.x + b.x);
      const double half = 0.5 * std::hypot(a.x - b.x, a.y - b.y);
      // Widened so rounding in cx/half can never exclude a true blocker.
      const double slack = 1e-9 * (half + std::abs(cx)) + 1e-300;
      const double lo = cx - half - slack, hi = cx + half + slack;
      auto first = std::lower_bound(xs.begin(), xs.end(), lo);
      bool blocked = false;
      for (auto it = first; it != xs.end() && *it <= hi && !blocked; ++it) {
        const int k = by_x[static_cast<std::size_t>(it - xs.begin())];
        if (k == i || k == j) continue;
        blocked = detail::strictly_inside_diameter_disk(a, b, pts[k]);
      }
      if (!blocked) g.undirected_edges.emplace_back(i, j);
    }
  }
  return g;
}

inline DocGraph make_doc_graph(SkeletonGraph skeleton) {
  DocGraph g;
  g.skeleton = std::move(skeleton);
  const int n = g.skeleton.n_vertices;
  g.directed_edges.reserve(2 * g.skeleton.undirected_edges.size());
  for (auto [i, j] : g.skeleton.undirected_edges) {
    if (i == j || i < 0 || j < 0 || i >= n || j >= n)
      throw DataError("skeleton edge (" + std::to_string(i) + "," + std::to_string(j) +
                      ") invalid for " + std::to_string(n) + " vertices");
    g.directed_edges.push_back({i, j});
    g.directed_edges.push_back({j, i});
  }
  g.incoming.assign(n, {});
  for (int e = 0; e < static_cast<int>(g.directed_edges.size()); ++e)
    g.incoming[g.directed_edges[e].dst].push_back(e);
  return g;
}

inline std::vector<Point> token_centers(const Document& d) {
  std::vector<Point> pts;
  pts.reserve(d.size());
  for (const auto& t : d.tokens) pts.push_back(box_center(t.box));
  return pts;
}

// Vertex v of the result is d.tokens[v].
inline DocGraph build_doc_graph(const Document& d) {
  if (d.tokens.empty()) throw DataError("document '" + d.id + "' has no tokens");
  const auto pts = token_centers(d);
  return make_doc_graph(beta_skeleton(pts, 1.0));
}

}  // namespace formgraph
