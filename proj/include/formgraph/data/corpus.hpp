#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "formgraph/docmodel.hpp"

namespace formgraph {

struct Corpus {
  std::string name;
  LabelSchema schema;
  std::vector<Document> docs;
  bool operator==(const Corpus&) const = default;
};

// Page-global reading order by row banding: boxes whose vertical centers lie
// within half the median box height of a band's first box join that band;
// bands run top to bottom, words left to right inside a band. Returns box
// positions in reading order.
inline std::vector<std::size_t> row_band_order(const std::vector<BoundingBox>& boxes) {
  std::vector<std::size_t> order(boxes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (boxes.empty()) return order;

  std::vector<double> heights;
  heights.reserve(boxes.size());
  for (const auto& b : boxes) heights.push_back(b.height());
  std::nth_element(heights.begin(), heights.begin() + static_cast<std::ptrdiff_t>(heights.size() / 2),
                   heights.end());
  const double tol = 0.5 * heights[heights.size() / 2];

  auto cy = [&](std::size_t i) { return box_center(boxes[i]).y; };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cy(a) != cy(b)) return cy(a) < cy(b);
    return boxes[a].x0 < boxes[b].x0;
  });

  std::vector<std::size_t> out;
  out.reserve(order.size());
  std::size_t start = 0;
  while (start < order.size()) {
    const double anchor = cy(order[start]);
    std::size_t end = start;
    while (end < order.size() && cy(order[end]) - anchor <= tol) ++end;
    std::stable_sort(order.begin() + static_cast<std::ptrdiff_t>(start),
                     order.begin() + static_cast<std::ptrdiff_t>(end),
                     [&](std::size_t a, std::size_t b) { return boxes[a].x0 < boxes[b].x0; });
    out.insert(out.end(), order.begin() + static_cast<std::ptrdiff_t>(start),
               order.begin() + static_cast<std::ptrdiff_t>(end));
    start = end;
  }
  return out;
}

}  // namespace formgraph
