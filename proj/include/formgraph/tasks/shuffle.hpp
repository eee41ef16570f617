#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <unordered_map>
#include <vector>

#include "formgraph/data/corpus.hpp"
#include "formgraph/docmodel.hpp"
#include "formgraph/error.hpp"
#include "formgraph/nn/tensor.hpp"

namespace formgraph {

inline std::size_t shuffle_count(double fraction, std::size_t n) {
  // ceil(fraction * n), robust to 0.1 * 10 style rounding
  const double k = std::ceil(fraction * static_cast<double>(n) - 1e-9);
  return std::min(n, static_cast<std::size_t>(std::max(0.0, k)));
}

// Picks ceil(fraction * N) tokens uniformly without replacement and permutes
// their reading indexes uniformly. Boxes and text stay with their tokens; the
// result is re-sorted by the new indexes and labels/entities follow tokens.
inline Document shuffle_reading_order(const Document& d, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw UsageError("shuffle fraction must lie in [0, 1]");
  const std::size_t n = d.size();
  const std::size_t k = shuffle_count(fraction, n);
  if (k == 0) return d;

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> pos(n);
  for (std::size_t i = 0; i < n; ++i) pos[i] = i;
  nn::fisher_yates(pos.begin(), pos.end(), rng);
  pos.resize(k);
  std::sort(pos.begin(), pos.end());

  std::vector<std::size_t> new_index(n);
  for (std::size_t i = 0; i < n; ++i) new_index[i] = d.tokens[i].index;
  std::vector<std::size_t> picked;
  for (std::size_t p : pos) picked.push_back(d.tokens[p].index);
  nn::fisher_yates(picked.begin(), picked.end(), rng);
  for (std::size_t r = 0; r < k; ++r) new_index[pos[r]] = picked[r];

  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return new_index[a] < new_index[b]; });

  Document out;
  out.id = d.id;
  out.page_width = d.page_width;
  out.page_height = d.page_height;
  out.tokens.reserve(n);
  std::unordered_map<std::size_t, std::size_t> remap;
  for (std::size_t i = 0; i < n; ++i) remap[d.tokens[i].index] = new_index[i];
  for (std::size_t p : order) {
    WordToken t = d.tokens[p];
    t.index = new_index[p];
    out.tokens.push_back(std::move(t));
  }
  if (d.labels) {
    std::vector<int> labels;
    labels.reserve(n);
    for (std::size_t p : order) labels.push_back((*d.labels)[p]);
    out.labels = std::move(labels);
  }
  if (d.entities) {
    std::vector<Entity> ents = *d.entities;
    for (auto& e : ents) {
      for (auto& idx : e.tokens) idx = remap.at(idx);
      std::sort(e.tokens.begin(), e.tokens.end());
    }
    out.entities = std::move(ents);
  }
  return out;
}

inline Corpus shuffle_corpus(const Corpus& c, double fraction, std::uint64_t seed) {
  Corpus out = c;
  for (std::size_t i = 0; i < out.docs.size(); ++i)
    out.docs[i] = shuffle_reading_order(c.docs[i], fraction, seed * 1000003ULL + i);
  return out;
}

}  // namespace formgraph
