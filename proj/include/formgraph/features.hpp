#pragma once

// Node and edge (EdgeGeo) feature vectors.
//
// Node layout "featv1" (74 slots):
//   [0, 64)  hashed text embedding, unit L2 norm
//   64 h/H    65 w/W
//   66 x0/W   67 y0/H    (top-left corner)
//   68 x1/W   69 y1/H    (bottom-right corner)
//   70 cx/W   71 cy/H    (center)
//   72 x0/W   73 y1/H    (bottom-left corner)
//
// EdgeGeo layout for directed edge i -> j (10 slots), D = page diagonal:
//   0 (cx_j - cx_i)/D   1 (cy_j - cy_i)/D
//   2 (x0_j - x0_i)/D   3 (y0_j - y0_i)/D
//   4 (x1_j - x1_i)/D   5 (y1_j - y1_i)/D
//   6 h_i/w_i   7 h_j/w_j   8 h_i/h_j   9 w_i/w_j
// Heights/widths are floored at 0.5 px and ratios clamped to [1/50, 50].

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "formgraph/docmodel.hpp"
#include "formgraph/error.hpp"

namespace formgraph {

inline constexpr const char* kFeatureLayoutVersion = "featv1";
inline constexpr int kTextDim = 64;
inline constexpr int kSpatialDim = 10;
inline constexpr int kNodeFeatureDim = kTextDim + kSpatialDim;
inline constexpr int kEdgeGeoDim = 10;
inline constexpr int kEdgeDistanceDim = 6;

inline constexpr double kMinSidePx = 0.5;
inline constexpr double kMaxRatio = 50.0;

struct TextEmbedderConfig {
  int dimension = kTextDim;
  std::uint64_t seed = 0x5eed'f00dULL;
  int ngram = 3;
};

using NodeFeatureVector = std::array<double, kNodeFeatureDim>;
using EdgeGeoVector = std::array<double, kEdgeGeoDim>;

namespace detail {

inline std::uint64_t fnv1a(std::string_view s, std::uint64_t seed) {
  std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  // splitmix64 finalizer
  h += 0x9e3779b97f4a7c15ULL;
  h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
  h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
  return h ^ (h >> 31);
}

inline std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace detail

struct HashBucket {
  int index = 0;
  double sign = 1.0;
  bool operator==(const HashBucket&) const = default;
};

inline HashBucket hash_bucket(std::string_view feature, const TextEmbedderConfig& cfg) {
  const std::uint64_t h = detail::fnv1a(feature, cfg.seed);
  return {static_cast<int>(h % static_cast<std::uint64_t>(cfg.dimension)),
          (h >> 63) ? -1.0 : 1.0};
}

// Digits -> 'd', letters -> 'a', everything else kept verbatim.
inline std::string word_shape(std::string_view text) {
  std::string shape;
  shape.reserve(text.size());
  for (unsigned char c : text) {
    if (std::isdigit(c)) shape.push_back('d');
    else if (std::isalpha(c)) shape.push_back('a');
    else shape.push_back(static_cast<char>(c));
  }
  return shape;
}

inline HashBucket shape_bucket(std::string_view text, const TextEmbedderConfig& cfg) {
  return hash_bucket("s:" + word_shape(detail::ascii_lower(text)), cfg);
}

inline std::vector<double> hash_text_embedding(std::string_view text,
                                               const TextEmbedderConfig& cfg = {}) {
  if (text.empty()) throw DataError("cannot embed empty text");
  std::vector<double> v(static_cast<std::size_t>(cfg.dimension), 0.0);
  auto add = [&](const HashBucket& b) { v[static_cast<std::size_t>(b.index)] += b.sign; };

  const std::string lower = detail::ascii_lower(text);
  const std::string padded = "^" + lower + "$";
  const auto n = static_cast<std::size_t>(cfg.ngram);
  for (std::size_t i = 0; i + n <= padded.size(); ++i)
    add(hash_bucket("t:" + padded.substr(i, n), cfg));
  add(hash_bucket("w:" + lower, cfg));
  add(shape_bucket(text, cfg));

  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm > 0.0)
    for (double& x : v) x /= norm;
  return v;
}

inline NodeFeatureVector node_features(const Document& d, std::size_t pos,
                                       const TextEmbedderConfig& cfg = {}) {
  if (pos >= d.tokens.size()) throw UsageError("token position out of range");
  const auto& t = d.tokens[pos];
  NodeFeatureVector f{};
  const auto text = hash_text_embedding(t.text, cfg);
  std::copy(text.begin(), text.end(), f.begin());
  const double W = d.page_width, H = d.page_height;
  const auto& b = t.box;
  const Point c = box_center(b);
  double* s = f.data() + kTextDim;
  s[0] = b.height() / H;
  s[1] = b.width() / W;
  s[2] = b.x0 / W;
  s[3] = b.y0 / H;
  s[4] = b.x1 / W;
  s[5] = b.y1 / H;
  s[6] = c.x / W;
  s[7] = c.y / H;
  s[8] = b.x0 / W;
  s[9] = b.y1 / H;
  return f;
}

inline double clamp_ratio(double r) { return std::clamp(r, 1.0 / kMaxRatio, kMaxRatio); }

inline EdgeGeoVector edge_geo_features(const BoundingBox& bi, const BoundingBox& bj,
                                       double page_width, double page_height) {
  const double diag = std::hypot(page_width, page_height);
  const Point ci = box_center(bi), cj = box_center(bj);
  const double hi = std::max(bi.height(), kMinSidePx), wi = std::max(bi.width(), kMinSidePx);
  const double hj = std::max(bj.height(), kMinSidePx), wj = std::max(bj.width(), kMinSidePx);
  return {(cj.x - ci.x) / diag,   (cj.y - ci.y) / diag,   (bj.x0 - bi.x0) / diag,
          (bj.y0 - bi.y0) / diag, (bj.x1 - bi.x1) / diag, (bj.y1 - bi.y1) / diag,
          clamp_ratio(hi / wi),   clamp_ratio(hj / wj),   clamp_ratio(hi / hj),
          clamp_ratio(wi / wj)};
}

inline EdgeGeoVector edge_geo_features(const Document& d, std::size_t i, std::size_t j) {
  if (i >= d.tokens.size() || j >= d.tokens.size() || i == j)
    throw UsageError("edge_geo_features needs two distinct valid token positions");
  return edge_geo_features(d.tokens[i].box, d.tokens[j].box, d.page_width, d.page_height);
}

}  // namespace formgraph
