#pragma once

// Reading-order codes for graph neighborhoods.
//
// For each target vertex, its in-neighbors are ranked by their reading-order
// index; the earliest neighbor gets code 0. Codes only depend on the relative
// order inside the neighborhood, so any order-preserving remap of reading
// indexes leaves them unchanged.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "formgraph/error.hpp"
#include "formgraph/geometry.hpp"

namespace formgraph {

enum class RopeMode { Off, Index, Sinusoidal, Combined };

inline std::string_view to_string(RopeMode m) {
  switch (m) {
    case RopeMode::Off: return "off";
    case RopeMode::Index: return "index";
    case RopeMode::Sinusoidal: return "sine";
    case RopeMode::Combined: return "both";
  }
  return "?";
}

inline RopeMode parse_rope_mode(std::string_view s) {
  if (s == "off") return RopeMode::Off;
  if (s == "index") return RopeMode::Index;
  if (s == "sine" || s == "sinusoidal") return RopeMode::Sinusoidal;
  if (s == "both" || s == "combined") return RopeMode::Combined;
  throw UsageError("unknown rope mode '" + std::string(s) + "' (off|index|sine|both)");
}

struct RopeEncodingConfig {
  RopeMode mode = RopeMode::Combined;
  int n_frequencies = 3;
  double frequency_base = 10000.0;
  double index_scale = 0.1;

  int width() const {
    const int sine = 2 * n_frequencies;
    switch (mode) {
      case RopeMode::Off: return 0;
      case RopeMode::Index: return 1;
      case RopeMode::Sinusoidal: return sine;
      case RopeMode::Combined: return 1 + sine;
    }
    return 0;
  }
};

// codes[e] is the code of directed edge e (its src ranked among dst's in-neighbors).
struct RopeAssignment {
  std::vector<int> codes;
  bool operator==(const RopeAssignment&) const = default;
};

inline RopeAssignment rope_codes(const DocGraph& g, std::span<const std::size_t> reading_order) {
  const auto n = static_cast<std::size_t>(g.n_vertices());
  if (reading_order.size() != n)
    throw DataError("reading order covers " + std::to_string(reading_order.size()) +
                    " vertices, graph has " + std::to_string(n));
  RopeAssignment out;
  out.codes.assign(g.directed_edges.size(), -1);
  for (const auto& e : g.directed_edges)
    if (e.src < 0 || e.dst < 0 || static_cast<std::size_t>(e.src) >= n ||
        static_cast<std::size_t>(e.dst) >= n)
      throw DataError("directed edge references unknown vertex");

  std::vector<int> in;
  for (std::size_t v = 0; v < n; ++v) {
    in = g.incoming[v];
    std::sort(in.begin(), in.end(), [&](int a, int b) {
      return reading_order[g.directed_edges[a].src] < reading_order[g.directed_edges[b].src];
    });
    for (std::size_t rank = 0; rank < in.size(); ++rank)
      out.codes[in[rank]] = static_cast<int>(rank);
  }
  return out;
}

// Reading order of a document's vertices as stored (token index per vertex).
inline std::vector<std::size_t> reading_order_of(const Document& d) {
  std::vector<std::size_t> r;
  r.reserve(d.size());
  for (const auto& t : d.tokens) r.push_back(t.index);
  return r;
}

inline double sinusoid_frequency(int k, int n_frequencies, double base = 10000.0) {
  return std::pow(base, static_cast<double>(k) / n_frequencies);
}

inline std::vector<double> sinusoidal_encode(int p, int n_frequencies = 3,
                                             double base = 10000.0) {
  std::vector<double> v;
  v.reserve(2 * static_cast<std::size_t>(n_frequencies));
  for (int k = 0; k < n_frequencies; ++k) {
    const double arg = p / sinusoid_frequency(k, n_frequencies, base);
    v.push_back(std::sin(arg));
    v.push_back(std::cos(arg));
  }
  return v;
}

inline std::vector<double> rope_edge_encoding(int p, const RopeEncodingConfig& cfg) {
  std::vector<double> v;
  if (cfg.mode == RopeMode::Off) return v;
  if (cfg.mode == RopeMode::Index || cfg.mode == RopeMode::Combined)
    v.push_back(p * cfg.index_scale);
  if (cfg.mode == RopeMode::Sinusoidal || cfg.mode == RopeMode::Combined) {
    const auto s = sinusoidal_encode(p, cfg.n_frequencies, cfg.frequency_base);
    v.insert(v.end(), s.begin(), s.end());
  }
  return v;
}

}  // namespace formgraph
