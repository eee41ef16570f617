#pragma once

// Parameterized layers built from tape ops. Parameters live in a ParamStore
// under "<prefix>.W" / "<prefix>.b" style names.

#include <string>
#include <vector>

#include "formgraph/nn/params.hpp"
#include "formgraph/nn/tape.hpp"

namespace formgraph::nn {

inline void init_linear(ParamStore& s, const std::string& prefix, Eigen::Index in,
                        Eigen::Index out) {
  s.add_xavier(prefix + ".W", in, out);
  s.add_zeros(prefix + ".b", 1, out);
}

inline Var linear(Tape& t, const ParamStore& s, const std::string& prefix, Var x) {
  return affine(t, x, t.param(s, prefix + ".W"), t.param(s, prefix + ".b"));
}

inline constexpr int kMlpHidden = 128;

inline void init_mlp2(ParamStore& s, const std::string& prefix, Eigen::Index in,
                      Eigen::Index out, Eigen::Index hidden = kMlpHidden) {
  init_linear(s, prefix + ".fc1", in, hidden);
  init_linear(s, prefix + ".fc2", hidden, out);
}

// affine -> relu -> affine
inline Var mlp2(Tape& t, const ParamStore& s, const std::string& prefix, Var x) {
  return linear(t, s, prefix + ".fc2", relu(t, linear(t, s, prefix + ".fc1", x)));
}

struct AttentionShape {
  int heads = 4;
  int head_size = 32;
  int width() const { return heads * head_size; }
};

inline void init_attention(ParamStore& s, const std::string& prefix, const AttentionShape& a) {
  for (const char* p : {".q", ".k", ".v", ".o"}) init_linear(s, prefix + p, a.width(), a.width());
}

// Multi-head attention of query rows over key/value rows, segment by segment,
// followed by the output projection.
inline Var multi_head_attention(Tape& t, const ParamStore& s, const std::string& prefix,
                                Var query, Var key_value, std::vector<Segment> q_segments,
                                std::vector<Segment> kv_segments, const AttentionShape& a) {
  const auto w = t.value(query).cols();
  if (w != a.width() || t.value(key_value).cols() != a.width())
    throw ShapeMismatch("multi_head_attention: width " + std::to_string(w) + " vs heads x size " +
                        std::to_string(a.width()));
  Var q = linear(t, s, prefix + ".q", query);
  Var k = linear(t, s, prefix + ".k", key_value);
  Var v = linear(t, s, prefix + ".v", key_value);
  Var att = segment_attention(t, q, k, v, std::move(q_segments), std::move(kv_segments), a.heads);
  return linear(t, s, prefix + ".o", att);
}

}  // namespace formgraph::nn
