#pragma once

// Reverse-mode differentiation over a linear tape of 2-D tensor ops.
//
// Every op computes its value eagerly, checks it for NaN/Inf, and registers a
// backward rule that accumulates into its inputs' gradients. Parameters enter
// the tape by name and their gradients are harvested after backward().

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "formgraph/nn/params.hpp"
#include "formgraph/nn/tensor.hpp"

namespace formgraph::nn {

struct Var {
  int id = -1;
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, int)>;

  // With gradients disabled, parameters enter as constants and no backward
  // rules are recorded.
  explicit Tape(bool grad_enabled = true) : grad_enabled_(grad_enabled) {}

  Var constant(Tensor v) { return push(std::move(v), false, nullptr, "constant"); }

  // Differentiable input that is not a named parameter.
  Var variable(Tensor v) { return push(std::move(v), true, nullptr, "variable"); }

  Var param(const ParamStore& store, const std::string& name) {
    if (auto it = param_ids_.find(name); it != param_ids_.end()) return {it->second};
    Var v = push(store.value(name), grad_enabled_, nullptr, "param");
    param_ids_.emplace(name, v.id);
    return v;
  }

  const Tensor& value(Var v) const { return nodes_.at(v.id).value; }
  bool requires_grad(Var v) const { return nodes_.at(v.id).requires_grad; }

  // Zero tensor when nothing flowed into v.
  Tensor grad(Var v) const {
    const auto& n = nodes_.at(v.id);
    if (n.grad.size() == 0) return Tensor::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  void accumulate(int id, const Tensor& g) {
    auto& n = nodes_[id];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
  }

  // Adds g into selected rows of node id's gradient.
  template <class F>
  void accumulate_with(int id, F&& f) {
    auto& n = nodes_[id];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) n.grad = Tensor::Zero(n.value.rows(), n.value.cols());
    f(n.grad);
  }

  const Tensor& grad_ref(int id) const { return nodes_[id].grad; }

  void backward(Var loss) {
    const auto& l = nodes_.at(loss.id).value;
    if (l.rows() != 1 || l.cols() != 1)
      throw ShapeMismatch("backward needs a 1x1 loss, got " + shape_str(l));
    for (auto& n : nodes_) n.grad.resize(0, 0);
    nodes_[loss.id].grad = Tensor::Ones(1, 1);
    for (int id = loss.id; id >= 0; --id) {
      auto& n = nodes_[id];
      if (!n.backward || n.grad.size() == 0) continue;
      n.backward(*this, id);
    }
  }

  ParamStore::Grads param_grads() const {
    ParamStore::Grads out;
    for (const auto& [name, id] : param_ids_) out.emplace(name, grad(Var{id}));
    return out;
  }

  std::size_t size() const { return nodes_.size(); }

  Var push(Tensor value, bool requires_grad, Backward bw, const char* op) {
    if (!value.allFinite())
      throw NumericError(std::string("non-finite value produced by ") + op);
    nodes_.push_back({std::move(value), Tensor(), requires_grad, std::move(bw)});
    return {static_cast<int>(nodes_.size()) - 1};
  }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    Backward backward;
  };
  std::vector<Node> nodes_;
  std::map<std::string, int> param_ids_;
  bool grad_enabled_ = true;
};

// ---------------------------------------------------------------- ops

namespace detail {
inline bool any_requires(const Tape& t, std::initializer_list<Var> vs) {
  for (Var v : vs)
    if (t.requires_grad(v)) return true;
  return false;
}
}  // namespace detail

inline Var matmul(Tape& t, Var a, Var b) {
  const auto& A = t.value(a);
  const auto& B = t.value(b);
  if (A.cols() != B.rows())
    throw ShapeMismatch("matmul: " + shape_str(A) + " vs " + shape_str(B));
  Tensor y = A * B;
  const bool rg = detail::any_requires(t, {a, b});
  return t.push(std::move(y), rg, rg ? Tape::Backward([a, b](Tape& tp, int self) {
    const Tensor& g = tp.grad_ref(self);
    if (tp.requires_grad(a)) tp.accumulate(a.id, g * tp.value(b).transpose());
    if (tp.requires_grad(b)) tp.accumulate(b.id, tp.value(a).transpose() * g);
  }) : nullptr, "matmul");
}

// y = x W + b, with b a 1 x out row broadcast over rows.
inline Var affine(Tape& t, Var x, Var W, Var b) {
  const auto& X = t.value(x);
  const auto& Wv = t.value(W);
  const auto& B = t.value(b);
  if (X.cols() != Wv.rows() || B.rows() != 1 || B.cols() != Wv.cols())
    throw ShapeMismatch("affine: x" + shape_str(X) + " W" + shape_str(Wv) + " b" + shape_str(B));
  Tensor y = X * Wv;
  y.rowwise() += B.row(0);
  const bool rg = detail::any_requires(t, {x, W, b});
  return t.push(std::move(y), rg, rg ? Tape::Backward([x, W, b](Tape& tp, int self) {
    const Tensor& g = tp.grad_ref(self);
    if (tp.requires_grad(x)) tp.accumulate(x.id, g * tp.value(W).transpose());
    if (tp.requires_grad(W)) tp.accumulate(W.id, tp.value(x).transpose() * g);
    if (tp.requires_grad(b)) tp.accumulate(b.id, g.colwise().sum());
  }) : nullptr, "affine");
}

inline Var add(Tape& t, Var a, Var b) {
  require_same_shape(t.value(a), t.value(b), "add");
  Tensor y = t.value(a) + t.value(b);
  const bool rg = detail::any_requires(t, {a, b});
  return t.push(std::move(y), rg, rg ? Tape::Backward([a, b](Tape& tp, int self) {
    const Tensor& g = tp.grad_ref(self);
    tp.accumulate(a.id, g);
    tp.accumulate(b.id, g);
  }) : nullptr, "add");
}

inline Var scale(Tape& t, Var a, double s) {
  Tensor y = t.value(a) * s;
  const bool rg = t.requires_grad(a);
  return t.push(std::move(y), rg, rg ? Tape::Backward([a, s](Tape& tp, int self) {
    tp.accumulate(a.id, tp.grad_ref(self) * s);
  }) : nullptr, "scale");
}

// Elementwise product.
inline Var mul(Tape& t, Var a, Var b) {
  require_same_shape(t.value(a), t.value(b), "mul");
  Tensor y = t.value(a).cwiseProduct(t.value(b));
  const bool rg = detail::any_requires(t, {a, b});
  return t.push(std::move(y), rg, rg ? Tape::Backward([a, b](Tape& tp, int self) {
    const Tensor& g = tp.grad_ref(self);
    if (tp.requires_grad(a)) tp.accumulate(a.id, g.cwiseProduct(tp.value(b)));
    if (tp.requires_grad(b)) tp.accumulate(b.id, g.cwiseProduct(tp.value(a)));
  }) : nullptr, "mul");
}

inline Var relu(Tape& t, Var x) {
  Tensor y = t.value(x).cwiseMax(0.0);
  const bool rg = t.requires_grad(x);
  return t.push(std::move(y), rg, rg ? Tape::Backward([x](Tape& tp, int self) {
    const Tensor& g = tp.grad_ref(self);
    const Tensor& X = tp.value(x);
    tp.accumulate(x.id, (X.array() > 0.0).select(g, 0.0));
  }) : nullptr, "relu");
}

inline Tensor softmax_rows_value(const Tensor& x) {
  Tensor y(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    const double mx = x.row(r).maxCoeff();
    y.row(r) = (x.row(r).array() - mx).exp();
    y.row(r) /= y.row(r).sum();
  }
  return y;
}

inline Var softmax_rows(Tape& t, Var x) {
  Tensor y = softmax_rows_value(t.value(x));
  const bool rg = t.requires_grad(x);
  return t.push(std::move(y), rg, rg ? Tape::Backward([x](Tape& tp, int self) {
    const Tensor& g = tp.grad_ref(self);
    const Tensor& Y = tp.value(Var{self});
    Tensor dot = (g.cwiseProduct(Y)).rowwise().sum();
    Tensor dx = Y.cwiseProduct(g - dot.replicate(1, g.cols()));
    tp.accumulate(x.id, dx);
  }) : nullptr, "softmax_rows");
}

inline Var concat_cols(Tape& t, std::span<const Var> xs) {
  if (xs.empty()) throw ShapeMismatch("concat_cols: no inputs");
  const Eigen::Index rows = t.value(xs[0]).rows();
  Eigen::Index cols = 0;
  bool rg = false;
  for (Var v : xs) {
    if (t.value(v).rows() != rows)
      throw ShapeMismatch("concat_cols: " + shape_str(t.value(xs[0])) + " vs " +
                          shape_str(t.value(v)));
    cols += t.value(v).cols();
    rg = rg || t.requires_grad(v);
  }
  Tensor y(rows, cols);
  Eigen::Index c = 0;
  for (Var v : xs) {
    const auto& X = t.value(v);
    y.middleCols(c, X.cols()) = X;
    c += X.cols();
  }
  std::vector<Var> ins(xs.begin(), xs.end());
  return t.push(std::move(y), rg, rg ? Tape::Backward([ins](Tape& tp, int self) {
    const Tensor& g = tp.grad_ref(self);
    Eigen::Index off = 0;
    for (Var v : ins) {
      const Eigen::Index w = tp.value(v).cols();
      if (tp.requires_grad(v) && w > 0) tp.accumulate(v.id, g.middleCols(off, w));
      off += w;
    }
  }) : nullptr, "concat_cols");
}

inline Var concat_cols(Tape& t, std::initializer_list<Var> xs) {
  return concat_cols(t, std::span<const Var>(xs.begin(), xs.size()));
}

inline Var concat_rows(Tape& t, std::span<const Var> xs) {
  if (xs.empty()) throw ShapeMismatch("concat_rows: no inputs");
  const Eigen::Index cols = t.value(xs[0]).cols();
  Eigen::Index rows = 0;
  bool rg = false;
  for (Var v : xs) {
    if (t.value(v).cols() != cols)
      throw ShapeMismatch("concat_rows: " + shape_str(t.value(xs[0])) + " vs " +
                          shape_str(t.value(v)));
    rows += t.value(v).rows();
    rg = rg || t.requires_grad(v);
  }
  Tensor y(rows, cols);
  Eigen::Index r = 0;
  for (Var v : xs) {
    const auto& X = t.value(v);
    y.middleRows(r, X.rows()) = X;
    r += X.rows();
  }
  std::vector<Var> ins(xs.begin(), xs.end());
  return t.push(std::move(y), rg, rg ? Tape::Backward([ins](Tape& tp, int self) {
    const Tensor& g = tp.grad_ref(self);
    Eigen::Index off = 0;
    for (Var v : ins) {
      const Eigen::Index h = tp.value(v).rows();
      if (tp.requires_grad(v) && h > 0) tp.accumulate(v.id, g.middleRows(off, h));
      off += h;
    }
  }) : nullptr, "concat_rows");
}

inline Var concat_rows(Tape& t, std::initializer_list<Var> xs) {
  return concat_rows(t, std::span<const Var>(xs.begin(), xs.size()));
}

// y.row(r) = x.row(index[r]); backward scatter-adds.
inline Var gather_rows(Tape& t, Var x, std::vector<int> index) {
  const auto& X = t.value(x);
  Tensor y(static_cast<Eigen::Index>(index.size()), X.cols());
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] < 0 || index[r] >= X.rows())
      throw ShapeMismatch("gather_rows: row " + std::to_string(index[r]) + " of " + shape_str(X));
    y.row(static_cast<Eigen::Index>(r)) = X.row(index[r]);
  }
  const bool rg = t.requires_grad(x);
  return t.push(std::move(y), rg, rg ? Tape::Backward([x, idx = std::move(index)](Tape& tp, int self) {
    const Tensor& g = tp.grad_ref(self);
    tp.accumulate_with(x.id, [&](Tensor& dx) {
      for (std::size_t r = 0; r < idx.size(); ++r) dx.row(idx[r]) += g.row(static_cast<Eigen::Index>(r));
    });
  }) : nullptr, "gather_rows");
}

// Row range [start, start + length).
struct Segment {
  int start = 0;
  int length = 0;
};

// Multi-head scaled dot-product attention restricted to segments: query rows
// of q_segments[s] attend to key/value rows of kv_segments[s]. Columns are
// split into `heads` equal blocks. If `weights` is given, the attention
// matrices are appended to it in (segment, head) order.
inline Tensor segment_attention_value(const Tensor& Q, const Tensor& K, const Tensor& V,
                                      std::span<const Segment> qs, std::span<const Segment> ks,
                                      int heads, std::vector<Tensor>* weights) {
  const Eigen::Index d = Q.cols();
  if (K.cols() != d || V.cols() != d || K.rows() != V.rows() || heads <= 0 || d % heads != 0)
    throw ShapeMismatch("segment_attention: Q" + shape_str(Q) + " K" + shape_str(K) + " V" +
                        shape_str(V) + " heads " + std::to_string(heads));
  if (qs.size() != ks.size()) throw ShapeMismatch("segment_attention: segment count mismatch");
  const Eigen::Index dh = d / heads;
  const double sc = 1.0 / std::sqrt(static_cast<double>(dh));
  Tensor out = Tensor::Zero(Q.rows(), d);
  for (std::size_t s = 0; s < qs.size(); ++s) {
    const auto q = qs[s];
    const auto k = ks[s];
    if (k.length <= 0) throw ShapeMismatch("segment_attention: empty key segment");
    for (int h = 0; h < heads; ++h) {
      const auto Qh = Q.block(q.start, h * dh, q.length, dh);
      const auto Kh = K.block(k.start, h * dh, k.length, dh);
      const auto Vh = V.block(k.start, h * dh, k.length, dh);
      Tensor P = softmax_rows_value((Qh * Kh.transpose()) * sc);
      out.block(q.start, h * dh, q.length, dh) = P * Vh;
      if (weights) weights->push_back(std::move(P));
    }
  }
  return out;
}

inline Var segment_attention(Tape& t, Var q, Var k, Var v, std::vector<Segment> qs,
                             std::vector<Segment> ks, int heads) {
  auto probs = std::make_shared<std::vector<Tensor>>();
  Tensor y = segment_attention_value(t.value(q), t.value(k), t.value(v), qs, ks, heads,
                                     probs.get());
  const bool rg = detail::any_requires(t, {q, k, v});
  if (!rg) return t.push(std::move(y), false, nullptr, "segment_attention");
  return t.push(std::move(y), true,
                [q, k, v, qs = std::move(qs), ks = std::move(ks), heads, probs](Tape& tp, int self) {
    const Tensor& G = tp.grad_ref(self);
    const Tensor& Q = tp.value(q);
    const Tensor& K = tp.value(k);
    const Tensor& V = tp.value(v);
    const Eigen::Index d = Q.cols();
    const Eigen::Index dh = d / heads;
    const double sc = 1.0 / std::sqrt(static_cast<double>(dh));
    Tensor dQ = Tensor::Zero(Q.rows(), d);
    Tensor dK = Tensor::Zero(K.rows(), d);
    Tensor dV = Tensor::Zero(V.rows(), d);
    std::size_t pi = 0;
    for (std::size_t s = 0; s < qs.size(); ++s) {
      const auto qsg = qs[s];
      const auto ksg = ks[s];
      for (int h = 0; h < heads; ++h) {
        const Tensor& P = (*probs)[pi++];
        const auto Gh = G.block(qsg.start, h * dh, qsg.length, dh);
        const auto Qh = Q.block(qsg.start, h * dh, qsg.length, dh);
        const auto Kh = K.block(ksg.start, h * dh, ksg.length, dh);
        const auto Vh = V.block(ksg.start, h * dh, ksg.length, dh);
        Tensor dP = Gh * Vh.transpose();
        dV.block(ksg.start, h * dh, ksg.length, dh) += P.transpose() * Gh;
        Tensor rowdot = dP.cwiseProduct(P).rowwise().sum();
        Tensor dS = P.cwiseProduct(dP - rowdot.replicate(1, dP.cols())) * sc;
        dQ.block(qsg.start, h * dh, qsg.length, dh) += dS * Kh;
        dK.block(ksg.start, h * dh, ksg.length, dh) += dS.transpose() * Qh;
      }
    }
    tp.accumulate(q.id, dQ);
    tp.accumulate(k.id, dK);
    tp.accumulate(v.id, dV);
  }, "segment_attention");
}

// Mean over rows of -log softmax(logits)[label].
inline Var cross_entropy(Tape& t, Var logits, std::vector<int> labels) {
  const auto& Z = t.value(logits);
  if (static_cast<Eigen::Index>(labels.size()) != Z.rows())
    throw ShapeMismatch("cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                        shape_str(Z));
  for (int c : labels)
    if (c < 0 || c >= Z.cols())
      throw UsageError("cross_entropy: class id " + std::to_string(c) + " outside [0, " +
                       std::to_string(Z.cols()) + ")");
  auto P = std::make_shared<Tensor>(softmax_rows_value(Z));
  double loss = 0.0;
  for (Eigen::Index r = 0; r < Z.rows(); ++r) {
    const double mx = Z.row(r).maxCoeff();
    const double lse = mx + std::log((Z.row(r).array() - mx).exp().sum());
    loss += lse - Z(r, labels[r]);
  }
  const double n = static_cast<double>(std::max<Eigen::Index>(Z.rows(), 1));
  Tensor y(1, 1);
  y(0, 0) = loss / n;
  const bool rg = t.requires_grad(logits);
  return t.push(std::move(y), rg, rg ? Tape::Backward([logits, labels = std::move(labels), P, n](Tape& tp, int self) {
    Tensor g = *P;
    for (std::size_t r = 0; r < labels.size(); ++r) g(static_cast<Eigen::Index>(r), labels[r]) -= 1.0;
    tp.accumulate(logits.id, g * (tp.grad_ref(self)(0, 0) / n));
  }) : nullptr, "cross_entropy");
}

// Mean binary cross-entropy of a column of logits against 0/1 targets.
inline Var binary_cross_entropy(Tape& t, Var logits, std::vector<int> targets) {
  const auto& Z = t.value(logits);
  if (Z.cols() != 1 || static_cast<Eigen::Index>(targets.size()) != Z.rows())
    throw ShapeMismatch("binary_cross_entropy: " + std::to_string(targets.size()) +
                        " targets for " + shape_str(Z));
  double loss = 0.0;
  for (Eigen::Index r = 0; r < Z.rows(); ++r) {
    const double z = Z(r, 0);
    // log(1 + exp(-|z|)) + max(z, 0) - z * y
    loss += std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0) - z * targets[r];
  }
  const double n = static_cast<double>(std::max<Eigen::Index>(Z.rows(), 1));
  Tensor y(1, 1);
  y(0, 0) = loss / n;
  const bool rg = t.requires_grad(logits);
  return t.push(std::move(y), rg, rg ? Tape::Backward([logits, targets = std::move(targets), n](Tape& tp, int self) {
    const Tensor& Z = tp.value(logits);
    Tensor g(Z.rows(), 1);
    for (Eigen::Index r = 0; r < Z.rows(); ++r) {
      const double z = Z(r, 0);
      const double p = z >= 0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
      g(r, 0) = p - targets[r];
    }
    tp.accumulate(logits.id, g * (tp.grad_ref(self)(0, 0) / n));
  }) : nullptr, "binary_cross_entropy");
}

}  // namespace formgraph::nn
