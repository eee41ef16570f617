#pragma once

// Named parameter tensors with Adam moments.

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "formgraph/nn/tensor.hpp"

namespace formgraph::nn {

struct Param {
  Tensor value;
  Tensor m;  // first moment
  Tensor v;  // second moment
};

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double warmup_proportion = 0.01;
  long total_steps = 1;
  double clip_norm = 5.0;  // <= 0 disables global-norm clipping
};

// Linear ramp from 0 to lr over ceil(warmup_proportion * total_steps) steps.
// `step` is 1-based.
inline double warmup_lr(const AdamConfig& cfg, long step) {
  const long warm = static_cast<long>(
      std::ceil(cfg.warmup_proportion * static_cast<double>(cfg.total_steps)));
  if (warm <= 0 || step >= warm) return cfg.lr;
  return cfg.lr * static_cast<double>(step) / static_cast<double>(warm);
}

class ParamStore {
 public:
  using Grads = std::map<std::string, Tensor>;

  ParamStore() = default;
  explicit ParamStore(std::uint64_t seed) : seed_(seed), rng_(seed) {}

  std::uint64_t seed() const { return seed_; }
  long step() const { return step_; }

  bool contains(const std::string& name) const { return params_.contains(name); }
  const std::map<std::string, Param>& params() const { return params_; }
  std::map<std::string, Param>& params() { return params_; }

  Tensor& value(const std::string& name) { return at(name).value; }
  const Tensor& value(const std::string& name) const { return at(name).value; }

  Param& at(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw UsageError("unknown parameter '" + name + "'");
    return it->second;
  }
  const Param& at(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw UsageError("unknown parameter '" + name + "'");
    return it->second;
  }

  Tensor& add(const std::string& name, Tensor init) {
    if (params_.contains(name)) throw UsageError("duplicate parameter '" + name + "'");
    Param p;
    p.m = Tensor::Zero(init.rows(), init.cols());
    p.v = Tensor::Zero(init.rows(), init.cols());
    p.value = std::move(init);
    return params_.emplace(name, std::move(p)).first->second.value;
  }

  // Xavier-uniform weight, drawn from the store's seeded stream.
  Tensor& add_xavier(const std::string& name, Eigen::Index fan_in, Eigen::Index fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    Tensor w(fan_in, fan_out);
    for (Eigen::Index i = 0; i < w.size(); ++i)
      w.data()[i] = (2.0 * uniform01(rng_) - 1.0) * limit;
    return add(name, std::move(w));
  }

  Tensor& add_zeros(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    return add(name, Tensor::Zero(rows, cols));
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& [_, p] : params_) n += static_cast<std::size_t>(p.value.size());
    return n;
  }

  // Returns the global gradient norm before clipping.
  double adam_step(const Grads& grads, const AdamConfig& cfg) {
    for (const auto& [name, g] : grads) require_same_shape(at(name).value, g, "adam_step");
    double sq = 0.0;
    for (const auto& [_, g] : grads) sq += g.squaredNorm();
    const double norm = std::sqrt(sq);
    if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
    const double clip = (cfg.clip_norm > 0.0 && norm > cfg.clip_norm) ? cfg.clip_norm / norm : 1.0;

    ++step_;
    const double lr = warmup_lr(cfg, step_);
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step_));
    for (auto& [name, p] : params_) {
      auto it = grads.find(name);
      if (it == grads.end()) continue;
      const Tensor g = it->second * clip;
      p.m = cfg.beta1 * p.m + (1.0 - cfg.beta1) * g;
      p.v = cfg.beta2 * p.v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
      p.value.array() -= lr * (p.m.array() / bc1) / ((p.v.array() / bc2).sqrt() + cfg.eps);
    }
    return norm;
  }

  // Restores optimizer bookkeeping when loading a checkpoint.
  void set_step(long s) { step_ = s; }
  void set_seed(std::uint64_t s) { seed_ = s; }

 private:
  std::map<std::string, Param> params_;
  std::uint64_t seed_ = 0;
  std::mt19937_64 rng_{0};
  long step_ = 0;
};

}  // namespace formgraph::nn
