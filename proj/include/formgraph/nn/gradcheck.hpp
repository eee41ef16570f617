#pragma once

// Central finite-difference oracle for tape gradients.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "formgraph/nn/params.hpp"
#include "formgraph/nn/tensor.hpp"

namespace formgraph::nn {

// The 1e-6 floor keeps coordinates whose true gradient is ~0 from dividing
// finite-difference noise (~1e-11 at h = 1e-5) by a near-zero magnitude.
inline constexpr double kRelativeErrorFloor = 1e-6;

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) /
         std::max(kRelativeErrorFloor, std::abs(analytic) + std::abs(numeric));
}

// Central differences of f at x, every coordinate.
inline Tensor numeric_gradient(const std::function<double(const Tensor&)>& f, Tensor x,
                               double h = 1e-5) {
  Tensor g(x.rows(), x.cols());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double orig = x.data()[i];
    x.data()[i] = orig + h;
    const double up = f(x);
    x.data()[i] = orig - h;
    const double down = f(x);
    x.data()[i] = orig;
    g.data()[i] = (up - down) / (2.0 * h);
  }
  return g;
}

inline double max_relative_error(const Tensor& analytic, const Tensor& numeric) {
  require_same_shape(analytic, numeric, "max_relative_error");
  double worst = 0.0;
  for (Eigen::Index i = 0; i < analytic.size(); ++i)
    worst = std::max(worst, relative_error(analytic.data()[i], numeric.data()[i]));
  return worst;
}

struct GradCheckOptions {
  double h = 1e-5;
  // 0 checks every coordinate; otherwise a seeded sample of this many per tensor.
  int coords_per_param = 0;
  std::uint64_t seed = 7;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  Eigen::Index worst_index = -1;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t coords_checked = 0;
};

// `loss` is evaluated on the (temporarily perturbed) store; `analytic` holds
// the tape gradients at the unperturbed point.
inline GradCheckResult grad_check(const std::function<double(const ParamStore&)>& loss,
                                  ParamStore& store, const ParamStore::Grads& analytic,
                                  const GradCheckOptions& opt = {}) {
  GradCheckResult res;
  std::mt19937_64 rng(opt.seed);
  for (auto& [name, p] : store.params()) {
    auto it = analytic.find(name);
    const Tensor zero = Tensor::Zero(p.value.rows(), p.value.cols());
    const Tensor& ga = it == analytic.end() ? zero : it->second;
    require_same_shape(p.value, ga, "grad_check");

    std::vector<Eigen::Index> coords;
    const auto n = p.value.size();
    if (opt.coords_per_param <= 0 || opt.coords_per_param >= n) {
      for (Eigen::Index i = 0; i < n; ++i) coords.push_back(i);
    } else {
      for (int c = 0; c < opt.coords_per_param; ++c)
        coords.push_back(static_cast<Eigen::Index>(uniform_below(rng, static_cast<std::uint64_t>(n))));
    }
    for (Eigen::Index i : coords) {
      double& x = p.value.data()[i];
      const double orig = x;
      x = orig + opt.h;
      const double up = loss(store);
      x = orig - opt.h;
      const double down = loss(store);
      x = orig;
      const double fd = (up - down) / (2.0 * opt.h);
      const double err = relative_error(ga.data()[i], fd);
      ++res.coords_checked;
      if (err > res.max_rel_error || res.worst_index < 0) {
        res.max_rel_error = std::max(res.max_rel_error, err);
        res.worst_param = name;
        res.worst_index = i;
        res.worst_analytic = ga.data()[i];
        res.worst_numeric = fd;
      }
    }
  }
  return res;
}

}  // namespace formgraph::nn
