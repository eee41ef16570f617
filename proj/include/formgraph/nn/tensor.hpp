#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "formgraph/error.hpp"

namespace formgraph::nn {

// Dense row-major 2-D tensor of doubles. Vectors are 1 x n.
using Tensor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using Shape = std::array<Eigen::Index, 2>;

inline Shape shape_of(const Tensor& t) { return {t.rows(), t.cols()}; }

inline std::string shape_str(const Tensor& t) {
  return "(" + std::to_string(t.rows()) + "x" + std::to_string(t.cols()) + ")";
}

inline void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeMismatch(std::string(op) + ": " + shape_str(a) + " vs " + shape_str(b));
}

inline Tensor row_vector(std::initializer_list<double> xs) {
  Tensor t(1, static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) t(0, i++) = x;
  return t;
}

// Portable RNG helpers: mt19937_64 is fully specified, the std distributions
// are not, so draws are converted by hand.
template <class Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

template <class Rng>
std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  // Unbiased by rejection; n > 0.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

template <class Rng, class It>
void fisher_yates(It first, It last, Rng& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const auto j = uniform_below(rng, i);
    std::iter_swap(first + static_cast<std::ptrdiff_t>(i - 1),
                   first + static_cast<std::ptrdiff_t>(j));
  }
}

}  // namespace formgraph::nn
