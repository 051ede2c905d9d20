// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <span>
#include <string>

#include "agca/common.hpp"

namespace agca
{

// Anything with a size and a vector action y = A x.
template <class Op>
concept LinearOperator = requires(const Op &op, std::span<const double> x, std::span<double> y) {
  { op.size() } -> std::convertible_to<std::size_t>;
  op.apply(x, y);
};

// Wraps a callable as a square linear operator.
struct FunctionOperator
{
  std::size_t n = 0;
  std::function<void(std::span<const double>, std::span<double>)> f;

  std::size_t size() const { return n; }
  void apply(std::span<const double> x, std::span<double> y) const { f(x, y); }
};

struct IdentityOperator
{
  std::size_t n = 0;

  std::size_t size() const { return n; }
  void apply(std::span<const double> x, std::span<double> y) const { linalg::copy(x, y); }
};

struct VCycleConfig
{
  int pre_smooth = 2;
  int post_smooth = 2;
  int cheby_order = 3;
  double coarse_tol = 1e-8;
  int coarse_max_iter = 10000;
  int min_level = 0;
  int power_iterations = 25;
  double cheby_lower_ratio = 8.0;  // interval [lambda/ratio, safety * lambda]
  double cheby_safety = 1.1;

  void validate() const
  {
    require(pre_smooth >= 0 && post_smooth >= 0, "smoothing step counts must be >= 0");
    require(cheby_order >= 1 && cheby_order <= 8, "Chebyshev order must be in [1, 8]");
    require(coarse_tol > 0.0 && coarse_tol < 1.0, "coarse_tol must lie in (0, 1)");
    require(min_level >= 0, "min_level must be >= 0");
    require(power_iterations >= 1, "power_iterations must be >= 1");
    require(cheby_lower_ratio > 1.0 && cheby_safety >= 1.0, "invalid Chebyshev interval factors");
  }
};

struct KrylovConfig
{
  double tol = 1e-6;
  int max_iter = 500;
  int restart = 30;
  double machine_floor = 1e-15;  // relative residual treated as exact

  void validate() const
  {
    require(tol > 0.0 && tol < 1.0, "tolerance must lie in (0, 1)");
    require(max_iter >= 1, "max_iter must be >= 1");
    require(restart >= 1, "restart must be >= 1");
  }
};

struct SolveReport
{
  int iterations = 0;
  Vector residuals;  // l2 norms, entry 0 is the initial residual
  double rhs_norm = 0.0;
  bool converged = false;
  bool stagnated = false;
  double seconds = 0.0;
  std::size_t stored_bytes = 0;

  double final_relative() const
  {
    if (residuals.empty())
    {
      return 0.0;
    }
    return rhs_norm > 0.0 ? residuals.back() / rhs_norm : residuals.back();
  }
};

}  // namespace agca
