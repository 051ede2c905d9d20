// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string>
#include <vector>

#include "agca/common.hpp"

namespace agca
{

// Triangle quadrature in barycentric coordinates. Weights are normalized to sum to 1, so an
// integral over an element is area * sum_q w_q f(x_q).
struct QuadratureRule
{
  int degree = 0;
  std::vector<std::array<double, 3>> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

//
// Supported rules:
//   1 - centroid
//   2 - 3-point interior rule (2/3, 1/6, 1/6), exact for quadratics; no point on the element
//       boundary, so a jump aligned with element edges is sampled from one side only
//   4 - 6-point Dunavant rule
//
inline QuadratureRule quadrature(int degree)
{
  QuadratureRule q;
  q.degree = degree;
  switch (degree)
  {
    case 1:
      q.points = {{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
      q.weights = {1.0};
      break;
    case 2:
      q.points = {{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
                  {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
                  {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0}};
      q.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
      break;
    case 4:
    {
      constexpr double a1 = 0.44594849091596488632, b1 = 1.0 - 2.0 * a1;
      constexpr double a2 = 0.091576213509770743460, b2 = 1.0 - 2.0 * a2;
      constexpr double w1 = 0.22338158967801146570, w2 = 0.10995174365532186764;
      q.points = {{b1, a1, a1}, {a1, b1, a1}, {a1, a1, b1}, {b2, a2, a2}, {a2, b2, a2}, {a2, a2, b2}};
      q.weights = {w1, w1, w1, w2, w2, w2};
      break;
    }
    default:
      throw ArgumentError("unsupported quadrature degree " + std::to_string(degree) +
                          " (available: 1, 2, 4)");
  }
  return q;
}

}  // namespace agca
