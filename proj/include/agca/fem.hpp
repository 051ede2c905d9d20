// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>

#include "agca/coefficient.hpp"
#include "agca/common.hpp"
#include "agca/mesh.hpp"
#include "agca/quadrature.hpp"

namespace agca
{

// Dense row-major R x C block.
template <int R, int C = R>
struct Mat
{
  static constexpr int rows = R;
  static constexpr int cols = C;
  std::array<double, static_cast<std::size_t>(R * C)> a{};

  double &operator()(int i, int j) { return a[static_cast<std::size_t>(i * C + j)]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * C + j)]; }

  Mat<C, R> transposed() const
  {
    Mat<C, R> t;
    for (int i = 0; i < R; ++i)
    {
      for (int j = 0; j < C; ++j)
      {
        t(j, i) = (*this)(i, j);
      }
    }
    return t;
  }

  double frobenius() const
  {
    double s = 0.0;
    for (double v : a)
    {
      s += v * v;
    }
    return std::sqrt(s);
  }
};

template <int R, int K, int C>
Mat<R, C> operator*(const Mat<R, K> &x, const Mat<K, C> &y)
{
  Mat<R, C> z;
  for (int i = 0; i < R; ++i)
  {
    for (int k = 0; k < K; ++k)
    {
      const double xik = x(i, k);
      if (xik == 0.0)
      {
        continue;
      }
      for (int j = 0; j < C; ++j)
      {
        z(i, j) += xik * y(k, j);
      }
    }
  }
  return z;
}

using LocalMatrix3 = Mat<3>;
using LocalMatrix6 = Mat<6>;

inline constexpr double kDegenerateArea = 1e-14;

// Constant gradients of the three P1 hat functions on a triangle.
inline std::array<Point, 3> p1_gradients(const MicroElement &m)
{
  const double area = m.area();
  if (!(std::abs(area) >= kDegenerateArea))
  {
    throw GeometryError("degenerate element (area " + std::to_string(area) + ")");
  }
  const Point a = m.vertices[0], b = m.vertices[1], c = m.vertices[2];
  const double inv = 1.0 / (2.0 * area);
  return {Point{(b.y - c.y) * inv, (c.x - b.x) * inv}, Point{(c.y - a.y) * inv, (a.x - c.x) * inv},
          Point{(a.y - b.y) * inv, (b.x - a.x) * inv}};
}

// eta_avg * |m| * grad(phi_i) . grad(phi_j)
inline LocalMatrix3 diffusion_stiffness(const MicroElement &m, double eta_avg)
{
  const auto g = p1_gradients(m);
  const double s = eta_avg * m.area();
  LocalMatrix3 A;
  for (int i = 0; i < 3; ++i)
  {
    for (int j = 0; j < 3; ++j)
    {
      A(i, j) = s * (g[i].x * g[j].x + g[i].y * g[j].y);
    }
  }
  return A;
}

//
// 2 eta eps(Phi_i) : eps(Phi_j) for Phi = phi_a e_c. With g_a = grad(phi_a),
//   eps(phi_a e_c) : eps(phi_b e_d) = 1/2 (delta_cd g_a . g_b + (g_a)_d (g_b)_c),
// so the entry at (c*3+a, d*3+b) is eta_avg |m| (delta_cd g_a . g_b + (g_a)_d (g_b)_c).
//
inline LocalMatrix6 viscous_stiffness(const MicroElement &m, double eta_avg)
{
  const auto g = p1_gradients(m);
  const double s = eta_avg * m.area();
  auto comp = [](Point p, int c) { return c == 0 ? p.x : p.y; };
  LocalMatrix6 A;
  for (int c = 0; c < 2; ++c)
  {
    for (int a = 0; a < 3; ++a)
    {
      for (int d = 0; d < 2; ++d)
      {
        for (int b = 0; b < 3; ++b)
        {
          double v = comp(g[a], d) * comp(g[b], c);
          if (c == d)
          {
            v += g[a].x * g[b].x + g[a].y * g[b].y;
          }
          A(c * 3 + a, d * 3 + b) = s * v;
        }
      }
    }
  }
  return A;
}

// The integrands have constant gradients, so the coefficient only enters through its
// quadrature average over the element.
inline LocalMatrix3 local_diffusion(const MicroElement &m, const CoefficientEval &eta,
                                    const QuadratureRule &q)
{
  return diffusion_stiffness(m, eta.element_average(m, q));
}

inline LocalMatrix6 local_viscous(const MicroElement &m, const CoefficientEval &eta,
                                  const QuadratureRule &q)
{
  return viscous_stiffness(m, eta.element_average(m, q));
}

//
// Divergence coupling of a level-(l-1) pressure element with the velocity DoFs of its four
// level-l children: block c is the 3 x 6 matrix
//   B_c[k][d*3+a] = int_{child c} psi_k d_d(phi_a) = |child| psi_k(centroid_c) (g_a)_d,
// which is exact since psi_k is linear and d_d(phi_a) constant on the child.
//
using DivergenceBlock = Mat<3, 6>;

inline std::array<DivergenceBlock, 4> local_divergence(const MicroElement &pressure_element,
                                                       const std::array<MicroElement, 4> &children)
{
  if (pressure_element.level + 1 != children[0].level)
  {
    throw ArgumentError("divergence coupling needs velocity children one level finer");
  }
  std::array<DivergenceBlock, 4> blocks;
  for (int c = 0; c < 4; ++c)
  {
    const auto &child = children[static_cast<std::size_t>(c)];
    const auto g = p1_gradients(child);
    const auto psi = CoefficientEval::barycentric(pressure_element, child.centroid());
    const double area = child.area();
    auto &B = blocks[static_cast<std::size_t>(c)];
    for (int k = 0; k < 3; ++k)
    {
      for (int a = 0; a < 3; ++a)
      {
        B(k, a) = area * psi[k] * g[a].x;
        B(k, 3 + a) = area * psi[k] * g[a].y;
      }
    }
  }
  return blocks;
}

inline std::array<DivergenceBlock, 4> local_divergence(const MeshHierarchy &mesh,
                                                       const MicroElement &pressure_element)
{
  if (pressure_element.level >= mesh.max_level())
  {
    throw ArgumentError("pressure element needs a finer velocity level");
  }
  const auto idx = mesh.children(pressure_element.macro, pressure_element.level,
                                 pressure_element.index);
  std::array<MicroElement, 4> kids;
  for (int c = 0; c < 4; ++c)
  {
    kids[static_cast<std::size_t>(c)] =
        mesh.micro_element(pressure_element.macro, pressure_element.level + 1, idx[static_cast<std::size_t>(c)]);
  }
  return local_divergence(pressure_element, kids);
}

}  // namespace agca
