// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agca/common.hpp"
#include "agca/mesh.hpp"
#include "agca/quadrature.hpp"

namespace agca
{

using ScalarField = std::function<double(Point)>;

enum class EvalMode
{
  Analytic,
  InterpP1,
  MeanArithmetic,
  MeanHarmonic,
  MeanGeometric
};

inline std::string_view to_string(EvalMode m)
{
  switch (m)
  {
    case EvalMode::Analytic:
      return "analytic";
    case EvalMode::InterpP1:
      return "interp_p1";
    case EvalMode::MeanArithmetic:
      return "mean_arithmetic";
    case EvalMode::MeanHarmonic:
      return "mean_harmonic";
    case EvalMode::MeanGeometric:
      return "mean_geometric";
  }
  return "?";
}

inline EvalMode eval_mode_from_string(std::string_view s)
{
  for (auto m : {EvalMode::Analytic, EvalMode::InterpP1, EvalMode::MeanArithmetic,
                 EvalMode::MeanHarmonic, EvalMode::MeanGeometric})
  {
    if (s == to_string(m))
    {
      return m;
    }
  }
  throw ArgumentError("unknown coefficient evaluation mode '" + std::string(s) + "'");
}

inline bool is_mean_mode(EvalMode m)
{
  return m == EvalMode::MeanArithmetic || m == EvalMode::MeanHarmonic ||
         m == EvalMode::MeanGeometric;
}

// Weighted arithmetic / harmonic / geometric mean of positive samples; weights sum to 1.
inline double weighted_mean(EvalMode mode, std::span<const double> values,
                            std::span<const double> weights)
{
  double acc = 0.0;
  switch (mode)
  {
    case EvalMode::MeanArithmetic:
      for (std::size_t i = 0; i < values.size(); ++i)
      {
        acc += weights[i] * values[i];
      }
      return acc;
    case EvalMode::MeanHarmonic:
      for (std::size_t i = 0; i < values.size(); ++i)
      {
        acc += weights[i] / values[i];
      }
      return 1.0 / acc;
    case EvalMode::MeanGeometric:
      for (std::size_t i = 0; i < values.size(); ++i)
      {
        acc += weights[i] * std::log(values[i]);
      }
      return std::exp(acc);
    default:
      throw ArgumentError("weighted_mean needs one of the mean modes");
  }
}

//
// How the viscosity enters local assembly on a given level.
//
//  Analytic      direct call of the analytic function at quadrature points
//  InterpP1      nodal values at vertices (point samples of the analytic function, stored for
//                the finest grid) interpolated linearly on the element; a level-l element uses
//                the nodal values at its own level-l vertices
//  Mean*         one constant per element, the chosen mean of 6 analytic samples taken at the
//                degree-4 rule of that element
//
class CoefficientEval
{
public:
  CoefficientEval(ScalarField eta, EvalMode mode, const MeshHierarchy &mesh)
    : eta_(std::move(eta)), mode_(mode), mesh_(&mesh)
  {
    const int L = mesh.max_level();
    if (mode_ == EvalMode::InterpP1)
    {
      nodal_.resize(mesh.num_vertices(L));
      for (std::size_t v = 0; v < nodal_.size(); ++v)
      {
        nodal_[v] = analytic(mesh.vertex_coord(L, v));
      }
    }
    else if (is_mean_mode(mode_))
    {
      const auto rule = quadrature(4);
      element_const_.resize(static_cast<std::size_t>(L + 1));
      std::array<double, 6> samples{};
      for (int l = 0; l <= L; ++l)
      {
        auto &store = element_const_[static_cast<std::size_t>(l)];
        store.resize(mesh.num_micro_elements(l));
        const std::size_t per = mesh.micro_per_macro(l);
        for (std::size_t M = 0; M < mesh.num_macros(); ++M)
        {
          mesh.for_each_micro_element(M, l, [&](const MicroElement &m) {
            for (std::size_t q = 0; q < rule.size(); ++q)
            {
              samples[q] = analytic(m.at_barycentric(rule.points[q]));
            }
            store[M * per + m.index] = weighted_mean(mode_, samples, rule.weights);
          });
        }
      }
    }
  }

  EvalMode mode() const { return mode_; }
  const ScalarField &field() const { return eta_; }
  const MeshHierarchy &mesh() const { return *mesh_; }

  double analytic(Point p) const
  {
    const double v = eta_(p);
    if (!(v > 0.0))
    {
      throw CoefficientError("viscosity must be positive, got " + std::to_string(v) + " at (" +
                             std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
    }
    return v;
  }

  // Coefficient value at barycentric coordinates of m, following the mode's semantics for m's
  // level.
  double evaluate_barycentric(const MicroElement &m, const std::array<double, 3> &bary) const
  {
    switch (mode_)
    {
      case EvalMode::Analytic:
        return analytic(m.at_barycentric(bary));
      case EvalMode::InterpP1:
      {
        double v = 0.0;
        for (int k = 0; k < 3; ++k)
        {
          v += bary[k] * nodal_value(m.level, m.dofs[k]);
        }
        return v;
      }
      default:
        return element_constant(m);
    }
  }

  double evaluate(const MicroElement &m, Point p) const
  {
    return evaluate_barycentric(m, barycentric(m, p));
  }

  // sum_q w_q eta(x_q): the element integral divided by the area.
  double element_average(const MicroElement &m, const QuadratureRule &rule) const
  {
    if (is_mean_mode(mode_))
    {
      return element_constant(m);
    }
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q)
    {
      acc += rule.weights[q] * evaluate_barycentric(m, rule.points[q]);
    }
    return acc;
  }

  double element_constant(const MicroElement &m) const
  {
    const auto &store = element_const_.at(static_cast<std::size_t>(m.level));
    return store[m.macro * mesh_->micro_per_macro(m.level) + m.index];
  }

  // Nodal value at a level-l vertex (a subset of the finest nodes).
  double nodal_value(int l, std::size_t vertex) const
  {
    const int L = mesh_->max_level();
    const auto c = mesh_->vertex_lattice(l, vertex);
    const std::int64_t s = std::int64_t{1} << (L - l);
    return nodal_[mesh_->vertex_index(L, s * c)];
  }

  static std::array<double, 3> barycentric(const MicroElement &m, Point p)
  {
    const Point a = m.vertices[0], b = m.vertices[1], c = m.vertices[2];
    const double det = (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
    const double l1 = ((p.x - a.x) * (c.y - a.y) - (c.x - a.x) * (p.y - a.y)) / det;
    const double l2 = ((b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y)) / det;
    return {1.0 - l1 - l2, l1, l2};
  }

private:
  ScalarField eta_;
  EvalMode mode_;
  const MeshHierarchy *mesh_;
  std::vector<double> nodal_;
  std::vector<std::vector<double>> element_const_;
};

inline double evaluate_coefficient(const CoefficientEval &eval, const MicroElement &m, Point p)
{
  return eval.evaluate(m, p);
}

}  // namespace agca
