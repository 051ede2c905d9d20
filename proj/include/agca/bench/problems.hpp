// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "agca/coefficient.hpp"
#include "agca/common.hpp"
#include "agca/stokes.hpp"

namespace agca::bench
{

// Off-lattice center coordinate: 11/24 has a factor 3 in the denominator, so it never coincides
// with a dyadic refinement of a power-of-two macro grid.
inline constexpr double kUnaligned = 11.0 / 24.0;

// Radical inverse in the given base.
inline double halton(std::size_t index, unsigned base)
{
  double f = 1.0, r = 0.0;
  while (index > 0)
  {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

// Halton points (bases 2, 3) starting at index 1, mapped affinely into [0.15, 0.85]^2.
inline std::vector<Point> sinker_positions(std::size_t n)
{
  require(n >= 1, "at least one sinker is needed");
  std::vector<Point> p;
  p.reserve(n);
  for (std::size_t k = 1; k <= n; ++k)
  {
    p.push_back({0.15 + 0.7 * halton(k, 2), 0.15 + 0.7 * halton(k, 3)});
  }
  return p;
}

enum class ForceSign
{
  Downward,  // f = (0, -(1 - xi)) for family 5
  Literal    // f = (0, +(1 - xi)) for family 5
};

inline std::string_view to_string(ForceSign s) { return s == ForceSign::Literal ? "literal" : "downward"; }

inline ForceSign force_sign_from_string(std::string_view s)
{
  if (s == "downward")
  {
    return ForceSign::Downward;
  }
  if (s == "literal")
  {
    return ForceSign::Literal;
  }
  throw ArgumentError("unknown rhs sign '" + std::string(s) + "' (downward|literal)");
}

//
// Sinker benchmark. Families:
//   1  square of side 1/4 centered at (1/2, 1/2), aligned with the macro grid
//   2  the same square centered at (11/24, 11/24)
//   3  tanh-smoothed square at (11/24, 11/24), steepness omega
//   4  disk of radius 0.1 at (1/2, 1/2)
//   5  n_sinkers Gaussian-like sinkers of radius 0.1 (exponential decay omega)
//   6  n_sinkers squares of side 1/4 (union unless literal_product)
//   0  "poisson": constant coefficient scalar diffusion, eta = 1
//
struct SinkerProblem
{
  int family = 1;
  double dynamic_ratio = 1e4;
  double omega = 200.0;
  std::size_t n_sinkers = 1;
  EvalMode eval_mode = EvalMode::Analytic;
  ForceSign rhs_sign = ForceSign::Downward;
  bool literal_product = false;

  bool is_poisson() const { return family == 0; }
  double eta_high() const { return std::sqrt(dynamic_ratio); }
  double eta_low() const { return 1.0 / std::sqrt(dynamic_ratio); }

  void validate() const
  {
    require(family >= 0 && family <= 6, "family must be 0 (poisson) or 1..6");
    require(dynamic_ratio >= 1.0, "dynamic ratio must be >= 1");
    require(omega >= 1.0, "omega must be >= 1");
    require(n_sinkers >= 1, "n_sinkers must be >= 1");
  }

  // Indicator-like shape function; for family 5 this is the product of the per-sinker decays.
  double xi(Point x) const
  {
    const double c = family == 1 ? 0.5 : kUnaligned;
    auto in_square = [](Point x, Point p) {
      return std::max(std::abs(x.x - p.x), std::abs(x.y - p.y)) <= 0.125 ? 1.0 : 0.0;
    };
    switch (family)
    {
      case 0:
        return 0.0;
      case 1:
      case 2:
        return in_square(x, {c, c});
      case 3:
      {
        auto a = [this](double t, double p) {
          return 0.5 * (std::tanh(omega * (t - (p - 0.125))) - std::tanh(omega * (t - (p + 0.125))));
        };
        return a(x.x, c) * a(x.y, c);
      }
      case 4:
        return std::hypot(x.x - 0.5, x.y - 0.5) <= 0.1 ? 1.0 : 0.0;
      case 5:
      {
        double prod = 1.0;
        for (const Point p : sinker_positions(n_sinkers))
        {
          const double d = std::max(0.0, std::hypot(p.x - x.x, p.y - x.y) - 0.05);
          prod *= 1.0 - std::exp(-omega * d * d);
        }
        return prod;
      }
      case 6:
      {
        const auto pts = sinker_positions(n_sinkers);
        if (literal_product)
        {
          double prod = 1.0;
          for (const Point p : pts)
          {
            prod *= in_square(x, p);
          }
          return prod;
        }
        double outside = 1.0;
        for (const Point p : pts)
        {
          outside *= 1.0 - in_square(x, p);
        }
        return 1.0 - outside;
      }
      default:
        throw ArgumentError("unknown family");
    }
  }

  // Normalized high-viscosity indicator in [0, 1].
  double high_fraction(Point x) const { return family == 5 ? 1.0 - xi(x) : xi(x); }

  ScalarField viscosity() const
  {
    validate();
    if (is_poisson())
    {
      return [](Point) { return 1.0; };
    }
    const double lo = eta_low(), hi = eta_high();
    SinkerProblem self = *this;
    if (family == 5 || family == 6)
    {
      // Cache the positions; the lambda is called at every quadrature point.
      const auto pts = sinker_positions(n_sinkers);
      return [self, pts, lo, hi](Point x) {
        if (self.family == 5)
        {
          double prod = 1.0;
          for (const Point p : pts)
          {
            const double d = std::max(0.0, std::hypot(p.x - x.x, p.y - x.y) - 0.05);
            prod *= 1.0 - std::exp(-self.omega * d * d);
          }
          return lo + (hi - lo) * (1.0 - prod);
        }
        double v = 1.0;
        for (const Point p : pts)
        {
          const bool inside = std::max(std::abs(x.x - p.x), std::abs(x.y - p.y)) <= 0.125;
          v = self.literal_product ? v * (inside ? 1.0 : 0.0) : v * (inside ? 0.0 : 1.0);
        }
        const double s = self.literal_product ? v : 1.0 - v;
        return lo + (hi - lo) * s;
      };
    }
    return [self, lo, hi](Point x) { return lo + (hi - lo) * self.xi(x); };
  }

  VectorField force() const
  {
    validate();
    SinkerProblem self = *this;
    if (family == 5)
    {
      const double s = rhs_sign == ForceSign::Literal ? 1.0 : -1.0;
      return [self, s](Point x) { return Point{0.0, s * (1.0 - self.xi(x))}; };
    }
    return [self](Point x) { return Point{0.0, -self.xi(x)}; };
  }

  std::string describe() const
  {
    return is_poisson() ? std::string("poisson") : "family " + std::to_string(family);
  }
};

}  // namespace agca::bench
