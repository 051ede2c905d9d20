// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace agca
{

using Vector = std::vector<double>;

// Error hierarchy. Every failure the library reports derives from agca::Error so callers
// (the CLI in particular) can map them to a single exit code.
struct Error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

struct ArgumentError : Error
{
  using Error::Error;
};

struct GeometryError : Error
{
  using Error::Error;
};

struct CoefficientError : Error
{
  using Error::Error;
};

struct BuildError : Error
{
  using Error::Error;
};

struct SolverError : Error
{
  using Error::Error;
};

inline void require(bool cond, const std::string &msg)
{
  if (!cond)
  {
    throw ArgumentError(msg);
  }
}

struct Point
{
  double x = 0.0;
  double y = 0.0;

  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point a, Point b) = default;
};

// Integer coordinates on the level-l vertex lattice of the unit square.
struct LatticeCoord
{
  std::int64_t i = 0;
  std::int64_t j = 0;

  friend LatticeCoord operator+(LatticeCoord a, LatticeCoord b) { return {a.i + b.i, a.j + b.j}; }
  friend LatticeCoord operator-(LatticeCoord a, LatticeCoord b) { return {a.i - b.i, a.j - b.j}; }
  friend LatticeCoord operator*(std::int64_t s, LatticeCoord a) { return {s * a.i, s * a.j}; }
  friend bool operator==(LatticeCoord a, LatticeCoord b) = default;
};

namespace linalg
{

inline double dot(std::span<const double> a, std::span<const double> b)
{
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    s += a[i] * b[i];
  }
  return s;
}

inline double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    y[i] += alpha * x[i];
  }
}

inline void scale(double alpha, std::span<double> x)
{
  for (auto &v : x)
  {
    v *= alpha;
  }
}

inline void fill(std::span<double> x, double v)
{
  for (auto &e : x)
  {
    e = v;
  }
}

inline void copy(std::span<const double> x, std::span<double> y)
{
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    y[i] = x[i];
  }
}

inline double mean(std::span<const double> x)
{
  if (x.empty())
  {
    return 0.0;
  }
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Removes the component along the constant vector.
inline void remove_mean(std::span<double> x)
{
  const double m = mean(x);
  for (auto &v : x)
  {
    v -= m;
  }
}

}  // namespace linalg

}  // namespace agca
