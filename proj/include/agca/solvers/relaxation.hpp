// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "agca/common.hpp"
#include "agca/solvers/config.hpp"
#include "agca/sparse.hpp"

namespace agca
{

inline constexpr std::uint64_t kPowerIterationSeed = 20240917;

//
// Largest eigenvalue of D^{-1} A by power iteration from a fixed-seed random start. Masked
// entries are held at zero. Returns the Rayleigh quotient x^T A x / x^T D x of the last iterate.
//
template <LinearOperator Op>
double estimate_lambda_max(const Op &A, std::span<const double> diag,
                           std::span<const char> mask = {}, int iterations = 25,
                           std::uint64_t seed = kPowerIterationSeed)
{
  const std::size_t n = A.size();
  if (diag.size() != n || (!mask.empty() && mask.size() != n))
  {
    throw ArgumentError("power iteration size mismatch");
  }
  auto masked = [&](std::size_t i) { return !mask.empty() && mask[i]; };
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Vector x(n), y(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    x[i] = masked(i) ? 0.0 : dist(rng);
  }
  double lambda = 0.0;
  for (int it = 0; it < iterations; ++it)
  {
    double xdx = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      xdx += x[i] * diag[i] * x[i];
    }
    if (!(xdx > 0.0))
    {
      throw SolverError("power iteration lost its iterate");
    }
    linalg::scale(1.0 / std::sqrt(xdx), x);
    A.apply(x, y);
    for (std::size_t i = 0; i < n; ++i)
    {
      if (masked(i))
      {
        y[i] = 0.0;
      }
    }
    lambda = linalg::dot(x, y);
    for (std::size_t i = 0; i < n; ++i)
    {
      x[i] = masked(i) ? 0.0 : y[i] / diag[i];
    }
    if (linalg::norm2(x) == 0.0)
    {
      break;
    }
  }
  if (!(lambda > 0.0))
  {
    throw SolverError("eigenvalue estimate is not positive");
  }
  return lambda;
}

//
// Chebyshev polynomial smoother on the Jacobi-preconditioned operator, targeting [lo, hi].
// Uses the three-term recurrence; masked DoFs are never modified.
//
template <LinearOperator Op>
class ChebyshevSmoother
{
public:
  ChebyshevSmoother(const Op &A, Vector diag, std::vector<char> mask, int order, double lo,
                    double hi)
    : A_(&A), inv_diag_(std::move(diag)), mask_(std::move(mask)), order_(order), lo_(lo), hi_(hi)
  {
    if (!(lo > 0.0) || !(hi > lo))
    {
      throw ArgumentError("Chebyshev interval must satisfy 0 < lo < hi");
    }
    if (order < 1)
    {
      throw ArgumentError("Chebyshev order must be >= 1");
    }
    if (mask_.empty())
    {
      mask_.assign(A.size(), 0);
    }
    for (auto &d : inv_diag_)
    {
      if (!(d > 0.0))
      {
        throw SolverError("Chebyshev smoother needs a positive diagonal");
      }
      d = 1.0 / d;
    }
  }

  int order() const { return order_; }
  double lower() const { return lo_; }
  double upper() const { return hi_; }

  void smooth(std::span<const double> b, std::span<double> x) const
  {
    const std::size_t n = A_->size();
    const double theta = 0.5 * (hi_ + lo_), delta = 0.5 * (hi_ - lo_);
    const double sigma = theta / delta;
    double rho = 1.0 / sigma;
    Vector r(n), d(n);
    residual(b, x, r);
    for (std::size_t i = 0; i < n; ++i)
    {
      d[i] = r[i] / theta;
    }
    for (int k = 1; k <= order_; ++k)
    {
      linalg::axpy(1.0, d, x);
      if (k == order_)
      {
        break;
      }
      residual(b, x, r);
      const double rho_new = 1.0 / (2.0 * sigma - rho);
      const double c1 = rho_new * rho, c2 = 2.0 * rho_new / delta;
      for (std::size_t i = 0; i < n; ++i)
      {
        d[i] = c1 * d[i] + c2 * r[i];
      }
      rho = rho_new;
    }
  }

private:
  // r = D^{-1}(b - A x), zero on masked DoFs.
  void residual(std::span<const double> b, std::span<const double> x, std::span<double> r) const
  {
    A_->apply(x, r);
    for (std::size_t i = 0; i < r.size(); ++i)
    {
      r[i] = mask_[i] ? 0.0 : (b[i] - r[i]) * inv_diag_[i];
    }
  }

  const Op *A_;
  Vector inv_diag_;
  std::vector<char> mask_;
  int order_;
  double lo_, hi_;
};

namespace detail
{

inline double checked_diagonal(const CsrMatrix &A, std::size_t r)
{
  const double d = A.at(r, r);
  if (d == 0.0)
  {
    throw SolverError("SOR needs a nonzero diagonal (row " + std::to_string(r) + ")");
  }
  return d;
}

inline void sor_row(const CsrMatrix &A, std::span<const double> b, std::span<double> x,
                    double omega, std::size_t r)
{
  const auto ptr = A.row_ptr();
  const auto idx = A.col_idx();
  const auto val = A.values();
  double s = b[r], diag = 0.0;
  for (std::size_t k = ptr[r]; k < ptr[r + 1]; ++k)
  {
    if (idx[k] == r)
    {
      diag = val[k];
    }
    else
    {
      s -= val[k] * x[idx[k]];
    }
  }
  if (diag == 0.0)
  {
    diag = checked_diagonal(A, r);
  }
  x[r] = (1.0 - omega) * x[r] + omega * s / diag;
}

}  // namespace detail

// One forward SOR sweep.
inline void sor_sweep(const CsrMatrix &A, std::span<const double> b, std::span<double> x,
                      double omega = 1.0)
{
  if (A.rows() != A.cols() || b.size() != A.rows() || x.size() != A.rows())
  {
    throw ArgumentError("SOR size mismatch");
  }
  for (std::size_t r = 0; r < A.rows(); ++r)
  {
    detail::sor_row(A, b, x, omega, r);
  }
}

inline void sor_sweep_backward(const CsrMatrix &A, std::span<const double> b, std::span<double> x,
                               double omega = 1.0)
{
  if (A.rows() != A.cols() || b.size() != A.rows() || x.size() != A.rows())
  {
    throw ArgumentError("SOR size mismatch");
  }
  for (std::size_t r = A.rows(); r-- > 0;)
  {
    detail::sor_row(A, b, x, omega, r);
  }
}

// Symmetric SOR from a zero guess: a forward then a backward sweep. Symmetric for symmetric A,
// hence usable inside CG.
class SsorPreconditioner
{
public:
  explicit SsorPreconditioner(const CsrMatrix &A, double omega = 1.0) : A_(&A), omega_(omega)
  {
    if (!(omega > 0.0 && omega < 2.0))
    {
      throw ArgumentError("SOR factor must lie in (0, 2)");
    }
    for (std::size_t r = 0; r < A.rows(); ++r)
    {
      detail::checked_diagonal(A, r);
    }
  }

  std::size_t size() const { return A_->rows(); }

  void apply(std::span<const double> r, std::span<double> z) const
  {
    linalg::fill(z, 0.0);
    sor_sweep(*A_, r, z, omega_);
    sor_sweep_backward(*A_, r, z, omega_);
  }

private:
  const CsrMatrix *A_;
  double omega_;
};

}  // namespace agca
