// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "agca/common.hpp"
#include "agca/solvers/config.hpp"

namespace agca
{

// Removes a known null-space component in place.
using Projection = std::function<void(std::span<double>)>;

namespace detail
{

class Stopwatch
{
public:
  Stopwatch() : t0_(std::chrono::steady_clock::now()) {}
  double seconds() const
  {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
  }

private:
  std::chrono::steady_clock::time_point t0_;
};

}  // namespace detail

//
// Preconditioned conjugate gradients. The optional projection is applied to the right-hand side,
// the residual and the preconditioned residual so iterates stay in the complement of a null space.
// Convergence: ||r_i|| <= tol ||b||.
//
template <LinearOperator Op, LinearOperator Prec>
SolveReport cg(const Op &A, const Prec &M, std::span<const double> b, std::span<double> x,
               const KrylovConfig &cfg, const Projection &project = {})
{
  cfg.validate();
  const std::size_t n = A.size();
  if (b.size() != n || x.size() != n || M.size() != n)
  {
    throw ArgumentError("CG size mismatch");
  }
  detail::Stopwatch clock;
  SolveReport rep;
  Vector rhs(b.begin(), b.end()), r(n), z(n), p(n), q(n);
  if (project)
  {
    project(rhs);
    project(x);
  }
  rep.rhs_norm = linalg::norm2(rhs);
  A.apply(x, r);
  for (std::size_t i = 0; i < n; ++i)
  {
    r[i] = rhs[i] - r[i];
  }
  if (project)
  {
    project(r);
  }
  double rnorm = linalg::norm2(r);
  rep.residuals.push_back(rnorm);
  const double target = cfg.tol * rep.rhs_norm;
  if (rnorm <= target || rnorm == 0.0)
  {
    rep.converged = true;
    rep.seconds = clock.seconds();
    return rep;
  }
  M.apply(r, z);
  if (project)
  {
    project(z);
  }
  linalg::copy(z, p);
  double rz = linalg::dot(r, z);
  for (int it = 1; it <= cfg.max_iter; ++it)
  {
    A.apply(p, q);
    const double pq = linalg::dot(p, q);
    if (!(pq > 0.0))
    {
      throw SolverError("CG breakdown: operator or preconditioner not positive definite");
    }
    const double alpha = rz / pq;
    linalg::axpy(alpha, p, x);
    linalg::axpy(-alpha, q, r);
    if (project)
    {
      project(r);
    }
    rnorm = linalg::norm2(r);
    rep.residuals.push_back(rnorm);
    rep.iterations = it;
    if (rnorm <= target || rnorm <= cfg.machine_floor * rep.rhs_norm)
    {
      rep.converged = true;
      break;
    }
    M.apply(r, z);
    if (project)
    {
      project(z);
    }
    const double rz_new = linalg::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i)
    {
      p[i] = z[i] + beta * p[i];
    }
  }
  if (project)
  {
    project(x);
  }
  rep.seconds = clock.seconds();
  return rep;
}

//
// Right-preconditioned flexible GMRES with restarts. Both the Arnoldi basis V and the
// preconditioned directions Z are kept, so the preconditioner may change between iterations.
// The residual history holds the Givens estimate of every iteration; at each restart the estimate
// is replaced by the true residual of the updated iterate.
//
template <LinearOperator Op, LinearOperator Prec>
SolveReport fgmres(const Op &A, const Prec &M, std::span<const double> b, std::span<double> x,
                   const KrylovConfig &cfg)
{
  cfg.validate();
  const std::size_t n = A.size();
  if (b.size() != n || x.size() != n || M.size() != n)
  {
    throw ArgumentError("FGMRES size mismatch");
  }
  detail::Stopwatch clock;
  SolveReport rep;
  rep.rhs_norm = linalg::norm2(b);
  const double target = cfg.tol * rep.rhs_norm;
  const double floor = cfg.machine_floor * rep.rhs_norm;
  const int m = cfg.restart;

  std::vector<Vector> V(static_cast<std::size_t>(m + 1), Vector(n));
  std::vector<Vector> Z(static_cast<std::size_t>(m), Vector(n));
  std::vector<Vector> H(static_cast<std::size_t>(m + 1), Vector(static_cast<std::size_t>(m), 0.0));
  Vector cs(static_cast<std::size_t>(m)), sn(static_cast<std::size_t>(m));
  Vector g(static_cast<std::size_t>(m + 1)), r(n);

  auto true_residual = [&]() {
    A.apply(x, r);
    for (std::size_t i = 0; i < n; ++i)
    {
      r[i] = b[i] - r[i];
    }
    return linalg::norm2(r);
  };

  double beta = true_residual();
  rep.residuals.push_back(beta);
  if (beta <= target || beta == 0.0)
  {
    rep.converged = true;
    rep.seconds = clock.seconds();
    return rep;
  }

  while (rep.iterations < cfg.max_iter)
  {
    const double cycle_start = beta;
    for (std::size_t i = 0; i < n; ++i)
    {
      V[0][i] = r[i] / beta;
    }
    linalg::fill(g, 0.0);
    g[0] = beta;
    int j = 0;
    bool done = false;
    for (; j < m && rep.iterations < cfg.max_iter; ++j)
    {
      const auto ju = static_cast<std::size_t>(j);
      M.apply(V[ju], Z[ju]);
      A.apply(Z[ju], V[ju + 1]);
      // Modified Gram-Schmidt.
      for (int i = 0; i <= j; ++i)
      {
        const auto iu = static_cast<std::size_t>(i);
        H[iu][ju] = linalg::dot(V[ju + 1], V[iu]);
        linalg::axpy(-H[iu][ju], V[iu], V[ju + 1]);
      }
      const double hn = linalg::norm2(V[ju + 1]);
      H[ju + 1][ju] = hn;
      const bool breakdown = !(hn > 1e-300);
      if (!breakdown)
      {
        linalg::scale(1.0 / hn, V[ju + 1]);
      }
      for (int i = 0; i < j; ++i)
      {
        const auto iu = static_cast<std::size_t>(i);
        const double t = cs[iu] * H[iu][ju] + sn[iu] * H[iu + 1][ju];
        H[iu + 1][ju] = -sn[iu] * H[iu][ju] + cs[iu] * H[iu + 1][ju];
        H[iu][ju] = t;
      }
      const double a = H[ju][ju], c = H[ju + 1][ju];
      const double den = std::hypot(a, c);
      if (den == 0.0)
      {
        throw SolverError("FGMRES breakdown: singular Hessenberg column");
      }
      cs[ju] = a / den;
      sn[ju] = c / den;
      H[ju][ju] = den;
      H[ju + 1][ju] = 0.0;
      g[ju + 1] = -sn[ju] * g[ju];
      g[ju] = cs[ju] * g[ju];
      const double est = std::abs(g[ju + 1]);
      ++rep.iterations;
      rep.residuals.push_back(est);
      if (est <= target || est <= floor || breakdown)
      {
        ++j;
        done = true;
        break;
      }
    }
    // Solve the triangular system and update x with the Z directions.
    Vector y(static_cast<std::size_t>(j), 0.0);
    for (int i = j - 1; i >= 0; --i)
    {
      const auto iu = static_cast<std::size_t>(i);
      double s = g[iu];
      for (int k = i + 1; k < j; ++k)
      {
        s -= H[iu][static_cast<std::size_t>(k)] * y[static_cast<std::size_t>(k)];
      }
      y[iu] = s / H[iu][iu];
    }
    for (int i = 0; i < j; ++i)
    {
      linalg::axpy(y[static_cast<std::size_t>(i)], Z[static_cast<std::size_t>(i)], x);
    }
    beta = true_residual();
    rep.residuals.back() = beta;
    if (beta <= target || beta <= floor)
    {
      rep.converged = true;
      break;
    }
    if (done && !(beta < cycle_start))
    {
      rep.stagnated = true;
      break;
    }
    if (!done && !(beta < cycle_start * (1.0 - 1e-12)))
    {
      rep.stagnated = true;
      break;
    }
  }
  rep.seconds = clock.seconds();
  return rep;
}

}  // namespace agca
