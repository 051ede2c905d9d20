// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include "agca/coarsening.hpp"
#include "agca/common.hpp"
#include "agca/fem.hpp"
#include "agca/mesh.hpp"
#include "agca/quadrature.hpp"
#include "agca/solvers/config.hpp"
#include "agca/solvers/krylov.hpp"
#include "agca/solvers/multigrid.hpp"
#include "agca/solvers/relaxation.hpp"
#include "agca/sparse.hpp"

namespace agca
{

using VectorField = std::function<Point(Point)>;
using BlockSolve = std::function<void(std::span<const double>, std::span<double>)>;

//
// Divergence matrix B between P1 pressure on level L-1 and P1 vector velocity on level L.
// Columns of Dirichlet velocity DoFs are dropped, so B^T vanishes on boundary rows.
//
inline CsrMatrix assemble_divergence(const MeshHierarchy &mesh)
{
  const int L = mesh.max_level();
  if (L < 1)
  {
    throw ArgumentError("the Stokes discretization needs L >= 1");
  }
  const std::size_t nvu = mesh.num_vertices(L), np = mesh.num_vertices(L - 1);
  const auto mask = mesh.boundary_mask(L, 2);
  std::vector<Triplet> t;
  t.reserve(mesh.num_micro_elements(L - 1) * 72);
  for (std::size_t M = 0; M < mesh.num_macros(); ++M)
  {
    mesh.for_each_micro_element(M, L - 1, [&](const MicroElement &pe) {
      const auto kids = mesh.children(M, L - 1, pe.index);
      std::array<MicroElement, 4> kel;
      for (int c = 0; c < 4; ++c)
      {
        kel[static_cast<std::size_t>(c)] = mesh.micro_element(M, L, kids[static_cast<std::size_t>(c)]);
      }
      const auto blocks = local_divergence(pe, kel);
      for (int c = 0; c < 4; ++c)
      {
        const DofMap d = DofMap::vector(kel[static_cast<std::size_t>(c)], nvu);
        const auto &Bc = blocks[static_cast<std::size_t>(c)];
        for (int k = 0; k < 3; ++k)
        {
          for (int a = 0; a < 6; ++a)
          {
            const std::size_t col = d.global[static_cast<std::size_t>(a)];
            if (!mask[col] && Bc(k, a) != 0.0)
            {
              t.push_back({pe.dofs[static_cast<std::size_t>(k)], col, Bc(k, a)});
            }
          }
        }
      }
    });
  }
  return CsrMatrix(np, 2 * nvu, std::move(t));
}

//
// K = [A B^T; B 0] acting on the stacked vector (u, p). A is the finest viscous level operator
// (identity on Dirichlet rows).
//
class StokesOperator
{
public:
  StokesOperator(const MeshHierarchy &mesh, const LevelOperator<ViscousPhysics> &A)
    : mesh_(&mesh), A_(&A), B_(assemble_divergence(mesh)), Bt_(B_.transposed())
  {
    if (A.level() != mesh.max_level())
    {
      throw ArgumentError("the velocity block must live on the finest level");
    }
  }

  std::size_t num_velocity() const { return A_->size(); }
  std::size_t num_pressure() const { return B_.rows(); }
  std::size_t size() const { return num_velocity() + num_pressure(); }
  const MeshHierarchy &mesh() const { return *mesh_; }
  const LevelOperator<ViscousPhysics> &A() const { return *A_; }
  const CsrMatrix &B() const { return B_; }
  const CsrMatrix &Bt() const { return Bt_; }

  void apply_K(std::span<const double> u, std::span<const double> p, std::span<double> ru,
               std::span<double> rp) const
  {
    if (u.size() != num_velocity() || p.size() != num_pressure() || ru.size() != u.size() ||
        rp.size() != p.size())
    {
      throw ArgumentError("Stokes operator level mismatch");
    }
    A_->apply(u, ru);
    Vector g(num_velocity());
    Bt_.apply(p, g);
    linalg::axpy(1.0, g, ru);
    B_.apply(u, rp);
  }

  void apply(std::span<const double> x, std::span<double> y) const
  {
    const std::size_t nu = num_velocity();
    apply_K(x.first(nu), x.subspan(nu), y.first(nu), y.subspan(nu));
  }

private:
  const MeshHierarchy *mesh_;
  const LevelOperator<ViscousPhysics> *A_;
  CsrMatrix B_, Bt_;
};

//
// diag(A)-weighted BFBT approximation of the inverse Schur complement,
//   S^{-1} ~ Z^{-1} (B W^{-1} A W^{-1} B^T) Z^{-1},  W = diag(A),  Z = B W^{-1} B^T,
// with Z assembled and inverted by mean-projected CG/SSOR.
//
class BfbtPreconditioner
{
public:
  BfbtPreconditioner(const StokesOperator &K, double inner_tol, int inner_max_iter = 5000,
                     BlockSolve middle_velocity_op = {})
    : K_(&K), W_(K.A().diagonal()), inner_max_iter_(inner_max_iter)
  {
    require(inner_tol > 0.0 && inner_tol < 1.0, "inner tolerance must lie in (0, 1)");
    inner_tol_ = inner_tol;
    winv_.resize(W_.size());
    for (std::size_t i = 0; i < W_.size(); ++i)
    {
      if (!(W_[i] > 0.0))
      {
        throw SolverError("diag(A) has a nonpositive entry at " + std::to_string(i));
      }
      winv_[i] = 1.0 / W_[i];
    }
    Z_ = K.B().multiply(K.Bt(), winv_);
    Zprec_ = std::make_unique<SsorPreconditioner>(Z_);
    if (middle_velocity_op)
    {
      velocity_op_ = std::move(middle_velocity_op);
    }
    else
    {
      velocity_op_ = [&K](std::span<const double> x, std::span<double> y) { K.A().apply(x, y); };
    }
  }

  std::size_t size() const { return Z_.rows(); }
  const CsrMatrix &Z() const { return Z_; }
  const Vector &W() const { return W_; }
  double inner_tol() const { return inner_tol_; }
  int inner_iterations() const { return inner_iterations_; }
  bool inner_converged() const { return inner_converged_; }

  // p = Z^{-1} r with the constant mode removed.
  void solve_Z(std::span<const double> r, std::span<double> p) const
  {
    KrylovConfig kc;
    kc.tol = inner_tol_;
    kc.max_iter = inner_max_iter_;
    linalg::fill(p, 0.0);
    const auto rep = cg(Z_, *Zprec_, r, p, kc, [](std::span<double> v) { linalg::remove_mean(v); });
    inner_iterations_ += rep.iterations;
    inner_converged_ = inner_converged_ && rep.converged;
  }

  // B W^{-1} A W^{-1} B^T
  void apply_middle(std::span<const double> q, std::span<double> out) const
  {
    const std::size_t nu = K_->num_velocity();
    Vector g(nu), h(nu);
    K_->Bt().apply(q, g);
    for (std::size_t i = 0; i < nu; ++i)
    {
      g[i] *= winv_[i];
    }
    velocity_op_(g, h);
    for (std::size_t i = 0; i < nu; ++i)
    {
      h[i] *= winv_[i];
    }
    K_->B().apply(h, out);
  }

  void apply(std::span<const double> r, std::span<double> p) const
  {
    const std::size_t np = size();
    Vector rr(r.begin(), r.end()), t1(np), t2(np);
    linalg::remove_mean(rr);
    solve_Z(rr, t1);
    apply_middle(t1, t2);
    linalg::remove_mean(t2);
    solve_Z(t2, p);
    linalg::remove_mean(p);
  }

private:
  const StokesOperator *K_;
  Vector W_, winv_;
  CsrMatrix Z_;
  std::unique_ptr<SsorPreconditioner> Zprec_;
  BlockSolve velocity_op_;
  double inner_tol_ = 1e-6;
  int inner_max_iter_;
  mutable int inner_iterations_ = 0;
  mutable bool inner_converged_ = true;
};

enum class UpperBlockSign
{
  Printed,  // u = A^{-1}(r_u + B^T p)
  Flipped   // u = A^{-1}(r_u - B^T p)
};

//
// Block upper-triangular preconditioner: p = S^{-1} r_p, then u = A^{-1}(r_u +- B^T p), where
// A^{-1} is one V-cycle from zero in the production setting.
//
class BlockTriangularPreconditioner
{
public:
  BlockTriangularPreconditioner(const StokesOperator &K, BlockSolve velocity_inv,
                                BlockSolve schur_inv, UpperBlockSign sign = UpperBlockSign::Printed)
    : K_(&K), velocity_inv_(std::move(velocity_inv)), schur_inv_(std::move(schur_inv)), sign_(sign)
  {
  }

  std::size_t size() const { return K_->size(); }

  void apply(std::span<const double> r, std::span<double> z) const
  {
    const std::size_t nu = K_->num_velocity();
    auto ru = r.first(nu), rp = r.subspan(nu);
    auto zu = z.first(nu), zp = z.subspan(nu);
    schur_inv_(rp, zp);
    Vector rhs(ru.begin(), ru.end()), g(nu);
    K_->Bt().apply(zp, g);
    linalg::axpy(sign_ == UpperBlockSign::Printed ? 1.0 : -1.0, g, rhs);
    velocity_inv_(rhs, zu);
  }

private:
  const StokesOperator *K_;
  BlockSolve velocity_inv_, schur_inv_;
  UpperBlockSign sign_;
};

// Load vector of a body force against the finest velocity basis; zero on Dirichlet DoFs.
inline Vector assemble_load(const MeshHierarchy &mesh, const VectorField &f, int degree = 2)
{
  const int L = mesh.max_level();
  const std::size_t nv = mesh.num_vertices(L);
  const auto rule = quadrature(degree);
  const auto mask = mesh.boundary_mask(L, 2);
  Vector b(2 * nv, 0.0);
  for (std::size_t M = 0; M < mesh.num_macros(); ++M)
  {
    mesh.for_each_micro_element(M, L, [&](const MicroElement &m) {
      const double area = m.area();
      for (std::size_t q = 0; q < rule.size(); ++q)
      {
        const Point fq = f(m.at_barycentric(rule.points[q]));
        const double w = area * rule.weights[q];
        for (int a = 0; a < 3; ++a)
        {
          const double phi = rule.points[q][static_cast<std::size_t>(a)];
          b[m.dofs[static_cast<std::size_t>(a)]] += w * fq.x * phi;
          b[nv + m.dofs[static_cast<std::size_t>(a)]] += w * fq.y * phi;
        }
      }
    });
  }
  for (std::size_t i = 0; i < b.size(); ++i)
  {
    if (mask[i])
    {
      b[i] = 0.0;
    }
  }
  return b;
}

// Scalar load against the finest P1 basis; zero on Dirichlet DoFs.
inline Vector assemble_scalar_load(const MeshHierarchy &mesh, const ScalarField &f, int degree = 2)
{
  const int L = mesh.max_level();
  const auto rule = quadrature(degree);
  const auto mask = mesh.boundary_mask(L);
  Vector b(mesh.num_vertices(L), 0.0);
  for (std::size_t M = 0; M < mesh.num_macros(); ++M)
  {
    mesh.for_each_micro_element(M, L, [&](const MicroElement &m) {
      const double area = m.area();
      for (std::size_t q = 0; q < rule.size(); ++q)
      {
        const double w = area * rule.weights[q] * f(m.at_barycentric(rule.points[q]));
        for (int a = 0; a < 3; ++a)
        {
          b[m.dofs[static_cast<std::size_t>(a)]] += w * rule.points[q][static_cast<std::size_t>(a)];
        }
      }
    });
  }
  for (std::size_t i = 0; i < b.size(); ++i)
  {
    if (mask[i])
    {
      b[i] = 0.0;
    }
  }
  return b;
}

struct StokesConfig
{
  KrylovConfig krylov;
  VCycleConfig vcycle;
  UpperBlockSign sign = UpperBlockSign::Printed;
  double inner_tol = 0.0;  // 0 selects max(1e-6, tol / 100)
  int inner_max_iter = 5000;
  int quadrature_degree = 2;

  double effective_inner_tol() const
  {
    return inner_tol > 0.0 ? inner_tol : std::max(1e-6, krylov.tol / 100.0);
  }
};

struct StokesSolution
{
  Vector u, p;
  SolveReport report;
  double pressure_mean = 0.0;  // after the final projection
  int inner_iterations = 0;
  bool inner_converged = true;
};

//
// FGMRES on K with the block-triangular preconditioner (one AGCA V-cycle for the velocity
// block, BFBT for the Schur complement). The returned pressure is mean-free.
//
inline StokesSolution solve_stokes(const AgcaHierarchy<ViscousPhysics> &h, const VectorField &force,
                                   const StokesConfig &cfg)
{
  cfg.krylov.validate();
  cfg.vcycle.validate();
  detail::Stopwatch clock;
  const auto &mesh = h.mesh();
  StokesOperator K(mesh, h.finest());
  VCycle<ViscousPhysics> V(h, cfg.vcycle);
  BfbtPreconditioner S(K, cfg.effective_inner_tol(), cfg.inner_max_iter);
  BlockTriangularPreconditioner Q(
      K, [&V](std::span<const double> r, std::span<double> z) { V.apply(r, z); },
      [&S](std::span<const double> r, std::span<double> z) { S.apply(r, z); }, cfg.sign);

  const std::size_t nu = K.num_velocity();
  Vector b(K.size(), 0.0), x(K.size(), 0.0);
  const Vector fu = assemble_load(mesh, force, cfg.quadrature_degree);
  std::copy(fu.begin(), fu.end(), b.begin());

  StokesSolution sol;
  sol.report = fgmres(K, Q, b, x, cfg.krylov);
  sol.u.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(nu));
  sol.p.assign(x.begin() + static_cast<std::ptrdiff_t>(nu), x.end());
  linalg::remove_mean(sol.p);
  sol.pressure_mean = linalg::mean(sol.p);
  sol.inner_iterations = S.inner_iterations();
  sol.inner_converged = S.inner_converged();
  sol.report.stored_bytes = h.store().stored_bytes();
  sol.report.seconds = clock.seconds();
  return sol;
}

struct ScalarSolution
{
  Vector u;
  SolveReport report;
};

// -div(eta grad u) = f with homogeneous Dirichlet data, FGMRES preconditioned by one V-cycle.
inline ScalarSolution solve_diffusion(const AgcaHierarchy<DiffusionPhysics> &h, const ScalarField &f,
                                      const KrylovConfig &kc, const VCycleConfig &vc,
                                      int quadrature_degree = 2)
{
  detail::Stopwatch clock;
  VCycle<DiffusionPhysics> V(h, vc);
  const Vector b = assemble_scalar_load(h.mesh(), f, quadrature_degree);
  ScalarSolution sol;
  sol.u.assign(b.size(), 0.0);
  sol.report = fgmres(h.finest(), V, b, sol.u, kc);
  sol.report.stored_bytes = h.store().stored_bytes();
  sol.report.seconds = clock.seconds();
  return sol;
}

// x, y, u_x, u_y per finest vertex.
inline void write_velocity_csv(std::ostream &os, const MeshHierarchy &mesh, std::span<const double> u)
{
  const int L = mesh.max_level();
  const std::size_t nv = mesh.num_vertices(L);
  os << "x,y,u_x,u_y\n";
  for (std::size_t v = 0; v < nv; ++v)
  {
    const Point p = mesh.vertex_coord(L, v);
    os << p.x << ',' << p.y << ',' << u[v] << ',' << u[nv + v] << '\n';
  }
}

// x, y, p per pressure vertex (level L-1).
inline void write_pressure_csv(std::ostream &os, const MeshHierarchy &mesh, std::span<const double> p)
{
  const int l = mesh.max_level() - 1;
  os << "x,y,p\n";
  for (std::size_t v = 0; v < mesh.num_vertices(l); ++v)
  {
    const Point q = mesh.vertex_coord(l, v);
    os << q.x << ',' << q.y << ',' << p[v] << '\n';
  }
}

}  // namespace agca
