// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "agca/bench/memory.hpp"
#include "agca/bench/problems.hpp"
#include "agca/coarsening.hpp"
#include "agca/sparse.hpp"
#include "agca/transfer.hpp"

namespace agca::selftest
{

// Copy of A with masked rows and columns removed and unit diagonal there.
inline CsrMatrix pin_rows(const CsrMatrix &A, const std::vector<char> &mask, bool unit_diagonal = true)
{
  std::vector<Triplet> t;
  const auto ptr = A.row_ptr();
  const auto idx = A.col_idx();
  const auto val = A.values();
  for (std::size_t r = 0; r < A.rows(); ++r)
  {
    if (mask[r])
    {
      if (unit_diagonal)
      {
        t.push_back({r, r, 1.0});
      }
      continue;
    }
    for (std::size_t k = ptr[r]; k < ptr[r + 1]; ++k)
    {
      if (!mask[idx[k]])
      {
        t.push_back({r, idx[k], val[k]});
      }
    }
  }
  return CsrMatrix(A.rows(), A.cols(), std::move(t));
}

// ||A - B||_F / ||B||_F over the union pattern.
inline double relative_frobenius(const CsrMatrix &A, const CsrMatrix &B)
{
  double num = 0.0, den = 0.0;
  for (std::size_t r = 0; r < B.rows(); ++r)
  {
    const auto bp = B.row_ptr();
    for (std::size_t k = bp[r]; k < bp[r + 1]; ++k)
    {
      den += B.values()[k] * B.values()[k];
    }
  }
  for (std::size_t r = 0; r < A.rows(); ++r)
  {
    std::vector<std::size_t> cols;
    for (std::size_t k = A.row_ptr()[r]; k < A.row_ptr()[r + 1]; ++k)
    {
      cols.push_back(A.col_idx()[k]);
    }
    for (std::size_t k = B.row_ptr()[r]; k < B.row_ptr()[r + 1]; ++k)
    {
      cols.push_back(B.col_idx()[k]);
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    for (auto c : cols)
    {
      const double d = A.at(r, c) - B.at(r, c);
      num += d * d;
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

//
// Largest relative Frobenius distance over the coarse levels between the operator assembled from
// stored local Galerkin matrices and the recursive global product P^T A P. With Dirichlet
// treatment the reference strips boundary rows and columns before each product and pins them
// afterwards.
//
template <class Phys>
double galerkin_defect(const AgcaHierarchy<Phys> &h)
{
  const auto &mesh = h.mesh();
  const int L = mesh.max_level();
  const bool dirichlet = h.options().boundary == BoundaryTreatment::Dirichlet;
  CsrMatrix ref = h.level(L).assemble();
  double worst = 0.0;
  for (int l = L - 1; l >= 0; --l)
  {
    const CsrMatrix fine = dirichlet ? pin_rows(ref, mesh.boundary_mask(l + 1, Phys::components), false) : ref;
    const CsrMatrix P = assemble_prolongation(mesh, l, Phys::components);
    CsrMatrix coarse = P.transposed().multiply(fine.multiply(P));
    if (dirichlet)
    {
      coarse = pin_rows(coarse, mesh.boundary_mask(l, Phys::components), true);
    }
    worst = std::max(worst, relative_frobenius(h.level(l).assemble(), coarse));
    ref = std::move(coarse);
  }
  return worst;
}

// Largest entrywise relative distance between stored GCA and re-discretized local matrices.
template <class Phys>
double gca_dca_local_defect(const AgcaHierarchy<Phys> &h)
{
  const auto &mesh = h.mesh();
  const auto q = quadrature(h.options().quadrature_degree);
  double worst = 0.0;
  for (std::size_t M = 0; M < mesh.num_macros(); ++M)
  {
    if (!h.plan().is_gca(M))
    {
      continue;
    }
    for (int l = 0; l < mesh.max_level(); ++l)
    {
      mesh.for_each_micro_element(M, l, [&](const MicroElement &m) {
        const auto &G = h.store().matrix(M, l, m.index);
        const auto D = dca_local<Phys>(m, h.coefficient(), q, h.options().boundary);
        double diff = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < D.a.size(); ++k)
        {
          diff = std::max(diff, std::abs(G.a[k] - D.a[k]));
          scale = std::max(scale, std::abs(D.a[k]));
        }
        worst = std::max(worst, scale > 0.0 ? diff / scale : diff);
      });
    }
  }
  return worst;
}

// max over random pairs of |<P c, f> - <c, R f>| / (|P c| |f|)
inline double transfer_adjoint_defect(const MeshHierarchy &mesh, int l, int components, int pairs,
                                      std::uint64_t seed = 7)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const std::size_t nc = static_cast<std::size_t>(components) * mesh.num_vertices(l);
  const std::size_t nf = static_cast<std::size_t>(components) * mesh.num_vertices(l + 1);
  double worst = 0.0;
  for (int k = 0; k < pairs; ++k)
  {
    Vector c(nc), f(nf), Pc(nf), Rf(nc);
    for (auto &v : c)
    {
      v = d(rng);
    }
    for (auto &v : f)
    {
      v = d(rng);
    }
    prolongate(mesh, l, components, c, Pc);
    restrict_residual(mesh, l, components, f, Rf);
    const double lhs = linalg::dot(Pc, f), rhs = linalg::dot(c, Rf);
    worst = std::max(worst, std::abs(lhs - rhs) / (linalg::norm2(Pc) * linalg::norm2(f)));
  }
  return worst;
}

// Largest error of prolongating an affine function, per component.
inline double affine_prolongation_defect(const MeshHierarchy &mesh, int l)
{
  const std::size_t nc = mesh.num_vertices(l), nf = mesh.num_vertices(l + 1);
  auto f = [](Point p) { return 0.3 + 1.7 * p.x - 2.9 * p.y; };
  Vector c(nc), fine(nf);
  for (std::size_t v = 0; v < nc; ++v)
  {
    c[v] = f(mesh.vertex_coord(l, v));
  }
  prolongate(mesh, l, 1, c, fine);
  double worst = 0.0;
  for (std::size_t v = 0; v < nf; ++v)
  {
    worst = std::max(worst, std::abs(fine[v] - f(mesh.vertex_coord(l + 1, v))));
  }
  return worst;
}

template <class Phys>
double adjointness_defect(const LevelOperator<Phys> &A, std::uint64_t seed = 11)
{
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  const auto &mask = A.boundary_mask();
  Vector u(A.size()), w(A.size()), Au(A.size()), Aw(A.size());
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    u[i] = mask[i] ? 0.0 : d(rng);
    w[i] = mask[i] ? 0.0 : d(rng);
  }
  A.apply(u, Au);
  A.apply(w, Aw);
  const double a = linalg::dot(Au, w), b = linalg::dot(u, Aw);
  return std::abs(a - b) / std::max(std::abs(a), 1e-300);
}

struct Check
{
  std::string name;
  bool pass;
  std::string detail;
};

inline std::vector<Check> run_all()
{
  std::vector<Check> out;
  auto add = [&](std::string name, double value, double tol) {
    std::ostringstream s;
    s << "value " << value << " (tol " << tol << ")";
    out.push_back({std::move(name), value <= tol && std::isfinite(value), s.str()});
  };

  bench::SinkerProblem jump;
  jump.family = 2;
  jump.dynamic_ratio = 1e4;
  MeshHierarchy small(MacroGrid(1, 1), 2);
  CoefficientEval ej(jump.viscosity(), EvalMode::Analytic, small);
  for (auto bc : {BoundaryTreatment::None, BoundaryTreatment::Dirichlet})
  {
    const std::string tag = bc == BoundaryTreatment::None ? " (natural)" : " (dirichlet)";
    HierarchyOptions opt;
    opt.boundary = bc;
    AgcaHierarchy<DiffusionPhysics> hd(small, ej, CoarseningPlan::uniform(small.num_macros(), true), opt);
    AgcaHierarchy<ViscousPhysics> hv(small, ej, CoarseningPlan::uniform(small.num_macros(), true), opt);
    add("galerkin triple product, diffusion" + tag, galerkin_defect(hd), 1e-12);
    add("galerkin triple product, viscous" + tag, galerkin_defect(hv), 1e-12);
  }

  MeshHierarchy mesh(MacroGrid(4, 4), 3);
  CoefficientEval ec([](Point) { return 3.0; }, EvalMode::Analytic, mesh);
  AgcaHierarchy<ViscousPhysics> hc(mesh, ec, CoarseningPlan::uniform(mesh.num_macros(), true));
  add("constant viscosity: stored GCA equals DCA", gca_dca_local_defect(hc), 1e-12);

  double adj = 0.0, aff = 0.0;
  for (int l = 0; l < mesh.max_level(); ++l)
  {
    adj = std::max(adj, transfer_adjoint_defect(mesh, l, 2, 10));
    aff = std::max(aff, affine_prolongation_defect(mesh, l));
  }
  add("restriction is the adjoint of prolongation", adj, 1e-13);
  add("prolongation reproduces affine functions", aff, 1e-14);

  bench::SinkerProblem disk;
  disk.family = 4;
  CoefficientEval ed(disk.viscosity(), EvalMode::Analytic, mesh);
  AgcaHierarchy<ViscousPhysics> ha(mesh, ed, select_macros(disk.viscosity(), mesh, 10.0));
  double sym = 0.0;
  for (int l = 0; l <= mesh.max_level(); ++l)
  {
    sym = std::max(sym, adjointness_defect(ha.level(l)));
  }
  add("AGCA level operators are symmetric", sym, 1e-12);

  const auto mm = bench::memory_model_3d();
  auto within = [&](const std::string &name, double v, double lo, double hi) {
    std::ostringstream s;
    s << "value " << v << " in [" << lo << ", " << hi << "]";
    out.push_back({name, v >= lo && v <= hi, s.str()});
  };
  within("memory model Mem_A", mm.mem_A(), 86.3, 86.7);
  within("memory model Mem_K", mm.mem_K(), 89.3, 89.7);
  within("memory model sparse GCA", mm.sparse_gca(), 10.6, 11.0);
  within("memory model element-wise GCA", mm.elementwise_gca(), 33.5, 34.5);
  within("memory model stencil GCA", mm.stencil_gca(), 5.3, 5.5);
  return out;
}

}  // namespace agca::selftest
