// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>

#include "agca/common.hpp"
#include "agca/fem.hpp"
#include "agca/mesh.hpp"
#include "agca/sparse.hpp"

namespace agca
{

namespace detail
{

inline void check_transfer(const MeshHierarchy &mesh, int l, int components, std::size_t coarse,
                           std::size_t fine)
{
  if (l < 0 || l >= mesh.max_level())
  {
    throw ArgumentError("transfer level " + std::to_string(l) + " out of range");
  }
  if (coarse != static_cast<std::size_t>(components) * mesh.num_vertices(l) ||
      fine != static_cast<std::size_t>(components) * mesh.num_vertices(l + 1))
  {
    throw ArgumentError("transfer vector size mismatch");
  }
}

// The one or two coarse parents of a level-(l+1) lattice point. Edges of the structured
// triangulation run horizontally, vertically and along (1,1), so an odd/odd point is the
// midpoint of a diagonal edge.
inline int fine_parents(LatticeCoord f, std::array<LatticeCoord, 2> &parents)
{
  const bool ox = (f.i & 1) != 0, oy = (f.j & 1) != 0;
  if (!ox && !oy)
  {
    parents[0] = {f.i / 2, f.j / 2};
    return 1;
  }
  if (ox && !oy)
  {
    parents = {LatticeCoord{(f.i - 1) / 2, f.j / 2}, LatticeCoord{(f.i + 1) / 2, f.j / 2}};
  }
  else if (!ox && oy)
  {
    parents = {LatticeCoord{f.i / 2, (f.j - 1) / 2}, LatticeCoord{f.i / 2, (f.j + 1) / 2}};
  }
  else
  {
    parents = {LatticeCoord{(f.i - 1) / 2, (f.j - 1) / 2}, LatticeCoord{(f.i + 1) / 2, (f.j + 1) / 2}};
  }
  return 2;
}

}  // namespace detail

//
// Linear interpolation from level l to l+1, per component. Fine vertices that coincide with
// coarse vertices copy the value, edge midpoints take the mean of the edge end points. The
// weights follow from the nested lattices and are never stored.
//
inline void prolongate(const MeshHierarchy &mesh, int l, int components,
                       std::span<const double> coarse, std::span<double> fine)
{
  detail::check_transfer(mesh, l, components, coarse.size(), fine.size());
  const std::size_t nc = mesh.num_vertices(l), nf = mesh.num_vertices(l + 1);
  std::array<LatticeCoord, 2> par;
  for (std::size_t v = 0; v < nf; ++v)
  {
    const int np = detail::fine_parents(mesh.vertex_lattice(l + 1, v), par);
    const std::size_t p0 = mesh.vertex_index(l, par[0]);
    const std::size_t p1 = np == 2 ? mesh.vertex_index(l, par[1]) : p0;
    for (int c = 0; c < components; ++c)
    {
      const std::size_t oc = static_cast<std::size_t>(c) * nc, of = static_cast<std::size_t>(c) * nf;
      fine[of + v] = np == 1 ? coarse[oc + p0] : 0.5 * (coarse[oc + p0] + coarse[oc + p1]);
    }
  }
}

// Exact transpose of prolongate.
inline void restrict_residual(const MeshHierarchy &mesh, int l, int components,
                              std::span<const double> fine, std::span<double> coarse)
{
  detail::check_transfer(mesh, l, components, coarse.size(), fine.size());
  const std::size_t nc = mesh.num_vertices(l), nf = mesh.num_vertices(l + 1);
  linalg::fill(coarse, 0.0);
  std::array<LatticeCoord, 2> par;
  for (std::size_t v = 0; v < nf; ++v)
  {
    const int np = detail::fine_parents(mesh.vertex_lattice(l + 1, v), par);
    for (int c = 0; c < components; ++c)
    {
      const std::size_t oc = static_cast<std::size_t>(c) * nc, of = static_cast<std::size_t>(c) * nf;
      if (np == 1)
      {
        coarse[oc + mesh.vertex_index(l, par[0])] += fine[of + v];
      }
      else
      {
        coarse[oc + mesh.vertex_index(l, par[0])] += 0.5 * fine[of + v];
        coarse[oc + mesh.vertex_index(l, par[1])] += 0.5 * fine[of + v];
      }
    }
  }
}

// The prolongation from level l to l+1 as an explicit sparse matrix (fine x coarse).
inline CsrMatrix assemble_prolongation(const MeshHierarchy &mesh, int l, int components)
{
  const std::size_t nc = mesh.num_vertices(l), nf = mesh.num_vertices(l + 1);
  detail::check_transfer(mesh, l, components, components * nc, components * nf);
  std::vector<Triplet> t;
  t.reserve(2 * nf * static_cast<std::size_t>(components));
  std::array<LatticeCoord, 2> par;
  for (std::size_t v = 0; v < nf; ++v)
  {
    const int np = detail::fine_parents(mesh.vertex_lattice(l + 1, v), par);
    for (int c = 0; c < components; ++c)
    {
      const std::size_t oc = static_cast<std::size_t>(c) * nc, of = static_cast<std::size_t>(c) * nf;
      for (int k = 0; k < np; ++k)
      {
        t.push_back({of + v, oc + mesh.vertex_index(l, par[static_cast<std::size_t>(k)]),
                     np == 1 ? 1.0 : 0.5});
      }
    }
  }
  return CsrMatrix(components * nf, components * nc, std::move(t));
}

using LocalInterp = Mat<3>;
using LocalInterpVector = Mat<6>;

//
// Fully-assembled local interpolation from micro element (macro, l, index) to its child c:
// row r gives the child's vertex r as a combination of the parent's vertices. Entries are 0,
// 1/2 or 1 and each row sums to 1.
//
inline LocalInterp local_interp(const MeshHierarchy &mesh, std::size_t macro, int l,
                                std::size_t index, int child)
{
  if (child < 0 || child > 3)
  {
    throw ArgumentError("child index must be in 0..3");
  }
  const auto kids = mesh.children(macro, l, index);
  const std::int64_t n = std::int64_t{1} << l;
  const auto pv = MeshHierarchy::local_vertices(MeshHierarchy::micro_coord(n, index));
  const auto cv = MeshHierarchy::local_vertices(
      MeshHierarchy::micro_coord(2 * n, kids[static_cast<std::size_t>(child)]));
  LocalInterp P;
  for (int r = 0; r < 3; ++r)
  {
    const LatticeCoord twice = 2 * cv[static_cast<std::size_t>(r)];
    bool found = false;
    for (int a = 0; a < 3 && !found; ++a)
    {
      if (4 * pv[static_cast<std::size_t>(a)] == twice)
      {
        P(r, a) = 1.0;
        found = true;
      }
    }
    for (int a = 0; a < 3 && !found; ++a)
    {
      for (int b = a + 1; b < 3 && !found; ++b)
      {
        if (2 * (pv[static_cast<std::size_t>(a)] + pv[static_cast<std::size_t>(b)]) == twice)
        {
          P(r, a) = 0.5;
          P(r, b) = 0.5;
          found = true;
        }
      }
    }
    if (!found)
    {
      throw GeometryError("child vertex is neither a parent vertex nor an edge midpoint");
    }
  }
  return P;
}

inline LocalInterpVector block_diagonal(const LocalInterp &P)
{
  LocalInterpVector V;
  for (int i = 0; i < 3; ++i)
  {
    for (int j = 0; j < 3; ++j)
    {
      V(i, j) = P(i, j);
      V(3 + i, 3 + j) = P(i, j);
    }
  }
  return V;
}

// Two identical scalar blocks, one per velocity component.
inline LocalInterpVector local_interp_vector(const MeshHierarchy &mesh, std::size_t macro, int l,
                                             std::size_t index, int child)
{
  return block_diagonal(local_interp(mesh, macro, l, index, child));
}

}  // namespace agca
