// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "agca/coarsening.hpp"
#include "agca/common.hpp"
#include "agca/mesh.hpp"

namespace agca::bench
{

// Velocity share of N_L in 3D as printed with the model (~0.95).
inline constexpr double kVelocityShare3D = 0.95;
// The limit 1 - 1/24 from the tetrahedral vertex counts.
inline constexpr double kVelocityShare3DLimit = 1.0 - 1.0 / 24.0;

//
// Memory of the 3D Stokes solver components in units of fine-grid vectors N_L:
//   Mem_A      (45 nonzeros * 2 words + 1 row pointer) * c_u
//   Mem_K      Mem_A + 2 * (15 * 2 + 1) * c_p
//   sparse GCA n_fill * Mem_A / 8
//   element    3 components * 16 entries * 6 cells per vertex / 8 * c_u
//   stencil    3 components * 15 entries / 8 * c_u
//
struct MemoryModel3D
{
  double n_fill = 1.0;
  int n_restart = 30;
  double c_agca = 1.0;
  double c_u = kVelocityShare3D;

  void validate() const
  {
    require(n_fill >= 1.0, "n_fill_in must be >= 1");
    require(n_restart >= 0, "n_restart must be >= 0");
    require(c_agca >= 0.0 && c_agca <= 1.0, "c_agca must lie in [0, 1]");
    require(c_u > 0.0 && c_u < 1.0, "c_u must lie in (0, 1)");
  }

  double c_p() const { return 1.0 - c_u; }
  double mem_A() const { return (45.0 * 2.0 + 1.0) * c_u; }
  double mem_K() const { return mem_A() + 2.0 * (15.0 * 2.0 + 1.0) * c_p(); }
  double sparse_gca() const { return n_fill * mem_A() / 8.0; }
  double elementwise_gca() const { return 3.0 * 16.0 * 6.0 / 8.0 * c_u; }
  double stencil_gca() const { return 3.0 * 15.0 / 8.0 * c_u; }

  double pde() const { return 2.0; }
  double fgmres() const { return 2.0 + 2.0 * n_restart; }
  double preconditioner() const { return 4.0; }

  struct Column
  {
    std::string name;
    double fine;
    double coarse;
  };

  // Strategy columns, with the rows shared by all of them given by pde/fgmres/preconditioner.
  std::vector<Column> columns() const
  {
    return {{"matrix-based", mem_K(), sparse_gca()},
            {"sparse-gca", 0.0, sparse_gca()},
            {"agca", 0.0, c_agca * elementwise_gca()},
            {"agca-stencil", 0.0, c_agca * stencil_gca()},
            {"dca", 0.0, 0.0}};
  }

  double total(const Column &c) const { return pde() + fgmres() + preconditioner() + c.fine + c.coarse; }
};

inline MemoryModel3D memory_model_3d(double n_fill = 1.0, int n_restart = 30, double c_agca = 1.0,
                                     double c_u = kVelocityShare3D)
{
  MemoryModel3D m{n_fill, n_restart, c_agca, c_u};
  m.validate();
  return m;
}

inline void write_memory_table(std::ostream &os, const MemoryModel3D &m)
{
  os << "quantity,value_NL\n";
  os << "c_u," << m.c_u << '\n';
  os << "Mem_A," << m.mem_A() << '\n';
  os << "Mem_K," << m.mem_K() << '\n';
  os << "sparse_gca," << m.sparse_gca() << '\n';
  os << "elementwise_gca," << m.elementwise_gca() << '\n';
  os << "stencil_gca," << m.stencil_gca() << '\n';
  os << "\nrow";
  const auto cols = m.columns();
  for (const auto &c : cols)
  {
    os << ',' << c.name;
  }
  os << '\n';
  auto row = [&](const char *name, auto &&value) {
    os << name;
    for (const auto &c : cols)
    {
      os << ',' << value(c);
    }
    os << '\n';
  };
  row("pde", [&](const auto &) { return m.pde(); });
  row("fgmres", [&](const auto &) { return m.fgmres(); });
  row("preconditioner", [&](const auto &) { return m.preconditioner(); });
  row("fine_grid", [](const auto &c) { return c.fine; });
  row("coarse_grid", [](const auto &c) { return c.coarse; });
  row("total", [&](const auto &c) { return m.total(c); });
}

//
// Measured memory of a 2D AGCA hierarchy. N_L counts the velocity DoFs on level L and the
// pressure DoFs on level L-1. The reference constants follow the 3D derivation with 2D counts:
// 2 elements per vertex, coarse-grid factor 1/4 and c_u = 2 / (2 + 1/4) = 8/9.
//
struct MemoryTally2D
{
  std::size_t n_velocity = 0;
  std::size_t n_pressure = 0;
  std::size_t n_total = 0;  // N_L
  std::size_t gca_matrices = 0;
  std::size_t stored_entries = 0;
  std::size_t stored_bytes = 0;
  double c_agca = 0.0;
  int n_restart = 30;

  static constexpr double kVelocityShare = 8.0 / 9.0;

  double measured_per_NL() const
  {
    return n_total ? static_cast<double>(stored_entries) / static_cast<double>(n_total) : 0.0;
  }

  // c_agca * 36 entries * 2 elements per vertex * 1/4 * (velocity vertices = c_u N_L / 2)
  double model_per_NL() const { return c_agca * 36.0 * 2.0 * 0.25 * (kVelocityShare / 2.0); }

  double fgmres_per_NL() const { return 2.0 + 2.0 * n_restart; }
};

template <class Phys>
MemoryTally2D memory_tally_2d(const AgcaHierarchy<Phys> &h, int n_restart = 30)
{
  const auto &mesh = h.mesh();
  const int L = mesh.max_level();
  MemoryTally2D t;
  t.n_velocity = static_cast<std::size_t>(Phys::components) * mesh.num_vertices(L);
  t.n_pressure = L >= 1 ? mesh.num_vertices(L - 1) : 0;
  t.n_total = t.n_velocity + t.n_pressure;
  t.gca_matrices = h.store().stored_matrices();
  t.stored_entries = h.store().stored_entries();
  t.stored_bytes = h.store().stored_bytes();
  t.c_agca = h.plan().c_agca();
  t.n_restart = n_restart;
  return t;
}

inline void write_memory_tally(std::ostream &os, const MemoryTally2D &t)
{
  os << "quantity,value\n";
  os << "N_velocity," << t.n_velocity << '\n';
  os << "N_pressure," << t.n_pressure << '\n';
  os << "N_L," << t.n_total << '\n';
  os << "c_agca," << t.c_agca << '\n';
  os << "gca_matrices," << t.gca_matrices << '\n';
  os << "stored_entries," << t.stored_entries << '\n';
  os << "stored_bytes," << t.stored_bytes << '\n';
  os << "stored_per_NL," << t.measured_per_NL() << '\n';
  os << "model_elementwise_per_NL," << t.model_per_NL() << '\n';
  os << "fgmres_per_NL," << t.fgmres_per_NL() << '\n';
}

}  // namespace agca::bench
