// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "agca/common.hpp"

namespace agca
{

//
// Macro grid of the unit square: nx x ny squares, each split into a lower and an upper
// triangle along the (1,1) diagonal. Macro element 2*(cj*nx+ci) is the lower triangle
// (ci,cj),(ci+1,cj),(ci+1,cj+1) and 2*(cj*nx+ci)+1 the upper triangle
// (ci,cj),(ci+1,cj+1),(ci,cj+1). Both are positively oriented.
//
class MacroGrid
{
public:
  MacroGrid(int nx, int ny) : nx_(nx), ny_(ny)
  {
    if (nx < 1 || ny < 1)
    {
      throw ArgumentError("macro grid needs nx, ny >= 1 (got " + std::to_string(nx) + ", " +
                          std::to_string(ny) + ")");
    }
    vertices_.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (int j = 0; j <= ny; ++j)
    {
      for (int i = 0; i <= nx; ++i)
      {
        vertices_.push_back({static_cast<double>(i) / nx, static_cast<double>(j) / ny});
        boundary_.push_back(i == 0 || i == nx || j == 0 || j == ny);
      }
    }
    for (int cj = 0; cj < ny; ++cj)
    {
      for (int ci = 0; ci < nx; ++ci)
      {
        const int v00 = cj * (nx + 1) + ci;
        const int v10 = v00 + 1;
        const int v01 = v00 + (nx + 1);
        const int v11 = v01 + 1;
        elements_.push_back({v00, v10, v11});
        elements_.push_back({v00, v11, v01});
      }
    }
  }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_elements() const { return elements_.size(); }
  const std::vector<Point> &vertices() const { return vertices_; }
  const std::array<int, 3> &element(std::size_t m) const { return elements_.at(m); }
  bool is_boundary_vertex(std::size_t v) const { return boundary_.at(v); }

  // Level-0 lattice coordinates of a macro vertex.
  LatticeCoord vertex_lattice(std::size_t v) const
  {
    const auto n = static_cast<std::int64_t>(nx_ + 1);
    return {static_cast<std::int64_t>(v) % n, static_cast<std::int64_t>(v) / n};
  }

  std::array<LatticeCoord, 3> element_lattice(std::size_t m) const
  {
    const auto &e = element(m);
    return {vertex_lattice(e[0]), vertex_lattice(e[1]), vertex_lattice(e[2])};
  }

  double signed_area(std::size_t m) const
  {
    const auto &e = element(m);
    const Point a = vertices_[e[0]], b = vertices_[e[1]], c = vertices_[e[2]];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  }

private:
  int nx_, ny_;
  std::vector<Point> vertices_;
  std::vector<bool> boundary_;
  std::vector<std::array<int, 3>> elements_;
};

enum class MicroType : std::uint8_t
{
  Up,
  Down
};

// Position of a micro element in its macro's barycentric lattice with n = 2^l subdivisions.
// Up elements (i,j) have local vertices (i,j),(i+1,j),(i,j+1) for i+j <= n-1; down elements
// have (i+1,j),(i+1,j+1),(i,j+1) for i+j <= n-2.
struct MicroCoord
{
  std::int64_t i = 0;
  std::int64_t j = 0;
  MicroType type = MicroType::Up;
};

struct MicroElement
{
  std::size_t macro = 0;
  int level = 0;
  std::size_t index = 0;
  std::array<Point, 3> vertices;
  std::array<std::size_t, 3> dofs;  // global level-l vertex indices
  std::array<bool, 3> boundary;

  double area() const
  {
    const Point a = vertices[0], b = vertices[1], c = vertices[2];
    return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
  }

  Point centroid() const
  {
    return {(vertices[0].x + vertices[1].x + vertices[2].x) / 3.0,
            (vertices[0].y + vertices[1].y + vertices[2].y) / 3.0};
  }

  Point at_barycentric(const std::array<double, 3> &bary) const
  {
    return {bary[0] * vertices[0].x + bary[1] * vertices[1].x + bary[2] * vertices[2].x,
            bary[0] * vertices[0].y + bary[1] * vertices[1].y + bary[2] * vertices[2].y};
  }
};

//
// Local-to-global DoF map of a micro element. Scalar fields use the level-l lattice vertex
// index directly; vector fields are component-major, so component c of vertex v lives at
// c * num_vertices(l) + v and local index c * 3 + k.
//
struct DofMap
{
  std::array<std::size_t, 6> global{};
  std::array<bool, 6> boundary{};
  int size = 3;

  static DofMap scalar(const MicroElement &m)
  {
    DofMap d;
    d.size = 3;
    for (int k = 0; k < 3; ++k)
    {
      d.global[k] = m.dofs[k];
      d.boundary[k] = m.boundary[k];
    }
    return d;
  }

  static DofMap vector(const MicroElement &m, std::size_t num_vertices)
  {
    DofMap d;
    d.size = 6;
    for (int c = 0; c < 2; ++c)
    {
      for (int k = 0; k < 3; ++k)
      {
        d.global[c * 3 + k] = c * num_vertices + m.dofs[k];
        d.boundary[c * 3 + k] = m.boundary[k];
      }
    }
    return d;
  }

  static DofMap make(const MicroElement &m, int components, std::size_t num_vertices)
  {
    return components == 1 ? scalar(m) : vector(m, num_vertices);
  }

  // Position of a global index in this element, or -1.
  int local_of(std::size_t g) const
  {
    for (int k = 0; k < size; ++k)
    {
      if (global[k] == g)
      {
        return k;
      }
    }
    return -1;
  }
};

//
// Uniformly refined hierarchy over a macro grid. Levels 0..L share the lattice numbering
// index(l, i, j) = j * (nx*2^l + 1) + i, so the hierarchy needs no per-level storage beyond the
// macro grid itself. Immutable after construction.
//
class MeshHierarchy
{
public:
  MeshHierarchy(MacroGrid macro, int max_level) : macro_(std::move(macro)), max_level_(max_level)
  {
    if (max_level < 0)
    {
      throw ArgumentError("refinement level must be >= 0");
    }
    if (max_level > 20)
    {
      throw ArgumentError("refinement level too large");
    }
  }

  const MacroGrid &macro() const { return macro_; }
  int max_level() const { return max_level_; }
  std::size_t num_macros() const { return macro_.num_elements(); }

  std::int64_t cells_x(int l) const { return static_cast<std::int64_t>(macro_.nx()) << l; }
  std::int64_t cells_y(int l) const { return static_cast<std::int64_t>(macro_.ny()) << l; }
  double h_x(int l) const { return 1.0 / static_cast<double>(cells_x(l)); }
  double h_y(int l) const { return 1.0 / static_cast<double>(cells_y(l)); }

  std::size_t num_vertices(int l) const
  {
    check_level(l);
    return static_cast<std::size_t>((cells_x(l) + 1) * (cells_y(l) + 1));
  }

  // Micro elements per macro on level l.
  std::size_t micro_per_macro(int l) const
  {
    check_level(l);
    return std::size_t{1} << (2 * l);
  }

  std::size_t num_micro_elements(int l) const { return micro_per_macro(l) * num_macros(); }

  std::size_t vertex_index(int l, LatticeCoord c) const
  {
    return static_cast<std::size_t>(c.j * (cells_x(l) + 1) + c.i);
  }

  LatticeCoord vertex_lattice(int l, std::size_t idx) const
  {
    const auto n = cells_x(l) + 1;
    return {static_cast<std::int64_t>(idx) % n, static_cast<std::int64_t>(idx) / n};
  }

  Point vertex_coord(int l, LatticeCoord c) const
  {
    return {static_cast<double>(c.i) / static_cast<double>(cells_x(l)),
            static_cast<double>(c.j) / static_cast<double>(cells_y(l))};
  }

  Point vertex_coord(int l, std::size_t idx) const { return vertex_coord(l, vertex_lattice(l, idx)); }

  bool is_boundary(int l, LatticeCoord c) const
  {
    return c.i == 0 || c.j == 0 || c.i == cells_x(l) || c.j == cells_y(l);
  }

  bool is_boundary(int l, std::size_t idx) const { return is_boundary(l, vertex_lattice(l, idx)); }

  // Per-vertex boundary flags on level l (1 = Dirichlet).
  std::vector<char> boundary_mask(int l) const
  {
    std::vector<char> mask(num_vertices(l));
    for (std::size_t v = 0; v < mask.size(); ++v)
    {
      mask[v] = is_boundary(l, v) ? 1 : 0;
    }
    return mask;
  }

  // Boundary flags repeated per component (component-major layout).
  std::vector<char> boundary_mask(int l, int components) const
  {
    const auto scalar = boundary_mask(l);
    std::vector<char> mask;
    mask.reserve(scalar.size() * static_cast<std::size_t>(components));
    for (int c = 0; c < components; ++c)
    {
      mask.insert(mask.end(), scalar.begin(), scalar.end());
    }
    return mask;
  }

  // Row-major numbering within a macro: row j holds up(0,j), down(0,j), up(1,j), ...,
  // up(n-1-j,j). Offset of row j is 2jn - j^2.
  static std::size_t micro_index(std::int64_t n, MicroCoord c)
  {
    return static_cast<std::size_t>(2 * c.j * n - c.j * c.j + 2 * c.i +
                                    (c.type == MicroType::Down ? 1 : 0));
  }

  static MicroCoord micro_coord(std::int64_t n, std::size_t index)
  {
    // Find row j with 2jn - j^2 <= index < 2(j+1)n - (j+1)^2.
    std::int64_t j = 0;
    const auto idx = static_cast<std::int64_t>(index);
    while (2 * (j + 1) * n - (j + 1) * (j + 1) <= idx)
    {
      ++j;
    }
    const std::int64_t r = idx - (2 * j * n - j * j);
    return {r / 2, j, (r % 2) ? MicroType::Down : MicroType::Up};
  }

  // Local (barycentric lattice) coordinates of the 3 vertices of a micro element.
  static std::array<LatticeCoord, 3> local_vertices(MicroCoord c)
  {
    if (c.type == MicroType::Up)
    {
      return {LatticeCoord{c.i, c.j}, LatticeCoord{c.i + 1, c.j}, LatticeCoord{c.i, c.j + 1}};
    }
    return {LatticeCoord{c.i + 1, c.j}, LatticeCoord{c.i + 1, c.j + 1}, LatticeCoord{c.i, c.j + 1}};
  }

  // Global level-l lattice coordinates of a macro-local lattice point.
  LatticeCoord to_global(std::size_t macro, int l, LatticeCoord local) const
  {
    const auto v = macro_.element_lattice(macro);
    const std::int64_t s = std::int64_t{1} << l;
    return s * v[0] + local.i * (v[1] - v[0]) + local.j * (v[2] - v[0]);
  }

  MicroElement micro_element(std::size_t macro, int l, std::size_t index) const
  {
    check_macro(macro);
    check_level(l);
    const std::int64_t n = std::int64_t{1} << l;
    if (index >= micro_per_macro(l))
    {
      throw ArgumentError("micro element index out of range");
    }
    return make_element(macro, l, index, micro_coord(n, index));
  }

  // Calls f(MicroElement) for all micro elements of a macro on level l in index order.
  template <class F>
  void for_each_micro_element(std::size_t macro, int l, F &&f) const
  {
    check_macro(macro);
    check_level(l);
    const std::int64_t n = std::int64_t{1} << l;
    std::size_t index = 0;
    for (std::int64_t j = 0; j < n; ++j)
    {
      for (std::int64_t i = 0; i < n - j; ++i)
      {
        f(make_element(macro, l, index++, {i, j, MicroType::Up}));
        if (i < n - j - 1)
        {
          f(make_element(macro, l, index++, {i, j, MicroType::Down}));
        }
      }
    }
  }

  MicroElement make_element(std::size_t macro, int l, std::size_t index, MicroCoord c) const
  {
    const auto lv = local_vertices(c);
    MicroElement m;
    m.macro = macro;
    m.level = l;
    m.index = index;
    for (int k = 0; k < 3; ++k)
    {
      const auto g = to_global(macro, l, lv[k]);
      m.vertices[k] = vertex_coord(l, g);
      m.dofs[k] = vertex_index(l, g);
      m.boundary[k] = is_boundary(l, g);
    }
    return m;
  }

  std::vector<MicroElement> micro_elements(std::size_t macro, int l) const
  {
    std::vector<MicroElement> out;
    out.reserve(micro_per_macro(l));
    for_each_micro_element(macro, l, [&](const MicroElement &m) { out.push_back(m); });
    return out;
  }

  //
  // Children of a micro element on level l+1. Child k (k < 3) contains parent vertex k; child 3
  // is the central, inverted element.
  //
  std::array<std::size_t, 4> children(std::size_t macro, int l, std::size_t index) const
  {
    check_macro(macro);
    check_level(l);
    if (l >= max_level_)
    {
      throw ArgumentError("micro element on the finest level has no children");
    }
    const std::int64_t n = std::int64_t{1} << l;
    const std::int64_t nf = 2 * n;
    const auto c = micro_coord(n, index);
    const std::int64_t i2 = 2 * c.i, j2 = 2 * c.j;
    if (c.type == MicroType::Up)
    {
      return {micro_index(nf, {i2, j2, MicroType::Up}), micro_index(nf, {i2 + 1, j2, MicroType::Up}),
              micro_index(nf, {i2, j2 + 1, MicroType::Up}), micro_index(nf, {i2, j2, MicroType::Down})};
    }
    return {micro_index(nf, {i2 + 1, j2, MicroType::Down}),
            micro_index(nf, {i2 + 1, j2 + 1, MicroType::Down}),
            micro_index(nf, {i2, j2 + 1, MicroType::Down}),
            micro_index(nf, {i2 + 1, j2 + 1, MicroType::Up})};
  }

  // Plain-text dump: one "v x y boundary" line per level-l vertex, then "e macro index v0 v1 v2".
  void dump(std::ostream &os, int l) const
  {
    os << "# level " << l << " vertices " << num_vertices(l) << " elements "
       << num_micro_elements(l) << "\n";
    for (std::size_t v = 0; v < num_vertices(l); ++v)
    {
      const Point p = vertex_coord(l, v);
      os << "v " << v << ' ' << p.x << ' ' << p.y << ' ' << (is_boundary(l, v) ? 1 : 0) << "\n";
    }
    for (std::size_t m = 0; m < num_macros(); ++m)
    {
      for_each_micro_element(m, l, [&](const MicroElement &e) {
        os << "e " << m << ' ' << e.index << ' ' << e.dofs[0] << ' ' << e.dofs[1] << ' '
           << e.dofs[2] << "\n";
      });
    }
  }

private:
  void check_level(int l) const
  {
    if (l < 0 || l > max_level_)
    {
      throw ArgumentError("level " + std::to_string(l) + " outside [0, " +
                          std::to_string(max_level_) + "]");
    }
  }

  void check_macro(std::size_t m) const
  {
    if (m >= macro_.num_elements())
    {
      throw ArgumentError("macro index " + std::to_string(m) + " out of range");
    }
  }

  MacroGrid macro_;
  int max_level_;
};

inline MacroGrid build_macro_grid(int nx, int ny) { return MacroGrid(nx, ny); }

inline MeshHierarchy refine_hierarchy(MacroGrid macro, int max_level)
{
  return MeshHierarchy(std::move(macro), max_level);
}

}  // namespace agca
