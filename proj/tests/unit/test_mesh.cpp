// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <map>
#include <set>
#include <sstream>

#include "agca/mesh.hpp"

using namespace agca;

TEST(MacroGrid, SmallestSplit)
{
  MacroGrid g(1, 1);
  EXPECT_EQ(g.num_elements(), 2u);
  EXPECT_EQ(g.num_vertices(), 4u);
}

TEST(MacroGrid, CountsForEightByEight)
{
  MacroGrid g(8, 8);
  EXPECT_EQ(g.num_elements(), 128u);
  EXPECT_EQ(g.num_vertices(), 81u);
}

TEST(MacroGrid, AreasArePositiveAndTile)
{
  MacroGrid g(4, 4);
  double total = 0.0;
  for (std::size_t m = 0; m < g.num_elements(); ++m)
  {
    EXPECT_GT(g.signed_area(m), 0.0);
    total += g.signed_area(m);
  }
  EXPECT_NEAR(total, 1.0, 1e-14);
}

TEST(MacroGrid, InteriorEdgesSharedByTwo)
{
  MacroGrid g(3, 2);
  std::map<std::pair<std::int64_t, std::int64_t>, int> edges;
  auto key = [](LatticeCoord a, LatticeCoord b) {
    const std::int64_t ka = a.j * 1000 + a.i, kb = b.j * 1000 + b.i;
    return std::make_pair(std::min(ka, kb), std::max(ka, kb));
  };
  for (std::size_t m = 0; m < g.num_elements(); ++m)
  {
    const auto v = g.element_lattice(m);
    for (int k = 0; k < 3; ++k)
    {
      ++edges[key(v[static_cast<std::size_t>(k)], v[static_cast<std::size_t>((k + 1) % 3)])];
    }
  }
  for (const auto &[e, n] : edges)
  {
    const auto a = e.first, b = e.second;
    const bool boundary = (a % 1000 == b % 1000 && (a % 1000 == 0 || a % 1000 == 3)) ||
                          (a / 1000 == b / 1000 && (a / 1000 == 0 || a / 1000 == 2));
    EXPECT_EQ(n, boundary ? 1 : 2);
  }
}

TEST(MacroGrid, RejectsNonPositiveCounts)
{
  EXPECT_THROW(MacroGrid(0, 3), ArgumentError);
  EXPECT_THROW(MacroGrid(2, -1), ArgumentError);
}

TEST(MeshHierarchy, MicroCountPerLevel)
{
  MeshHierarchy h(MacroGrid(1, 1), 2);
  EXPECT_EQ(h.num_micro_elements(2), 32u);
  for (int l = 0; l <= 2; ++l)
  {
    EXPECT_EQ(h.num_micro_elements(l), (std::size_t{1} << (2 * l)) * h.num_macros());
  }
}

TEST(MeshHierarchy, VertexCountFormula)
{
  MeshHierarchy h(MacroGrid(8, 8), 3);
  EXPECT_EQ(h.num_vertices(3), 4225u);
  MeshHierarchy r(MacroGrid(3, 5), 2);
  EXPECT_EQ(r.num_vertices(2), (3u * 4 + 1) * (5u * 4 + 1));
}

TEST(MeshHierarchy, LevelsAreNested)
{
  MeshHierarchy h(MacroGrid(2, 2), 2);
  std::set<std::pair<double, double>> fine;
  for (std::size_t v = 0; v < h.num_vertices(2); ++v)
  {
    const Point p = h.vertex_coord(2, v);
    fine.insert({p.x, p.y});
  }
  for (std::size_t v = 0; v < h.num_vertices(1); ++v)
  {
    const Point p = h.vertex_coord(1, v);
    EXPECT_TRUE(fine.count({p.x, p.y}));
  }
}

TEST(MeshHierarchy, LatticeRoundTrip)
{
  MeshHierarchy h(MacroGrid(3, 2), 3);
  for (int l = 0; l <= 3; ++l)
  {
    for (std::size_t v = 0; v < h.num_vertices(l); ++v)
    {
      EXPECT_EQ(h.vertex_index(l, h.vertex_lattice(l, v)), v);
    }
  }
}

TEST(MeshHierarchy, BoundaryMaskIsTheSquareBoundary)
{
  MeshHierarchy h(MacroGrid(2, 3), 2);
  for (int l = 0; l <= 2; ++l)
  {
    const auto mask = h.boundary_mask(l);
    for (std::size_t v = 0; v < mask.size(); ++v)
    {
      const Point p = h.vertex_coord(l, v);
      const bool on = p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0;
      EXPECT_EQ(static_cast<bool>(mask[v]), on);
    }
    const auto vm = h.boundary_mask(l, 2);
    ASSERT_EQ(vm.size(), 2 * mask.size());
    for (std::size_t v = 0; v < mask.size(); ++v)
    {
      EXPECT_EQ(vm[v], mask[v]);
      EXPECT_EQ(vm[mask.size() + v], mask[v]);
    }
  }
}

TEST(MicroElements, LevelZeroIsTheMacro)
{
  MeshHierarchy h(MacroGrid(2, 2), 2);
  for (std::size_t M = 0; M < h.num_macros(); ++M)
  {
    const auto els = h.micro_elements(M, 0);
    ASSERT_EQ(els.size(), 1u);
    EXPECT_NEAR(els[0].area(), h.macro().signed_area(M), 1e-15);
  }
  EXPECT_EQ(h.micro_elements(0, 1).size(), 4u);
}

TEST(MicroElements, AreasMatchAndVerticesOnLattice)
{
  MeshHierarchy h(MacroGrid(2, 1), 3);
  for (std::size_t M = 0; M < h.num_macros(); ++M)
  {
    for (int l = 0; l <= 3; ++l)
    {
      double sum = 0.0;
      h.for_each_micro_element(M, l, [&](const MicroElement &m) {
        EXPECT_GT(m.area(), 0.0);
        sum += m.area();
        for (int k = 0; k < 3; ++k)
        {
          EXPECT_EQ(h.vertex_coord(l, m.dofs[static_cast<std::size_t>(k)]), m.vertices[static_cast<std::size_t>(k)]);
        }
      });
      EXPECT_NEAR(sum, h.macro().signed_area(M), 1e-14);
    }
  }
}

TEST(MicroElements, InterfaceVerticesShareIndices)
{
  MeshHierarchy h(MacroGrid(2, 2), 2);
  std::map<std::pair<double, double>, std::size_t> seen;
  for (std::size_t M = 0; M < h.num_macros(); ++M)
  {
    h.for_each_micro_element(M, 2, [&](const MicroElement &m) {
      for (int k = 0; k < 3; ++k)
      {
        const auto key = std::make_pair(m.vertices[static_cast<std::size_t>(k)].x, m.vertices[static_cast<std::size_t>(k)].y);
        auto [it, added] = seen.emplace(key, m.dofs[static_cast<std::size_t>(k)]);
        if (!added)
        {
          EXPECT_EQ(it->second, m.dofs[static_cast<std::size_t>(k)]);
        }
      }
    });
  }
  EXPECT_EQ(seen.size(), h.num_vertices(2));
}

TEST(MicroElements, InvalidArguments)
{
  MeshHierarchy h(MacroGrid(1, 1), 2);
  EXPECT_THROW(h.micro_elements(2, 0), ArgumentError);
  EXPECT_THROW(h.micro_elements(0, 3), ArgumentError);
  EXPECT_THROW(h.children(0, 2, 0), ArgumentError);
}

TEST(Children, ReferenceTriangleRedRefinement)
{
  // Lower macro of a 1x1 grid: (0,0), (1,0), (1,1).
  MeshHierarchy h(MacroGrid(1, 1), 1);
  const auto parent = h.micro_element(0, 0, 0);
  const auto kids = h.children(0, 0, 0);
  std::set<std::pair<double, double>> allowed;
  for (int a = 0; a < 3; ++a)
  {
    const Point p = parent.vertices[static_cast<std::size_t>(a)];
    allowed.insert({p.x, p.y});
    const Point q = 0.5 * (p + parent.vertices[static_cast<std::size_t>((a + 1) % 3)]);
    allowed.insert({q.x, q.y});
  }
  for (int k = 0; k < 4; ++k)
  {
    const auto c = h.micro_element(0, 1, kids[static_cast<std::size_t>(k)]);
    EXPECT_NEAR(c.area(), parent.area() / 4.0, 1e-15);
    int shared = 0;
    for (const Point &p : c.vertices)
    {
      EXPECT_TRUE(allowed.count({p.x, p.y}));
      for (const Point &q : parent.vertices)
      {
        shared += p == q ? 1 : 0;
      }
    }
    if (k < 3)
    {
      EXPECT_EQ(shared, 1);
      bool has_own = false;
      for (const Point &p : c.vertices)
      {
        has_own = has_own || p == parent.vertices[static_cast<std::size_t>(k)];
      }
      EXPECT_TRUE(has_own);
    }
    else
    {
      EXPECT_EQ(shared, 0);
    }
  }
}

TEST(DofMap, RoundTrip)
{
  MeshHierarchy h(MacroGrid(2, 2), 2);
  const auto m = h.micro_element(3, 2, 5);
  for (int comps : {1, 2})
  {
    const auto d = DofMap::make(m, comps, h.num_vertices(2));
    EXPECT_EQ(d.size, 3 * comps);
    for (int k = 0; k < d.size; ++k)
    {
      EXPECT_EQ(d.local_of(d.global[static_cast<std::size_t>(k)]), k);
    }
  }
  const auto v = DofMap::vector(m, h.num_vertices(2));
  EXPECT_EQ(v.global[3], h.num_vertices(2) + v.global[0]);
}

TEST(Dump, ListsVerticesAndElements)
{
  MeshHierarchy h(MacroGrid(1, 1), 1);
  std::ostringstream os;
  h.dump(os, 1);
  const std::string s = os.str();
  std::size_t vlines = 0, elines = 0;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line))
  {
    vlines += line.rfind("v ", 0) == 0 ? 1 : 0;
    elines += line.rfind("e ", 0) == 0 ? 1 : 0;
  }
  EXPECT_EQ(vlines, 9u);
  EXPECT_EQ(elines, 8u);
}
