// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <limits>
#include <sstream>

#include "agca/bench/problems.hpp"
#include "agca/coarsening.hpp"
#include "agca/selftest.hpp"
#include "oracles.hpp"

using namespace agca;

namespace
{

bench::SinkerProblem sinker(int family, double dr)
{
  bench::SinkerProblem p;
  p.family = family;
  p.dynamic_ratio = dr;
  return p;
}

std::function<double(double, double)> wrap(const ScalarField &f)
{
  return [f](double x, double y) { return f({x, y}); };
}

// Recursive dense Galerkin products P^T A P from the oracle fine operator.
template <class Phys>
void check_against_dense_triple_product(BoundaryTreatment bc)
{
  MeshHierarchy mesh(MacroGrid(1, 1), 2);
  const auto eta = sinker(2, 1e4).viscosity();
  CoefficientEval ev(eta, EvalMode::Analytic, mesh);
  HierarchyOptions opt;
  opt.boundary = bc;
  AgcaHierarchy<Phys> h(mesh, ev, CoarseningPlan::uniform(mesh.num_macros(), true), opt);
  const int c = Phys::components;
  const bool dir = bc == BoundaryTreatment::Dirichlet;
  oracle::Dense A = oracle::assemble({1, 1, 2}, c, wrap(eta));
  if (dir)
  {
    const auto I = oracle::interior({1, 1, 2}, c);
    A = I * A * I;
  }
  const auto I2 = oracle::interior({1, 1, 2}, c);
  const auto fineref = dir ? oracle::pinned(A, I2) : A;
  EXPECT_LE(oracle::rel_frobenius(oracle::to_dense(h.level(2).assemble()), fineref), 1e-13);
  for (int l = 1; l >= 0; --l)
  {
    const auto P = oracle::prolongation({1, 1, l}, c);
    A = P.transpose() * A * P;
    const auto I = oracle::interior({1, 1, l}, c);
    if (dir)
    {
      A = I * A * I;
    }
    const auto ref = dir ? oracle::pinned(A, I) : A;
    EXPECT_LE(oracle::rel_frobenius(oracle::to_dense(h.level(l).assemble()), ref), 1e-12) << "level " << l;
  }
}

}  // namespace

TEST(Galerkin, DiffusionMatchesDenseTripleProduct)
{
  check_against_dense_triple_product<DiffusionPhysics>(BoundaryTreatment::None);
  check_against_dense_triple_product<DiffusionPhysics>(BoundaryTreatment::Dirichlet);
}

TEST(Galerkin, ViscousMatchesDenseTripleProduct)
{
  check_against_dense_triple_product<ViscousPhysics>(BoundaryTreatment::None);
  check_against_dense_triple_product<ViscousPhysics>(BoundaryTreatment::Dirichlet);
}

TEST(Galerkin, ViscousBlocksCoarsenSeparately)
{
  // Each 3x3 component block of a stored matrix is the Galerkin product of the fine block.
  MeshHierarchy mesh(MacroGrid(1, 1), 1);
  const auto eta = sinker(2, 1e4).viscosity();
  CoefficientEval ev(eta, EvalMode::Analytic, mesh);
  HierarchyOptions opt;
  opt.boundary = BoundaryTreatment::None;
  AgcaHierarchy<ViscousPhysics> h(mesh, ev, CoarseningPlan::uniform(2, true), opt);
  const auto q = quadrature(2);
  for (std::size_t M = 0; M < 2; ++M)
  {
    const auto &G = h.store().matrix(M, 0, 0);
    const auto kids = mesh.children(M, 0, 0);
    for (int bi = 0; bi < 2; ++bi)
    {
      for (int bj = 0; bj < 2; ++bj)
      {
        Eigen::Matrix3d ref = Eigen::Matrix3d::Zero();
        for (int c = 0; c < 4; ++c)
        {
          const auto P = local_interp(mesh, M, 0, 0, c);
          const auto F = local_viscous(mesh.micro_element(M, 1, kids[static_cast<std::size_t>(c)]), ev, q);
          Eigen::Matrix3d Pe, Fe;
          for (int i = 0; i < 3; ++i)
          {
            for (int j = 0; j < 3; ++j)
            {
              Pe(i, j) = P(i, j);
              Fe(i, j) = F(3 * bi + i, 3 * bj + j);
            }
          }
          ref += Pe.transpose() * Fe * Pe;
        }
        for (int i = 0; i < 3; ++i)
        {
          for (int j = 0; j < 3; ++j)
          {
            EXPECT_NEAR(G(3 * bi + i, 3 * bj + j), ref(i, j), 1e-12 * ref.cwiseAbs().maxCoeff());
          }
        }
      }
    }
  }
}

TEST(Galerkin, ConstantViscosityCollapsesToDca)
{
  MeshHierarchy mesh(MacroGrid(4, 4), 3);
  CoefficientEval ev([](Point) { return 3.0; }, EvalMode::Analytic, mesh);
  AgcaHierarchy<ViscousPhysics> hv(mesh, ev, CoarseningPlan::uniform(mesh.num_macros(), true));
  EXPECT_LE(selftest::gca_dca_local_defect(hv), 1e-12);
  AgcaHierarchy<DiffusionPhysics> hd(mesh, ev, CoarseningPlan::uniform(mesh.num_macros(), true));
  EXPECT_LE(selftest::gca_dca_local_defect(hd), 1e-12);
}

TEST(Galerkin, StoredMatricesSymmetric)
{
  MeshHierarchy mesh(MacroGrid(2, 2), 3);
  const auto eta = sinker(4, 1e6).viscosity();
  CoefficientEval ev(eta, EvalMode::Analytic, mesh);
  AgcaHierarchy<ViscousPhysics> h(mesh, ev, CoarseningPlan::uniform(mesh.num_macros(), true));
  for (std::size_t M = 0; M < mesh.num_macros(); ++M)
  {
    for (int l = 0; l < 3; ++l)
    {
      for (std::size_t e = 0; e < mesh.micro_per_macro(l); ++e)
      {
        const auto &A = h.store().matrix(M, l, e);
        double diff = 0.0;
        for (int i = 0; i < 6; ++i)
        {
          for (int j = 0; j < 6; ++j)
          {
            diff = std::max(diff, std::abs(A(i, j) - A(j, i)));
          }
        }
        EXPECT_LE(diff, 1e-13 * std::max(A.frobenius(), 1e-300));
      }
    }
  }
}

TEST(Galerkin, CoarseOperatorsStaySpd)
{
  MeshHierarchy mesh(MacroGrid(2, 2), 2);
  const auto eta = sinker(2, 1e6).viscosity();
  CoefficientEval ev(eta, EvalMode::Analytic, mesh);
  AgcaHierarchy<ViscousPhysics> h(mesh, ev, select_macros(eta, mesh, 10.0));
  for (int l = 0; l <= 2; ++l)
  {
    const auto D = oracle::to_dense(h.level(l).assemble());
    Eigen::SelfAdjointEigenSolver<oracle::Dense> es(0.5 * (D + D.transpose()));
    EXPECT_GT(es.eigenvalues().minCoeff(), 0.0) << "level " << l;
  }
}

TEST(Dca, ScaleInvariantForConstantViscosity)
{
  MeshHierarchy mesh(MacroGrid(1, 1), 2);
  CoefficientEval ev([](Point) { return 2.0; }, EvalMode::Analytic, mesh);
  const auto q = quadrature(2);
  const auto parent = mesh.micro_element(0, 0, 0);
  const auto child = mesh.micro_element(0, 1, mesh.children(0, 0, 0)[0]);
  const auto A = dca_local<DiffusionPhysics>(parent, ev, q, BoundaryTreatment::None);
  const auto B = dca_local<DiffusionPhysics>(child, ev, q, BoundaryTreatment::None);
  for (int k = 0; k < 9; ++k)
  {
    EXPECT_NEAR(A.a[static_cast<std::size_t>(k)], B.a[static_cast<std::size_t>(k)], 1e-14);
  }
}

TEST(Dca, AlignedJumpIsPiecewiseConstant)
{
  MeshHierarchy mesh(MacroGrid(8, 8), 2);
  const auto p = sinker(1, 1e4);
  CoefficientEval ev(p.viscosity(), EvalMode::Analytic, mesh);
  CoefficientEval one([](Point) { return 1.0; }, EvalMode::Analytic, mesh);
  const auto q = quadrature(2);
  for (int l = 0; l <= 2; ++l)
  {
    for (std::size_t M = 0; M < mesh.num_macros(); ++M)
    {
      mesh.for_each_micro_element(M, l, [&](const MicroElement &m) {
        const double niveau = p.xi(m.centroid()) > 0.5 ? p.eta_high() : p.eta_low();
        const auto A = dca_local<ViscousPhysics>(m, ev, q, BoundaryTreatment::None);
        const auto R = dca_local<ViscousPhysics>(m, one, q, BoundaryTreatment::None);
        for (int k = 0; k < 36; ++k)
        {
          EXPECT_NEAR(A.a[static_cast<std::size_t>(k)], niveau * R.a[static_cast<std::size_t>(k)], 1e-12 * niveau);
        }
      });
    }
  }
}

TEST(Dca, AlignedJumpAgcaEqualsDca)
{
  MeshHierarchy mesh(MacroGrid(8, 8), 3);
  const auto eta = sinker(1, 1e4).viscosity();
  CoefficientEval ev(eta, EvalMode::Analytic, mesh);
  const auto plan = select_macros(eta, mesh, 10.0);
  EXPECT_GT(plan.num_gca(), 0u);
  AgcaHierarchy<ViscousPhysics> agca(mesh, ev, plan);
  AgcaHierarchy<ViscousPhysics> dca(mesh, ev, CoarseningPlan::uniform(mesh.num_macros(), false));
  for (int l = 0; l <= 3; ++l)
  {
    EXPECT_LE(selftest::relative_frobenius(agca.level(l).assemble(), dca.level(l).assemble()), 1e-12);
  }
}

TEST(SelectMacros, ConstantAndInfiniteThreshold)
{
  MeshHierarchy mesh(MacroGrid(4, 4), 2);
  for (double nu : {0.0, 1.0, 1e6})
  {
    const auto plan = select_macros([](Point) { return 5.0; }, mesh, nu);
    EXPECT_EQ(plan.num_gca(), 0u);
    EXPECT_EQ(plan.c_agca(), 0.0);
  }
  const auto inf = select_macros(sinker(4, 1e4).viscosity(), mesh, std::numeric_limits<double>::infinity());
  EXPECT_EQ(inf.num_gca(), 0u);
  EXPECT_THROW(select_macros([](Point) { return 1.0; }, mesh, -1.0), ArgumentError);
}

TEST(SelectMacros, DiskInterfaceMatchesSamplingOracle)
{
  const int nx = 8, L = 3;
  MeshHierarchy mesh(MacroGrid(nx, nx), L);
  const auto p = sinker(4, 1e4);
  const auto plan = select_macros(p.viscosity(), mesh, 10.0);
  std::vector<char> expect(mesh.num_macros(), 0);
  const oracle::Grid g{nx, nx, L};
  for (const auto &t : g.triangles())
  {
    const Eigen::Vector2d c = (t.x[0] + t.x[1] + t.x[2]) / 3.0;
    const int ci = static_cast<int>(c.x() * nx), cj = static_cast<int>(c.y() * nx);
    const double rx = c.x() * nx - ci, ry = c.y() * nx - cj;
    const std::size_t M = static_cast<std::size_t>(2 * (cj * nx + ci) + (ry > rx ? 1 : 0));
    int inside = 0;
    for (const auto &x : t.x)
    {
      inside += p.xi({x.x(), x.y()}) > 0.5 ? 1 : 0;
    }
    if (inside != 0 && inside != 3)
    {
      expect[M] = 1;
    }
  }
  ASSERT_EQ(plan.gca.size(), expect.size());
  std::size_t n = 0;
  for (std::size_t M = 0; M < expect.size(); ++M)
  {
    EXPECT_EQ(plan.is_gca(M), static_cast<bool>(expect[M])) << "macro " << M;
    n += expect[M] ? 1 : 0;
  }
  EXPECT_GT(n, 0u);
  EXPECT_DOUBLE_EQ(plan.c_agca(), static_cast<double>(n) / static_cast<double>(mesh.num_macros()));
}

TEST(SelectMacros, MonotoneInThreshold)
{
  MeshHierarchy mesh(MacroGrid(8, 8), 3);
  const auto p = sinker(3, 1e4);
  const auto eta = p.viscosity();
  const std::vector<double> nus{0.0, 0.1, 1.0, 10.0, 100.0, 1e3, 1e4, std::numeric_limits<double>::infinity()};
  CoarseningPlan prev = select_macros(eta, mesh, nus[0]);
  for (std::size_t k = 1; k < nus.size(); ++k)
  {
    const auto cur = select_macros(eta, mesh, nus[k]);
    for (std::size_t M = 0; M < mesh.num_macros(); ++M)
    {
      EXPECT_TRUE(!cur.is_gca(M) || prev.is_gca(M));
    }
    EXPECT_LE(cur.c_agca(), prev.c_agca());
    prev = cur;
  }
}

TEST(SelectMacros, StrictThreshold)
{
  // eta = 1 + 3x has gradient norm exactly 3.
  MeshHierarchy mesh(MacroGrid(2, 2), 1);
  auto eta = [](Point p) { return 1.0 + 3.0 * p.x; };
  const auto g = macro_max_gradients(eta, mesh);
  for (double v : g)
  {
    EXPECT_NEAR(v, 3.0, 1e-12);
  }
  EXPECT_EQ(select_macros(eta, mesh, 2.5).num_gca(), mesh.num_macros());
  EXPECT_EQ(select_macros(eta, mesh, 3.5).num_gca(), 0u);
}

TEST(Plan, PartitionAndFraction)
{
  MeshHierarchy mesh(MacroGrid(4, 4), 2);
  const auto plan = select_macros(sinker(4, 1e4).viscosity(), mesh, 10.0);
  const auto g = plan.gca_macros(), d = plan.dca_macros();
  EXPECT_EQ(g.size() + d.size(), mesh.num_macros());
  EXPECT_EQ(g.size(), plan.num_gca());
  EXPECT_DOUBLE_EQ(plan.c_agca(), static_cast<double>(g.size()) / static_cast<double>(mesh.num_macros()));
}

TEST(Hierarchy, EmptyPlanStoresNothingAndFullPlanCounts)
{
  MeshHierarchy mesh(MacroGrid(2, 2), 3);
  const auto eta = sinker(2, 1e4).viscosity();
  CoefficientEval ev(eta, EvalMode::Analytic, mesh);
  AgcaHierarchy<ViscousPhysics> dca(mesh, ev, CoarseningPlan::uniform(mesh.num_macros(), false));
  EXPECT_EQ(dca.store().stored_matrices(), 0u);
  EXPECT_EQ(dca.store().stored_bytes(), 0u);
  const auto plan = select_macros(eta, mesh, 10.0);
  AgcaHierarchy<ViscousPhysics> agca(mesh, ev, plan);
  std::size_t elements = 0;
  for (int l = 0; l < 3; ++l)
  {
    elements += plan.num_gca() * mesh.micro_per_macro(l);
    EXPECT_EQ(agca.store().stored_matrices(l), plan.num_gca() * mesh.micro_per_macro(l));
  }
  EXPECT_EQ(agca.store().stored_entries(), elements * 36);
  EXPECT_FALSE(agca.level(3).is_gca(plan.gca_macros().front()));
}

TEST(Hierarchy, SmallAllGcaStoresThreeHundredSixtyEntries)
{
  MeshHierarchy mesh(MacroGrid(1, 1), 2);
  CoefficientEval ev([](Point) { return 1.0; }, EvalMode::Analytic, mesh);
  AgcaHierarchy<ViscousPhysics> h(mesh, ev, CoarseningPlan::uniform(2, true));
  EXPECT_EQ(h.store().stored_entries(), 360u);
}

TEST(Hierarchy, BuildOrderAndCompleteness)
{
  MeshHierarchy mesh(MacroGrid(1, 1), 3);
  CoefficientEval ev([](Point) { return 1.0; }, EvalMode::Analytic, mesh);
  GcaStore<DiffusionPhysics> store(mesh.num_macros(), 3);
  const std::vector<std::size_t> macros{0, 1};
  const auto q = quadrature(2);
  EXPECT_THROW(build_gca_level(store, mesh, ev, q, macros, 0), BuildError);
  EXPECT_THROW(build_gca_level(store, mesh, ev, q, macros, 3), BuildError);
  const auto plan = CoarseningPlan::uniform(2, true);
  EXPECT_THROW(LevelOperator<DiffusionPhysics>(mesh, ev, 1, plan, store, q, BoundaryTreatment::Dirichlet), BuildError);
  build_gca_level(store, mesh, ev, q, macros, 2);
  EXPECT_NO_THROW(LevelOperator<DiffusionPhysics>(mesh, ev, 2, plan, store, q, BoundaryTreatment::Dirichlet));
  EXPECT_THROW(AgcaHierarchy<DiffusionPhysics>(mesh, ev, CoarseningPlan::uniform(5, true)), ArgumentError);
}

TEST(LevelOp, ApplyMatchesDenseAssembly)
{
  MeshHierarchy mesh(MacroGrid(2, 2), 2);
  CoefficientEval ev([](Point) { return 1.0; }, EvalMode::Analytic, mesh);
  AgcaHierarchy<DiffusionPhysics> h(mesh, ev, CoarseningPlan::uniform(mesh.num_macros(), false));
  const auto &A = h.finest();
  const auto I = oracle::interior({2, 2, 2}, 1);
  const auto ref = oracle::pinned(oracle::assemble({2, 2, 2}, 1, [](double, double) { return 1.0; }), I);
  auto u = oracle::random_vector(A.size(), 5);
  for (std::size_t i = 0; i < u.size(); ++i)
  {
    u[i] = A.boundary_mask()[i] ? 0.0 : u[i];
  }
  Vector v(A.size());
  apply_level(A, u, v);
  EXPECT_LT((oracle::as_eigen(v) - ref * oracle::as_eigen(u)).cwiseAbs().maxCoeff(), 1e-13);
  Vector zero(A.size(), 0.0);
  apply_level(A, zero, v);
  for (double x : v)
  {
    EXPECT_EQ(x, 0.0);
  }
  Vector wrong(A.size() + 1);
  EXPECT_THROW(A.apply(wrong, v), ArgumentError);
}

TEST(LevelOp, BoundaryRowsAreIdentity)
{
  MeshHierarchy mesh(MacroGrid(2, 2), 2);
  CoefficientEval ev([](Point p) { return 1.0 + p.x; }, EvalMode::Analytic, mesh);
  AgcaHierarchy<ViscousPhysics> h(mesh, ev, CoarseningPlan::uniform(mesh.num_macros(), true));
  for (int l = 0; l <= 2; ++l)
  {
    const auto &A = h.level(l);
    const auto u = oracle::random_vector(A.size(), 9);
    Vector v(A.size());
    A.apply(u, v);
    const auto d = A.diagonal();
    for (std::size_t i = 0; i < u.size(); ++i)
    {
      if (A.boundary_mask()[i])
      {
        EXPECT_EQ(v[i], u[i]);
        EXPECT_EQ(d[i], 1.0);
      }
      else
      {
        EXPECT_GT(d[i], 0.0);
      }
    }
  }
}

TEST(LevelOp, SymmetricAcrossModes)
{
  MeshHierarchy mesh(MacroGrid(4, 4), 3);
  const auto eta = sinker(4, 1e4).viscosity();
  for (auto mode : {EvalMode::Analytic, EvalMode::InterpP1, EvalMode::MeanHarmonic})
  {
    CoefficientEval ev(eta, mode, mesh);
    AgcaHierarchy<ViscousPhysics> h(mesh, ev, select_macros(eta, mesh, 10.0));
    for (int l = 0; l <= 3; ++l)
    {
      EXPECT_LE(selftest::adjointness_defect(h.level(l)), 1e-12);
    }
  }
}

TEST(LevelOp, AssembledMatchesActionAndSparsity)
{
  MeshHierarchy mesh(MacroGrid(2, 2), 3);
  const auto eta = sinker(2, 1e4).viscosity();
  CoefficientEval ev(eta, EvalMode::Analytic, mesh);
  AgcaHierarchy<DiffusionPhysics> h(mesh, ev, select_macros(eta, mesh, 10.0));
  AgcaHierarchy<DiffusionPhysics> d(mesh, ev, CoarseningPlan::uniform(mesh.num_macros(), false));
  for (int l = 0; l <= 3; ++l)
  {
    const auto &A = h.level(l);
    const auto S = assemble_sparse(A);
    for (int k = 0; k < 20; ++k)
    {
      const auto u = oracle::random_vector(A.size(), 100 + static_cast<std::uint64_t>(k));
      Vector v(A.size()), w(A.size());
      A.apply(u, v);
      S.apply(u, w);
      const double s = linalg::norm2(v);
      for (std::size_t i = 0; i < v.size(); ++i)
      {
        EXPECT_NEAR(v[i], w[i], 1e-12 * s);
      }
    }
    double big = 0.0;
    for (double v : S.values())
    {
      big = std::max(big, std::abs(v));
    }
    for (std::size_t r = 0; r < S.rows(); ++r)
    {
      for (std::size_t k = S.row_ptr()[r]; k < S.row_ptr()[r + 1]; ++k)
      {
        EXPECT_NEAR(S.at(S.col_idx()[k], r), S.values()[k], 1e-13 * big);
      }
    }
    const auto D = assemble_sparse(d.level(l));
    for (std::size_t r = 0; r < D.rows(); ++r)
    {
      if (!d.level(l).boundary_mask()[r])
      {
        EXPECT_LE(D.row_nnz(r), 7u);
      }
    }
  }
}

TEST(Hierarchy, DumpListsPlan)
{
  MeshHierarchy mesh(MacroGrid(4, 4), 2);
  const auto eta = sinker(4, 1e4).viscosity();
  CoefficientEval ev(eta, EvalMode::Analytic, mesh);
  AgcaHierarchy<ViscousPhysics> h(mesh, ev, select_macros(eta, mesh, 10.0));
  std::ostringstream os;
  h.dump(os);
  const auto s = os.str();
  EXPECT_NE(s.find("\"c_agca\""), std::string::npos);
  EXPECT_NE(s.find("\"stored_matrices_per_level\""), std::string::npos);
  EXPECT_NE(s.find("\"gca_macros\""), std::string::npos);
}
