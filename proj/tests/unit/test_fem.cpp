// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "agca/bench/problems.hpp"
#include "agca/coefficient.hpp"
#include "agca/fem.hpp"
#include "agca/quadrature.hpp"
#include "oracles.hpp"

using namespace agca;

namespace
{

MicroElement reference_triangle()
{
  MicroElement m;
  m.vertices = {Point{0.0, 0.0}, Point{1.0, 0.0}, Point{0.0, 1.0}};
  m.dofs = {0, 1, 2};
  m.boundary = {false, false, false};
  return m;
}

oracle::Tri as_tri(const MicroElement &m)
{
  oracle::Tri t;
  for (int k = 0; k < 3; ++k)
  {
    t.v[static_cast<std::size_t>(k)] = m.dofs[static_cast<std::size_t>(k)];
    t.x[static_cast<std::size_t>(k)] = {m.vertices[static_cast<std::size_t>(k)].x, m.vertices[static_cast<std::size_t>(k)].y};
  }
  return t;
}

template <int N>
double max_abs(const Mat<N> &A)
{
  double s = 0.0;
  for (double v : A.a)
  {
    s = std::max(s, std::abs(v));
  }
  return s;
}

double integrate(const QuadratureRule &q, double (*f)(double, double))
{
  // Reference triangle (0,0), (1,0), (0,1): area 1/2, point = b1 * (1,0) + b2 * (0,1).
  double s = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k)
  {
    s += q.weights[k] * f(q.points[k][1], q.points[k][2]);
  }
  return 0.5 * s;
}

}  // namespace

TEST(Quadrature, ReferenceIntegrals)
{
  for (int d : {1, 2, 4})
  {
    const auto q = quadrature(d);
    EXPECT_NEAR(integrate(q, [](double, double) { return 1.0; }), 0.5, 1e-15);
    EXPECT_NEAR(integrate(q, [](double x, double) { return x; }), 1.0 / 6.0, 1e-15);
    double wsum = 0.0;
    for (double w : q.weights)
    {
      EXPECT_GT(w, 0.0);
      wsum += w;
    }
    EXPECT_NEAR(wsum, 1.0, 1e-15);
  }
  const auto q2 = quadrature(2);
  EXPECT_NEAR(integrate(q2, [](double x, double) { return x * x; }), 1.0 / 12.0, 1e-15);
  EXPECT_NEAR(integrate(q2, [](double x, double y) { return x * y; }), 1.0 / 24.0, 1e-15);
  const auto q4 = quadrature(4);
  EXPECT_NEAR(integrate(q4, [](double x, double y) { return x * x * y * y; }), 1.0 / 180.0, 1e-15);
  EXPECT_NEAR(integrate(q4, [](double x, double) { return x * x * x * x; }), 1.0 / 30.0, 1e-15);
}

TEST(Quadrature, DefaultRuleIsInterior)
{
  for (const auto &p : quadrature(2).points)
  {
    for (double b : p)
    {
      EXPECT_GT(b, 0.0);
    }
  }
}

TEST(Quadrature, UnsupportedDegree)
{
  EXPECT_THROW(quadrature(3), ArgumentError);
  EXPECT_THROW(quadrature(0), ArgumentError);
}

TEST(LocalDiffusion, ReferenceTriangle)
{
  MeshHierarchy mesh(MacroGrid(1, 1), 1);
  CoefficientEval one([](Point) { return 1.0; }, EvalMode::Analytic, mesh);
  const auto A = local_diffusion(reference_triangle(), one, quadrature(2));
  const double expect[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
  for (int i = 0; i < 3; ++i)
  {
    for (int j = 0; j < 3; ++j)
    {
      EXPECT_NEAR(A(i, j), expect[i][j], 1e-15);
    }
  }
  CoefficientEval three([](Point) { return 3.0; }, EvalMode::Analytic, mesh);
  const auto B = local_diffusion(reference_triangle(), three, quadrature(2));
  for (int k = 0; k < 9; ++k)
  {
    EXPECT_NEAR(B.a[static_cast<std::size_t>(k)], 3.0 * A.a[static_cast<std::size_t>(k)], 1e-15);
  }
}

TEST(LocalDiffusion, SymmetricWithZeroRowSumsAndMatchesOracle)
{
  MeshHierarchy mesh(MacroGrid(2, 2), 2);
  auto eta = [](Point p) { return 1.0 + p.x * p.x + 3.0 * p.y; };
  CoefficientEval ev(eta, EvalMode::Analytic, mesh);
  for (std::size_t M = 0; M < mesh.num_macros(); ++M)
  {
    mesh.for_each_micro_element(M, 2, [&](const MicroElement &m) {
      const auto A = local_diffusion(m, ev, quadrature(2));
      const auto ref = oracle::diffusion_local(as_tri(m), oracle::eta_mean(as_tri(m), [&](double x, double y) { return eta({x, y}); }));
      const double s = max_abs(A);
      for (int i = 0; i < 3; ++i)
      {
        double row = 0.0;
        for (int j = 0; j < 3; ++j)
        {
          row += A(i, j);
          EXPECT_NEAR(A(i, j), A(j, i), 1e-15 * s);
          EXPECT_NEAR(A(i, j), ref(i, j), 1e-13 * s);
        }
        EXPECT_NEAR(row, 0.0, 1e-13 * s);
      }
    });
  }
}

TEST(LocalDiffusion, DegenerateElement)
{
  MeshHierarchy mesh(MacroGrid(1, 1), 1);
  CoefficientEval one([](Point) { return 1.0; }, EvalMode::Analytic, mesh);
  MicroElement m = reference_triangle();
  m.vertices[2] = {2.0, 0.0};
  EXPECT_THROW(local_diffusion(m, one, quadrature(2)), GeometryError);
  EXPECT_THROW(local_viscous(m, one, quadrature(2)), GeometryError);
}

TEST(LocalViscous, RigidBodyKernelAndSymmetry)
{
  MeshHierarchy mesh(MacroGrid(2, 2), 2);
  CoefficientEval ev([](Point p) { return 2.0 + std::sin(3.0 * p.x); }, EvalMode::Analytic, mesh);
  mesh.for_each_micro_element(5, 2, [&](const MicroElement &m) {
    const auto A = local_viscous(m, ev, quadrature(2));
    const double s = max_abs(A);
    std::array<std::array<double, 6>, 3> modes{};
    for (int k = 0; k < 3; ++k)
    {
      const Point p = m.vertices[static_cast<std::size_t>(k)];
      modes[0][static_cast<std::size_t>(k)] = 1.0;
      modes[1][static_cast<std::size_t>(3 + k)] = 1.0;
      modes[2][static_cast<std::size_t>(k)] = p.y;
      modes[2][static_cast<std::size_t>(3 + k)] = -p.x;
    }
    for (const auto &u : modes)
    {
      for (int i = 0; i < 6; ++i)
      {
        double r = 0.0;
        for (int j = 0; j < 6; ++j)
        {
          r += A(i, j) * u[static_cast<std::size_t>(j)];
        }
        EXPECT_NEAR(r, 0.0, 1e-12 * s);
      }
    }
    Eigen::Matrix<double, 6, 6> E;
    for (int i = 0; i < 6; ++i)
    {
      for (int j = 0; j < 6; ++j)
      {
        EXPECT_NEAR(A(i, j), A(j, i), 1e-15 * s);
        E(i, j) = A(i, j);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 6, 6>> es(E);
    EXPECT_GT(es.eigenvalues().minCoeff(), -1e-12 * s);
  });
}

TEST(LocalViscous, MatchesStrainOracleAndQuadratureDegrees)
{
  MeshHierarchy mesh(MacroGrid(1, 1), 2);
  CoefficientEval ev([](Point) { return 1.7; }, EvalMode::Analytic, mesh);
  mesh.for_each_micro_element(1, 2, [&](const MicroElement &m) {
    const auto A2 = local_viscous(m, ev, quadrature(2));
    const auto A4 = local_viscous(m, ev, quadrature(4));
    const auto ref = oracle::viscous_local(as_tri(m), 1.7);
    const double s = max_abs(A2);
    for (int i = 0; i < 6; ++i)
    {
      for (int j = 0; j < 6; ++j)
      {
        EXPECT_NEAR(A2(i, j), ref(i, j), 1e-13 * s);
        EXPECT_NEAR(A2(i, j), A4(i, j), 1e-13 * s);
      }
    }
  });
}

TEST(LocalDivergence, ConstantFieldAndLinearField)
{
  MeshHierarchy mesh(MacroGrid(1, 1), 2);
  for (std::size_t M = 0; M < mesh.num_macros(); ++M)
  {
    mesh.for_each_micro_element(M, 1, [&](const MicroElement &pe) {
      const auto B = local_divergence(mesh, pe);
      const auto kids = mesh.children(M, 1, pe.index);
      std::array<double, 3> div_const{}, div_x{};
      for (int c = 0; c < 4; ++c)
      {
        const auto child = mesh.micro_element(M, 2, kids[static_cast<std::size_t>(c)]);
        for (int k = 0; k < 3; ++k)
        {
          for (int a = 0; a < 3; ++a)
          {
            const auto &Bc = B[static_cast<std::size_t>(c)];
            div_const[static_cast<std::size_t>(k)] += Bc(k, a);
            div_x[static_cast<std::size_t>(k)] += Bc(k, a) * child.vertices[static_cast<std::size_t>(a)].x;
          }
        }
      }
      // int psi_k * 1 = |T| / 3 for a linear hat on the pressure element.
      for (int k = 0; k < 3; ++k)
      {
        EXPECT_NEAR(div_const[static_cast<std::size_t>(k)], 0.0, 1e-15);
        EXPECT_NEAR(div_x[static_cast<std::size_t>(k)], pe.area() / 3.0, 1e-15);
      }
    });
  }
}

TEST(LocalDivergence, FinestLevelHasNoVelocityChildren)
{
  MeshHierarchy mesh(MacroGrid(1, 1), 1);
  EXPECT_THROW(local_divergence(mesh, mesh.micro_element(0, 1, 0)), ArgumentError);
}

TEST(Coefficient, MeansOfSamples)
{
  const std::array<double, 2> w{0.5, 0.5};
  const std::array<double, 2> s{1.0, 4.0};
  EXPECT_NEAR(weighted_mean(EvalMode::MeanHarmonic, s, w), 1.6, 1e-15);
  EXPECT_NEAR(weighted_mean(EvalMode::MeanArithmetic, s, w), 2.5, 1e-15);
  EXPECT_NEAR(weighted_mean(EvalMode::MeanGeometric, s, w), 2.0, 1e-15);
  const std::array<double, 2> g{1e-3, 1e3};
  EXPECT_NEAR(weighted_mean(EvalMode::MeanGeometric, g, w), 1.0, 1e-14);
  EXPECT_THROW(weighted_mean(EvalMode::Analytic, s, w), ArgumentError);
}

TEST(Coefficient, InterpolationAtBarycenter)
{
  // At the barycenter the interpolant is the mean of the three nodal values.
  MeshHierarchy mesh(MacroGrid(1, 1), 1);
  CoefficientEval ev([](Point p) { return 1.0 + 4.0 * p.x + 2.0 * p.y; }, EvalMode::InterpP1, mesh);
  const auto m = mesh.micro_element(0, 1, 0);
  double vals = 0.0;
  for (const Point &p : m.vertices)
  {
    vals += 1.0 + 4.0 * p.x + 2.0 * p.y;
  }
  EXPECT_NEAR(ev.evaluate(m, m.centroid()), vals / 3.0, 1e-15);
  EXPECT_NEAR(ev.evaluate_barycentric(m, {1.0 / 3, 1.0 / 3, 1.0 / 3}), vals / 3.0, 1e-15);
}

TEST(Coefficient, AnalyticRejectsNonPositive)
{
  MeshHierarchy mesh(MacroGrid(1, 1), 1);
  CoefficientEval ev([](Point p) { return p.x - 0.5; }, EvalMode::Analytic, mesh);
  EXPECT_THROW(ev.analytic({0.1, 0.1}), CoefficientError);
  EXPECT_THROW(CoefficientEval([](Point) { return -1.0; }, EvalMode::MeanHarmonic, mesh), CoefficientError);
}

TEST(Coefficient, ConstantEtaIdenticalUnderAllModes)
{
  MeshHierarchy mesh(MacroGrid(2, 2), 2);
  const auto q = quadrature(2);
  std::vector<Mat<6>> ref;
  for (auto mode : {EvalMode::Analytic, EvalMode::InterpP1, EvalMode::MeanArithmetic, EvalMode::MeanHarmonic,
                    EvalMode::MeanGeometric})
  {
    CoefficientEval ev([](Point) { return 4.5; }, mode, mesh);
    std::size_t k = 0;
    for (int l = 0; l <= 2; ++l)
    {
      mesh.for_each_micro_element(3, l, [&](const MicroElement &m) {
        const auto A = local_viscous(m, ev, q);
        const auto D = local_diffusion(m, ev, q);
        if (mode == EvalMode::Analytic)
        {
          ref.push_back(A);
        }
        for (int i = 0; i < 36; ++i)
        {
          EXPECT_NEAR(A.a[static_cast<std::size_t>(i)], ref[k].a[static_cast<std::size_t>(i)], 1e-14 * max_abs(A));
        }
        EXPECT_NEAR(D(0, 0), 4.5 * local_diffusion(m, CoefficientEval([](Point) { return 1.0; }, EvalMode::Analytic, mesh), q)(0, 0), 1e-13);
        ++k;
      });
    }
  }
}

TEST(Coefficient, MeanOrderingForSinkers)
{
  MeshHierarchy mesh(MacroGrid(4, 4), 2);
  for (int family = 1; family <= 6; ++family)
  {
    bench::SinkerProblem p;
    p.family = family;
    p.dynamic_ratio = 1e6;
    p.n_sinkers = 3;
    const auto eta = p.viscosity();
    CoefficientEval h(eta, EvalMode::MeanHarmonic, mesh), g(eta, EvalMode::MeanGeometric, mesh),
        a(eta, EvalMode::MeanArithmetic, mesh);
    for (std::size_t M = 0; M < mesh.num_macros(); ++M)
    {
      mesh.for_each_micro_element(M, 2, [&](const MicroElement &m) {
        const double vh = h.element_constant(m), vg = g.element_constant(m), va = a.element_constant(m);
        EXPECT_GT(vh, 0.0);
        EXPECT_LE(vh, vg * (1 + 1e-12));
        EXPECT_LE(vg, va * (1 + 1e-12));
      });
    }
  }
}

TEST(Coefficient, ModeStrings)
{
  for (auto mode : {EvalMode::Analytic, EvalMode::InterpP1, EvalMode::MeanArithmetic, EvalMode::MeanHarmonic,
                    EvalMode::MeanGeometric})
  {
    EXPECT_EQ(eval_mode_from_string(to_string(mode)), mode);
  }
  EXPECT_THROW(eval_mode_from_string("median"), ArgumentError);
}
