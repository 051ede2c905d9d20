// SPDX-License-Identifier: Apache-2.0
//
// Library walkthrough: a variable-viscosity Stokes solve with an adaptive coarse-grid plan.

#include <iostream>

#include "agca/agca.hpp"

int main()
{
  using namespace agca;

  MeshHierarchy mesh(MacroGrid(4, 4), 3);

  bench::SinkerProblem problem;
  problem.family = 4;
  problem.dynamic_ratio = 1e4;
  const ScalarField eta = problem.viscosity();

  // Galerkin coarsening only where the viscosity jumps.
  CoarseningPlan plan = select_macros(eta, mesh, 10.0);
  std::cout << plan.num_gca() << " of " << mesh.num_macros() << " macros use Galerkin coarsening\n";

  CoefficientEval eval(eta, EvalMode::Analytic, mesh);
  AgcaHierarchy<ViscousPhysics> h(mesh, eval, std::move(plan));
  std::cout << "stored coarse matrices: " << h.store().stored_bytes() << " bytes\n";

  StokesConfig cfg;
  cfg.krylov.tol = 1e-6;
  const auto sol = solve_stokes(h, problem.force(), cfg);
  std::cout << "FGMRES: " << sol.report.iterations << " iterations, relative residual "
            << sol.report.final_relative() << (sol.report.converged ? "" : " (not converged)") << '\n';
  return sol.report.converged ? 0 : 1;
}
