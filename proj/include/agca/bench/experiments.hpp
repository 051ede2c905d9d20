// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "agca/bench/memory.hpp"
#include "agca/bench/problems.hpp"
#include "agca/coarsening.hpp"
#include "agca/stokes.hpp"

namespace agca::bench
{

enum class CoarseningMode
{
  DCA,
  AGCA,
  GCA
};

inline std::string_view to_string(CoarseningMode m)
{
  switch (m)
  {
    case CoarseningMode::DCA:
      return "dca";
    case CoarseningMode::AGCA:
      return "agca";
    case CoarseningMode::GCA:
      return "gca";
  }
  return "?";
}

inline CoarseningMode coarsening_mode_from_string(std::string_view s)
{
  for (auto m : {CoarseningMode::DCA, CoarseningMode::AGCA, CoarseningMode::GCA})
  {
    if (s == to_string(m))
    {
      return m;
    }
  }
  throw ArgumentError("unknown coarsening mode '" + std::string(s) + "' (dca|agca|gca)");
}

struct MeshSpec
{
  int nx = 8;
  int ny = 8;
  int L = 4;

  void validate() const
  {
    require(nx >= 1 && ny >= 1, "macro grid needs nx, ny >= 1");
    require(L >= 1 && L <= 12, "refinement level L must lie in [1, 12]");
  }
};

struct ExperimentSpec
{
  SinkerProblem problem;
  MeshSpec mesh;
  CoarseningMode mode = CoarseningMode::AGCA;
  double nu = 10.0;
  StokesConfig solver;
};

struct ExperimentResult
{
  ExperimentSpec spec;
  bool solved = false;  // a solve was attempted
  bool failed = false;  // the run threw
  std::string error;
  SolveReport report;
  double c_agca = 0.0;
  std::size_t gca_macros = 0;
  std::size_t stored_bytes = 0;
  double pressure_mean = 0.0;
  Vector u, p;
};

inline CoarseningPlan make_plan(const ExperimentSpec &s, const ScalarField &eta, const MeshHierarchy &mesh)
{
  switch (s.mode)
  {
    case CoarseningMode::DCA:
      return CoarseningPlan::uniform(mesh.num_macros(), false);
    case CoarseningMode::GCA:
      return CoarseningPlan::uniform(mesh.num_macros(), true);
    case CoarseningMode::AGCA:
      return select_macros(eta, mesh, s.nu);
  }
  throw ArgumentError("unknown coarsening mode");
}

//
// Builds the problem, the plan and the hierarchy and optionally solves. Errors are captured in
// the result so sweeps can continue.
//
inline ExperimentResult run_experiment(const ExperimentSpec &spec, bool solve = true, bool keep_solution = false)
{
  ExperimentResult res;
  res.spec = spec;
  try
  {
    spec.problem.validate();
    spec.mesh.validate();
    MeshHierarchy mesh(MacroGrid(spec.mesh.nx, spec.mesh.ny), spec.mesh.L);
    const auto eta = spec.problem.viscosity();
    CoefficientEval eval(eta, spec.problem.eval_mode, mesh);
    auto plan = make_plan(spec, eta, mesh);
    res.c_agca = plan.c_agca();
    res.gca_macros = plan.num_gca();
    HierarchyOptions opt;
    opt.quadrature_degree = spec.solver.quadrature_degree;
    if (spec.problem.is_poisson())
    {
      AgcaHierarchy<DiffusionPhysics> h(mesh, eval, std::move(plan), opt);
      res.stored_bytes = h.store().stored_bytes();
      if (solve)
      {
        res.solved = true;
        auto sol = solve_diffusion(h, [](Point) { return 1.0; }, spec.solver.krylov, spec.solver.vcycle,
                                   spec.solver.quadrature_degree);
        res.report = std::move(sol.report);
        if (keep_solution)
        {
          res.u = std::move(sol.u);
        }
      }
    }
    else
    {
      AgcaHierarchy<ViscousPhysics> h(mesh, eval, std::move(plan), opt);
      res.stored_bytes = h.store().stored_bytes();
      if (solve)
      {
        res.solved = true;
        auto sol = solve_stokes(h, spec.problem.force(), spec.solver);
        res.report = std::move(sol.report);
        res.pressure_mean = sol.pressure_mean;
        if (keep_solution)
        {
          res.u = std::move(sol.u);
          res.p = std::move(sol.p);
        }
      }
    }
  }
  catch (const Error &e)
  {
    res.failed = true;
    res.error = e.what();
  }
  return res;
}

// Runs f(i) for i in [0, n) on up to `threads` workers; results land in caller-owned slots.
template <class F>
void parallel_for(std::size_t n, int threads, F &&f)
{
  if (threads <= 1 || n <= 1)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      f(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const auto count = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
  for (std::size_t t = 0; t < count; ++t)
  {
    pool.emplace_back([&]() {
      for (std::size_t i = next++; i < n; i = next++)
      {
        f(i);
      }
    });
  }
  for (auto &t : pool)
  {
    t.join();
  }
}

//
// Cartesian product over the sweep axes; empty axes fall back to the base value.
//
struct SweepSpec
{
  ExperimentSpec base;
  std::vector<int> families;
  std::vector<double> dynamic_ratios;
  std::vector<double> omegas;
  std::vector<std::size_t> n_sinkers;
  std::vector<EvalMode> eval_modes;
  std::vector<CoarseningMode> modes;

  std::vector<ExperimentSpec> expand() const
  {
    auto or_base = [](const auto &v, auto b) {
      using T = typename std::decay_t<decltype(v)>::value_type;
      return v.empty() ? std::vector<T>{static_cast<T>(b)} : v;
    };
    const auto fam = or_base(families, base.problem.family);
    const auto drs = or_base(dynamic_ratios, base.problem.dynamic_ratio);
    const auto oms = or_base(omegas, base.problem.omega);
    const auto nss = or_base(n_sinkers, base.problem.n_sinkers);
    const auto evs = or_base(eval_modes, base.problem.eval_mode);
    const auto mds = or_base(modes, base.mode);
    std::vector<ExperimentSpec> out;
    for (auto f : fam)
      for (auto m : mds)
        for (auto e : evs)
          for (auto n : nss)
            for (auto o : oms)
              for (auto d : drs)
              {
                ExperimentSpec s = base;
                s.problem.family = f;
                s.problem.dynamic_ratio = d;
                s.problem.omega = o;
                s.problem.n_sinkers = n;
                s.problem.eval_mode = e;
                s.mode = m;
                out.push_back(s);
              }
    return out;
  }

  bool empty_grid() const
  {
    return families.empty() && dynamic_ratios.empty() && omegas.empty() && n_sinkers.empty() &&
           eval_modes.empty() && modes.empty();
  }
};

inline std::vector<ExperimentResult> run_convergence_sweep(const SweepSpec &sweep, int threads = 1,
                                                           std::ostream *progress = nullptr)
{
  if (sweep.empty_grid())
  {
    throw ArgumentError("sweep grid is empty");
  }
  const auto specs = sweep.expand();
  std::vector<ExperimentResult> out(specs.size());
  std::mutex io;
  parallel_for(specs.size(), threads, [&](std::size_t i) {
    out[i] = run_experiment(specs[i]);
    if (progress)
    {
      std::lock_guard<std::mutex> lock(io);
      const auto &r = out[i];
      *progress << "[" << (i + 1) << "/" << specs.size() << "] " << r.spec.problem.describe()
                << " DR=" << r.spec.problem.dynamic_ratio << " " << to_string(r.spec.mode) << " "
                << to_string(r.spec.problem.eval_mode) << ": "
                << (r.failed ? "error: " + r.error
                             : std::to_string(r.report.iterations) +
                                   (r.report.converged ? " iterations" : " iterations (capped)"))
                << '\n';
    }
  });
  return out;
}

inline std::string format_nu(double nu)
{
  if (std::isinf(nu))
  {
    return "inf";
  }
  std::ostringstream s;
  s << nu;
  return s.str();
}

inline void write_results_header(std::ostream &os)
{
  os << "family,DR,omega,n_sinkers,eval_mode,coarsening_mode,nu,macro_nx,L,iterations,converged,"
        "c_agca,stored_bytes,seconds\n";
}

// One row per result; solve columns stay empty when no solve ran or the run failed.
inline void write_results_csv(std::ostream &os, const std::vector<ExperimentResult> &results,
                              bool timings = true)
{
  write_results_header(os);
  for (const auto &r : results)
  {
    const auto &s = r.spec;
    os << (s.problem.is_poisson() ? std::string("poisson") : std::to_string(s.problem.family)) << ','
       << s.problem.dynamic_ratio << ',' << s.problem.omega << ',' << s.problem.n_sinkers << ','
       << to_string(s.problem.eval_mode) << ',' << to_string(s.mode) << ','
       << (s.mode == CoarseningMode::AGCA ? format_nu(s.nu) : std::string()) << ',' << s.mesh.nx
       << ',' << s.mesh.L << ',';
    if (r.solved && !r.failed)
    {
      os << r.report.iterations << ',' << (r.report.converged ? 1 : 0) << ',';
    }
    else
    {
      os << ",,";
    }
    os << r.c_agca << ',' << r.stored_bytes << ',';
    if (r.solved && !r.failed && timings)
    {
      os << std::fixed << std::setprecision(3) << r.report.seconds << std::defaultfloat
         << std::setprecision(6);
    }
    os << '\n';
  }
}

inline void write_residual_csv(std::ostream &os, const SolveReport &rep)
{
  os << "iteration,residual,relative_residual\n";
  for (std::size_t i = 0; i < rep.residuals.size(); ++i)
  {
    os << i << ',' << rep.residuals[i] << ','
       << (rep.rhs_norm > 0.0 ? rep.residuals[i] / rep.rhs_norm : rep.residuals[i]) << '\n';
  }
}

//
// Threshold study: per nu, the GCA macro count and stored bytes; iterations when solving.
//
struct NuSweepSpec
{
  ExperimentSpec base;
  std::vector<double> nus{0.1, 1.0, 10.0, 100.0, 1000.0, std::numeric_limits<double>::infinity()};
  bool solve = true;
};

struct NuSweepResult
{
  std::vector<ExperimentResult> runs;
  bool monotone = true;           // GCA count and bytes non-increasing along the nu grid
  bool constant_macros_dca = true;  // macros with constant eta stay DCA for every nu > 0
  std::size_t constant_macros = 0;
};

// True when all finest nodal values of eta inside the macro coincide.
inline std::vector<char> constant_macros(const ScalarField &eta, const MeshHierarchy &mesh)
{
  const int L = mesh.max_level();
  std::vector<char> out(mesh.num_macros(), 1);
  for (std::size_t M = 0; M < mesh.num_macros(); ++M)
  {
    bool first = true;
    double v0 = 0.0;
    mesh.for_each_micro_element(M, L, [&](const MicroElement &m) {
      for (const Point &p : m.vertices)
      {
        const double v = eta(p);
        if (first)
        {
          v0 = v;
          first = false;
        }
        else if (v != v0)
        {
          out[M] = 0;
        }
      }
    });
  }
  return out;
}

inline NuSweepResult run_nu_sweep(const NuSweepSpec &spec, int threads = 1)
{
  if (spec.nus.empty())
  {
    throw ArgumentError("nu grid is empty");
  }
  for (double nu : spec.nus)
  {
    require(nu >= 0.0, "nu values must be >= 0");
  }
  NuSweepResult out;
  out.runs.resize(spec.nus.size());
  parallel_for(spec.nus.size(), threads, [&](std::size_t i) {
    ExperimentSpec s = spec.base;
    s.mode = CoarseningMode::AGCA;
    s.nu = spec.nus[i];
    out.runs[i] = run_experiment(s, spec.solve);
  });
  for (std::size_t i = 1; i < out.runs.size(); ++i)
  {
    const auto &a = out.runs[i - 1], &b = out.runs[i];
    if (spec.nus[i] >= spec.nus[i - 1] &&
        (b.gca_macros > a.gca_macros || b.stored_bytes > a.stored_bytes))
    {
      out.monotone = false;
    }
  }
  // Plans are cheap; recheck the constant-region contract directly.
  spec.base.problem.validate();
  spec.base.mesh.validate();
  MeshHierarchy mesh(MacroGrid(spec.base.mesh.nx, spec.base.mesh.ny), spec.base.mesh.L);
  const auto eta = spec.base.problem.viscosity();
  const auto constant = constant_macros(eta, mesh);
  out.constant_macros = static_cast<std::size_t>(std::count(constant.begin(), constant.end(), char{1}));
  for (double nu : spec.nus)
  {
    if (nu <= 0.0)
    {
      continue;
    }
    const auto plan = select_macros(eta, mesh, nu);
    for (std::size_t M = 0; M < constant.size(); ++M)
    {
      if (constant[M] && plan.is_gca(M))
      {
        out.constant_macros_dca = false;
      }
    }
  }
  return out;
}

//
// c_agca over macro grid sizes at fixed L; no solves.
//
struct CagcaSpec
{
  ExperimentSpec base;
  std::vector<int> macro_sizes{4, 8, 16, 32};
};

struct CagcaResult
{
  std::vector<ExperimentResult> runs;
  bool strictly_decreasing = true;
};

inline CagcaResult run_cagca_study(const CagcaSpec &spec, int threads = 1)
{
  if (spec.macro_sizes.empty())
  {
    throw ArgumentError("macro size list is empty");
  }
  CagcaResult out;
  out.runs.resize(spec.macro_sizes.size());
  parallel_for(spec.macro_sizes.size(), threads, [&](std::size_t i) {
    ExperimentSpec s = spec.base;
    s.mode = CoarseningMode::AGCA;
    s.mesh.nx = s.mesh.ny = spec.macro_sizes[i];
    out.runs[i] = run_experiment(s, false);
  });
  for (std::size_t i = 1; i < out.runs.size(); ++i)
  {
    if (!(out.runs[i].c_agca < out.runs[i - 1].c_agca))
    {
      out.strictly_decreasing = false;
    }
  }
  return out;
}

}  // namespace agca::bench
