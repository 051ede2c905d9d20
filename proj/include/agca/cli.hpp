// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "agca/bench/experiments.hpp"
#include "agca/bench/memory.hpp"
#include "agca/bench/problems.hpp"
#include "agca/bench/report.hpp"
#include "agca/selftest.hpp"

namespace agca::cli
{

using json = nlohmann::json;
namespace fs = std::filesystem;

enum ExitCode : int
{
  kConverged = 0,
  kFailure = 1,
  kNotConverged = 2
};

//
// Everything a command needs. The JSON file is a tree with the sections mesh, problem,
// coarsening, solver, output, sweep, nu_sweep, cagca and memory_model; absent keys keep their
// defaults and unknown keys are rejected.
//
struct RunConfig
{
  bench::ExperimentSpec experiment;
  bench::SweepSpec sweep;
  std::vector<double> nus{0.1, 1.0, 10.0, 100.0, 1000.0, std::numeric_limits<double>::infinity()};
  bool nu_sweep_solve = true;
  std::vector<int> macro_sizes{4, 8, 16, 32};
  double n_fill = 1.0;
  int n_restart_model = 30;
  double c_agca_model = 1.0;
  double c_u_model = bench::kVelocityShare3D;
  std::string output_dir = "agca-out";
  bool write_solution = false;
  int threads = 1;

  void validate() const
  {
    experiment.problem.validate();
    experiment.mesh.validate();
    experiment.solver.krylov.validate();
    experiment.solver.vcycle.validate();
    require(experiment.nu >= 0.0, "coarsening.nu must be >= 0");
    require(experiment.solver.vcycle.min_level < experiment.mesh.L,
            "solver.min_level must be below mesh.L");
    require(experiment.solver.inner_tol >= 0.0 && experiment.solver.inner_tol < 1.0,
            "solver.inner_tol must lie in [0, 1) (0 selects the automatic value)");
    require(threads >= 1, "threads must be >= 1");
    bench::memory_model_3d(n_fill, n_restart_model, c_agca_model, c_u_model);
  }
};

namespace detail
{

inline void check_keys(const json &j, const std::string &section, std::set<std::string> allowed)
{
  if (!j.is_object())
  {
    throw ArgumentError("config section '" + section + "' must be an object");
  }
  for (auto it = j.begin(); it != j.end(); ++it)
  {
    if (!allowed.count(it.key()))
    {
      throw ArgumentError("unknown config key '" + section + "." + it.key() + "'");
    }
  }
}

inline double number(const json &v, const std::string &key)
{
  if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "infinity"))
  {
    return std::numeric_limits<double>::infinity();
  }
  if (!v.is_number())
  {
    throw ArgumentError("config key '" + key + "' must be a number");
  }
  return v.get<double>();
}

inline int integer(const json &v, const std::string &key)
{
  if (!v.is_number_integer())
  {
    throw ArgumentError("config key '" + key + "' must be an integer");
  }
  return v.get<int>();
}

inline std::string string(const json &v, const std::string &key)
{
  if (!v.is_string())
  {
    throw ArgumentError("config key '" + key + "' must be a string");
  }
  return v.get<std::string>();
}

inline int family(const json &v)
{
  if (v.is_string())
  {
    if (v.get<std::string>() == "poisson")
    {
      return 0;
    }
    throw ArgumentError("problem.family must be 1..6 or \"poisson\"");
  }
  return integer(v, "problem.family");
}

template <class T, class F>
std::vector<T> list(const json &j, const std::string &key, F &&conv)
{
  if (!j.is_array())
  {
    throw ArgumentError("config key '" + key + "' must be an array");
  }
  std::vector<T> out;
  for (const auto &v : j)
  {
    out.push_back(conv(v));
  }
  return out;
}

inline json number_json(double v)
{
  return std::isinf(v) ? json("inf") : json(v);
}

}  // namespace detail

inline RunConfig parse_config(const json &j)
{
  using namespace detail;
  RunConfig c;
  check_keys(j, "<root>",
             {"mesh", "problem", "coarsening", "solver", "output", "sweep", "nu_sweep", "cagca",
              "memory_model", "threads"});
  auto &e = c.experiment;
  if (j.contains("mesh"))
  {
    const auto &m = j["mesh"];
    check_keys(m, "mesh", {"nx", "ny", "L"});
    if (m.contains("nx")) e.mesh.nx = integer(m["nx"], "mesh.nx");
    e.mesh.ny = e.mesh.nx;
    if (m.contains("ny")) e.mesh.ny = integer(m["ny"], "mesh.ny");
    if (m.contains("L")) e.mesh.L = integer(m["L"], "mesh.L");
  }
  if (j.contains("problem"))
  {
    const auto &p = j["problem"];
    check_keys(p, "problem", {"family", "DR", "omega", "n_sinkers", "eval_mode", "rhs_sign", "literal_product"});
    if (p.contains("family")) e.problem.family = family(p["family"]);
    if (p.contains("DR")) e.problem.dynamic_ratio = number(p["DR"], "problem.DR");
    if (p.contains("omega")) e.problem.omega = number(p["omega"], "problem.omega");
    if (p.contains("n_sinkers"))
    {
      const int n = integer(p["n_sinkers"], "problem.n_sinkers");
      require(n >= 1, "problem.n_sinkers must be >= 1");
      e.problem.n_sinkers = static_cast<std::size_t>(n);
    }
    if (p.contains("eval_mode")) e.problem.eval_mode = eval_mode_from_string(string(p["eval_mode"], "problem.eval_mode"));
    if (p.contains("rhs_sign")) e.problem.rhs_sign = bench::force_sign_from_string(string(p["rhs_sign"], "problem.rhs_sign"));
    if (p.contains("literal_product"))
    {
      require(p["literal_product"].is_boolean(), "problem.literal_product must be a boolean");
      e.problem.literal_product = p["literal_product"].get<bool>();
    }
  }
  if (j.contains("coarsening"))
  {
    const auto &k = j["coarsening"];
    check_keys(k, "coarsening", {"mode", "nu"});
    if (k.contains("mode")) e.mode = bench::coarsening_mode_from_string(string(k["mode"], "coarsening.mode"));
    if (k.contains("nu")) e.nu = number(k["nu"], "coarsening.nu");
  }
  if (j.contains("solver"))
  {
    const auto &s = j["solver"];
    check_keys(s, "solver",
               {"tol", "restart", "max_iter", "cheby_order", "pre_smooth", "post_smooth", "min_level",
                "coarse_tol", "inner_tol", "inner_max_iter", "sign", "quadrature_degree"});
    auto &kr = e.solver.krylov;
    auto &vc = e.solver.vcycle;
    if (s.contains("tol")) kr.tol = number(s["tol"], "solver.tol");
    if (s.contains("restart")) kr.restart = integer(s["restart"], "solver.restart");
    if (s.contains("max_iter")) kr.max_iter = integer(s["max_iter"], "solver.max_iter");
    if (s.contains("cheby_order")) vc.cheby_order = integer(s["cheby_order"], "solver.cheby_order");
    if (s.contains("pre_smooth")) vc.pre_smooth = integer(s["pre_smooth"], "solver.pre_smooth");
    if (s.contains("post_smooth")) vc.post_smooth = integer(s["post_smooth"], "solver.post_smooth");
    if (s.contains("min_level")) vc.min_level = integer(s["min_level"], "solver.min_level");
    if (s.contains("coarse_tol")) vc.coarse_tol = number(s["coarse_tol"], "solver.coarse_tol");
    if (s.contains("inner_tol")) e.solver.inner_tol = number(s["inner_tol"], "solver.inner_tol");
    if (s.contains("inner_max_iter")) e.solver.inner_max_iter = integer(s["inner_max_iter"], "solver.inner_max_iter");
    if (s.contains("quadrature_degree")) e.solver.quadrature_degree = integer(s["quadrature_degree"], "solver.quadrature_degree");
    if (s.contains("sign"))
    {
      const auto v = string(s["sign"], "solver.sign");
      require(v == "printed" || v == "flipped", "solver.sign must be \"printed\" or \"flipped\"");
      e.solver.sign = v == "printed" ? UpperBlockSign::Printed : UpperBlockSign::Flipped;
    }
    quadrature(e.solver.quadrature_degree);
  }
  if (j.contains("output"))
  {
    const auto &o = j["output"];
    check_keys(o, "output", {"dir", "write_solution"});
    if (o.contains("dir")) c.output_dir = string(o["dir"], "output.dir");
    if (o.contains("write_solution"))
    {
      require(o["write_solution"].is_boolean(), "output.write_solution must be a boolean");
      c.write_solution = o["write_solution"].get<bool>();
    }
  }
  c.sweep.base = e;
  if (j.contains("sweep"))
  {
    const auto &s = j["sweep"];
    check_keys(s, "sweep", {"families", "DR", "omega", "n_sinkers", "eval_modes", "modes"});
    if (s.contains("families")) c.sweep.families = list<int>(s["families"], "sweep.families", family);
    if (s.contains("DR"))
      c.sweep.dynamic_ratios = list<double>(s["DR"], "sweep.DR", [](const json &v) { return number(v, "sweep.DR"); });
    if (s.contains("omega"))
      c.sweep.omegas = list<double>(s["omega"], "sweep.omega", [](const json &v) { return number(v, "sweep.omega"); });
    if (s.contains("n_sinkers"))
      c.sweep.n_sinkers = list<std::size_t>(s["n_sinkers"], "sweep.n_sinkers", [](const json &v) {
        const int n = integer(v, "sweep.n_sinkers");
        require(n >= 1, "sweep.n_sinkers entries must be >= 1");
        return static_cast<std::size_t>(n);
      });
    if (s.contains("eval_modes"))
      c.sweep.eval_modes = list<EvalMode>(s["eval_modes"], "sweep.eval_modes",
                                          [](const json &v) { return eval_mode_from_string(string(v, "sweep.eval_modes")); });
    if (s.contains("modes"))
      c.sweep.modes = list<bench::CoarseningMode>(s["modes"], "sweep.modes", [](const json &v) {
        return bench::coarsening_mode_from_string(string(v, "sweep.modes"));
      });
  }
  if (j.contains("nu_sweep"))
  {
    const auto &s = j["nu_sweep"];
    check_keys(s, "nu_sweep", {"nus", "solve"});
    if (s.contains("nus")) c.nus = list<double>(s["nus"], "nu_sweep.nus", [](const json &v) { return number(v, "nu_sweep.nus"); });
    if (s.contains("solve"))
    {
      require(s["solve"].is_boolean(), "nu_sweep.solve must be a boolean");
      c.nu_sweep_solve = s["solve"].get<bool>();
    }
  }
  if (j.contains("cagca"))
  {
    const auto &s = j["cagca"];
    check_keys(s, "cagca", {"macro_sizes"});
    if (s.contains("macro_sizes"))
      c.macro_sizes = list<int>(s["macro_sizes"], "cagca.macro_sizes", [](const json &v) { return integer(v, "cagca.macro_sizes"); });
  }
  if (j.contains("memory_model"))
  {
    const auto &s = j["memory_model"];
    check_keys(s, "memory_model", {"n_fill", "n_restart", "c_agca", "c_u"});
    if (s.contains("n_fill")) c.n_fill = number(s["n_fill"], "memory_model.n_fill");
    if (s.contains("n_restart")) c.n_restart_model = integer(s["n_restart"], "memory_model.n_restart");
    if (s.contains("c_agca")) c.c_agca_model = number(s["c_agca"], "memory_model.c_agca");
    if (s.contains("c_u")) c.c_u_model = number(s["c_u"], "memory_model.c_u");
  }
  if (j.contains("threads")) c.threads = integer(j["threads"], "threads");
  c.validate();
  return c;
}

inline RunConfig load_config(const std::string &path)
{
  std::ifstream in(path);
  if (!in)
  {
    throw ArgumentError("cannot read config file '" + path + "'");
  }
  json j;
  try
  {
    in >> j;
  }
  catch (const json::exception &e)
  {
    throw ArgumentError("malformed config '" + path + "': " + e.what());
  }
  return parse_config(j);
}

// The effective configuration with all defaults filled in; parse_config(to_json(c)) == c.
inline json to_json(const RunConfig &c)
{
  using detail::number_json;
  const auto &e = c.experiment;
  json j;
  j["mesh"] = {{"nx", e.mesh.nx}, {"ny", e.mesh.ny}, {"L", e.mesh.L}};
  j["problem"] = {{"family", e.problem.is_poisson() ? json("poisson") : json(e.problem.family)},
                  {"DR", e.problem.dynamic_ratio},
                  {"omega", e.problem.omega},
                  {"n_sinkers", e.problem.n_sinkers},
                  {"eval_mode", std::string(to_string(e.problem.eval_mode))},
                  {"rhs_sign", std::string(bench::to_string(e.problem.rhs_sign))},
                  {"literal_product", e.problem.literal_product}};
  j["coarsening"] = {{"mode", std::string(bench::to_string(e.mode))}, {"nu", number_json(e.nu)}};
  j["solver"] = {{"tol", e.solver.krylov.tol},
                 {"restart", e.solver.krylov.restart},
                 {"max_iter", e.solver.krylov.max_iter},
                 {"cheby_order", e.solver.vcycle.cheby_order},
                 {"pre_smooth", e.solver.vcycle.pre_smooth},
                 {"post_smooth", e.solver.vcycle.post_smooth},
                 {"min_level", e.solver.vcycle.min_level},
                 {"coarse_tol", e.solver.vcycle.coarse_tol},
                 {"inner_tol", e.solver.inner_tol},
                 {"inner_max_iter", e.solver.inner_max_iter},
                 {"sign", e.solver.sign == UpperBlockSign::Printed ? "printed" : "flipped"},
                 {"quadrature_degree", e.solver.quadrature_degree}};
  j["output"] = {{"dir", c.output_dir}, {"write_solution", c.write_solution}};
  json sw = json::object();
  if (!c.sweep.families.empty())
  {
    json f = json::array();
    for (int v : c.sweep.families)
    {
      f.push_back(v == 0 ? json("poisson") : json(v));
    }
    sw["families"] = f;
  }
  auto numbers = [](const std::vector<double> &v) {
    json a = json::array();
    for (double x : v)
    {
      a.push_back(number_json(x));
    }
    return a;
  };
  if (!c.sweep.dynamic_ratios.empty()) sw["DR"] = numbers(c.sweep.dynamic_ratios);
  if (!c.sweep.omegas.empty()) sw["omega"] = numbers(c.sweep.omegas);
  if (!c.sweep.n_sinkers.empty()) sw["n_sinkers"] = c.sweep.n_sinkers;
  if (!c.sweep.eval_modes.empty())
  {
    json a = json::array();
    for (auto m : c.sweep.eval_modes)
    {
      a.push_back(std::string(to_string(m)));
    }
    sw["eval_modes"] = a;
  }
  if (!c.sweep.modes.empty())
  {
    json a = json::array();
    for (auto m : c.sweep.modes)
    {
      a.push_back(std::string(bench::to_string(m)));
    }
    sw["modes"] = a;
  }
  j["sweep"] = sw;
  j["nu_sweep"] = {{"nus", numbers(c.nus)}, {"solve", c.nu_sweep_solve}};
  j["cagca"] = {{"macro_sizes", c.macro_sizes}};
  j["memory_model"] = {{"n_fill", c.n_fill}, {"n_restart", c.n_restart_model}, {"c_agca", c.c_agca_model}, {"c_u", c.c_u_model}};
  j["threads"] = c.threads;
  return j;
}

// Command-line overrides shared by all subcommands.
struct Overrides
{
  std::optional<std::string> out_dir;
  std::optional<int> threads;
  std::optional<int> cap;
};

inline RunConfig apply_overrides(RunConfig c, const Overrides &o)
{
  if (o.out_dir) c.output_dir = *o.out_dir;
  if (o.threads) c.threads = *o.threads;
  if (o.cap)
  {
    c.experiment.solver.krylov.max_iter = *o.cap;
    c.sweep.base.solver.krylov.max_iter = *o.cap;
  }
  c.sweep.base.mesh = c.experiment.mesh;
  c.validate();
  return c;
}

namespace detail
{

inline fs::path prepare_output(const RunConfig &c)
{
  fs::path dir(c.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
  {
    throw ArgumentError("cannot create output directory '" + c.output_dir + "': " + ec.message());
  }
  std::ofstream(dir / "effective_config.json") << std::setw(2) << to_json(c) << '\n';
  return dir;
}

inline std::ofstream open(const fs::path &p)
{
  std::ofstream f(p);
  if (!f)
  {
    throw ArgumentError("cannot write '" + p.string() + "'");
  }
  f << std::setprecision(10);
  return f;
}

inline json report_json(const bench::ExperimentResult &r)
{
  json j;
  j["converged"] = r.report.converged;
  j["stagnated"] = r.report.stagnated;
  j["iterations"] = r.report.iterations;
  j["rhs_norm"] = r.report.rhs_norm;
  j["final_residual"] = r.report.residuals.empty() ? 0.0 : r.report.residuals.back();
  j["final_relative_residual"] = r.report.final_relative();
  j["seconds"] = r.report.seconds;
  j["c_agca"] = r.c_agca;
  j["gca_macros"] = r.gca_macros;
  j["stored_bytes"] = r.stored_bytes;
  if (!r.spec.problem.is_poisson())
  {
    j["pressure_mean"] = r.pressure_mean;
  }
  return j;
}

}  // namespace detail

// `solve`: one Stokes (or Poisson) run with report, residual history and optional solution.
inline int cmd_solve(const RunConfig &c, std::ostream &out, std::ostream &err)
{
  try
  {
    const auto dir = detail::prepare_output(c);
    auto r = bench::run_experiment(c.experiment, true, c.write_solution);
    if (r.failed)
    {
      err << "error: " << r.error << '\n';
      return kFailure;
    }
    detail::open(dir / "report.json") << std::setw(2) << detail::report_json(r) << '\n';
    {
      auto f = detail::open(dir / "residuals.csv");
      bench::write_residual_csv(f, r.report);
    }
    {
      auto f = detail::open(dir / "result.csv");
      bench::write_results_csv(f, {r});
    }
    if (c.write_solution)
    {
      MeshHierarchy mesh(MacroGrid(c.experiment.mesh.nx, c.experiment.mesh.ny), c.experiment.mesh.L);
      if (c.experiment.problem.is_poisson())
      {
        auto f = detail::open(dir / "solution.csv");
        f << "x,y,u\n";
        for (std::size_t v = 0; v < r.u.size(); ++v)
        {
          const Point p = mesh.vertex_coord(mesh.max_level(), v);
          f << p.x << ',' << p.y << ',' << r.u[v] << '\n';
        }
      }
      else
      {
        auto fu = detail::open(dir / "velocity.csv");
        write_velocity_csv(fu, mesh, r.u);
        auto fp = detail::open(dir / "pressure.csv");
        write_pressure_csv(fp, mesh, r.p);
      }
    }
    out << c.experiment.problem.describe() << ", " << bench::to_string(c.experiment.mode) << ": "
        << r.report.iterations << " iterations, relative residual " << r.report.final_relative()
        << (r.report.converged ? " (converged)" : " (not converged)") << '\n';
    return r.report.converged ? kConverged : kNotConverged;
  }
  catch (const Error &e)
  {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

// `sweep`: convergence study over the configured grid.
inline int cmd_sweep(const RunConfig &c, std::ostream &out, std::ostream &err)
{
  try
  {
    if (c.sweep.empty_grid())
    {
      throw ArgumentError("sweep grid is empty; set at least one of sweep.families, DR, omega, "
                          "n_sinkers, eval_modes, modes");
    }
    const auto dir = detail::prepare_output(c);
    const auto results = bench::run_convergence_sweep(c.sweep, c.threads, &out);
    auto f = detail::open(dir / "sweep.csv");
    bench::write_results_csv(f, results);
    std::size_t failed = 0;
    for (const auto &r : results)
    {
      failed += r.failed ? 1 : 0;
    }
    out << results.size() << " runs written to " << (dir / "sweep.csv").string() << '\n';
    return failed == results.size() ? kFailure : kConverged;
  }
  catch (const Error &e)
  {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

// `nu-sweep`: threshold study.
inline int cmd_nu_sweep(const RunConfig &c, std::ostream &out, std::ostream &err)
{
  try
  {
    const auto dir = detail::prepare_output(c);
    bench::NuSweepSpec spec;
    spec.base = c.experiment;
    spec.nus = c.nus;
    spec.solve = c.nu_sweep_solve;
    const auto res = bench::run_nu_sweep(spec, c.threads);
    auto f = detail::open(dir / "nu_sweep.csv");
    bench::write_results_csv(f, res.runs);
    for (const auto &r : res.runs)
    {
      out << "nu=" << bench::format_nu(r.spec.nu) << ": " << r.gca_macros << " GCA macros, "
          << r.stored_bytes << " bytes";
      if (r.solved && !r.failed)
      {
        out << ", " << r.report.iterations << " iterations";
      }
      out << '\n';
    }
    out << "monotone in nu: " << (res.monotone ? "yes" : "no") << "; constant-eta macros ("
        << res.constant_macros << ") DCA for all nu > 0: " << (res.constant_macros_dca ? "yes" : "no") << '\n';
    return res.monotone && res.constant_macros_dca ? kConverged : kFailure;
  }
  catch (const Error &e)
  {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

// `cagca`: Galerkin fraction over macro grid sizes.
inline int cmd_cagca(const RunConfig &c, std::ostream &out, std::ostream &err)
{
  try
  {
    const auto dir = detail::prepare_output(c);
    bench::CagcaSpec spec;
    spec.base = c.experiment;
    spec.macro_sizes = c.macro_sizes;
    const auto res = bench::run_cagca_study(spec, c.threads);
    auto f = detail::open(dir / "cagca.csv");
    bench::write_results_csv(f, res.runs);
    for (const auto &r : res.runs)
    {
      if (r.failed)
      {
        out << r.spec.mesh.nx << "x" << r.spec.mesh.ny << ": error: " << r.error << '\n';
        continue;
      }
      out << r.spec.mesh.nx << "x" << r.spec.mesh.ny << ": c_agca = " << r.c_agca << " ("
          << r.gca_macros << " macros, " << r.stored_bytes << " bytes)\n";
    }
    out << "strictly decreasing: " << (res.strictly_decreasing ? "yes" : "no") << '\n';
    return kConverged;
  }
  catch (const Error &e)
  {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

// `memory-model`: the 3D model table plus the measured 2D tally of the configured hierarchy.
inline int cmd_memory_model(const RunConfig &c, std::ostream &out, std::ostream &err)
{
  try
  {
    const auto dir = detail::prepare_output(c);
    const auto m = bench::memory_model_3d(c.n_fill, c.n_restart_model, c.c_agca_model, c.c_u_model);
    const auto exact = bench::memory_model_3d(c.n_fill, c.n_restart_model, c.c_agca_model,
                                              bench::kVelocityShare3DLimit);
    {
      auto f = detail::open(dir / "memory_model.csv");
      bench::write_memory_table(f, m);
    }
    {
      auto f = detail::open(dir / "memory_model_limit.csv");
      bench::write_memory_table(f, exact);
    }
    out << std::fixed << std::setprecision(2);
    out << "3D model (c_u = " << m.c_u << "), units of N_L\n";
    out << "  Mem_A            " << m.mem_A() << '\n';
    out << "  Mem_K            " << m.mem_K() << '\n';
    out << "  sparse GCA       " << m.sparse_gca() << '\n';
    out << "  element-wise GCA " << m.elementwise_gca() << '\n';
    out << "  stencil GCA      " << m.stencil_gca() << '\n';
    out << "  with c_u = 1 - 1/24: Mem_A " << exact.mem_A() << ", Mem_K " << exact.mem_K() << '\n';
    const auto &e = c.experiment;
    MeshHierarchy mesh(MacroGrid(e.mesh.nx, e.mesh.ny), e.mesh.L);
    const auto eta = e.problem.viscosity();
    CoefficientEval eval(eta, e.problem.eval_mode, mesh);
    AgcaHierarchy<ViscousPhysics> h(mesh, eval, bench::make_plan(e, eta, mesh));
    const auto t = bench::memory_tally_2d(h, e.solver.krylov.restart);
    {
      auto f = detail::open(dir / "memory_tally.csv");
      bench::write_memory_tally(f, t);
    }
    out << "2D tally (" << e.mesh.nx << "x" << e.mesh.ny << ", L=" << e.mesh.L << ", "
        << bench::to_string(e.mode) << "): N_L " << t.n_total << ", c_agca " << t.c_agca
        << ", stored " << t.stored_entries << " entries = " << t.measured_per_NL() << " N_L (model "
        << t.model_per_NL() << ")\n";
    out << std::defaultfloat;
    return kConverged;
  }
  catch (const Error &e)
  {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

inline int cmd_selftest(std::ostream &out, std::ostream &err)
{
  try
  {
    const auto checks = selftest::run_all();
    bool ok = true;
    for (const auto &c : checks)
    {
      out << (c.pass ? "PASS  " : "FAIL  ") << c.name << "  [" << c.detail << "]\n";
      ok = ok && c.pass;
    }
    out << (ok ? "all checks passed" : "some checks failed") << '\n';
    return ok ? kConverged : kFailure;
  }
  catch (const Error &e)
  {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

// `report`: SVG plots for whichever sweep CSVs exist in the output directory.
inline int cmd_report(const RunConfig &c, std::ostream &out, std::ostream &err)
{
  try
  {
    const fs::path dir(c.output_dir);
    int written = 0;
    auto plot = [&](const std::string &csv, const std::string &svg, const std::string &x, const std::string &y,
                    const std::vector<std::string> &labels, bench::PlotSpec spec) {
      const auto path = dir / csv;
      if (!fs::exists(path))
      {
        return;
      }
      std::ifstream in(path);
      const auto table = bench::read_csv(in);
      auto f = detail::open(dir / svg);
      bench::write_svg_plot(f, spec, bench::series_from_table(table, x, y, labels));
      out << "wrote " << (dir / svg).string() << '\n';
      ++written;
    };
    plot("sweep.csv", "sweep_iterations.svg", "DR", "iterations",
         {"family", "coarsening_mode", "eval_mode", "omega", "n_sinkers"},
         {"FGMRES iterations vs dynamic ratio", "dynamic ratio", "iterations", true, false});
    plot("nu_sweep.csv", "nu_sweep_bytes.svg", "nu", "stored_bytes", {"family"},
         {"stored coarse-grid bytes vs nu", "nu", "bytes", true, false});
    plot("nu_sweep.csv", "nu_sweep_iterations.svg", "nu", "iterations", {"family"},
         {"iterations vs nu", "nu", "iterations", true, false});
    plot("cagca.csv", "cagca.svg", "macro_nx", "c_agca", {"family"},
         {"Galerkin fraction vs macro grid size", "macros per direction", "c_agca", true, false});
    plot("residuals.csv", "residuals.svg", "iteration", "relative_residual", {},
         {"relative residual history", "iteration", "relative residual", false, true});
    if (written == 0)
    {
      throw ArgumentError("no CSV outputs found in '" + c.output_dir + "'");
    }
    return kConverged;
  }
  catch (const std::exception &e)
  {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

// `debug dump-mesh`: vertices and elements of one level.
inline int cmd_dump_mesh(const RunConfig &c, int level, std::ostream &out, std::ostream &err)
{
  try
  {
    MeshHierarchy mesh(MacroGrid(c.experiment.mesh.nx, c.experiment.mesh.ny), c.experiment.mesh.L);
    require(level >= 0 && level <= mesh.max_level(), "dump level out of range");
    mesh.dump(out, level);
    return kConverged;
  }
  catch (const Error &e)
  {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

// `debug dump-plan`: c_agca, stored matrices per level and the GCA macro set.
inline int cmd_dump_plan(const RunConfig &c, std::ostream &out, std::ostream &err)
{
  try
  {
    const auto &e = c.experiment;
    MeshHierarchy mesh(MacroGrid(e.mesh.nx, e.mesh.ny), e.mesh.L);
    const auto eta = e.problem.viscosity();
    CoefficientEval eval(eta, e.problem.eval_mode, mesh);
    AgcaHierarchy<ViscousPhysics> h(mesh, eval, bench::make_plan(e, eta, mesh));
    h.dump(out);
    return kConverged;
  }
  catch (const Error &e)
  {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace agca::cli
