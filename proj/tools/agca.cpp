// SPDX-License-Identifier: Apache-2.0

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "agca/cli.hpp"

namespace
{

agca::cli::RunConfig configure(const std::string &path, const agca::cli::Overrides &o)
{
  agca::cli::RunConfig c = path.empty() ? agca::cli::parse_config(nlohmann::json::object())
                                        : agca::cli::load_config(path);
  return agca::cli::apply_overrides(std::move(c), o);
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"AGCA multigrid and Stokes solver driver"};
  app.require_subcommand(1);

  std::string config;
  std::optional<std::string> out;
  std::optional<int> threads, cap;
  int dump_level = 0;

  auto common = [&](CLI::App *sub) {
    sub->add_option("--config", config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--cap", cap, "FGMRES iteration cap")->check(CLI::PositiveNumber);
  };

  auto *solve = app.add_subcommand("solve", "single solve with report and residual history");
  auto *sweep = app.add_subcommand("sweep", "convergence sweep over the configured grid");
  auto *nu = app.add_subcommand("nu-sweep", "GCA threshold study");
  auto *cagca = app.add_subcommand("cagca", "Galerkin fraction over macro grid sizes");
  auto *memory = app.add_subcommand("memory-model", "memory model table and measured tally");
  auto *selftest = app.add_subcommand("selftest", "built-in consistency checks");
  auto *report = app.add_subcommand("report", "SVG plots from CSV outputs");
  auto *debug = app.add_subcommand("debug", "inspection dumps");
  debug->require_subcommand(1);
  auto *dump_mesh = debug->add_subcommand("dump-mesh", "vertices and elements of one level");
  auto *dump_plan = debug->add_subcommand("dump-plan", "coarsening plan and stored matrices");
  dump_mesh->add_option("--level", dump_level, "mesh level")->check(CLI::NonNegativeNumber);
  for (auto *s : {solve, sweep, nu, cagca, memory, report, dump_mesh, dump_plan})
  {
    common(s);
  }

  CLI11_PARSE(app, argc, argv);

  agca::cli::RunConfig c;
  try
  {
    c = configure(config, {out, threads, cap});
  }
  catch (const std::exception &e)
  {
    std::cerr << "error: " << e.what() << '\n';
    return agca::cli::kFailure;
  }
  using namespace agca::cli;
  if (*solve) return cmd_solve(c, std::cout, std::cerr);
  if (*sweep) return cmd_sweep(c, std::cout, std::cerr);
  if (*nu) return cmd_nu_sweep(c, std::cout, std::cerr);
  if (*cagca) return cmd_cagca(c, std::cout, std::cerr);
  if (*memory) return cmd_memory_model(c, std::cout, std::cerr);
  if (*selftest) return cmd_selftest(std::cout, std::cerr);
  if (*report) return cmd_report(c, std::cout, std::cerr);
  if (*dump_mesh) return cmd_dump_mesh(c, dump_level, std::cout, std::cerr);
  if (*dump_plan) return cmd_dump_plan(c, std::cout, std::cerr);
  return kFailure;
}
