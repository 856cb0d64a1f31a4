#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "stokes_fv/cli.hpp"
#include "stokes_fv/errors.hpp"

namespace {

namespace sc = stokes_fv::cli;

// Raw flag values; only flags given on the command line override the config.
struct Flags {
  std::string config;
  std::string scheme;
  double lambda = 0.0;
  std::string n;
  std::string case_id;
  std::string grid;
  std::string out;
  double tol = 0.0;
  int quad = 0;
  std::string backend;
  std::string space;
  std::string what;
  bool dump_system = false;
  int samples = 0;
  unsigned long long seed = 0;
};

struct Options {
  CLI::Option* config;
  CLI::Option* scheme;
  CLI::Option* lambda;
  CLI::Option* n;
  CLI::Option* case_id;
  CLI::Option* grid;
  CLI::Option* out;
  CLI::Option* tol;
  CLI::Option* quad;
  CLI::Option* backend;
  CLI::Option* space = nullptr;
  CLI::Option* what = nullptr;
  CLI::Option* dump_system = nullptr;
  CLI::Option* samples = nullptr;
  CLI::Option* seed = nullptr;
};

Options add_common(CLI::App& app, Flags& f) {
  Options o{};
  o.config = app.add_option("--config", f.config, "JSON config file; flags override its keys");
  o.scheme = app.add_option("--scheme", f.scheme, "natural|bp|cluster|cluster-constant");
  o.lambda = app.add_option("--lambda", f.lambda, "stabilization weight");
  o.n = app.add_option("--n", f.n, "cells per side, comma-separated list");
  o.case_id = app.add_option("--case", f.case_id, "manufactured case: ms0|ms1");
  o.grid = app.add_option("--grid", f.grid, "grid description, e.g. 'uniform n=16' or tensor:xs;ys");
  o.out = app.add_option("--out", f.out, "output directory (default $STOKES_FV_OUT or .)");
  o.tol = app.add_option("--tol", f.tol, "relative residual tolerance");
  o.quad = app.add_option("--quad", f.quad, "Gauss points per direction for f (1-3)");
  o.backend = app.add_option("--backend", f.backend, "sparse-lu|dense-lu");
  return o;
}

void apply(const Options& o, const Flags& f, sc::RunConfig& c) {
  if (o.config->count()) sc::apply_json_file(c, f.config);
  if (o.scheme->count()) c.scheme = stokes_fv::parse_scheme_kind(f.scheme);
  if (o.lambda->count()) c.lambda = f.lambda;
  if (o.n->count()) c.n_list = sc::parse_n_list(f.n);
  if (o.case_id->count()) c.case_id = f.case_id;
  if (o.grid->count()) c.grid = f.grid;
  if (o.out->count()) c.out_dir = f.out;
  if (o.tol->count()) c.solver.tol = f.tol;
  if (o.quad->count()) c.quad_order = f.quad;
  if (o.backend->count()) c.solver.backend = stokes_fv::parse_backend(f.backend);
  if (o.space && o.space->count()) c.space = stokes_fv::parse_pressure_space(f.space);
  if (o.what && o.what->count()) c.what = sc::parse_probe(f.what);
  if (o.dump_system && o.dump_system->count()) c.dump_system = f.dump_system;
  if (o.samples && o.samples->count()) c.random_samples = f.samples;
  if (o.seed && o.seed->count()) c.seed = f.seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Collocated finite-volume Stokes solver and verification harness"};
  app.require_subcommand(1);

  Flags solve_flags, conv_flags, probe_flags;
  CLI::App* solve = app.add_subcommand("solve", "assemble and solve one manufactured problem");
  Options solve_opts = add_common(*solve, solve_flags);
  solve_opts.dump_system =
      solve->add_flag("--dump-system", solve_flags.dump_system, "write system.mtx and rhs.csv");

  CLI::App* conv = app.add_subcommand("convergence", "error table over a refinement sweep");
  Options conv_opts = add_common(*conv, conv_flags);

  CLI::App* probe = app.add_subcommand("probe", "stability and consistency diagnostics");
  Options probe_opts = add_common(*probe, probe_flags);
  probe_opts.what =
      probe->add_option("--what", probe_flags.what, "checkerboard|infsup|consistency|regularity|dual-bound");
  probe_opts.space = probe->add_option("--space", probe_flags.space, "pressure space: full|cluster");
  probe_opts.samples = probe->add_option("--samples", probe_flags.samples, "random fields per grid (dual-bound probe)");
  probe_opts.seed = probe->add_option("--seed", probe_flags.seed, "random seed (dual-bound probe)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sc::exit_config;
  }

  sc::RunConfig config = sc::default_config();
  try {
    if (solve->parsed()) {
      config.command = sc::Command::solve;
      apply(solve_opts, solve_flags, config);
    } else if (conv->parsed()) {
      config.command = sc::Command::convergence;
      apply(conv_opts, conv_flags, config);
    } else {
      config.command = sc::Command::probe;
      apply(probe_opts, probe_flags, config);
    }
  } catch (const stokes_fv::Error& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return sc::exit_config;
  }
  return sc::run(config, std::cout, std::cerr);
}
