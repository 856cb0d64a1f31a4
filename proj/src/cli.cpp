#include "stokes_fv/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "stokes_fv/errors.hpp"
#include "stokes_fv/io.hpp"
#include "stokes_fv/verify.hpp"

namespace stokes_fv::cli {

namespace {

using json = nlohmann::json;

std::string csv_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

template <class T>
T json_get(const json& j, std::string_view key) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + std::string(key) + "' has the wrong type");
  }
}

Grid single_grid(const RunConfig& c) {
  if (c.grid) {
    if (!c.n_list.empty()) throw ConfigError("give either a grid description or --n, not both");
    return grid_from_description(*c.grid);
  }
  if (c.n_list.size() != 1) throw ConfigError("this command needs exactly one grid size");
  return build_uniform(c.n_list.front());
}

std::vector<int> sizes_or(const RunConfig& c, std::vector<int> fallback) {
  if (c.grid) throw ConfigError("this probe runs on uniform grids; use --n instead of --grid");
  return c.n_list.empty() ? fallback : c.n_list;
}

}  // namespace

Command parse_command(std::string_view name) {
  if (name == "solve") return Command::solve;
  if (name == "convergence") return Command::convergence;
  if (name == "probe") return Command::probe;
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string_view to_string(Command command) {
  switch (command) {
    case Command::solve:
      return "solve";
    case Command::convergence:
      return "convergence";
    case Command::probe:
      return "probe";
  }
  return "?";
}

Probe parse_probe(std::string_view name) {
  if (name == "checkerboard") return Probe::checkerboard;
  if (name == "infsup") return Probe::infsup;
  if (name == "consistency") return Probe::consistency;
  if (name == "regularity") return Probe::regularity;
  if (name == "dual-bound") return Probe::dual_bound;
  throw ConfigError("unknown probe '" + std::string(name) +
                    "' (expected checkerboard|infsup|consistency|regularity|dual-bound)");
}

std::string_view to_string(Probe probe) {
  switch (probe) {
    case Probe::checkerboard:
      return "checkerboard";
    case Probe::infsup:
      return "infsup";
    case Probe::consistency:
      return "consistency";
    case Probe::regularity:
      return "regularity";
    case Probe::dual_bound:
      return "dual-bound";
  }
  return "?";
}

RunConfig default_config() {
  RunConfig c;
  if (const char* env = std::getenv("STOKES_FV_OUT"); env && *env) c.out_dir = env;
  return c;
}

std::vector<int> parse_n_list(std::string_view text) {
  std::vector<int> out;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    std::string_view item = text.substr(0, comma);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    int v = 0;
    auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError("malformed grid size list entry '" + std::string(item) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

void apply_json(RunConfig& c, std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");

  for (const auto& [key, value] : root.items()) {
    if (key == "command") {
      c.command = parse_command(json_get<std::string>(value, key));
    } else if (key == "grid") {
      c.grid = value.is_string() ? json_get<std::string>(value, key) : value.dump();
    } else if (key == "n" || key == "n_list") {
      c.n_list = value.is_array() ? json_get<std::vector<int>>(value, key)
                                  : std::vector<int>{json_get<int>(value, key)};
    } else if (key == "scheme") {
      if (value.is_object()) {
        for (const auto& [sk, sv] : value.items()) {
          if (sk == "kind") {
            c.scheme = parse_scheme_kind(json_get<std::string>(sv, "scheme.kind"));
          } else if (sk == "lambda") {
            c.lambda = json_get<double>(sv, "scheme.lambda");
          } else {
            throw ConfigError("unknown config key 'scheme." + sk + "'");
          }
        }
      } else {
        c.scheme = parse_scheme_kind(json_get<std::string>(value, key));
      }
    } else if (key == "lambda") {
      c.lambda = json_get<double>(value, key);
    } else if (key == "case") {
      c.case_id = json_get<std::string>(value, key);
    } else if (key == "out") {
      c.out_dir = json_get<std::string>(value, key);
    } else if (key == "quad") {
      c.quad_order = json_get<int>(value, key);
    } else if (key == "space") {
      c.space = parse_pressure_space(json_get<std::string>(value, key));
    } else if (key == "what") {
      c.what = parse_probe(json_get<std::string>(value, key));
    } else if (key == "dump_system") {
      c.dump_system = json_get<bool>(value, key);
    } else if (key == "seed") {
      c.seed = json_get<unsigned long long>(value, key);
    } else if (key == "samples") {
      c.random_samples = json_get<int>(value, key);
    } else if (key == "solver") {
      if (!value.is_object()) throw ConfigError("config key 'solver' must be an object");
      for (const auto& [sk, sv] : value.items()) {
        if (sk == "tol") {
          c.solver.tol = json_get<double>(sv, "solver.tol");
        } else if (sk == "backend") {
          c.solver.backend = parse_backend(json_get<std::string>(sv, "solver.backend"));
        } else {
          throw ConfigError("unknown config key 'solver." + sk + "'");
        }
      }
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
}

void apply_json_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  apply_json(config, text);
}

int cmd_solve(const RunConfig& c, std::ostream& log) {
  if (!(c.solver.tol > 0.0)) throw ConfigError("solver tolerance must be positive");
  const Grid grid = single_grid(c);
  const SchemeSpec spec = make_scheme(c.scheme, c.lambda, grid);
  const ManufacturedCase mc = manufactured_case(c.case_id);
  const SaddleSystem system = assemble(spec, grid, mc.forcing, c.quad_order);

  if (c.dump_system) {
    io::write_file(c.out_dir / "system.mtx",
                   [&](std::ostream& o) { io::write_matrix_market(o, system.matrix()); });
    io::write_file(c.out_dir / "rhs.csv",
                   [&](std::ostream& o) { io::write_vector_rows(o, system.rhs()); });
  }

  const SolveReport report = solve(system, c.solver);
  const bool have_solution = report.u.size() == grid.cell_count();
  if (have_solution) {
    io::write_file(c.out_dir / "u.csv", [&](std::ostream& o) { io::write_vector_csv(o, grid, report.u); });
    io::write_file(c.out_dir / "p.csv", [&](std::ostream& o) { io::write_scalar_csv(o, grid, report.p); });
  }

  io::write_file(c.out_dir / "summary.csv", [&](std::ostream& o) {
    auto row = [&](std::string_view key, const std::string& value) {
      o << key << ',' << value << '\n';
    };
    o << "key,value\n";
    row("scheme", std::string(to_string(c.scheme)));
    row("lambda", spec.uses_lambda() ? io::format_double(c.lambda) : "nan");
    row("case", mc.id);
    row("nx", std::to_string(grid.nx()));
    row("ny", std::to_string(grid.ny()));
    row("unknowns", std::to_string(system.size()));
    row("nonzeros", std::to_string(report.matrix_nonzeros));
    row("status", std::string(to_string(report.status)));
    row("residual", io::format_double(report.residual_norm));
    row("tol", io::format_double(c.solver.tol));
    row("rcond_estimate", io::format_double(report.rcond_estimate));
    row("spurious_pressure_modes", std::to_string(report.spurious_pressure_modes));
    row("multiplier", io::format_double(report.multiplier));
    if (have_solution) {
      const EnergyTerms e = energy_functional(system, report.u, report.p);
      const SolutionErrors err = solution_errors(grid, mc, report.u, report.p);
      row("energy_velocity", io::format_double(e.velocity));
      row("energy_stabilization", io::format_double(e.stabilization));
      row("forcing_work", io::format_double(forcing_work(system, report.u)));
      row("err_u_h1", io::format_double(err.velocity_h1));
      row("err_p_l2", io::format_double(err.pressure_l2));
    }
    row("diagnostic", csv_quote(report.diagnostic));
  });

  log << "solve " << to_string(c.scheme) << " on " << grid.nx() << "x" << grid.ny() << ": "
      << to_string(report.status) << ", residual " << io::format_double(report.residual_norm)
      << '\n';
  if (!report.ok()) {
    log << "diagnostic: " << report.diagnostic << '\n';
    return exit_numerical;
  }
  return exit_ok;
}

int cmd_convergence(const RunConfig& c, std::ostream& log) {
  if (c.grid) throw ConfigError("convergence studies run on uniform grids; use --n");
  if (c.n_list.empty()) throw ConfigError("convergence study needs a non-empty --n list");
  ConvergenceOptions opt;
  opt.solver = c.solver;
  opt.quad_order = c.quad_order;
  const ConvergenceTable table =
      run_convergence(c.scheme, c.lambda, manufactured_case(c.case_id), c.n_list, opt);
  io::write_file(c.out_dir / "convergence.csv",
                 [&](std::ostream& o) { io::write_convergence_csv(o, table); });
  for (const ConvergenceRow& r : table.rows) {
    log << "n=" << r.n << " err_u=" << io::format_double(r.err_u_h1)
        << " err_p=" << io::format_double(r.err_p_l2) << " order_u=" << io::format_double(r.order_u)
        << " order_p=" << io::format_double(r.order_p) << '\n';
  }
  return exit_ok;
}

int cmd_probe(const RunConfig& c, std::ostream& log) {
  switch (c.what) {
    case Probe::checkerboard: {
      const auto sizes = sizes_or(c, {4, 8, 16, 32});
      const CheckerboardSweep sweep = checkerboard_sweep(sizes);
      io::write_file(c.out_dir / "checkerboard.csv",
                     [&](std::ostream& o) { io::write_checkerboard_csv(o, sweep); });
      io::write_file(c.out_dir / "checkerboard_fit.csv",
                     [&](std::ostream& o) { io::write_checkerboard_fit_csv(o, sweep); });
      log << "checkerboard decay exponent " << io::format_double(sweep.decay_exponent) << '\n';
      return exit_ok;
    }
    case Probe::infsup: {
      const auto sizes = sizes_or(c, {4, 8, 16});
      const auto rows = infsup_sweep(c.space, sizes);
      io::write_file(c.out_dir / "infsup.csv",
                     [&](std::ostream& o) { io::write_infsup_csv(o, c.space, rows); });
      for (const InfSupRow& r : rows) log << "n=" << r.n << " beta=" << io::format_double(r.beta) << '\n';
      return exit_ok;
    }
    case Probe::consistency: {
      const Grid grid = single_grid(c);
      const ConsistencyDefects d = consistency_check(grid);
      io::write_file(c.out_dir / "consistency.csv",
                     [&](std::ostream& o) { io::write_consistency_csv(o, d); });
      log << "max interior flux defect " << io::format_double(d.max_interior()) << '\n';
      return exit_ok;
    }
    case Probe::regularity: {
      const Grid grid = single_grid(c);
      const double value = cluster_regularity(grid, make_clusters(grid));
      io::write_file(c.out_dir / "regularity.csv",
                     [&](std::ostream& o) { io::write_regularity_csv(o, grid, value); });
      log << "cluster regularity " << io::format_double(value) << '\n';
      return exit_ok;
    }
    case Probe::dual_bound: {
      const auto sizes = sizes_or(c, {8, 16, 32});
      if (c.random_samples < 0) throw ConfigError("sample count must be non-negative");
      std::vector<DualBoundFit> fits;
      for (int n : sizes) {
        const Grid grid = build_uniform(n);
        const auto samples = dual_bound_samples(grid, c.random_samples, c.seed);
        fits.push_back(lemma2_inequality_probe(grid, samples));
        log << "n=" << n << " c1=" << io::format_double(fits.back().c1)
            << " c2=" << io::format_double(fits.back().c2) << '\n';
      }
      io::write_file(c.out_dir / "dual_bound.csv",
                     [&](std::ostream& o) { io::write_dual_bound_csv(o, sizes, fits); });
      return exit_ok;
    }
  }
  return exit_internal;
}

int run(const RunConfig& config, std::ostream& log, std::ostream& err) {
  try {
    switch (config.command) {
      case Command::solve:
        return cmd_solve(config, log);
      case Command::convergence:
        return cmd_convergence(config, log);
      case Command::probe:
        return cmd_probe(config, log);
    }
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_numerical;
  } catch (const Error& e) {
    err << "configuration error: " << e.what() << '\n';
    return exit_config;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_internal;
  }
  return exit_internal;
}

}  // namespace stokes_fv::cli
