#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stokes_fv/assembly.hpp"
#include "stokes_fv/solver.hpp"

namespace stokes_fv::cli {

enum class Command { solve, convergence, probe };
Command parse_command(std::string_view name);
std::string_view to_string(Command command);

enum class Probe { checkerboard, infsup, consistency, regularity, dual_bound };
Probe parse_probe(std::string_view name);
std::string_view to_string(Probe probe);

/// Process exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_internal = 1;
inline constexpr int exit_config = 2;
inline constexpr int exit_numerical = 3;

struct RunConfig {
  Command command = Command::solve;
  /// Grid description (see grid_from_description); when empty, uniform grids
  /// with the sizes in `n_list` are used.
  std::optional<std::string> grid;
  std::vector<int> n_list;
  SchemeKind scheme = SchemeKind::brezzi_pitkaranta;
  double lambda = 1.0;
  std::string case_id = "ms1";
  std::filesystem::path out_dir = ".";
  SolverOptions solver;
  int quad_order = 3;
  PressureSpace space = PressureSpace::cluster_constant;
  Probe what = Probe::checkerboard;
  bool dump_system = false;
  int random_samples = 50;
  unsigned long long seed = 20240601ULL;
};

/// Defaults, with `out_dir` taken from STOKES_FV_OUT when set.
RunConfig default_config();

/// Overlays the keys present in a JSON config onto `config`. Unknown keys are
/// rejected so that typos in checked-in fixtures fail loudly.
void apply_json(RunConfig& config, std::string_view json_text);
void apply_json_file(RunConfig& config, const std::filesystem::path& path);

/// "8,16,32" -> {8, 16, 32}. Empty text gives an empty list.
std::vector<int> parse_n_list(std::string_view text);

/// Runs one command; progress goes to `log`, errors to `err`. Returns an exit
/// code and never throws for module errors.
int run(const RunConfig& config, std::ostream& log, std::ostream& err);

int cmd_solve(const RunConfig& config, std::ostream& log);
int cmd_convergence(const RunConfig& config, std::ostream& log);
int cmd_probe(const RunConfig& config, std::ostream& log);

}  // namespace stokes_fv::cli
