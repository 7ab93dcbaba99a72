#pragma once

// Config-driven runner behind the `ptrg` executable. A run reads one JSON
// config, executes a single task and writes summary.json plus task CSVs into
// the output directory. Output bytes depend only on the config and the build.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ptrg/qops.hpp"

namespace ptrg::cli {

enum class ModelKind { XxzRational, XxzTrig, XxzHyperbolic, XyzField };

struct ModelConfig {
  ModelKind kind = ModelKind::XyzField;
  int n = 0;
  std::vector<double> epsilon;
  double g = 0.0;
  double alpha_x = 1.0, alpha_y = 1.0, beta_x = 0.5, beta_y = 0.5;
  cplx delta{}, lambda{};
  bool imaginary_x_coupling = false;
};

enum class TaskKind { Spectrum, Charges, Integrability, Dynamics, Lindblad, Perturb, Bethe, Couplings };

struct TaskConfig {
  TaskKind kind = TaskKind::Spectrum;
  // spectrum
  double tol = 1e-8;
  // charges
  std::string normalization = "spin";
  // dynamics / lindblad
  double t_max = 50.0;
  double step = 0.05;
  double dt = 1e-3;
  double gamma = 0.0;
  std::string initial;
  std::string mode = "standard";  // "standard" | "cp"
  double window_a = 40.0, window_b = 50.0;
  std::vector<double> weights;
  std::vector<int> jump_sites;
  // perturb
  std::string inner = "cpt";
  std::vector<double> scales;
  bool bz_from_epsilon = false;
  // bethe
  int pairs = 1;
  // couplings
  std::vector<double> d_grid;
};

struct OutputConfig {
  std::string directory = "out";
  bool csv = true;
  bool json = true;
};

struct RunConfig {
  std::optional<ModelConfig> model;
  TaskConfig task;
  OutputConfig output;
};

/// Parses and validates a config document. Throws Error(Validation) with a
/// one-line message on any schema or physical-invariant violation.
RunConfig parse_config(std::string_view text);

struct RunRequest {
  std::filesystem::path config;
  /// Overrides output.directory when set.
  std::optional<std::filesystem::path> out;
  int threads = 0;
  bool seedless = false;
};

struct RunResult {
  int exit_code = 0;
  std::string diagnostic;
  std::filesystem::path out_dir;
};

/// 0 on success, 2 on validation errors, 3 on numerical failures. Diagnostics
/// and wall time go to `err`, never into the artifacts.
RunResult run(const RunRequest& req, std::ostream& err);

/// printf("%.17g")
std::string format_double(double x);

/// Rows `family,d,gamma_x,gamma_z,nearest_pole` for the three families at each d.
/// Throws Error(Validation) when some d lies within 1e-6 of a pole.
std::string couplings_csv(const std::vector<double>& d_grid);

}  // namespace ptrg::cli
