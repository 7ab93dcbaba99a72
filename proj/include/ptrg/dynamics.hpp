#pragma once

// Closed (possibly non-Hermitian) Schroedinger evolution and Lindblad
// evolution with lowering jumps, sampled on a time grid.

#include <functional>
#include <string>
#include <vector>

#include "ptrg/ptsym.hpp"
#include "ptrg/qops.hpp"

namespace ptrg {

enum class EvolutionMode { ClosedStandard, ClosedCPWeighted, Lindblad };

std::string_view to_string(EvolutionMode m);

struct TrajectoryRecord {
  std::vector<double> times;
  int sites = 0;
  /// [time][site]
  std::vector<std::vector<double>> sx, sy, sz;
  std::vector<double> norm_or_trace;
  EvolutionMode mode = EvolutionMode::ClosedStandard;
  /// "spectral" or "rk4"
  std::string propagator;
  bool broken_phase = false;
  /// Largest |Im| among the recorded expectation values.
  double max_imag = 0.0;
  /// Step actually used by fixed-step integration (0 for spectral propagation).
  double dt_used = 0.0;

  std::vector<double> sz_series(int site) const;  // 1-based
};

/// Uniform grid 0, step, 2 step, ..., t_max (inclusive up to rounding).
std::vector<double> uniform_grid(double t_max, double step);

enum class Propagator { Auto, Spectral, RK4 };

struct ClosedOptions {
  double dt = 1e-3;
  Propagator propagator = Propagator::Auto;
  /// Spectral propagation only when cond([phi_n]) is below this.
  double spectral_condition = 1e8;
};

using StateSampler = std::function<void(std::size_t index, double t, const StateVector& psi)>;

/// Calls `on_sample` at every grid time with the unnormalized state. Returns the
/// propagator used ("spectral" or "rk4").
std::string propagate_closed(const OperatorMatrix& h, const StateVector& psi0, const std::vector<double>& grid,
                             const ClosedOptions& opts, const StateSampler& on_sample);

/// Standard mode: <psi|A|psi>/<psi|psi>. CP-weighted mode: <psi|CPA|psi>/<psi|CP|psi> using pt->c and pt->parity.
TrajectoryRecord evolve_closed(const OperatorMatrix& h, const StateVector& psi0, const std::vector<double>& grid,
                               EvolutionMode mode, const PTOperators* pt = nullptr, const ClosedOptions& opts = {});

struct LindbladSpec {
  double gamma = 0.0;
  /// 1-based sites carrying a jump sqrt(gamma) sigma^-; empty means every site.
  std::vector<int> sites;
};

struct LindbladOptions {
  double dt = 1e-3;
  int max_halvings = 6;
  DensityTolerances tol{1e-8, 1e-8, -1e-8};
  /// Use the serial reference kernel instead of the OpenMP one.
  bool serial = false;
};

using DensitySampler = std::function<void(std::size_t index, double t, const OperatorMatrix& rho)>;

/// Fixed-step RK4 at exactly `dt`; throws PositivityLost when a sample fails the
/// density-matrix checks.
void propagate_lindblad(const OperatorMatrix& h, const DensityMatrix& rho0, const LindbladSpec& spec,
                        const std::vector<double>& grid, double dt, const LindbladOptions& opts,
                        const DensitySampler& on_sample);

/// Retries with halved dt on PositivityLost. Throws NonHermitianHamiltonian when
/// ||H - H^dagger|| / ||H|| >= 1e-10.
TrajectoryRecord evolve_lindblad(const OperatorMatrix& h, const DensityMatrix& rho0, const LindbladSpec& spec,
                                 const std::vector<double>& grid, const LindbladOptions& opts = {});

/// Right-hand side of the master equation, exposed for generator checks.
OperatorMatrix lindblad_generator(const OperatorMatrix& h, const OperatorMatrix& rho, const LindbladSpec& spec);

struct SiteSteadyState {
  double stddev = 0.0;
  double drift = 0.0;  // least-squares slope of <S^z> against t
};

/// Per-site statistics of <S^z> over samples with t in [t_a, t_b]; needs at least
/// `min_samples` samples (WindowTooSmall otherwise).
std::vector<SiteSteadyState> steady_state_metric(const TrajectoryRecord& tr, double t_a, double t_b,
                                                 std::size_t min_samples = 10);

}  // namespace ptrg
