#pragma once

// Rational Richardson equations
//   1/g + (1/2) sum_j 1/(eps_j - E_a) - sum_{b != a} 1/(E_b - E_a) = 0
// solved by Newton continuation in g, plus Bethe-state construction and checks
// against H_R = sum_i 2 eps_i S^z_i + g sum_{i,j} S^+_i S^-_j.

#include <string>
#include <vector>

#include "ptrg/qops.hpp"

namespace ptrg {

struct RichardsonProblem {
  std::vector<double> epsilon;
  double g = 0.0;
  int pairs = 1;

  void validate() const;
};

struct BetheOptions {
  /// Geometric grid in |g| from start_ratio * g to g.
  int checkpoints = 20;
  double start_ratio = 1e-4;
  /// Max-norm residual target. Near g = 0 it is raised to the rounding floor
  /// 16 eps_mach max(1, |E_a|) sum_j 1/(2 |eps_j - E_a|^2) when that is larger.
  double tol = 1e-10;
  /// Step halving stops once |g(t + h) - g(t)| falls below this.
  double min_step = 1e-6;
  int max_newton = 40;
  /// Phase amplitude of the complex detour g(t) = g0 (g/g0)^t exp(i phi sin(pi t)).
  double detour_phase = 0.25;
  double collision_tol = 1e-10;
};

struct HomotopyCheckpoint {
  cplx g;
  std::vector<cplx> roots;
};

struct BetheRoots {
  std::vector<cplx> roots;
  double residual = 0.0;
  double min_gap = 0.0;
  bool coalesced = false;
  /// "real" or "complex_detour"
  std::string path;
  std::vector<HomotopyCheckpoint> trace;
  /// Max-norm residuals of the Newton iterates at the target coupling.
  std::vector<double> final_newton_residuals;
};

/// Residuals of the equations at complex coupling g.
std::vector<cplx> richardson_equations(const std::vector<double>& epsilon, cplx g, const std::vector<cplx>& roots);

/// Throws NonConvergence when neither the real path nor the complex detour reaches g.
BetheRoots solve_richardson(const RichardsonProblem& p, const BetheOptions& opts = {});

struct BetheState {
  StateVector raw;
  StateVector normalized;
};

/// prod_a (sum_i S^+_i / (eps_i - E_a)) applied to the all-down state.
/// Throws RootAtEpsilon when a root coincides with some eps_i.
BetheState bethe_state(const SpinSystem& sys, const std::vector<double>& epsilon, const std::vector<cplx>& roots);

OperatorMatrix richardson_hamiltonian(const SpinSystem& sys, const std::vector<double>& epsilon, double g);

/// -sum_i eps_i + 2 sum_a E_a, the H_R eigenvalue of a Bethe state (diagnostic only).
cplx richardson_energy(const std::vector<double>& epsilon, const std::vector<cplx>& roots);

struct EigenstateCheck {
  cplx rayleigh;
  double residual = 0.0;      // ||H s - rayleigh s||
  double best_overlap = 0.0;  // weight of s in the eigenspace nearest to rayleigh
};

EigenstateCheck verify_eigenstate(const OperatorMatrix& h, const StateVector& state, double cluster_tol = 1e-8);

}  // namespace ptrg
