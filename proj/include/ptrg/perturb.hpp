#pragma once

// Perturbation theory in the transverse fields: H = H0 + V with
// H0 = sum B^z S^z + pairing terms and V = sum (B^x S^x + B^y S^y).

#include <string_view>
#include <vector>

#include "ptrg/model.hpp"
#include "ptrg/qops.hpp"

namespace ptrg {

struct PerturbationSplit {
  OperatorMatrix h0;
  OperatorMatrix v;
  /// H0 + V assembled term by term in one pass, for the split check.
  OperatorMatrix full;
  /// max(|B^x|, |B^y|) / min |B^z|
  double ratio = 0.0;
};

/// Throws ZeroLongitudinalField when some B^z_i vanishes.
PerturbationSplit split_hamiltonian(const SpinSystem& sys, const CouplingSet& cs);

/// Same split with V (and the full operator) scaled by s.
PerturbationSplit scale_perturbation(const PerturbationSplit& split, double s);

/// Standard: <phi_m|V|phi_n>. Biorthogonal: <psi_m|V|phi_n>.
/// Cpt: <phi_m|PC V|phi_n> / <phi_m|PC|phi_m> with C built on H0.
enum class InnerProduct { Standard, Biorthogonal, Cpt };

InnerProduct parse_inner_product(std::string_view name);
std::string_view to_string(InnerProduct ip);

struct CorrectionOptions {
  InnerProduct inner = InnerProduct::Cpt;
  /// Levels closer than this form a degenerate cluster.
  double degeneracy_tol = 1e-9;
  /// First-order shifts closer than this leave a cluster unresolved.
  double split_tol = 1e-9;
};

struct CorrectionTable {
  std::vector<cplx> e0, e1, e2;
  /// sum_m |V_mn|^2 / (E_n - E_m), the modulus-squared variant of E2.
  std::vector<cplx> e2_modulus;
  std::vector<int> cluster;       // cluster id per level
  std::vector<bool> degenerate;   // level shares its cluster
  std::vector<bool> valid;        // false inside unresolved clusters
  std::size_t unresolved_clusters = 0;
  /// [n][m]: V_mn / (E_n - E_m), zero inside the cluster of n.
  std::vector<std::vector<cplx>> state_coefficients;
  InnerProduct inner = InnerProduct::Cpt;

  std::size_t size() const noexcept { return e0.size(); }
};

/// Throws DefectiveH0 when H0 cannot be diagonalized with paired eigenvectors.
CorrectionTable corrections(const PerturbationSplit& split, const CorrectionOptions& opts = {});

/// At g = 0 with product eigenstates: max over basis pairs of
/// | |<m|V|n>|^2 - (|B^x_i|^2 + |B^y_i|^2)/4 | for single flips at site i (0 expected otherwise).
double closed_form_matrix_element_check(const SpinSystem& sys, const CouplingSet& cs, const PerturbationSplit& split);

struct ScalingResult {
  std::vector<double> scales;
  std::vector<std::size_t> levels;              // tracked level indices
  std::vector<std::vector<double>> errors;      // [level][scale]
  std::vector<double> slopes;                   // per level
  double min_slope = 0.0;
};

/// Fits log|E_exact(s) - (E0 + s E1 + s^2 E2)| against log s for every valid,
/// nondegenerate level. s = 0 entries carry error 0 and are left out of the fit.
/// Throws TrackingLost when levels cannot be followed unambiguously.
ScalingResult scaling_validation(const PerturbationSplit& split, const std::vector<double>& scales,
                                 const CorrectionOptions& opts = {});

}  // namespace ptrg
