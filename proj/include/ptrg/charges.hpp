#pragma once

// Conserved-charge suite: mutual commutation, the quadratic relations
// Q_i^2 = sum_j C_ij Q_j + K_i, and the transfer matrix.

#include <array>
#include <vector>

#include "ptrg/model.hpp"
#include "ptrg/qops.hpp"

namespace ptrg {

struct ChargeSet {
  std::vector<OperatorMatrix> charges;
  CouplingSet source;
  ChargeNormalization normalization = ChargeNormalization::Spin;
};

ChargeSet build_charge_set(const SpinSystem& sys, const CouplingSet& cs,
                           ChargeNormalization norm = ChargeNormalization::Spin);

struct CommutationReport {
  /// max_{i<j} ||[Q_i, Q_j]||_F / (||Q_i||_F ||Q_j||_F)
  double max_pair = 0.0;
  int worst_i = 0, worst_j = 0;  // 1-based, 0 when N = 1
  /// max_i ||[Q_i, H]||_F / (||Q_i||_F ||H||_F); negative when no H was given.
  double max_with_h = -1.0;
};

CommutationReport commutation_report(const ChargeSet& set, const OperatorMatrix* h = nullptr);

struct QuadraticRelation {
  OperatorMatrix c;       // N x N, zero diagonal
  std::vector<cplx> k;    // K_i
  double kappa = 1.0;
  /// Largest spread between all usable branch/axis evaluations of each C_ik.
  double branch_agreement = 0.0;
  ChargeNormalization normalization = ChargeNormalization::Spin;
};

/// Coefficients for charges built with `norm`. The relations are evaluated on the
/// sigma-normalized coefficients (B/2, Gamma/4 for spin charges), which makes K_i
/// come out in the units of Q_i^2 and leaves kappa = 1.
QuadraticRelation quadratic_coeffs(const CouplingSet& cs, ChargeNormalization norm = ChargeNormalization::Spin,
                                   double denominator_tol = 1e-12);

/// ||Q_i^2 - sum_{j != i} C_ij Q_j - kappa K_i I||_F for every i.
std::vector<double> quadratic_residual(const ChargeSet& set, const QuadraticRelation& qr, double kappa);

inline constexpr std::array<double, 3> kKappaCandidates{1.0, 0.25, 0.5};

struct KappaCalibration {
  double kappa = 1.0;
  std::array<double, 3> totals{};  // summed residual per candidate
  std::vector<double> residuals;   // at the chosen kappa
};

/// Picks the candidate in kKappaCandidates with the smallest summed residual.
KappaCalibration calibrate_kappa(const ChargeSet& set, const QuadraticRelation& qr);

/// T(u) = sum_i S^z_i / (u - eps_i). Throws PoleAtEpsilon within `pole_tol`.
OperatorMatrix transfer_matrix(const SpinSystem& sys, const CouplingSet& cs, cplx u, double pole_tol = 1e-12);

}  // namespace ptrg
