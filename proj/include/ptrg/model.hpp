#pragma once

// Couplings, fields and operator builders for XXZ and XYZ Richardson-Gaudin
// models. Coupling matrices in a CouplingSet already carry the factor g.

#include <string_view>
#include <vector>

#include "ptrg/qops.hpp"

namespace ptrg {

enum class Family { Rational, Trigonometric, Hyperbolic };

Family parse_family(std::string_view name);
std::string_view to_string(Family f);

struct CouplingPair {
  double gx = 0.0;
  double gz = 0.0;
};

/// rational (1/d, 1/d), trigonometric (1/sin d, cot d), hyperbolic (1/sinh d, coth d)
/// with d = ei - ej. Throws SingularDifference within `pole_tol` of a pole.
CouplingPair coupling_family(Family f, double ei, double ej, double pole_tol = 1e-12);

/// Location of the pole of the family closest to d (0, or k*pi for trigonometric).
double nearest_pole(Family f, double d);

struct CouplingSet {
  std::vector<double> epsilon;
  double g = 0.0;
  std::vector<cplx> bx, by;
  std::vector<double> bz;
  OperatorMatrix gamma_x, gamma_y, gamma_z;  // N x N, zero diagonal

  int sites() const noexcept { return static_cast<int>(epsilon.size()); }
  /// Sizes, finiteness, distinct epsilon, zero diagonals.
  void validate() const;
};

/// B = (0, 0, 1), no couplings.
CouplingSet free_couplings(const std::vector<double>& epsilon);

struct XYZFieldParams {
  double alpha_x = 1.0, alpha_y = 1.0;
  double beta_x = 0.5, beta_y = 0.5;
  cplx delta{}, lambda{};
  std::vector<double> epsilon;
  double g = 0.0;
};

CouplingSet build_fields_xyz(const XYZFieldParams& p);

struct XXZParams {
  Family family = Family::Rational;
  std::vector<double> epsilon;
  double g = 0.0;
  /// Multiply Gamma^x (and Gamma^y) by i: the PT pairing deformation.
  bool imaginary_x_coupling = false;
};

/// GammaX = GammaY = g * Gamma^x_family, GammaZ = g * Gamma^z_family, B = (0, 0, 1).
CouplingSet build_couplings_xxz(const XXZParams& p);

struct XXZIntegrabilityReport {
  double antisymmetry_x = 0.0;  // max |Gx_ij + Gx_ji|
  double antisymmetry_z = 0.0;  // max |Gz_ij + Gz_ji|
  double triple = 0.0;          // max |Gx_ij Gx_jk - Gx_ik (Gz_ij + Gz_jk)|
  double max() const;
};

XXZIntegrabilityReport check_integrability_xxz(const CouplingSet& cs);

struct XYZIntegrabilityReport {
  /// max |G^b_ij B^a_j + G^c_ji B^a_i| over permutations (a, b, c) and i != j.
  double linear = 0.0;
  /// max |G^a_ik G^b_jk - G^a_ij G^c_jk - G^b_ji G^c_ik| over permutations and distinct i, j, k.
  double quadratic = 0.0;
  /// Diagnostic: the linear condition with G^a_ji in place of G^c_ji.
  double linear_alternate = 0.0;
  double max() const;
};

XYZIntegrabilityReport check_integrability_xyz(const CouplingSet& cs);

/// sum_i eps_i S^z_i + sum_{i != j} (Gx_ij (S+_i S-_j + S-_i S+_j) + Gz_ij S^z_i S^z_j)
OperatorMatrix build_hamiltonian_xxz(const SpinSystem& sys, const CouplingSet& cs);

/// Spin: Q_i = B_i . S_i + sum_k G^a_ik S^a_i S^a_k.  Pauli: same with sigma in place of S.
enum class ChargeNormalization { Spin, Pauli };

/// Charge of site i (1-based).
OperatorMatrix build_charge(const SpinSystem& sys, const CouplingSet& cs, int site,
                            ChargeNormalization norm = ChargeNormalization::Spin);

std::vector<OperatorMatrix> build_all_charges(const SpinSystem& sys, const CouplingSet& cs,
                                              ChargeNormalization norm = ChargeNormalization::Spin);

OperatorMatrix build_hamiltonian_from_charges(const std::vector<OperatorMatrix>& charges,
                                              const std::vector<double>& weights);

}  // namespace ptrg
