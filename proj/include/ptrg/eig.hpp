#pragma once

// General complex eigendecomposition with biorthonormal left/right pairs and
// PT spectrum classification.

#include <optional>
#include <vector>

#include "ptrg/qops.hpp"

namespace ptrg {

struct EigOptions {
  /// Relative tolerance for eigenvalue clustering and conjugate matching.
  double tol = 1e-8;
  /// Above this eigenvalue condition number an eigenpair is flagged near-defective.
  double defective_condition = 1e8;
  /// Fallback through V^{-1} is allowed only below this condition number.
  double inverse_fallback_condition = 1e8;
};

/// Eigenvalues E_n with right vectors |phi_n> (unit 2-norm) and left vectors
/// |psi_n>, scaled so that <psi_n|phi_n> = 1. Sorted by (Re E, Im E).
struct SpectralDecomposition {
  std::vector<cplx> eigenvalues;
  std::vector<StateVector> right;
  std::vector<StateVector> left;
  /// max_{n,m} |<psi_n|phi_m> - delta_nm|
  double biorth_residual = 0.0;
  /// max_n |mu_n - conj(E_n)| for the eigenvalues mu of A^dagger matched to E_n.
  double adjoint_mismatch = 0.0;
  /// 2-norm condition number of [phi_1 ... phi_n].
  double right_condition = 1.0;
  /// Per-eigenpair flag: eigenvalue condition number above the threshold.
  std::vector<bool> near_defective;
  /// True when left vectors came from V^{-1} instead of conjugate matching.
  bool used_inverse_fallback = false;

  std::size_t size() const noexcept { return eigenvalues.size(); }

  /// ||A - sum_n E_n |phi_n><psi_n| ||_F / ||A||_F
  double reconstruction_residual(const OperatorMatrix& a) const;
  /// ||sum_n |phi_n><psi_n| - I||_F
  double resolution_residual() const;
  /// ||A V - V diag(E)||_F / ||A||_F
  double backward_error(const OperatorMatrix& a) const;
};

/// Throws Error(NearDefective) when left/right pairing cannot be completed.
SpectralDecomposition eig_general(const OperatorMatrix& a, const EigOptions& opts = {});

enum class PTTag { Real, ConjugatePair, UnpairedComplex };

struct PTClassification {
  std::vector<PTTag> tags;
  /// Partner index for ConjugatePair tags, -1 otherwise.
  std::vector<int> partner;
  double tol = 0.0;

  std::size_t count(PTTag tag) const;
  bool all_real() const { return count(PTTag::Real) == tags.size(); }
};

const char* to_string(PTTag tag);

/// Greedy conjugate matching in (Re, Im)-sorted order; pairs matched when
/// |E_a - conj(E_b)| <= tol * max(1, |E_a|), nearest candidate first.
PTClassification classify_spectrum(const std::vector<cplx>& eigenvalues, double tol);

}  // namespace ptrg
