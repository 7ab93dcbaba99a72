#pragma once

// Parity, time reversal, signature / C operator, metric rho = PC, the
// eta = exp(-1/2 sum q_i S^z_i) ansatz, and PT inner products.

#include <vector>

#include "ptrg/eig.hpp"
#include "ptrg/model.hpp"
#include "ptrg/qops.hpp"

namespace ptrg {

/// Tensor product of sigma^z over all sites; diagonal, P^2 = I.
OperatorMatrix parity_op(const SpinSystem& sys);

/// ||P conj(H) P^{-1} - H||_F / ||H||_F
double pt_residual(const OperatorMatrix& h, const OperatorMatrix& p);

/// ||H^dagger - P H P^{-1}||_F / ||H||_F
double pseudo_hermiticity_residual(const OperatorMatrix& h, const OperatorMatrix& p);

struct SignatureOptions {
  /// Tolerance for the Real tag and for grouping degenerate real eigenvalues.
  double real_tol = 1e-8;
  /// Maximum relative deviation of P|phi_n> from s_n |psi_n>.
  double unimodular_tol = 1e-6;
  /// Build C over a spectrum with complex pairs instead of throwing BrokenPTPhase.
  bool allow_broken = false;
};

struct PTOperators {
  OperatorMatrix parity;
  std::vector<int> signature;
  OperatorMatrix c;
  OperatorMatrix rho;  // P C
  /// Eigenvectors after rescaling so that P|phi_n> = s_n |psi_n> on the real sector.
  std::vector<StateVector> right, left;
  std::vector<cplx> eigenvalues;
  PTClassification tags;
  bool broken_phase = false;
  /// max_n ||P phi_n - s_n psi_n|| / ||psi_n|| over real eigenvalues.
  double unimodular_deviation = 0.0;
};

/// Throws BrokenPTPhase (unless allowed) and SignatureNotUnimodular.
PTOperators signature_and_c(const SpectralDecomposition& decomp, const OperatorMatrix& p,
                            const SignatureOptions& opts = {});

/// s_n P-normalized pairing applied to a matrix in one call.
PTOperators pt_operators(const OperatorMatrix& h, const OperatorMatrix& p, const SignatureOptions& opts = {});

struct MetricReport {
  OperatorMatrix rho;
  double intertwining_residual = 0.0;  // ||H^dagger rho - rho H|| / ||H||
  double c_square_residual = 0.0;      // ||C^2 - I||
  double c_commutator_residual = 0.0;  // ||[C, H]|| / ||H||
  double hermiticity_residual = 0.0;   // ||rho - rho^dagger|| / ||rho||
  double min_eigenvalue = 0.0;         // of the Hermitian part of rho
  bool positive = false;
};

MetricReport metric_rho(const OperatorMatrix& p, const OperatorMatrix& c, const OperatorMatrix& h);

struct EtaAnsatz {
  std::vector<double> q;
  OperatorMatrix eta, eta_inverse, rho_ansatz;
  /// ||rho_ansatz - eta^dagger eta||_F
  double consistency_residual = 0.0;
  /// max_i ||eta S^+_i eta^{-1} - e^{-q_i/2} S^+_i|| and the S^- analogue.
  double bch_residual = 0.0;
};

EtaAnsatz eta_from_q(const SpinSystem& sys, const std::vector<double>& q);

struct QSolution {
  std::vector<double> q;
  /// sqrt(min_q sum_{i != j} Im(G^x_ij e^{q_i - q_j})^2)
  double residual = 0.0;
  bool applicable = false;
  int iterations = 0;
};

/// Real q with q_1 = 0 minimizing the imaginary part of G^x_ij e^{q_i - q_j}.
QSolution solve_q_xxz(const CouplingSet& cs, double tol = 1e-10);

struct FieldRuleQ {
  std::vector<double> q;  // e^{q_i} = 1/|Im B^x_i|
  /// Largest imaginary part among e^{q_i} B^x_i, e^{q_i} B^y_i, e^{q_i+q_k} G^x_ik, e^{q_i+q_k} G^y_ik.
  double consistency_residual = 0.0;
};

FieldRuleQ q_from_field_rule(const CouplingSet& cs);

struct Counterpart {
  OperatorMatrix h;
  double hermiticity_residual = 0.0;
};

/// h = eta H eta^{-1}
Counterpart hermitian_counterpart(const OperatorMatrix& h, const EtaAnsatz& eta);

/// Closed form e^{q_i} B^x S^x + e^{q_i} B^y S^y + B^z S^z + sum_k (e^{q_i+q_k} G^x S^x S^x
/// + e^{q_i+q_k} G^y S^y S^y + G^z S^z S^z), for comparison with eta^{-1} Q_i eta.
OperatorMatrix closed_form_transformed_charge(const SpinSystem& sys, const CouplingSet& cs, int site,
                                              const std::vector<double>& q);

/// <phi| rho |psi>
cplx inner_rho(const StateVector& phi, const StateVector& psi, const OperatorMatrix& rho);

/// <psi| W A |psi> / <psi| W |psi>; throws VanishingNorm below `min_norm`.
cplx weighted_expectation(const OperatorMatrix& a, const StateVector& psi, const OperatorMatrix& w,
                          double min_norm = 1e-12);

/// weighted_expectation with W = C P.
cplx expectation_cp(const OperatorMatrix& a, const StateVector& psi, const OperatorMatrix& c, const OperatorMatrix& p,
                    double min_norm = 1e-12);

}  // namespace ptrg
