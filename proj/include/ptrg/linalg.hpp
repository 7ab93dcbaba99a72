#pragma once

// Bridges between the library's matrix types and Eigen, used where a dense
// factorization is needed (eigensolvers, SVD, small linear solves).

#include <Eigen/Dense>

#include "ptrg/qops.hpp"

namespace ptrg {

using EMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic>;
using EVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

EMatrix to_eigen(const OperatorMatrix& m);
OperatorMatrix from_eigen(const EMatrix& m);
EVector to_eigen(const StateVector& v);
StateVector from_eigen(const EVector& v);

/// Eigenvalues of the Hermitian part (A + A^dagger)/2, ascending.
std::vector<double> hermitian_eigenvalues(const OperatorMatrix& a);
double min_hermitian_eigenvalue(const OperatorMatrix& a);

/// 2-norm condition number via SVD.
double condition_number(const EMatrix& m);

}  // namespace ptrg
