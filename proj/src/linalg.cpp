#include "ptrg/linalg.hpp"

#include <limits>

namespace ptrg {

EMatrix to_eigen(const OperatorMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.dim());
  EMatrix out(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) out(r, c) = m(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
  return out;
}

OperatorMatrix from_eigen(const EMatrix& m) {
  OperatorMatrix out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = m(r, c);
  return out;
}

EVector to_eigen(const StateVector& v) {
  EVector out(static_cast<Eigen::Index>(v.dim()));
  for (std::size_t i = 0; i < v.dim(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

StateVector from_eigen(const EVector& v) {
  StateVector out(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out[static_cast<std::size_t>(i)] = v(i);
  return out;
}

std::vector<double> hermitian_eigenvalues(const OperatorMatrix& a) {
  const EMatrix m = to_eigen(a);
  const EMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<EMatrix> solver(h, Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

double min_hermitian_eigenvalue(const OperatorMatrix& a) {
  const auto ev = hermitian_eigenvalues(a);
  return ev.empty() ? 0.0 : ev.front();
}

double condition_number(const EMatrix& m) {
  Eigen::BDCSVD<EMatrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return 1.0;
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

}  // namespace ptrg
