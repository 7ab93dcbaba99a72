#include "ptrg/charges.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ptrg/error.hpp"

namespace ptrg {

ChargeSet build_charge_set(const SpinSystem& sys, const CouplingSet& cs, ChargeNormalization norm) {
  cs.validate();
  ChargeSet set;
  set.charges = build_all_charges(sys, cs, norm);
  set.source = cs;
  set.normalization = norm;
  return set;
}

CommutationReport commutation_report(const ChargeSet& set, const OperatorMatrix* h) {
  CommutationReport r;
  const auto& q = set.charges;
  std::vector<double> norms(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    norms[i] = frobenius_norm(q[i]);
    if (norms[i] == 0.0) fail(ErrorCode::Validation, "commutation_report: charge " + std::to_string(i + 1) + " is zero");
  }
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = i + 1; j < q.size(); ++j) {
      const double v = frobenius_norm(commutator(q[i], q[j])) / (norms[i] * norms[j]);
      if (v > r.max_pair || r.worst_i == 0) {
        r.max_pair = std::max(r.max_pair, v);
        r.worst_i = static_cast<int>(i + 1);
        r.worst_j = static_cast<int>(j + 1);
      }
    }
  if (h != nullptr) {
    const double hn = frobenius_norm(*h);
    r.max_with_h = 0.0;
    if (hn > 0.0)
      for (std::size_t i = 0; i < q.size(); ++i)
        r.max_with_h = std::max(r.max_with_h, frobenius_norm(commutator(q[i], *h)) / (norms[i] * hn));
  }
  return r;
}

QuadraticRelation quadratic_coeffs(const CouplingSet& cs, ChargeNormalization norm, double denominator_tol) {
  cs.validate();
  const auto n = static_cast<std::size_t>(cs.sites());
  const double f1 = norm == ChargeNormalization::Spin ? 0.5 : 1.0;
  const double f2 = f1 * f1;
  auto b = [&](int axis, std::size_t i) -> cplx {
    if (axis == 0) return f1 * cs.bx[i];
    if (axis == 1) return f1 * cs.by[i];
    return cplx{f1 * cs.bz[i], 0.0};
  };
  auto gam = [&](int axis, std::size_t i, std::size_t k) -> cplx {
    const OperatorMatrix& m = axis == 0 ? cs.gamma_x : axis == 1 ? cs.gamma_y : cs.gamma_z;
    return f2 * m(i, k);
  };

  QuadraticRelation qr;
  qr.normalization = norm;
  qr.c = OperatorMatrix(n);
  qr.k.assign(n, cplx{});
  for (std::size_t i = 0; i < n; ++i) {
    cplx kval{};
    for (int a = 0; a < 3; ++a) {
      kval += b(a, i) * b(a, i);
      for (std::size_t k = 0; k < n; ++k)
        if (k != i) kval += gam(a, i, k) * gam(a, i, k);
    }
    qr.k[i] = kval;
  }

  constexpr int cyc[3][3] = {{0, 1, 2}, {1, 2, 0}, {2, 0, 1}};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < n; ++k) {
      if (i == k) continue;
      std::vector<cplx> linear, quadratic;
      for (int a = 0; a < 3; ++a)
        if (std::abs(b(a, k)) > denominator_tol) linear.push_back(2.0 * b(a, i) * gam(a, i, k) / b(a, k));
      for (const auto& p : cyc)
        if (std::abs(gam(p[0], k, i)) > denominator_tol)
          quadratic.push_back(-2.0 * gam(p[1], i, k) * gam(p[2], i, k) / gam(p[0], k, i));
      if (linear.empty() && quadratic.empty())
        fail(ErrorCode::AllDenominatorsVanish,
             "quadratic_coeffs: no usable denominator for C_" + std::to_string(i + 1) + std::to_string(k + 1));
      const cplx chosen = linear.empty() ? quadratic.front() : linear.front();
      qr.c(i, k) = chosen;
      for (const auto& v : linear) qr.branch_agreement = std::max(qr.branch_agreement, std::abs(v - chosen));
      for (const auto& v : quadratic) qr.branch_agreement = std::max(qr.branch_agreement, std::abs(v - chosen));
    }
  return qr;
}

std::vector<double> quadratic_residual(const ChargeSet& set, const QuadraticRelation& qr, double kappa) {
  const auto n = set.charges.size();
  if (qr.c.dim() != n || qr.k.size() != n) fail(ErrorCode::DimensionMismatch, "quadratic_residual: size mismatch");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    OperatorMatrix r = set.charges[i] * set.charges[i];
    for (std::size_t j = 0; j < n; ++j)
      if (j != i && qr.c(i, j) != cplx{}) r -= qr.c(i, j) * set.charges[j];
    const cplx shift = kappa * qr.k[i];
    for (std::size_t d = 0; d < r.dim(); ++d) r(d, d) -= shift;
    out[i] = frobenius_norm(r);
  }
  return out;
}

KappaCalibration calibrate_kappa(const ChargeSet& set, const QuadraticRelation& qr) {
  KappaCalibration cal;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < kKappaCandidates.size(); ++c) {
    auto res = quadratic_residual(set, qr, kKappaCandidates[c]);
    double total = 0.0;
    for (double v : res) total += v;
    cal.totals[c] = total;
    if (total < best) {
      best = total;
      cal.kappa = kKappaCandidates[c];
      cal.residuals = std::move(res);
    }
  }
  return cal;
}

OperatorMatrix transfer_matrix(const SpinSystem& sys, const CouplingSet& cs, cplx u, double pole_tol) {
  if (cs.sites() != sys.sites()) fail(ErrorCode::DimensionMismatch, "transfer_matrix: site count mismatch");
  OperatorMatrix t(sys.dim());
  for (int i = 1; i <= sys.sites(); ++i) {
    const cplx d = u - cs.epsilon[static_cast<std::size_t>(i - 1)];
    if (std::abs(d) <= pole_tol)
      fail(ErrorCode::PoleAtEpsilon, "transfer_matrix: u coincides with epsilon_" + std::to_string(i));
    add_pauli_string(t, sys, {{i, Axis::Z}}, 0.5 / d);
  }
  return t;
}

}  // namespace ptrg
