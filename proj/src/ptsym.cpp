#include "ptrg/ptsym.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "ptrg/error.hpp"
#include "ptrg/linalg.hpp"

namespace ptrg {

namespace {

double relative(double num, double den) { return den == 0.0 ? num : num / den; }

}  // namespace

OperatorMatrix parity_op(const SpinSystem& sys) {
  OperatorMatrix p(sys.dim());
  for (std::size_t b = 0; b < sys.dim(); ++b) p(b, b) = (std::popcount(b) % 2 == 0) ? 1.0 : -1.0;
  return p;
}

double pt_residual(const OperatorMatrix& h, const OperatorMatrix& p) {
  if (h.dim() != p.dim()) fail(ErrorCode::DimensionMismatch, "pt_residual: dimension mismatch");
  // P is an involution, so P^{-1} = P.
  const OperatorMatrix t = p * conjugate_entrywise(h) * p;
  return relative(frobenius_norm(t - h), frobenius_norm(h));
}

double pseudo_hermiticity_residual(const OperatorMatrix& h, const OperatorMatrix& p) {
  if (h.dim() != p.dim()) fail(ErrorCode::DimensionMismatch, "pseudo_hermiticity_residual: dimension mismatch");
  return relative(frobenius_norm(dagger(h) - p * h * p), frobenius_norm(h));
}

PTOperators signature_and_c(const SpectralDecomposition& decomp, const OperatorMatrix& p, const SignatureOptions& opts) {
  const std::size_t n = decomp.size();
  if (n == 0 || p.dim() != decomp.right.front().dim())
    fail(ErrorCode::DimensionMismatch, "signature_and_c: parity does not match decomposition");

  PTOperators out;
  out.parity = p;
  out.eigenvalues = decomp.eigenvalues;
  out.tags = classify_spectrum(decomp.eigenvalues, opts.real_tol);
  out.broken_phase = !out.tags.all_real();
  if (out.broken_phase && !opts.allow_broken)
    fail(ErrorCode::BrokenPTPhase, "signature_and_c: " + std::to_string(n - out.tags.count(PTTag::Real)) +
                                       " eigenvalues are complex; signature undefined");

  const auto d = static_cast<Eigen::Index>(p.dim());
  EMatrix phi(d, static_cast<Eigen::Index>(n)), psi(d, static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    phi.col(static_cast<Eigen::Index>(j)) = to_eigen(decomp.right[j]);
    psi.col(static_cast<Eigen::Index>(j)) = to_eigen(decomp.left[j]);
  }
  const EMatrix pe = to_eigen(p);
  out.signature.assign(n, 1);

  // Real eigenvalues in (Re, Im) order, grouped into degenerate blocks.
  std::vector<std::size_t> real_idx;
  for (std::size_t j = 0; j < n; ++j)
    if (out.tags.tags[j] == PTTag::Real) real_idx.push_back(j);
  std::sort(real_idx.begin(), real_idx.end(), [&](std::size_t a, std::size_t b) {
    return decomp.eigenvalues[a].real() < decomp.eigenvalues[b].real();
  });

  std::size_t start = 0;
  while (start < real_idx.size()) {
    std::size_t end = start + 1;
    while (end < real_idx.size()) {
      const cplx a = decomp.eigenvalues[real_idx[end - 1]], b = decomp.eigenvalues[real_idx[end]];
      if (std::abs(b - a) > opts.real_tol * std::max(1.0, std::abs(a))) break;
      ++end;
    }
    const auto k = static_cast<Eigen::Index>(end - start);
    EMatrix fb(d, k), lb(d, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      fb.col(j) = phi.col(static_cast<Eigen::Index>(real_idx[start + static_cast<std::size_t>(j)]));
      lb.col(j) = psi.col(static_cast<Eigen::Index>(real_idx[start + static_cast<std::size_t>(j)]));
    }
    EMatrix form = fb.adjoint() * pe * fb;
    form = 0.5 * (form + form.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<EMatrix> es(form);
    const auto& lam = es.eigenvalues();
    const EMatrix& u = es.eigenvectors();
    EMatrix x(k, k), xinv_adj(k, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      const double m = std::abs(lam(j));
      if (!(m > std::numeric_limits<double>::min())) {
        out.unimodular_deviation = std::numeric_limits<double>::infinity();
        x.col(j) = u.col(j);
        xinv_adj.col(j) = u.col(j);
      } else {
        x.col(j) = u.col(j) / std::sqrt(m);
        xinv_adj.col(j) = u.col(j) * std::sqrt(m);
      }
    }
    const EMatrix fnew = fb * x;
    const EMatrix lnew = lb * xinv_adj;
    for (Eigen::Index j = 0; j < k; ++j) {
      const std::size_t idx = real_idx[start + static_cast<std::size_t>(j)];
      const int s = lam(j) >= 0.0 ? 1 : -1;
      out.signature[idx] = s;
      phi.col(static_cast<Eigen::Index>(idx)) = fnew.col(j);
      psi.col(static_cast<Eigen::Index>(idx)) = lnew.col(j);
      const double dev = (pe * fnew.col(j) - static_cast<double>(s) * lnew.col(j)).norm() / lnew.col(j).norm();
      out.unimodular_deviation = std::max(out.unimodular_deviation, std::isfinite(dev) ? dev : std::numeric_limits<double>::infinity());
    }
    start = end;
  }

  for (std::size_t j = 0; j < n; ++j) {
    if (out.tags.tags[j] == PTTag::Real) continue;
    const cplx v = psi.col(static_cast<Eigen::Index>(j)).dot(pe * phi.col(static_cast<Eigen::Index>(j)));
    out.signature[j] = v.real() >= 0.0 ? 1 : -1;
  }

  if (!(out.unimodular_deviation <= opts.unimodular_tol))
    fail(ErrorCode::SignatureNotUnimodular,
         "signature_and_c: P|phi_n> deviates from +-|psi_n> by " + std::to_string(out.unimodular_deviation));

  EMatrix scaled = phi;
  for (std::size_t j = 0; j < n; ++j) scaled.col(static_cast<Eigen::Index>(j)) *= static_cast<double>(out.signature[j]);
  const EMatrix c = scaled * psi.adjoint();
  out.c = from_eigen(c);
  out.rho = from_eigen(EMatrix(pe * c));
  out.right.reserve(n);
  out.left.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.right.push_back(from_eigen(EVector(phi.col(static_cast<Eigen::Index>(j)))));
    out.left.push_back(from_eigen(EVector(psi.col(static_cast<Eigen::Index>(j)))));
  }
  return out;
}

PTOperators pt_operators(const OperatorMatrix& h, const OperatorMatrix& p, const SignatureOptions& opts) {
  EigOptions eo;
  eo.tol = opts.real_tol;
  return signature_and_c(eig_general(h, eo), p, opts);
}

MetricReport metric_rho(const OperatorMatrix& p, const OperatorMatrix& c, const OperatorMatrix& h) {
  if (p.dim() != c.dim() || p.dim() != h.dim()) fail(ErrorCode::DimensionMismatch, "metric_rho: dimension mismatch");
  MetricReport r;
  r.rho = p * c;
  const double hn = frobenius_norm(h);
  r.intertwining_residual = relative(frobenius_norm(dagger(h) * r.rho - r.rho * h), hn);
  r.c_square_residual = frobenius_norm(c * c - OperatorMatrix::identity(c.dim()));
  r.c_commutator_residual = relative(frobenius_norm(commutator(c, h)), hn);
  r.hermiticity_residual = relative(frobenius_norm(r.rho - dagger(r.rho)), frobenius_norm(r.rho));
  r.min_eigenvalue = min_hermitian_eigenvalue(r.rho);
  r.positive = r.min_eigenvalue > 0.0 && r.hermiticity_residual < 1e-8;
  return r;
}

EtaAnsatz eta_from_q(const SpinSystem& sys, const std::vector<double>& q) {
  if (q.size() != static_cast<std::size_t>(sys.sites()))
    fail(ErrorCode::DimensionMismatch, "eta_from_q: need one q per site");
  EtaAnsatz out;
  out.q = q;
  const std::size_t dim = sys.dim();
  std::vector<double> eta(dim), eta_inv(dim), rho(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    double sz_sum = 0.0;
    for (int i = 1; i <= sys.sites(); ++i) {
      const bool down = (b >> (sys.sites() - i)) & 1U;
      sz_sum += q[static_cast<std::size_t>(i - 1)] * (down ? -0.5 : 0.5);
    }
    eta[b] = std::exp(-0.5 * sz_sum);
    eta_inv[b] = std::exp(0.5 * sz_sum);
    rho[b] = std::exp(-sz_sum);
  }
  out.eta = OperatorMatrix::diagonal(std::span<const double>(eta));
  out.eta_inverse = OperatorMatrix::diagonal(std::span<const double>(eta_inv));
  out.rho_ansatz = OperatorMatrix::diagonal(std::span<const double>(rho));
  out.consistency_residual = frobenius_norm(out.rho_ansatz - dagger(out.eta) * out.eta);
  for (int i = 1; i <= sys.sites(); ++i) {
    const auto ops = spin_ops(sys, i);
    const double qi = q[static_cast<std::size_t>(i - 1)];
    const double plus = frobenius_norm(out.eta * ops.plus * out.eta_inverse - cplx{std::exp(-qi / 2), 0.0} * ops.plus);
    const double minus = frobenius_norm(out.eta * ops.minus * out.eta_inverse - cplx{std::exp(qi / 2), 0.0} * ops.minus);
    out.bch_residual = std::max({out.bch_residual, plus, minus});
  }
  return out;
}

QSolution solve_q_xxz(const CouplingSet& cs, double tol) {
  const auto n = static_cast<std::size_t>(cs.sites());
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) a[i][j] = std::pow(cs.gamma_x(i, j).imag(), 2);

  std::vector<double> q(n, 0.0);
  auto objective = [&](const std::vector<double>& x) {
    double f = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (a[i][j] != 0.0) f += a[i][j] * std::exp(2.0 * (x[i] - x[j]));
    return f;
  };

  QSolution out;
  double f = objective(q);
  const auto m = static_cast<Eigen::Index>(n > 0 ? n - 1 : 0);
  for (int it = 0; it < 200 && m > 0 && f > 0.0; ++it) {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(m);
    Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m, m);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (a[i][j] == 0.0) continue;
        const double t = a[i][j] * std::exp(2.0 * (q[i] - q[j]));
        // d/dq_i = 2t, d/dq_j = -2t; second derivatives 4t with sign pattern.
        const Eigen::Index ii = static_cast<Eigen::Index>(i) - 1, jj = static_cast<Eigen::Index>(j) - 1;
        if (ii >= 0) grad(ii) += 2.0 * t;
        if (jj >= 0) grad(jj) -= 2.0 * t;
        if (ii >= 0) hess(ii, ii) += 4.0 * t;
        if (jj >= 0) hess(jj, jj) += 4.0 * t;
        if (ii >= 0 && jj >= 0) {
          hess(ii, jj) -= 4.0 * t;
          hess(jj, ii) -= 4.0 * t;
        }
      }
    out.iterations = it + 1;
    if (grad.norm() <= 1e-14 * std::max(1.0, f)) break;
    hess.diagonal().array() += 1e-12 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
    Eigen::VectorXd step = -hess.ldlt().solve(grad);
    if (!step.allFinite() || step.dot(grad) >= 0.0) step = -grad;
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 60; ++ls) {
      std::vector<double> trial = q;
      for (Eigen::Index k = 0; k < m; ++k) trial[static_cast<std::size_t>(k) + 1] += alpha * step(k);
      const double ft = objective(trial);
      if (ft < f) {
        q = trial;
        f = ft;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved) break;
  }
  out.q = q;
  out.residual = std::sqrt(f);
  out.applicable = out.residual <= tol;
  return out;
}

FieldRuleQ q_from_field_rule(const CouplingSet& cs) {
  const auto n = static_cast<std::size_t>(cs.sites());
  FieldRuleQ out;
  out.q.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double b = std::abs(cs.bx[i].imag());
    if (b == 0.0) fail(ErrorCode::Validation, "q_from_field_rule: Im(B^x) vanishes at site " + std::to_string(i + 1));
    out.q[i] = -std::log(b);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double ei = std::exp(out.q[i]);
    out.consistency_residual = std::max({out.consistency_residual, std::abs((ei * cs.bx[i]).imag()),
                                         std::abs((ei * cs.by[i]).imag())});
    for (std::size_t k = 0; k < n; ++k) {
      if (k == i) continue;
      const double e2 = std::exp(out.q[i] + out.q[k]);
      out.consistency_residual = std::max({out.consistency_residual, std::abs((e2 * cs.gamma_x(i, k)).imag()),
                                           std::abs((e2 * cs.gamma_y(i, k)).imag())});
    }
  }
  return out;
}

Counterpart hermitian_counterpart(const OperatorMatrix& h, const EtaAnsatz& eta) {
  if (h.dim() != eta.eta.dim()) fail(ErrorCode::DimensionMismatch, "hermitian_counterpart: dimension mismatch");
  Counterpart out;
  out.h = h;
  // eta is diagonal: (eta H eta^{-1})_rc = eta_r H_rc / eta_c
  for (std::size_t r = 0; r < h.dim(); ++r)
    for (std::size_t c = 0; c < h.dim(); ++c) out.h(r, c) *= eta.eta(r, r) * eta.eta_inverse(c, c);
  out.hermiticity_residual = hermiticity_residual(out.h);
  return out;
}

OperatorMatrix closed_form_transformed_charge(const SpinSystem& sys, const CouplingSet& cs, int site,
                                              const std::vector<double>& q) {
  if (q.size() != static_cast<std::size_t>(sys.sites()))
    fail(ErrorCode::DimensionMismatch, "closed_form_transformed_charge: need one q per site");
  CouplingSet t = cs;
  const auto i = static_cast<std::size_t>(site - 1);
  const double ei = std::exp(q[i]);
  t.bx[i] *= ei;
  t.by[i] *= ei;
  for (std::size_t k = 0; k < q.size(); ++k) {
    if (k == i) continue;
    const double e2 = std::exp(q[i] + q[k]);
    t.gamma_x(i, k) *= e2;
    t.gamma_y(i, k) *= e2;
  }
  return build_charge(sys, t, site);
}

cplx inner_rho(const StateVector& phi, const StateVector& psi, const OperatorMatrix& rho) {
  if (phi.dim() != rho.dim() || psi.dim() != rho.dim()) fail(ErrorCode::DimensionMismatch, "inner_rho: dimension mismatch");
  return inner(phi, rho * psi);
}

cplx weighted_expectation(const OperatorMatrix& a, const StateVector& psi, const OperatorMatrix& w, double min_norm) {
  if (a.dim() != psi.dim() || w.dim() != psi.dim())
    fail(ErrorCode::DimensionMismatch, "weighted_expectation: dimension mismatch");
  const StateVector wpsi = dagger(w) * psi;  // <psi|W = (W^dagger |psi>)^dagger
  const cplx den = inner(wpsi, psi);
  if (std::abs(den) < min_norm) fail(ErrorCode::VanishingNorm, "weighted_expectation: <psi|W|psi> vanishes");
  return inner(wpsi, a * psi) / den;
}

cplx expectation_cp(const OperatorMatrix& a, const StateVector& psi, const OperatorMatrix& c, const OperatorMatrix& p,
                    double min_norm) {
  return weighted_expectation(a, psi, c * p, min_norm);
}

}  // namespace ptrg
