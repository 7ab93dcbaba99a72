#include "ptrg/eig.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <Eigen/Eigenvalues>

#include "ptrg/error.hpp"
#include "ptrg/linalg.hpp"

namespace ptrg {

namespace {

double scale_of(cplx z) { return std::max(1.0, std::abs(z)); }

bool lex_less(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::vector<std::size_t> sorted_order(const std::vector<cplx>& values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return lex_less(values[a], values[b]); });
  return idx;
}

// Union-find clusters of eigenvalues within tol * max(1, |E|).
std::vector<std::vector<std::size_t>> cluster(const std::vector<cplx>& e, double tol) {
  const std::size_t n = e.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(e[i] - e[j]) <= tol * scale_of(e[i])) parent[find(i)] = find(j);
  std::vector<std::vector<std::size_t>> groups;
  std::vector<long> slot(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(groups.size());
      groups.emplace_back();
    }
    groups[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  return groups;
}

struct LeftResult {
  EMatrix left;  // columns psi_n
  double adjoint_mismatch = 0.0;
  bool ok = false;
};

// Left vectors by decomposing A^dagger and matching mu ~ conj(E) cluster by cluster.
LeftResult left_by_matching(const EMatrix& a, const std::vector<cplx>& e, const EMatrix& right,
                            const EigOptions& opts) {
  LeftResult res;
  const Eigen::Index n = a.rows();
  Eigen::ComplexEigenSolver<EMatrix> adj(a.adjoint(), true);
  if (adj.info() != Eigen::Success) return res;
  std::vector<cplx> mu_conj(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) mu_conj[static_cast<std::size_t>(i)] = std::conj(adj.eigenvalues()(i));

  const auto groups = cluster(e, opts.tol);
  std::vector<bool> used(static_cast<std::size_t>(n), false);
  res.left = EMatrix::Zero(n, n);

  // Matching window: the clustering tolerance, widened to cover independent
  // roundoff in the two decompositions.
  for (const auto& g : groups) {
    cplx center{};
    for (auto i : g) center += e[i];
    center /= static_cast<double>(g.size());
    double radius = 0.0;
    for (auto i : g) radius = std::max(radius, std::abs(e[i] - center));
    const double window = radius + std::max(opts.tol, 1e-10) * scale_of(center);

    std::vector<std::size_t> cand;
    for (std::size_t m = 0; m < mu_conj.size(); ++m)
      if (!used[m] && std::abs(mu_conj[m] - center) <= window) cand.push_back(m);
    if (cand.size() != g.size()) return res;

    const auto k = static_cast<Eigen::Index>(g.size());
    EMatrix vc(n, k), wc(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
      vc.col(j) = right.col(static_cast<Eigen::Index>(g[static_cast<std::size_t>(j)]));
      wc.col(j) = adj.eigenvectors().col(static_cast<Eigen::Index>(cand[static_cast<std::size_t>(j)]));
      used[cand[static_cast<std::size_t>(j)]] = true;
      res.adjoint_mismatch = std::max(res.adjoint_mismatch, std::abs(mu_conj[cand[static_cast<std::size_t>(j)]] - center));
    }
    if (k > 1 && condition_number(vc) > opts.defective_condition) return res;
    const EMatrix gram = wc.adjoint() * vc;
    if (condition_number(gram) > opts.defective_condition) return res;
    // Rescale so that wc^dagger vc = I inside the block.
    const EMatrix x = gram.inverse().adjoint();
    const EMatrix lc = wc * x;
    for (Eigen::Index j = 0; j < k; ++j) res.left.col(static_cast<Eigen::Index>(g[static_cast<std::size_t>(j)])) = lc.col(j);
  }
  res.ok = true;
  return res;
}

}  // namespace

SpectralDecomposition eig_general(const OperatorMatrix& a_in, const EigOptions& opts) {
  if (!a_in.is_finite()) fail(ErrorCode::Validation, "eig_general: matrix has non-finite entries");
  const EMatrix a = to_eigen(a_in);
  const Eigen::Index n = a.rows();

  Eigen::ComplexEigenSolver<EMatrix> solver(a, true);
  if (solver.info() != Eigen::Success) fail(ErrorCode::NearDefective, "eig_general: QR iteration did not converge");

  std::vector<cplx> raw(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) raw[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  const auto order = sorted_order(raw);

  std::vector<cplx> e(order.size());
  EMatrix right(n, n);
  for (std::size_t j = 0; j < order.size(); ++j) {
    e[j] = raw[order[j]];
    EVector v = solver.eigenvectors().col(static_cast<Eigen::Index>(order[j]));
    v /= v.norm();
    right.col(static_cast<Eigen::Index>(j)) = v;
  }

  SpectralDecomposition out;
  out.right_condition = condition_number(right);

  LeftResult lr = left_by_matching(a, e, right, opts);
  if (!lr.ok) {
    if (!(out.right_condition < opts.inverse_fallback_condition))
      fail(ErrorCode::NearDefective, "eig_general: left/right pairing failed and eigenvector matrix is ill-conditioned "
                                     "(cond = " + std::to_string(out.right_condition) + ")");
    const EMatrix inv = right.inverse();
    lr.left = inv.adjoint();
    out.used_inverse_fallback = true;
    // Report how well the inverse rows match the adjoint spectrum.
    Eigen::ComplexEigenSolver<EMatrix> adj(a.adjoint(), false);
    for (std::size_t j = 0; j < e.size(); ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (Eigen::Index m = 0; m < n; ++m) best = std::min(best, std::abs(std::conj(adj.eigenvalues()(m)) - e[j]));
      lr.adjoint_mismatch = std::max(lr.adjoint_mismatch, best);
    }
  }
  out.adjoint_mismatch = lr.adjoint_mismatch;

  const EMatrix overlap = lr.left.adjoint() * right;
  out.biorth_residual = (overlap - EMatrix::Identity(n, n)).cwiseAbs().maxCoeff();

  out.eigenvalues = e;
  out.right.reserve(e.size());
  out.left.reserve(e.size());
  out.near_defective.reserve(e.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    out.right.push_back(from_eigen(EVector(right.col(j))));
    out.left.push_back(from_eigen(EVector(lr.left.col(j))));
    // With unit |phi> and <psi|phi> = 1, ||psi|| is the eigenvalue condition number.
    out.near_defective.push_back(lr.left.col(j).norm() > opts.defective_condition);
  }
  return out;
}

double SpectralDecomposition::reconstruction_residual(const OperatorMatrix& a) const {
  OperatorMatrix recon(a.dim());
  for (std::size_t n = 0; n < size(); ++n)
    for (std::size_t r = 0; r < a.dim(); ++r)
      for (std::size_t c = 0; c < a.dim(); ++c) recon(r, c) += eigenvalues[n] * right[n][r] * std::conj(left[n][c]);
  const double na = frobenius_norm(a);
  const double diff = frobenius_norm(a - recon);
  return na == 0.0 ? diff : diff / na;
}

double SpectralDecomposition::resolution_residual() const {
  if (right.empty()) return 0.0;
  const std::size_t d = right.front().dim();
  OperatorMatrix sum(d);
  for (std::size_t n = 0; n < size(); ++n)
    for (std::size_t r = 0; r < d; ++r)
      for (std::size_t c = 0; c < d; ++c) sum(r, c) += right[n][r] * std::conj(left[n][c]);
  return frobenius_norm(sum - OperatorMatrix::identity(d));
}

double SpectralDecomposition::backward_error(const OperatorMatrix& a) const {
  double s = 0.0;
  for (std::size_t n = 0; n < size(); ++n) {
    StateVector r = a * right[n];
    for (std::size_t i = 0; i < r.dim(); ++i) s += std::norm(r[i] - eigenvalues[n] * right[n][i]);
  }
  const double na = frobenius_norm(a);
  return na == 0.0 ? std::sqrt(s) : std::sqrt(s) / na;
}

// ---- PT classification ------------------------------------------------------

std::size_t PTClassification::count(PTTag tag) const {
  return static_cast<std::size_t>(std::count(tags.begin(), tags.end(), tag));
}

const char* to_string(PTTag tag) {
  switch (tag) {
    case PTTag::Real: return "real";
    case PTTag::ConjugatePair: return "pair";
    case PTTag::UnpairedComplex: return "unpaired";
  }
  return "?";
}

PTClassification classify_spectrum(const std::vector<cplx>& e, double tol) {
  PTClassification out;
  out.tol = tol;
  out.tags.assign(e.size(), PTTag::UnpairedComplex);
  out.partner.assign(e.size(), -1);
  std::vector<bool> done(e.size(), false);

  for (std::size_t n : sorted_order(e)) {
    if (done[n]) continue;
    const double s = scale_of(e[n]);
    done[n] = true;
    if (std::abs(e[n].imag()) <= tol * s) {
      out.tags[n] = PTTag::Real;
      continue;
    }
    long best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < e.size(); ++m) {
      if (done[m]) continue;
      const double d = std::abs(e[n] - std::conj(e[m]));
      if (d <= tol * s && d < best_d) {
        best_d = d;
        best = static_cast<long>(m);
      }
    }
    if (best >= 0) {
      const auto m = static_cast<std::size_t>(best);
      done[m] = true;
      out.tags[n] = out.tags[m] = PTTag::ConjugatePair;
      out.partner[n] = static_cast<int>(m);
      out.partner[m] = static_cast<int>(n);
    }
  }
  return out;
}

}  // namespace ptrg
