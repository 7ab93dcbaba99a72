#include "ptrg/perturb.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "ptrg/eig.hpp"
#include "ptrg/error.hpp"
#include "ptrg/linalg.hpp"
#include "ptrg/ptsym.hpp"

namespace ptrg {

PerturbationSplit split_hamiltonian(const SpinSystem& sys, const CouplingSet& cs) {
  if (cs.sites() != sys.sites()) fail(ErrorCode::DimensionMismatch, "split_hamiltonian: site count mismatch");
  const int n = sys.sites();
  PerturbationSplit out;
  out.h0 = OperatorMatrix(sys.dim());
  out.v = OperatorMatrix(sys.dim());
  out.full = OperatorMatrix(sys.dim());
  double bmax = 0.0, bzmin = std::numeric_limits<double>::infinity();
  for (int i = 1; i <= n; ++i) {
    const auto a = static_cast<std::size_t>(i - 1);
    if (cs.bz[a] == 0.0) fail(ErrorCode::ZeroLongitudinalField, "split_hamiltonian: B^z vanishes at site " + std::to_string(i));
    bzmin = std::min(bzmin, std::abs(cs.bz[a]));
    bmax = std::max({bmax, std::abs(cs.bx[a]), std::abs(cs.by[a])});
    add_pauli_string(out.h0, sys, {{i, Axis::Z}}, 0.5 * cs.bz[a]);
    add_pauli_string(out.v, sys, {{i, Axis::X}}, 0.5 * cs.bx[a]);
    add_pauli_string(out.v, sys, {{i, Axis::Y}}, 0.5 * cs.by[a]);
    add_pauli_string(out.full, sys, {{i, Axis::Z}}, 0.5 * cs.bz[a]);
    add_pauli_string(out.full, sys, {{i, Axis::X}}, 0.5 * cs.bx[a]);
    add_pauli_string(out.full, sys, {{i, Axis::Y}}, 0.5 * cs.by[a]);
  }
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      const auto a = static_cast<std::size_t>(i - 1), b = static_cast<std::size_t>(j - 1);
      const cplx fx = 0.5 * cs.gamma_x(a, b);
      const cplx fz = 0.25 * cs.gamma_z(a, b);
      for (auto* m : {&out.h0, &out.full}) {
        add_pauli_string(*m, sys, {{i, Axis::X}, {j, Axis::X}}, fx);
        add_pauli_string(*m, sys, {{i, Axis::Y}, {j, Axis::Y}}, fx);
        add_pauli_string(*m, sys, {{i, Axis::Z}, {j, Axis::Z}}, fz);
      }
    }
  out.ratio = bmax / bzmin;
  return out;
}

PerturbationSplit scale_perturbation(const PerturbationSplit& split, double s) {
  PerturbationSplit out = split;
  out.v = cplx{s, 0.0} * split.v;
  out.full = split.h0 + out.v;
  out.ratio = std::abs(s) * split.ratio;
  return out;
}

InnerProduct parse_inner_product(std::string_view name) {
  if (name == "standard") return InnerProduct::Standard;
  if (name == "biorthogonal") return InnerProduct::Biorthogonal;
  if (name == "cpt") return InnerProduct::Cpt;
  fail(ErrorCode::Validation, "unknown inner product '" + std::string(name) + "'");
}

std::string_view to_string(InnerProduct ip) {
  switch (ip) {
    case InnerProduct::Standard: return "standard";
    case InnerProduct::Biorthogonal: return "biorthogonal";
    case InnerProduct::Cpt: return "cpt";
  }
  return "?";
}

CorrectionTable corrections(const PerturbationSplit& split, const CorrectionOptions& opts) {
  const auto dim = static_cast<Eigen::Index>(split.h0.dim());
  const auto n = static_cast<std::size_t>(dim);

  SpectralDecomposition d;
  try {
    d = eig_general(split.h0);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::NearDefective) fail(ErrorCode::DefectiveH0, std::string("corrections: ") + e.what());
    throw;
  }

  EMatrix phi(dim, dim), bra(dim, dim);
  std::vector<cplx> e0 = d.eigenvalues;
  if (opts.inner == InnerProduct::Cpt) {
    std::size_t sites = 0;
    while ((std::size_t{1} << sites) < n) ++sites;
    const OperatorMatrix p = parity_op(SpinSystem(static_cast<int>(sites)));
    SignatureOptions so;
    so.allow_broken = true;
    const PTOperators pt = signature_and_c(d, p, so);
    const EMatrix rho = to_eigen(pt.rho);
    for (Eigen::Index j = 0; j < dim; ++j) {
      phi.col(j) = to_eigen(pt.right[static_cast<std::size_t>(j)]);
      const EVector rphi = rho * phi.col(j);
      const cplx norm = phi.col(j).dot(rphi);
      if (std::abs(norm) < 1e-12 * phi.col(j).squaredNorm())
        fail(ErrorCode::VanishingNorm, "corrections: <phi|PC|phi> vanishes for level " + std::to_string(j));
      // bra^dagger = phi^dagger rho / <phi|rho|phi>
      bra.col(j) = rho.adjoint() * phi.col(j) / std::conj(norm);
    }
  } else {
    for (Eigen::Index j = 0; j < dim; ++j) {
      phi.col(j) = to_eigen(d.right[static_cast<std::size_t>(j)]);
      bra.col(j) = opts.inner == InnerProduct::Standard ? EVector(phi.col(j))
                                                        : to_eigen(d.left[static_cast<std::size_t>(j)]);
    }
  }

  CorrectionTable t;
  t.inner = opts.inner;
  t.e0 = e0;
  t.cluster.assign(n, -1);
  t.degenerate.assign(n, false);
  t.valid.assign(n, true);

  // Clusters of (Re, Im)-sorted levels chained by the degeneracy tolerance.
  int cid = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && std::abs(e0[i] - e0[i - 1]) < opts.degeneracy_tol) {
      t.cluster[i] = t.cluster[i - 1];
    } else {
      t.cluster[i] = cid++;
    }
  }

  const EMatrix v = to_eigen(split.v);
  EMatrix m = bra.adjoint() * v * phi;

  for (int c = 0; c < cid; ++c) {
    std::vector<Eigen::Index> members;
    for (std::size_t i = 0; i < n; ++i)
      if (t.cluster[i] == c) members.push_back(static_cast<Eigen::Index>(i));
    if (members.size() < 2) continue;
    for (auto i : members) t.degenerate[static_cast<std::size_t>(i)] = true;
    const auto k = static_cast<Eigen::Index>(members.size());
    EMatrix block(k, k);
    for (Eigen::Index a = 0; a < k; ++a)
      for (Eigen::Index b = 0; b < k; ++b) block(a, b) = m(members[static_cast<std::size_t>(a)], members[static_cast<std::size_t>(b)]);
    bool resolved = true;
    EMatrix x;
    std::vector<cplx> w;
    try {
      const SpectralDecomposition bd = eig_general(from_eigen(block));
      w = bd.eigenvalues;
      x.resize(k, k);
      for (Eigen::Index a = 0; a < k; ++a) x.col(a) = to_eigen(bd.right[static_cast<std::size_t>(a)]);
      for (std::size_t a = 1; a < w.size(); ++a)
        if (std::abs(w[a] - w[a - 1]) < opts.split_tol) resolved = false;
    } catch (const Error&) {
      resolved = false;
    }
    if (!resolved) {
      ++t.unresolved_clusters;
      for (auto i : members) t.valid[static_cast<std::size_t>(i)] = false;
      continue;
    }
    // Rotate within the cluster so that the block of M becomes diagonal.
    EMatrix pc(dim, k), bc(dim, k);
    for (Eigen::Index a = 0; a < k; ++a) {
      pc.col(a) = phi.col(members[static_cast<std::size_t>(a)]);
      bc.col(a) = bra.col(members[static_cast<std::size_t>(a)]);
    }
    const EMatrix pn = pc * x;
    const EMatrix bn = bc * x.inverse().adjoint();
    for (Eigen::Index a = 0; a < k; ++a) {
      phi.col(members[static_cast<std::size_t>(a)]) = pn.col(a);
      bra.col(members[static_cast<std::size_t>(a)]) = bn.col(a);
    }
  }
  m = bra.adjoint() * v * phi;

  t.e1.resize(n);
  t.e2.assign(n, cplx{});
  t.e2_modulus.assign(n, cplx{});
  t.state_coefficients.assign(n, std::vector<cplx>(n, cplx{}));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    t.e1[i] = m(ii, ii);
    for (std::size_t j = 0; j < n; ++j) {
      if (t.cluster[j] == t.cluster[i]) continue;
      const auto jj = static_cast<Eigen::Index>(j);
      const cplx den = e0[i] - e0[j];
      t.e2[i] += m(ii, jj) * m(jj, ii) / den;
      t.e2_modulus[i] += std::norm(m(jj, ii)) / den;
      t.state_coefficients[i][j] = m(jj, ii) / den;
    }
  }
  return t;
}

double closed_form_matrix_element_check(const SpinSystem& sys, const CouplingSet& cs, const PerturbationSplit& split) {
  if (!split.h0.is_diagonal(1e-12))
    fail(ErrorCode::Validation, "closed-form matrix elements need a diagonal H0 (g = 0 product basis)");
  double worst = 0.0;
  const std::size_t dim = sys.dim();
  for (std::size_t mm = 0; mm < dim; ++mm)
    for (std::size_t nn = 0; nn < dim; ++nn) {
      const std::size_t diff = mm ^ nn;
      double expected = 0.0;
      if (diff != 0 && (diff & (diff - 1)) == 0) {
        const int site = sys.sites() - std::countr_zero(diff);
        const auto a = static_cast<std::size_t>(site - 1);
        expected = 0.25 * (std::norm(cs.bx[a]) + std::norm(cs.by[a]));
      }
      worst = std::max(worst, std::abs(std::norm(split.v(mm, nn)) - expected));
    }
  return worst;
}

ScalingResult scaling_validation(const PerturbationSplit& split, const std::vector<double>& scales,
                                 const CorrectionOptions& opts) {
  std::vector<double> positive;
  for (double s : scales) {
    if (!(s >= 0.0) || !std::isfinite(s)) fail(ErrorCode::Validation, "scaling_validation: scales must be finite and >= 0");
    if (s > 0.0) positive.push_back(s);
  }
  if (positive.size() < 2) fail(ErrorCode::Validation, "scaling_validation: need at least two positive scales");
  const auto [lo, hi] = std::minmax_element(positive.begin(), positive.end());
  if (*hi / *lo < 10.0 * (1.0 - 1e-12)) fail(ErrorCode::Validation, "scaling_validation: scales must span a decade");

  const CorrectionTable t = corrections(split, opts);
  ScalingResult out;
  out.scales = scales;
  std::sort(out.scales.begin(), out.scales.end());
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t.valid[i] && !t.degenerate[i]) out.levels.push_back(i);
  out.errors.assign(out.levels.size(), std::vector<double>(out.scales.size(), 0.0));

  for (std::size_t si = 0; si < out.scales.size(); ++si) {
    const double s = out.scales[si];
    if (s == 0.0) continue;
    const SpectralDecomposition d = eig_general(split.h0 + cplx{s, 0.0} * split.v);
    std::vector<int> claimed(d.size(), -1);
    for (std::size_t li = 0; li < out.levels.size(); ++li) {
      const std::size_t n = out.levels[li];
      const cplx pred = t.e0[n] + s * t.e1[n] + s * s * t.e2[n];
      std::size_t best = 0;
      double d1 = std::numeric_limits<double>::infinity(), d2 = d1;
      for (std::size_t k = 0; k < d.size(); ++k) {
        const double dist = std::abs(d.eigenvalues[k] - pred);
        if (dist < d1) {
          d2 = d1;
          d1 = dist;
          best = k;
        } else if (dist < d2) {
          d2 = dist;
        }
      }
      if (claimed[best] >= 0 || !(d1 < 0.5 * d2))
        fail(ErrorCode::TrackingLost, "scaling_validation: level " + std::to_string(n) + " cannot be followed at s = " +
                                          std::to_string(s));
      claimed[best] = static_cast<int>(li);
      out.errors[li][si] = d1;
    }
  }

  out.min_slope = std::numeric_limits<double>::infinity();
  for (std::size_t li = 0; li < out.levels.size(); ++li) {
    std::vector<double> xs, ys;
    for (std::size_t si = 0; si < out.scales.size(); ++si)
      if (out.scales[si] > 0.0 && out.errors[li][si] > 0.0) {
        xs.push_back(std::log(out.scales[si]));
        ys.push_back(std::log(out.errors[li][si]));
      }
    double slope = std::numeric_limits<double>::infinity();
    if (xs.size() >= 2) {
      const double xm = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
      const double ym = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(ys.size());
      double sxy = 0.0, sxx = 0.0;
      for (std::size_t k = 0; k < xs.size(); ++k) {
        sxy += (xs[k] - xm) * (ys[k] - ym);
        sxx += (xs[k] - xm) * (xs[k] - xm);
      }
      slope = sxy / sxx;
    }
    out.slopes.push_back(slope);
    out.min_slope = std::min(out.min_slope, slope);
  }
  return out;
}

}  // namespace ptrg
