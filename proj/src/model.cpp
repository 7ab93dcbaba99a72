#include "ptrg/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "ptrg/error.hpp"

namespace ptrg {

Family parse_family(std::string_view name) {
  if (name == "rational") return Family::Rational;
  if (name == "trigonometric" || name == "trig") return Family::Trigonometric;
  if (name == "hyperbolic") return Family::Hyperbolic;
  fail(ErrorCode::Validation, "unknown coupling family '" + std::string(name) + "'");
}

std::string_view to_string(Family f) {
  switch (f) {
    case Family::Rational: return "rational";
    case Family::Trigonometric: return "trigonometric";
    case Family::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

double nearest_pole(Family f, double d) {
  if (f == Family::Trigonometric) return std::round(d / std::numbers::pi) * std::numbers::pi;
  return 0.0;
}

CouplingPair coupling_family(Family f, double ei, double ej, double pole_tol) {
  const double d = ei - ej;
  if (!std::isfinite(d)) fail(ErrorCode::Validation, "coupling_family: non-finite energies");
  if (std::abs(d - nearest_pole(f, d)) <= pole_tol)
    fail(ErrorCode::SingularDifference, "coupling_family: energy difference " + std::to_string(d) + " sits on a pole");
  switch (f) {
    case Family::Rational: return {1.0 / d, 1.0 / d};
    case Family::Trigonometric: return {1.0 / std::sin(d), std::cos(d) / std::sin(d)};
    case Family::Hyperbolic: return {1.0 / std::sinh(d), 1.0 / std::tanh(d)};
  }
  return {};
}

void CouplingSet::validate() const {
  const auto n = epsilon.size();
  if (n < 1) fail(ErrorCode::Validation, "coupling set needs at least one site");
  if (bx.size() != n || by.size() != n || bz.size() != n)
    fail(ErrorCode::Validation, "field vectors must have one entry per site");
  for (const auto* m : {&gamma_x, &gamma_y, &gamma_z}) {
    if (m->dim() != n) fail(ErrorCode::Validation, "coupling matrices must be N x N");
    if (!m->is_finite()) fail(ErrorCode::Validation, "coupling matrices must be finite");
    for (std::size_t i = 0; i < n; ++i)
      if ((*m)(i, i) != cplx{}) fail(ErrorCode::Validation, "coupling matrix diagonals must be zero");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(epsilon[i]) || !std::isfinite(bz[i]) || !std::isfinite(std::abs(bx[i])) ||
        !std::isfinite(std::abs(by[i])))
      fail(ErrorCode::Validation, "epsilon and fields must be finite");
    for (std::size_t j = i + 1; j < n; ++j)
      if (epsilon[i] == epsilon[j]) fail(ErrorCode::Validation, "epsilon entries must be distinct");
  }
  if (!std::isfinite(g)) fail(ErrorCode::Validation, "g must be finite");
}

CouplingSet free_couplings(const std::vector<double>& epsilon) {
  const auto n = epsilon.size();
  CouplingSet cs;
  cs.epsilon = epsilon;
  cs.bx.assign(n, cplx{});
  cs.by.assign(n, cplx{});
  cs.bz.assign(n, 1.0);
  cs.gamma_x = cs.gamma_y = cs.gamma_z = OperatorMatrix(n);
  return cs;
}

CouplingSet build_fields_xyz(const XYZFieldParams& p) {
  const auto n = p.epsilon.size();
  std::vector<double> rx(n), ry(n);
  for (std::size_t i = 0; i < n; ++i) {
    rx[i] = p.alpha_x * p.epsilon[i] + p.beta_x;
    ry[i] = p.alpha_y * p.epsilon[i] + p.beta_y;
    if (!(rx[i] > 0.0) || !(ry[i] > 0.0))
      fail(ErrorCode::NonPositiveRadicand, "alpha*epsilon + beta must be positive at site " + std::to_string(i + 1));
  }
  CouplingSet cs = free_couplings(p.epsilon);
  cs.g = p.g;
  for (std::size_t i = 0; i < n; ++i) {
    cs.bx[i] = p.delta / std::sqrt(rx[i]);
    cs.by[i] = p.lambda / std::sqrt(ry[i]);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = p.epsilon[i] - p.epsilon[j];
      if (d == 0.0) fail(ErrorCode::Validation, "epsilon entries must be distinct");
      cs.gamma_x(i, j) = p.g * std::sqrt(rx[i] * ry[j]) / d;
      cs.gamma_y(i, j) = p.g * std::sqrt(ry[i] * rx[j]) / d;
      cs.gamma_z(i, j) = p.g * std::sqrt(rx[j] * ry[j]) / d;
    }
  return cs;
}

CouplingSet build_couplings_xxz(const XXZParams& p) {
  const auto n = p.epsilon.size();
  CouplingSet cs = free_couplings(p.epsilon);
  cs.g = p.g;
  const cplx xfactor = p.imaginary_x_coupling ? cplx{0.0, p.g} : cplx{p.g, 0.0};
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto c = coupling_family(p.family, p.epsilon[i], p.epsilon[j]);
      cs.gamma_x(i, j) = cs.gamma_y(i, j) = xfactor * c.gx;
      cs.gamma_z(i, j) = p.g * c.gz;
    }
  return cs;
}

double XXZIntegrabilityReport::max() const { return std::max({antisymmetry_x, antisymmetry_z, triple}); }

XXZIntegrabilityReport check_integrability_xxz(const CouplingSet& cs) {
  XXZIntegrabilityReport r;
  const auto n = static_cast<std::size_t>(cs.sites());
  const auto& gx = cs.gamma_x;
  const auto& gz = cs.gamma_z;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      r.antisymmetry_x = std::max(r.antisymmetry_x, std::abs(gx(i, j) + gx(j, i)));
      r.antisymmetry_z = std::max(r.antisymmetry_z, std::abs(gz(i, j) + gz(j, i)));
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        r.triple = std::max(r.triple, std::abs(gx(i, j) * gx(j, k) - gx(i, k) * (gz(i, j) + gz(j, k))));
      }
    }
  return r;
}

double XYZIntegrabilityReport::max() const { return std::max(linear, quadratic); }

XYZIntegrabilityReport check_integrability_xyz(const CouplingSet& cs) {
  XYZIntegrabilityReport r;
  const auto n = static_cast<std::size_t>(cs.sites());
  const std::array<const OperatorMatrix*, 3> gam{&cs.gamma_x, &cs.gamma_y, &cs.gamma_z};
  auto field = [&](int axis, std::size_t i) -> cplx {
    if (axis == 0) return cs.bx[i];
    if (axis == 1) return cs.by[i];
    return cs.bz[i];
  };
  std::array<int, 3> perm{0, 1, 2};
  do {
    const auto [a, b, c] = perm;
    const auto& ga = *gam[static_cast<std::size_t>(a)];
    const auto& gb = *gam[static_cast<std::size_t>(b)];
    const auto& gc = *gam[static_cast<std::size_t>(c)];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        r.linear = std::max(r.linear, std::abs(gb(i, j) * field(a, j) + gc(j, i) * field(a, i)));
        r.linear_alternate = std::max(r.linear_alternate, std::abs(gb(i, j) * field(a, j) + ga(j, i) * field(a, i)));
        for (std::size_t k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          r.quadratic = std::max(r.quadratic, std::abs(ga(i, k) * gb(j, k) - ga(i, j) * gc(j, k) - gb(j, i) * gc(i, k)));
        }
      }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return r;
}

OperatorMatrix build_hamiltonian_xxz(const SpinSystem& sys, const CouplingSet& cs) {
  if (cs.sites() != sys.sites()) fail(ErrorCode::DimensionMismatch, "build_hamiltonian_xxz: site count mismatch");
  const int n = sys.sites();
  OperatorMatrix h(sys.dim());
  for (int i = 1; i <= n; ++i) add_pauli_string(h, sys, {{i, Axis::Z}}, 0.5 * cs.epsilon[static_cast<std::size_t>(i - 1)]);
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      if (i == j) continue;
      const auto a = static_cast<std::size_t>(i - 1), b = static_cast<std::size_t>(j - 1);
      // S+_i S-_j + S-_i S+_j = (sx sx + sy sy) / 2
      const cplx fx = 0.5 * cs.gamma_x(a, b);
      add_pauli_string(h, sys, {{i, Axis::X}, {j, Axis::X}}, fx);
      add_pauli_string(h, sys, {{i, Axis::Y}, {j, Axis::Y}}, fx);
      add_pauli_string(h, sys, {{i, Axis::Z}, {j, Axis::Z}}, 0.25 * cs.gamma_z(a, b));
    }
  return h;
}

OperatorMatrix build_charge(const SpinSystem& sys, const CouplingSet& cs, int site, ChargeNormalization norm) {
  if (cs.sites() != sys.sites()) fail(ErrorCode::DimensionMismatch, "build_charge: site count mismatch");
  if (site < 1 || site > sys.sites())
    fail(ErrorCode::IndexOutOfRange, "build_charge: site " + std::to_string(site) + " out of range");
  const double f1 = norm == ChargeNormalization::Spin ? 0.5 : 1.0;
  const double f2 = f1 * f1;
  const auto i = static_cast<std::size_t>(site - 1);
  OperatorMatrix q(sys.dim());
  add_pauli_string(q, sys, {{site, Axis::X}}, f1 * cs.bx[i]);
  add_pauli_string(q, sys, {{site, Axis::Y}}, f1 * cs.by[i]);
  add_pauli_string(q, sys, {{site, Axis::Z}}, f1 * cs.bz[i]);
  for (int k = 1; k <= sys.sites(); ++k) {
    if (k == site) continue;
    const auto kk = static_cast<std::size_t>(k - 1);
    add_pauli_string(q, sys, {{site, Axis::X}, {k, Axis::X}}, f2 * cs.gamma_x(i, kk));
    add_pauli_string(q, sys, {{site, Axis::Y}, {k, Axis::Y}}, f2 * cs.gamma_y(i, kk));
    add_pauli_string(q, sys, {{site, Axis::Z}, {k, Axis::Z}}, f2 * cs.gamma_z(i, kk));
  }
  return q;
}

std::vector<OperatorMatrix> build_all_charges(const SpinSystem& sys, const CouplingSet& cs, ChargeNormalization norm) {
  std::vector<OperatorMatrix> out;
  out.reserve(static_cast<std::size_t>(sys.sites()));
  for (int i = 1; i <= sys.sites(); ++i) out.push_back(build_charge(sys, cs, i, norm));
  return out;
}

OperatorMatrix build_hamiltonian_from_charges(const std::vector<OperatorMatrix>& charges,
                                              const std::vector<double>& weights) {
  if (charges.size() != weights.size())
    fail(ErrorCode::DimensionMismatch, "build_hamiltonian_from_charges: " + std::to_string(charges.size()) +
                                           " charges but " + std::to_string(weights.size()) + " weights");
  if (charges.empty()) fail(ErrorCode::Validation, "build_hamiltonian_from_charges: no charges");
  OperatorMatrix h(charges.front().dim());
  for (std::size_t i = 0; i < charges.size(); ++i) {
    if (charges[i].dim() != h.dim()) fail(ErrorCode::DimensionMismatch, "build_hamiltonian_from_charges: charge dims differ");
    if (weights[i] != 0.0) h += cplx{weights[i], 0.0} * charges[i];
  }
  return h;
}

}  // namespace ptrg
