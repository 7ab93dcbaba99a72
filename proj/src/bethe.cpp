#include "ptrg/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "ptrg/eig.hpp"
#include "ptrg/error.hpp"
#include "ptrg/linalg.hpp"

namespace ptrg {

namespace {

double max_abs(const std::vector<cplx>& v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

double min_gap(const std::vector<cplx>& roots) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < roots.size(); ++a)
    for (std::size_t b = a + 1; b < roots.size(); ++b) m = std::min(m, std::abs(roots[a] - roots[b]));
  return m;
}

// Rounding in eps_j - E_a limits how small the residual can get once the
// Jacobian entries 1/(eps_j - E_a)^2 are large (small |g|).
double attainable(const std::vector<double>& eps, const std::vector<cplx>& e) {
  double floor = 0.0;
  for (const auto& ea : e) {
    double d = 0.0;
    for (double ej : eps) d += 0.5 / std::norm(ej - ea);
    floor = std::max(floor, 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(ea)) * d);
  }
  return floor;
}

struct NewtonResult {
  std::vector<cplx> roots;
  std::vector<double> residuals;
  bool ok = false;
};

NewtonResult newton(const std::vector<double>& eps, cplx g, std::vector<cplx> e, double tol, int max_iter,
                    double collision_tol) {
  NewtonResult res;
  const auto m = static_cast<Eigen::Index>(e.size());
  for (int it = 0; it <= max_iter; ++it) {
    const auto f = richardson_equations(eps, g, e);
    const double r = max_abs(f);
    res.residuals.push_back(r);
    if (!std::isfinite(r)) return res;
    if (r <= std::max(tol, attainable(eps, e))) {
      res.ok = min_gap(e) > collision_tol;
      res.roots = e;
      return res;
    }
    if (it == max_iter) return res;
    EMatrix jac(m, m);
    EVector rhs(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const cplx ea = e[static_cast<std::size_t>(a)];
      cplx diag{};
      for (double ej : eps) diag += 0.5 / ((ej - ea) * (ej - ea));
      for (Eigen::Index b = 0; b < m; ++b) {
        if (b == a) continue;
        const cplx d = e[static_cast<std::size_t>(b)] - ea;
        const cplx inv2 = 1.0 / (d * d);
        diag -= inv2;
        jac(a, b) = inv2;
      }
      jac(a, a) = diag;
      rhs(a) = -f[static_cast<std::size_t>(a)];
    }
    const EVector step = jac.partialPivLu().solve(rhs);
    if (!step.allFinite()) return res;
    for (Eigen::Index a = 0; a < m; ++a) e[static_cast<std::size_t>(a)] += step(a);
  }
  return res;
}

struct PathOutcome {
  std::optional<BetheRoots> roots;
  std::string failure;
};

PathOutcome follow(const RichardsonProblem& p, const BetheOptions& opts, const std::function<cplx(double)>& gpath,
                   const std::string& name) {
  PathOutcome out;
  const auto m = static_cast<std::size_t>(p.pairs);
  const cplx g0 = gpath(0.0);
  std::vector<cplx> seed(m);
  for (std::size_t a = 0; a < m; ++a) seed[a] = p.epsilon[a] + 0.5 * g0;

  auto rel_tol = [&](cplx g) { return opts.tol * std::max(1.0, 1.0 / std::abs(g)); };
  NewtonResult start = newton(p.epsilon, g0, seed, rel_tol(g0), opts.max_newton, opts.collision_tol);
  if (!start.ok) {
    out.failure = name + ": Newton failed at the starting coupling";
    return out;
  }
  BetheRoots br;
  br.path = name;
  br.trace.push_back({g0, start.roots});
  std::vector<cplx> e = start.roots;

  const double big = 1.0 / static_cast<double>(opts.checkpoints);
  double t = 0.0, h = big;
  for (int k = 1; k <= opts.checkpoints; ++k) {
    const double tk = static_cast<double>(k) / static_cast<double>(opts.checkpoints);
    while (t < tk) {
      const double tn = std::min(t + h, tk);
      const cplx gn = gpath(tn);
      const bool last = (k == opts.checkpoints && tn == tk);
      NewtonResult nr = newton(p.epsilon, gn, e, last ? opts.tol : rel_tol(gn), opts.max_newton, opts.collision_tol);
      if (nr.ok) {
        e = nr.roots;
        t = tn;
        h = std::min(2.0 * h, big);
        if (last) br.final_newton_residuals = nr.residuals;
        continue;
      }
      h *= 0.5;
      if (std::abs(gpath(std::min(t + h, tk)) - gpath(t)) < opts.min_step) {
        out.failure = name + ": step floor reached at g = " + std::to_string(std::real(gpath(t))) + " (best residual " +
                      std::to_string(nr.residuals.empty() ? INFINITY : *std::min_element(nr.residuals.begin(), nr.residuals.end())) + ")";
        return out;
      }
    }
    br.trace.push_back({gpath(tk), e});
  }
  br.roots = e;
  br.residual = max_abs(richardson_equations(p.epsilon, cplx{p.g, 0.0}, e));
  br.min_gap = min_gap(e);
  br.coalesced = br.min_gap <= opts.collision_tol;
  if (br.residual > std::max(opts.tol, attainable(p.epsilon, e)) || br.coalesced) {
    out.failure = name + ": final residual " + std::to_string(br.residual);
    return out;
  }
  out.roots = std::move(br);
  return out;
}

}  // namespace

void RichardsonProblem::validate() const {
  const auto n = epsilon.size();
  if (n < 1) fail(ErrorCode::Validation, "Richardson problem needs at least one level");
  if (pairs < 1 || static_cast<std::size_t>(pairs) > n) fail(ErrorCode::Validation, "pair count M must satisfy 1 <= M <= N");
  if (!(g != 0.0) || !std::isfinite(g)) fail(ErrorCode::Validation, "Richardson coupling g must be finite and nonzero");
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (epsilon[i] == epsilon[j]) fail(ErrorCode::Validation, "epsilon entries must be distinct");
}

std::vector<cplx> richardson_equations(const std::vector<double>& epsilon, cplx g, const std::vector<cplx>& roots) {
  std::vector<cplx> f(roots.size());
  for (std::size_t a = 0; a < roots.size(); ++a) {
    cplx v = 1.0 / g;
    for (double ej : epsilon) v += 0.5 / (ej - roots[a]);
    for (std::size_t b = 0; b < roots.size(); ++b)
      if (b != a) v -= 1.0 / (roots[b] - roots[a]);
    f[a] = v;
  }
  return f;
}

BetheRoots solve_richardson(const RichardsonProblem& p, const BetheOptions& opts) {
  p.validate();
  if (opts.checkpoints < 1) fail(ErrorCode::Validation, "homotopy needs at least one checkpoint");
  const double gt = p.g;
  const double g0 = gt * opts.start_ratio;
  auto real_path = [=](double t) { return cplx{g0 * std::pow(gt / g0, t), 0.0}; };
  auto detour = [=, phi = opts.detour_phase](double t) {
    return g0 * std::pow(gt / g0, t) * std::exp(cplx{0.0, phi * std::sin(std::numbers::pi * t)});
  };
  PathOutcome first = follow(p, opts, real_path, "real");
  if (first.roots) return *first.roots;
  PathOutcome second = follow(p, opts, detour, "complex_detour");
  if (second.roots) return *second.roots;
  fail(ErrorCode::NonConvergence, "solve_richardson: " + first.failure + "; " + second.failure);
}

BetheState bethe_state(const SpinSystem& sys, const std::vector<double>& epsilon, const std::vector<cplx>& roots) {
  if (epsilon.size() != static_cast<std::size_t>(sys.sites()))
    fail(ErrorCode::DimensionMismatch, "bethe_state: need one epsilon per site");
  const std::size_t dim = sys.dim();
  StateVector v(dim);
  v[dim - 1] = 1.0;  // all sites down
  for (const cplx& e : roots) {
    StateVector next(dim);
    for (int i = 1; i <= sys.sites(); ++i) {
      const cplx d = epsilon[static_cast<std::size_t>(i - 1)] - e;
      if (std::abs(d) < 1e-14) fail(ErrorCode::RootAtEpsilon, "bethe_state: root coincides with epsilon_" + std::to_string(i));
      const std::size_t m = std::size_t{1} << (sys.sites() - i);
      for (std::size_t b = 0; b < dim; ++b)
        if ((b & m) && v[b] != cplx{}) next[b ^ m] += v[b] / d;
    }
    v = std::move(next);
  }
  BetheState out;
  out.raw = v;
  const double n = v.norm();
  if (n == 0.0) fail(ErrorCode::VanishingNorm, "bethe_state: state vanishes");
  out.normalized = v.normalized();
  return out;
}

OperatorMatrix richardson_hamiltonian(const SpinSystem& sys, const std::vector<double>& epsilon, double g) {
  if (epsilon.size() != static_cast<std::size_t>(sys.sites()))
    fail(ErrorCode::DimensionMismatch, "richardson_hamiltonian: need one epsilon per site");
  const int n = sys.sites();
  const cplx i_unit{0.0, 1.0};
  OperatorMatrix h(sys.dim());
  for (int i = 1; i <= n; ++i) {
    add_pauli_string(h, sys, {{i, Axis::Z}}, epsilon[static_cast<std::size_t>(i - 1)]);
    // S^+ S^- on one site = (1 + sigma^z) / 2
    for (std::size_t b = 0; b < sys.dim(); ++b) h(b, b) += 0.5 * g;
    add_pauli_string(h, sys, {{i, Axis::Z}}, 0.5 * g);
    for (int j = 1; j <= n; ++j) {
      if (j == i) continue;
      add_pauli_string(h, sys, {{i, Axis::X}, {j, Axis::X}}, 0.25 * g);
      add_pauli_string(h, sys, {{i, Axis::Y}, {j, Axis::Y}}, 0.25 * g);
      add_pauli_string(h, sys, {{i, Axis::X}, {j, Axis::Y}}, -0.25 * g * i_unit);
      add_pauli_string(h, sys, {{i, Axis::Y}, {j, Axis::X}}, 0.25 * g * i_unit);
    }
  }
  return h;
}

cplx richardson_energy(const std::vector<double>& epsilon, const std::vector<cplx>& roots) {
  cplx e{};
  for (double x : epsilon) e -= x;
  for (const auto& r : roots) e += 2.0 * r;
  return e;
}

EigenstateCheck verify_eigenstate(const OperatorMatrix& h, const StateVector& state, double cluster_tol) {
  if (h.dim() != state.dim()) fail(ErrorCode::DimensionMismatch, "verify_eigenstate: dimension mismatch");
  EigenstateCheck out;
  const StateVector hs = h * state;
  const double nn = inner(state, state).real();
  if (nn == 0.0) fail(ErrorCode::VanishingNorm, "verify_eigenstate: zero state");
  out.rayleigh = inner(state, hs) / nn;
  StateVector r = hs;
  for (std::size_t i = 0; i < r.dim(); ++i) r[i] -= out.rayleigh * state[i];
  out.residual = r.norm() / std::sqrt(nn);

  const SpectralDecomposition d = eig_general(h);
  std::size_t nearest = 0;
  for (std::size_t k = 1; k < d.size(); ++k)
    if (std::abs(d.eigenvalues[k] - out.rayleigh) < std::abs(d.eigenvalues[nearest] - out.rayleigh)) nearest = k;
  const cplx target = d.eigenvalues[nearest];
  StateVector proj(state.dim());
  for (std::size_t k = 0; k < d.size(); ++k) {
    if (std::abs(d.eigenvalues[k] - target) > cluster_tol * std::max(1.0, std::abs(target))) continue;
    const cplx c = inner(d.left[k], state);
    for (std::size_t i = 0; i < proj.dim(); ++i) proj[i] += c * d.right[k][i];
  }
  out.best_overlap = std::abs(inner(state, proj)) / nn;
  return out;
}

}  // namespace ptrg
