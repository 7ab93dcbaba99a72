#include "ptrg/dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "ptrg/eig.hpp"
#include "ptrg/error.hpp"
#include "ptrg/kernels.hpp"
#include "ptrg/linalg.hpp"

namespace ptrg {

namespace {

struct SpinTriple {
  cplx x, y, z;
};

int sites_of(std::size_t dim) {
  if (dim == 0 || !std::has_single_bit(dim)) fail(ErrorCode::DimensionMismatch, "dimension is not a power of two");
  return std::countr_zero(dim);
}

// <bra| S^a_i |ket> for every site, bra conjugated.
std::vector<SpinTriple> moments(const StateVector& bra, const StateVector& ket, int sites) {
  const std::size_t dim = ket.dim();
  const cplx half_i{0.0, 0.5};
  std::vector<SpinTriple> out(static_cast<std::size_t>(sites));
  for (int s = 1; s <= sites; ++s) {
    const std::size_t m = std::size_t{1} << (sites - s);
    SpinTriple t{};
    for (std::size_t r = 0; r < dim; ++r) {
      const bool down = (r & m) != 0;
      const cplx k = ket[r];
      t.z += std::conj(bra[r]) * k * (down ? -0.5 : 0.5);
      const cplx bf = std::conj(bra[r ^ m]) * k;
      t.x += 0.5 * bf;
      t.y += bf * (down ? -half_i : half_i);
    }
    out[static_cast<std::size_t>(s - 1)] = t;
  }
  return out;
}

// Tr(S^a_i rho) for every site.
std::vector<SpinTriple> moments(const OperatorMatrix& rho, int sites) {
  const std::size_t dim = rho.dim();
  const cplx half_i{0.0, 0.5};
  std::vector<SpinTriple> out(static_cast<std::size_t>(sites));
  for (int s = 1; s <= sites; ++s) {
    const std::size_t m = std::size_t{1} << (sites - s);
    SpinTriple t{};
    for (std::size_t r = 0; r < dim; ++r) {
      const bool down = (r & m) != 0;
      t.z += rho(r, r) * (down ? -0.5 : 0.5);
      const cplx off = rho(r, r ^ m);
      t.x += 0.5 * off;
      t.y += off * (down ? -half_i : half_i);
    }
    out[static_cast<std::size_t>(s - 1)] = t;
  }
  return out;
}

void record_sample(TrajectoryRecord& tr, double t, const std::vector<SpinTriple>& m, cplx scale, double norm) {
  tr.times.push_back(t);
  std::vector<double> x, y, z;
  for (const auto& v : m) {
    const cplx a = v.x * scale, b = v.y * scale, c = v.z * scale;
    x.push_back(a.real());
    y.push_back(b.real());
    z.push_back(c.real());
    tr.max_imag = std::max({tr.max_imag, std::abs(a.imag()), std::abs(b.imag()), std::abs(c.imag())});
  }
  tr.sx.push_back(std::move(x));
  tr.sy.push_back(std::move(y));
  tr.sz.push_back(std::move(z));
  tr.norm_or_trace.push_back(norm);
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) fail(ErrorCode::Validation, "time grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(grid[i])) fail(ErrorCode::Validation, "time grid has non-finite entries");
    if (i > 0 && !(grid[i] > grid[i - 1])) fail(ErrorCode::Validation, "time grid must be strictly increasing");
  }
}

std::size_t substeps(double span, double dt) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(span / dt - 1e-9)));
}

std::string propagate_rk4(const OperatorMatrix& h, const StateVector& psi0, const std::vector<double>& grid, double dt,
                          const StateSampler& on_sample) {
  const std::size_t dim = h.dim();
  const OperatorMatrix a = cplx{0.0, -1.0} * h;
  StateVector psi = psi0, k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  auto rhs = [&](const StateVector& in, StateVector& out) { kernels::matvec(a.data(), in.data(), out.data(), dim); };
  on_sample(0, grid[0], psi);
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const std::size_t n = substeps(grid[g] - grid[g - 1], dt);
    const double step = (grid[g] - grid[g - 1]) / static_cast<double>(n);
    for (std::size_t s = 0; s < n; ++s) {
      rhs(psi, k1);
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi[i] + 0.5 * step * k1[i];
      rhs(tmp, k2);
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi[i] + 0.5 * step * k2[i];
      rhs(tmp, k3);
      for (std::size_t i = 0; i < dim; ++i) tmp[i] = psi[i] + step * k3[i];
      rhs(tmp, k4);
      for (std::size_t i = 0; i < dim; ++i) psi[i] += step / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    if (!psi.is_finite()) fail(ErrorCode::NonConvergence, "closed evolution produced non-finite amplitudes");
    on_sample(g, grid[g], psi);
  }
  return "rk4";
}

struct Generator {
  OperatorMatrix k;  // -iH - (1/2) sum L^dagger L
  std::vector<SiteJump> jumps;
};

Generator make_generator(const OperatorMatrix& h, const LindbladSpec& spec, int sites) {
  if (!(spec.gamma >= 0.0)) fail(ErrorCode::Validation, "gamma must be non-negative");
  Generator gen{cplx{0.0, -1.0} * h, {}};
  std::vector<int> js = spec.sites;
  if (js.empty())
    for (int s = 1; s <= sites; ++s) js.push_back(s);
  for (int s : js) {
    if (s < 1 || s > sites) fail(ErrorCode::IndexOutOfRange, "Lindblad jump site out of range");
    const std::size_t m = std::size_t{1} << (sites - s);
    if (spec.gamma > 0.0) gen.jumps.push_back({m, std::sqrt(spec.gamma)});
    for (std::size_t b = 0; b < h.dim(); ++b)
      if ((b & m) == 0) gen.k(b, b) -= 0.5 * spec.gamma;  // L^dagger L = gamma |up><up|
  }
  return gen;
}

}  // namespace

std::string_view to_string(EvolutionMode m) {
  switch (m) {
    case EvolutionMode::ClosedStandard: return "closed_standard";
    case EvolutionMode::ClosedCPWeighted: return "closed_cp";
    case EvolutionMode::Lindblad: return "lindblad";
  }
  return "?";
}

std::vector<double> TrajectoryRecord::sz_series(int site) const {
  if (site < 1 || site > sites) fail(ErrorCode::IndexOutOfRange, "sz_series: site out of range");
  std::vector<double> out;
  out.reserve(sz.size());
  for (const auto& row : sz) out.push_back(row[static_cast<std::size_t>(site - 1)]);
  return out;
}

std::vector<double> uniform_grid(double t_max, double step) {
  if (!(step > 0.0) || !(t_max >= 0.0)) fail(ErrorCode::Validation, "uniform_grid: need step > 0 and t_max >= 0");
  const auto n = static_cast<std::size_t>(std::floor(t_max / step + 1e-9));
  std::vector<double> g(n + 1);
  for (std::size_t i = 0; i <= n; ++i) g[i] = static_cast<double>(i) * step;
  return g;
}

std::string propagate_closed(const OperatorMatrix& h, const StateVector& psi0, const std::vector<double>& grid,
                             const ClosedOptions& opts, const StateSampler& on_sample) {
  check_grid(grid);
  if (h.dim() != psi0.dim()) fail(ErrorCode::DimensionMismatch, "propagate_closed: dimension mismatch");
  if (!h.is_finite() || !psi0.is_finite()) fail(ErrorCode::Validation, "propagate_closed: non-finite input");
  if (opts.propagator != Propagator::RK4) {
    try {
      const SpectralDecomposition d = eig_general(h);
      if (d.right_condition < opts.spectral_condition) {
        const auto dim = static_cast<Eigen::Index>(h.dim());
        EMatrix phi(dim, dim);
        EVector coeff(dim);
        const EVector p0 = to_eigen(psi0);
        for (Eigen::Index j = 0; j < dim; ++j) {
          phi.col(j) = to_eigen(d.right[static_cast<std::size_t>(j)]);
          coeff(j) = to_eigen(d.left[static_cast<std::size_t>(j)]).dot(p0);
        }
        const double t0 = grid[0];
        for (std::size_t g = 0; g < grid.size(); ++g) {
          EVector w(dim);
          for (Eigen::Index j = 0; j < dim; ++j)
            w(j) = std::exp(cplx{0.0, -1.0} * d.eigenvalues[static_cast<std::size_t>(j)] * (grid[g] - t0)) * coeff(j);
          on_sample(g, grid[g], from_eigen(EVector(phi * w)));
        }
        return "spectral";
      }
      if (opts.propagator == Propagator::Spectral)
        fail(ErrorCode::NearDefective, "spectral propagation requested but eigenvectors are ill-conditioned");
    } catch (const Error& e) {
      if (opts.propagator == Propagator::Spectral || e.code() != ErrorCode::NearDefective) throw;
    }
  }
  return propagate_rk4(h, psi0, grid, opts.dt, on_sample);
}

TrajectoryRecord evolve_closed(const OperatorMatrix& h, const StateVector& psi0, const std::vector<double>& grid,
                               EvolutionMode mode, const PTOperators* pt, const ClosedOptions& opts) {
  if (mode == EvolutionMode::Lindblad) fail(ErrorCode::Validation, "evolve_closed: Lindblad mode is not a closed mode");
  TrajectoryRecord tr;
  tr.sites = sites_of(h.dim());
  tr.mode = mode;
  OperatorMatrix w_adj;
  if (mode == EvolutionMode::ClosedCPWeighted) {
    if (pt == nullptr || pt->c.dim() != h.dim())
      fail(ErrorCode::Validation, "evolve_closed: CP-weighted mode needs C and P for this Hamiltonian");
    tr.broken_phase = pt->broken_phase;
    w_adj = dagger(pt->c * pt->parity);
  }
  tr.propagator = propagate_closed(h, psi0, grid, opts, [&](std::size_t, double t, const StateVector& psi) {
    const double nrm = psi.norm();
    if (mode == EvolutionMode::ClosedStandard) {
      if (nrm < 1e-300) fail(ErrorCode::VanishingNorm, "evolve_closed: state norm vanished");
      record_sample(tr, t, moments(psi, psi, tr.sites), 1.0 / (nrm * nrm), nrm);
    } else {
      const StateVector bra = w_adj * psi;
      const cplx den = inner(bra, psi);
      if (std::abs(den) < 1e-12 * nrm * nrm) fail(ErrorCode::VanishingNorm, "evolve_closed: <psi|CP|psi> vanished");
      record_sample(tr, t, moments(bra, psi, tr.sites), 1.0 / den, nrm);
    }
  });
  if (tr.propagator == "rk4") tr.dt_used = opts.dt;
  return tr;
}

OperatorMatrix lindblad_generator(const OperatorMatrix& h, const OperatorMatrix& rho, const LindbladSpec& spec) {
  if (rho.dim() != h.dim()) fail(ErrorCode::DimensionMismatch, "lindblad_generator: dimension mismatch");
  const Generator gen = make_generator(h, spec, sites_of(h.dim()));
  OperatorMatrix out(h.dim());
  kernels::lindblad_rhs(gen.k.data(), rho.data(), gen.jumps, out.data(), h.dim());
  return out;
}

void propagate_lindblad(const OperatorMatrix& h, const DensityMatrix& rho0, const LindbladSpec& spec,
                        const std::vector<double>& grid, double dt, const LindbladOptions& opts,
                        const DensitySampler& on_sample) {
  check_grid(grid);
  const int sites = sites_of(h.dim());
  if (rho0.dim() != h.dim()) fail(ErrorCode::DimensionMismatch, "propagate_lindblad: dimension mismatch");
  const std::size_t dim = h.dim();
  const Generator gen = make_generator(h, spec, sites);
  const OperatorMatrix& k = gen.k;
  const std::vector<SiteJump>& jumps = gen.jumps;

  auto rhs = [&](const OperatorMatrix& in, OperatorMatrix& out) {
    if (opts.serial)
      reference::lindblad_rhs(k.data(), in.data(), jumps, out.data(), dim);
    else
      kernels::lindblad_rhs(k.data(), in.data(), jumps, out.data(), dim);
  };

  auto check = [&](double t, const OperatorMatrix& rho) {
    double herm = 0.0;
    for (std::size_t r = 0; r < dim; ++r)
      for (std::size_t c = r; c < dim; ++c) herm = std::max(herm, std::abs(rho(r, c) - std::conj(rho(c, r))));
    const double tr_err = std::abs(rho.trace() - 1.0);
    const double min_ev = min_hermitian_eigenvalue(rho);
    if (!(herm <= opts.tol.hermiticity) || !(tr_err <= opts.tol.trace) || !(min_ev >= opts.tol.min_eigenvalue))
      fail(ErrorCode::PositivityLost, "density matrix check failed at t = " + std::to_string(t) +
                                          " (hermiticity " + std::to_string(herm) + ", trace error " +
                                          std::to_string(tr_err) + ", min eigenvalue " + std::to_string(min_ev) + ")");
  };

  OperatorMatrix rho = rho0.matrix(), k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
  auto axpy = [&](OperatorMatrix& dst, const OperatorMatrix& x, double a, const OperatorMatrix& y) {
    auto d = dst.data();
    auto xs = x.data();
    auto ys = y.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = xs[i] + a * ys[i];
  };
  check(grid[0], rho);
  on_sample(0, grid[0], rho);
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const std::size_t n = substeps(grid[g] - grid[g - 1], dt);
    const double step = (grid[g] - grid[g - 1]) / static_cast<double>(n);
    for (std::size_t s = 0; s < n; ++s) {
      rhs(rho, k1);
      axpy(tmp, rho, 0.5 * step, k1);
      rhs(tmp, k2);
      axpy(tmp, rho, 0.5 * step, k2);
      rhs(tmp, k3);
      axpy(tmp, rho, step, k3);
      rhs(tmp, k4);
      auto d = rho.data();
      for (std::size_t i = 0; i < d.size(); ++i)
        d[i] += step / 6.0 * (k1.data()[i] + 2.0 * k2.data()[i] + 2.0 * k3.data()[i] + k4.data()[i]);
    }
    check(grid[g], rho);
    on_sample(g, grid[g], rho);
  }
}

TrajectoryRecord evolve_lindblad(const OperatorMatrix& h, const DensityMatrix& rho0, const LindbladSpec& spec,
                                 const std::vector<double>& grid, const LindbladOptions& opts) {
  const double herm = hermiticity_residual(h);
  if (!(herm < 1e-10))
    fail(ErrorCode::NonHermitianHamiltonian,
         "evolve_lindblad: Hamiltonian is not Hermitian (relative residual " + std::to_string(herm) + ")");
  double dt = opts.dt;
  for (int attempt = 0;; ++attempt) {
    TrajectoryRecord tr;
    tr.sites = sites_of(h.dim());
    tr.mode = EvolutionMode::Lindblad;
    tr.propagator = "rk4";
    tr.dt_used = dt;
    try {
      propagate_lindblad(h, rho0, spec, grid, dt, opts, [&](std::size_t, double t, const OperatorMatrix& rho) {
        record_sample(tr, t, moments(rho, tr.sites), 1.0, rho.trace().real());
      });
      return tr;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PositivityLost || attempt >= opts.max_halvings) throw;
      dt *= 0.5;
    }
  }
}

std::vector<SiteSteadyState> steady_state_metric(const TrajectoryRecord& tr, double t_a, double t_b,
                                                 std::size_t min_samples) {
  if (!(t_b > t_a)) fail(ErrorCode::Validation, "steady_state_metric: window must have t_b > t_a");
  const double slack = 1e-9 * std::max(1.0, std::abs(t_b));
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    if (tr.times[i] >= t_a - slack && tr.times[i] <= t_b + slack) idx.push_back(i);
  if (idx.size() < min_samples)
    fail(ErrorCode::WindowTooSmall, "steady_state_metric: window holds " + std::to_string(idx.size()) +
                                        " samples, need " + std::to_string(min_samples));
  const double n = static_cast<double>(idx.size());
  double tm = 0.0;
  for (auto i : idx) tm += tr.times[i];
  tm /= n;
  double stt = 0.0;
  for (auto i : idx) stt += (tr.times[i] - tm) * (tr.times[i] - tm);

  std::vector<SiteSteadyState> out(static_cast<std::size_t>(tr.sites));
  for (int s = 0; s < tr.sites; ++s) {
    const auto su = static_cast<std::size_t>(s);
    double mean = 0.0;
    for (auto i : idx) mean += tr.sz[i][su];
    mean /= n;
    double var = 0.0, sty = 0.0;
    for (auto i : idx) {
      const double dz = tr.sz[i][su] - mean;
      var += dz * dz;
      sty += (tr.times[i] - tm) * dz;
    }
    out[su].stddev = std::sqrt(var / n);
    out[su].drift = stt > 0.0 ? sty / stt : 0.0;
  }
  return out;
}

}  // namespace ptrg
