#include "ptrg/kernels.hpp"

#include <omp.h>

namespace ptrg {

namespace {

// One output row of A*B. Accumulation runs over k in ascending order for
// every entry, which is what makes the parallel and serial paths identical.
inline void multiply_row(const cplx* a, const cplx* b, cplx* out, std::size_t dim, std::size_t r) {
  cplx* row = out + r * dim;
  for (std::size_t c = 0; c < dim; ++c) row[c] = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const cplx ark = a[r * dim + k];
    if (ark == cplx{}) continue;
    const cplx* brow = b + k * dim;
    for (std::size_t c = 0; c < dim; ++c) row[c] += ark * brow[c];
  }
}

inline void matvec_row(const cplx* a, const cplx* x, cplx* out, std::size_t dim, std::size_t r) {
  cplx acc{};
  const cplx* arow = a + r * dim;
  for (std::size_t k = 0; k < dim; ++k) acc += arow[k] * x[k];
  out[r] = acc;
}

inline void lindblad_row(const cplx* k_eff, const cplx* rho, std::span<const SiteJump> jumps,
                         cplx* out, std::size_t dim, std::size_t r) {
  cplx* row = out + r * dim;
  for (std::size_t c = 0; c < dim; ++c) row[c] = 0.0;
  // K rho
  for (std::size_t k = 0; k < dim; ++k) {
    const cplx krk = k_eff[r * dim + k];
    if (krk == cplx{}) continue;
    const cplx* rrow = rho + k * dim;
    for (std::size_t c = 0; c < dim; ++c) row[c] += krk * rrow[c];
  }
  // rho K^dagger: (rho K^dagger)_{rc} = sum_k rho_{rk} conj(K_{ck})
  const cplx* rrow = rho + r * dim;
  for (std::size_t c = 0; c < dim; ++c) {
    cplx acc{};
    const cplx* kc = k_eff + c * dim;
    for (std::size_t k = 0; k < dim; ++k) acc += rrow[k] * std::conj(kc[k]);
    row[c] += acc;
  }
  // L rho L^dagger for lowering jumps: nonzero only where both indices carry the bit.
  for (const SiteJump& j : jumps) {
    if ((r & j.bit) == 0) continue;
    const double w = j.amplitude * j.amplitude;
    const cplx* src = rho + (r ^ j.bit) * dim;
    for (std::size_t c = 0; c < dim; ++c) {
      if (c & j.bit) row[c] += w * src[c ^ j.bit];
    }
  }
}

}  // namespace

namespace kernels {

void set_thread_count(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int thread_count() { return omp_get_max_threads(); }

void multiply(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out, std::size_t dim) {
  const auto n = static_cast<std::ptrdiff_t>(dim);
#pragma omp parallel for schedule(static) if (dim >= kParallelThreshold)
  for (std::ptrdiff_t r = 0; r < n; ++r)
    multiply_row(a.data(), b.data(), out.data(), dim, static_cast<std::size_t>(r));
}

void matvec(std::span<const cplx> a, std::span<const cplx> x, std::span<cplx> out, std::size_t dim) {
  const auto n = static_cast<std::ptrdiff_t>(dim);
#pragma omp parallel for schedule(static) if (dim >= kParallelThreshold)
  for (std::ptrdiff_t r = 0; r < n; ++r)
    matvec_row(a.data(), x.data(), out.data(), dim, static_cast<std::size_t>(r));
}

void lindblad_rhs(std::span<const cplx> k_eff, std::span<const cplx> rho,
                  std::span<const SiteJump> jumps, std::span<cplx> out, std::size_t dim) {
  const auto n = static_cast<std::ptrdiff_t>(dim);
#pragma omp parallel for schedule(static) if (dim >= kParallelThreshold)
  for (std::ptrdiff_t r = 0; r < n; ++r)
    lindblad_row(k_eff.data(), rho.data(), jumps, out.data(), dim, static_cast<std::size_t>(r));
}

}  // namespace kernels

namespace reference {

void multiply(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out, std::size_t dim) {
  for (std::size_t r = 0; r < dim; ++r) multiply_row(a.data(), b.data(), out.data(), dim, r);
}

void matvec(std::span<const cplx> a, std::span<const cplx> x, std::span<cplx> out, std::size_t dim) {
  for (std::size_t r = 0; r < dim; ++r) matvec_row(a.data(), x.data(), out.data(), dim, r);
}

void lindblad_rhs(std::span<const cplx> k_eff, std::span<const cplx> rho,
                  std::span<const SiteJump> jumps, std::span<cplx> out, std::size_t dim) {
  for (std::size_t r = 0; r < dim; ++r)
    lindblad_row(k_eff.data(), rho.data(), jumps, out.data(), dim, r);
}

}  // namespace reference

}  // namespace ptrg
