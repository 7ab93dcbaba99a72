#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP version (namespace
// `kernels`) and a serial reference (namespace `reference`) with the same
// per-element summation order, so the two agree bit for bit. Tests compare
// them; bench/ times them against each other.

#include <cstddef>
#include <span>
#include <vector>

#include "ptrg/qops.hpp"

namespace ptrg {

/// Sparse representation of a single-site lowering operator sqrt(rate)*sigma_k^-:
/// column `c` (site k up) maps to row `c | bit_k` with weight `amplitude`.
struct SiteJump {
  std::size_t bit = 0;  // mask of the site's bit in the basis index
  double amplitude = 0.0;
};

namespace kernels {

/// Worker threads for the parallel kernels; n <= 0 keeps the OpenMP default.
void set_thread_count(int n);
int thread_count();

/// Matrices below this dimension run serially; OpenMP overhead dominates.
inline constexpr std::size_t kParallelThreshold = 64;

void multiply(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out, std::size_t dim);
void matvec(std::span<const cplx> a, std::span<const cplx> x, std::span<cplx> out, std::size_t dim);

/// out = K rho + rho K^dagger + sum_k L_k rho L_k^dagger, with K = -iH - (1/2) sum L^dagger L
/// supplied by the caller.
void lindblad_rhs(std::span<const cplx> k_eff, std::span<const cplx> rho,
                  std::span<const SiteJump> jumps, std::span<cplx> out, std::size_t dim);

}  // namespace kernels

namespace reference {

void multiply(std::span<const cplx> a, std::span<const cplx> b, std::span<cplx> out, std::size_t dim);
void matvec(std::span<const cplx> a, std::span<const cplx> x, std::span<cplx> out, std::size_t dim);
void lindblad_rhs(std::span<const cplx> k_eff, std::span<const cplx> rho,
                  std::span<const SiteJump> jumps, std::span<cplx> out, std::size_t dim);

}  // namespace reference

}  // namespace ptrg
