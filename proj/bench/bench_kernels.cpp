// Parallel kernels against their serial references, at N = 6, 7, 8 spins.
#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "ptrg/kernels.hpp"

namespace {

using ptrg::cplx;

std::vector<cplx> random_block(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {nd(rng), nd(rng)};
  return v;
}

std::vector<ptrg::SiteJump> jumps_for(std::size_t dim) {
  std::vector<ptrg::SiteJump> j;
  for (std::size_t bit = 1; bit < dim; bit <<= 1) j.push_back({bit, 0.2236});
  return j;
}

template <bool Parallel>
void BM_Multiply(benchmark::State& st) {
  const auto d = static_cast<std::size_t>(st.range(0));
  const auto a = random_block(d * d, 1), b = random_block(d * d, 2);
  std::vector<cplx> out(d * d);
  for (auto _ : st) {
    if constexpr (Parallel) ptrg::kernels::multiply(a, b, out, d);
    else ptrg::reference::multiply(a, b, out, d);
    benchmark::DoNotOptimize(out.data());
  }
  st.counters["threads"] = ptrg::kernels::thread_count();
}

template <bool Parallel>
void BM_LindbladRhs(benchmark::State& st) {
  const auto d = static_cast<std::size_t>(st.range(0));
  const auto k = random_block(d * d, 3), rho = random_block(d * d, 4);
  const auto jumps = jumps_for(d);
  std::vector<cplx> out(d * d);
  for (auto _ : st) {
    if constexpr (Parallel) ptrg::kernels::lindblad_rhs(k, rho, jumps, out, d);
    else ptrg::reference::lindblad_rhs(k, rho, jumps, out, d);
    benchmark::DoNotOptimize(out.data());
  }
  st.counters["threads"] = ptrg::kernels::thread_count();
}

}  // namespace

BENCHMARK(BM_Multiply<false>)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_Multiply<true>)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_LindbladRhs<false>)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_LindbladRhs<true>)->Arg(64)->Arg(128)->Arg(256);

BENCHMARK_MAIN();
