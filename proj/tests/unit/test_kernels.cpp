#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "ptrg/kernels.hpp"

using namespace ptrg;

namespace {

std::vector<cplx> random_block(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  std::vector<cplx> v(n);
  for (auto& x : v) x = {nd(rng), nd(rng)};
  return v;
}

class KernelParity : public ::testing::TestWithParam<std::size_t> {};

}  // namespace

TEST_P(KernelParity, MultiplyBitIdentical) {
  const std::size_t d = GetParam();
  const auto a = random_block(d * d, 1), b = random_block(d * d, 2);
  std::vector<cplx> p(d * d), s(d * d);
  kernels::multiply(a, b, p, d);
  reference::multiply(a, b, s, d);
  EXPECT_EQ(p, s);
}

TEST_P(KernelParity, MatvecBitIdentical) {
  const std::size_t d = GetParam();
  const auto a = random_block(d * d, 3), x = random_block(d, 4);
  std::vector<cplx> p(d), s(d);
  kernels::matvec(a, x, p, d);
  reference::matvec(a, x, s, d);
  EXPECT_EQ(p, s);
}

TEST_P(KernelParity, LindbladRhsBitIdentical) {
  const std::size_t d = GetParam();
  const auto k = random_block(d * d, 5), rho = random_block(d * d, 6);
  std::vector<SiteJump> jumps;
  for (std::size_t bit = 1; bit < d; bit <<= 1) jumps.push_back({bit, 0.2});
  std::vector<cplx> p(d * d), s(d * d);
  kernels::lindblad_rhs(k, rho, jumps, p, d);
  reference::lindblad_rhs(k, rho, jumps, s, d);
  EXPECT_EQ(p, s);
}

TEST_P(KernelParity, MultiplyAgainstNaiveLoop) {
  const std::size_t d = GetParam();
  const auto a = random_block(d * d, 7), b = random_block(d * d, 8);
  std::vector<cplx> p(d * d);
  kernels::multiply(a, b, p, d);
  double worst = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      cplx acc{};
      for (std::size_t m = 0; m < d; ++m) acc += a[i * d + m] * b[m * d + j];
      worst = std::max(worst, std::abs(acc - p[i * d + j]));
    }
  EXPECT_LT(worst, 1e-11);
}

INSTANTIATE_TEST_SUITE_P(Dims, KernelParity, ::testing::Values(std::size_t{4}, std::size_t{64}, std::size_t{128}));

TEST(KernelThreads, SetAndQuery) {
  kernels::set_thread_count(2);
  EXPECT_GE(kernels::thread_count(), 1);
  kernels::set_thread_count(0);
  EXPECT_GE(kernels::thread_count(), 1);
}
