#include <cmath>

#include <gtest/gtest.h>

#include "ptrg/error.hpp"
#include "ptrg/linalg.hpp"
#include "ptrg/model.hpp"
#include "ptrg/perturb.hpp"
#include "support/oracle.hpp"

using namespace ptrg;

namespace {

const std::vector<double> kEps{0.1, 0.3, 0.5, 0.7};

CouplingSet single_spin(double b) {
  CouplingSet cs = free_couplings({0.0});
  cs.bx = {b};
  return cs;
}

CouplingSet imaginary_fields(double g, bool bz_from_eps) {
  XYZFieldParams p;
  p.epsilon = kEps;
  p.g = g;
  p.delta = p.lambda = cplx{0, 0.5};
  auto cs = build_fields_xyz(p);
  if (bz_from_eps) cs.bz = kEps;
  return cs;
}

CouplingSet generic_free() {
  CouplingSet cs = free_couplings(kEps);
  cs.bz = kEps;
  cs.bx = {0.05, 0.05, 0.05, 0.05};
  cs.by = {0.03, 0.03, 0.03, 0.03};
  return cs;
}

}  // namespace

TEST(Split, ZeroTransverseFields) {
  const SpinSystem sys(4);
  const auto split = split_hamiltonian(sys, free_couplings(kEps));
  EXPECT_EQ(frobenius_norm(split.v), 0.0);
  EXPECT_EQ(split.ratio, 0.0);
}

TEST(Split, ImaginaryFieldsGiveAntiHermitianV) {
  const SpinSystem sys(4);
  const auto cs = imaginary_fields(0.1, false);
  const auto split = split_hamiltonian(sys, cs);
  EXPECT_LT(frobenius_norm(dagger(split.v) + split.v), 1e-15);
  EXPECT_NEAR(split.ratio, 0.5 / std::sqrt(0.6), 1e-12);
  EXPECT_LT(frobenius_norm(split.full - split.h0 - split.v), 1e-14);
  const auto half = scale_perturbation(split, 0.5);
  EXPECT_LT(frobenius_norm(half.v - 0.5 * split.v), 1e-15);
}

TEST(Split, ZeroLongitudinalFieldRejected) {
  const SpinSystem sys(1);
  auto cs = single_spin(0.1);
  cs.bz = {0.0};
  EXPECT_THROW(split_hamiltonian(sys, cs), Error);
}

TEST(Corrections, TwoLevelClosedForm) {
  const SpinSystem one(1);
  const double b = 0.1;
  const auto split = split_hamiltonian(one, single_spin(b));
  for (InnerProduct ip : {InnerProduct::Standard, InnerProduct::Biorthogonal, InnerProduct::Cpt}) {
    CorrectionOptions o;
    o.inner = ip;
    const auto tab = corrections(split, o);
    ASSERT_EQ(tab.size(), 2u);
    // Exact levels +-(1/2) sqrt(1 + b^2) = +-(1/2 + b^2/4 - ...).
    EXPECT_NEAR(tab.e0[0].real(), -0.5, 1e-15);
    EXPECT_NEAR(std::abs(tab.e1[0]), 0.0, 1e-15);
    EXPECT_NEAR(tab.e2[0].real(), -b * b / 4, 1e-15);
    EXPECT_NEAR(tab.e2[1].real(), b * b / 4, 1e-15);
    const double exact = 0.5 * std::sqrt(1 + b * b);
    EXPECT_LT(std::abs(tab.e0[1].real() + tab.e2[1].real() - exact), b * b * b * b);
  }
}

TEST(Corrections, FirstOrderVanishesAtZeroCoupling) {
  const SpinSystem sys(4);
  const auto cs = generic_free();
  const auto split = split_hamiltonian(sys, cs);
  const auto tab = corrections(split);
  for (std::size_t n = 0; n < tab.size(); ++n)
    if (tab.valid[n] && !tab.degenerate[n]) EXPECT_LT(std::abs(tab.e1[n]), 1e-10);
  EXPECT_LT(closed_form_matrix_element_check(sys, cs, split), 1e-14);
}

TEST(Corrections, DegenerateZeroClusterDetected) {
  const SpinSystem sys(4);
  const auto tab = corrections(split_hamiltonian(sys, generic_free()));
  // Sign patterns (+,-,-,+) and (-,+,+,-) both sum to zero.
  int zero_level_count = 0;
  for (std::size_t n = 0; n < tab.size(); ++n)
    if (std::abs(tab.e0[n]) < 1e-12) {
      ++zero_level_count;
      EXPECT_TRUE(tab.degenerate[n]);
    }
  EXPECT_EQ(zero_level_count, 2);
  EXPECT_GE(tab.unresolved_clusters, 1u);
}

TEST(Corrections, SecondOrderMatchesDenseSumOverStates) {
  // Nondegenerate Hermitian case: E2_n = sum_m |V_mn|^2 / (E_n - E_m) with Eigen's eigenbasis.
  const SpinSystem sys(3);
  CouplingSet cs = free_couplings({0.1, 0.35, 0.9});
  cs.bz = {0.13, 0.41, 0.97};
  cs.bx = {0.02, 0.01, 0.03};
  const auto split = split_hamiltonian(sys, cs);
  CorrectionOptions o;
  o.inner = InnerProduct::Standard;
  const auto tab = corrections(split, o);
  Eigen::SelfAdjointEigenSolver<oracle::Mat> es(oracle::to_mat(split.h0));
  const oracle::Mat vm = es.eigenvectors().adjoint() * oracle::to_mat(split.v) * es.eigenvectors();
  for (Eigen::Index n = 0; n < 8; ++n) {
    double ref = 0.0;
    for (Eigen::Index m = 0; m < 8; ++m)
      if (m != n) ref += std::norm(vm(m, n)) / (es.eigenvalues()(n) - es.eigenvalues()(m));
    EXPECT_NEAR(tab.e2[static_cast<std::size_t>(n)].real(), ref, 1e-14);
  }
}

TEST(Scaling, TwoLevelSlope) {
  const SpinSystem one(1);
  const auto split = split_hamiltonian(one, single_spin(1.0));
  const auto sr = scaling_validation(split, {0.0, 0.01, 0.02, 0.05, 0.1});
  EXPECT_GE(sr.min_slope, 3.9);
  EXPECT_EQ(sr.errors[0][0], 0.0);
}

TEST(Scaling, GenericMultiLevelSlopes) {
  const SpinSystem sys(4);
  const auto sr = scaling_validation(split_hamiltonian(sys, generic_free()), {0.1, 0.2, 0.5, 1.0});
  EXPECT_GE(sr.min_slope, 2.7);
  const auto imag = scaling_validation(split_hamiltonian(sys, imaginary_fields(0.1, true)), {0.001, 0.002, 0.005, 0.01, 0.02});
  EXPECT_GE(imag.min_slope, 2.7);
}

TEST(Scaling, ScalesMustSpanADecade) {
  const SpinSystem one(1);
  EXPECT_THROW(scaling_validation(split_hamiltonian(one, single_spin(1.0)), {0.01, 0.02}), Error);
}
