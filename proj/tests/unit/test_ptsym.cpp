#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ptrg/charges.hpp"
#include "ptrg/eig.hpp"
#include "ptrg/error.hpp"
#include "ptrg/linalg.hpp"
#include "ptrg/model.hpp"
#include "ptrg/ptsym.hpp"
#include "support/oracle.hpp"

using namespace ptrg;

namespace {

const std::vector<double> kEps{0.1, 0.3, 0.5, 0.7};

OperatorMatrix dimer(double a, double b) { return OperatorMatrix{{cplx{0, a}, b}, {b, cplx{0, -a}}}; }
const OperatorMatrix kSwap{{0.0, 1.0}, {1.0, 0.0}};

CouplingSet imaginary_set(double g) {
  XYZFieldParams p;
  p.epsilon = kEps;
  p.g = g;
  p.delta = p.lambda = cplx{0, 0.5};
  return build_fields_xyz(p);
}

}  // namespace

TEST(Parity, BasicProperties) {
  const auto p1 = parity_op(SpinSystem(1));
  EXPECT_EQ(p1(0, 0), cplx(1.0));
  EXPECT_EQ(p1(1, 1), cplx(-1.0));
  const SpinSystem sys(4);
  const auto p = parity_op(sys);
  EXPECT_LT((oracle::to_mat(p) - oracle::parity(4)).norm(), 1e-15);
  EXPECT_LT(frobenius_norm(p * p - OperatorMatrix::identity(16)), 1e-15);
  const auto sx = spin_ops(sys, 1).x;
  EXPECT_LT(frobenius_norm(p * sx * p + sx), 1e-15);
}

TEST(PTResidual, Examples) {
  const std::vector<double> d{0.3, -1.2};
  EXPECT_EQ(pt_residual(OperatorMatrix::diagonal(std::span<const double>(d)), parity_op(SpinSystem(1))), 0.0);
  const SpinSystem sys(3);
  EXPECT_GT(pt_residual(spin_ops(sys, 1).x, parity_op(sys)), 1.0);
  const auto cs = build_couplings_xxz({Family::Rational, {0.1, 0.4, 0.9}, 0.3, true});
  EXPECT_LT(pt_residual(build_hamiltonian_xxz(sys, cs), parity_op(sys)), 1e-12);
}

TEST(PTResidual, ImaginarySetChargesArePseudoHermitianButNotConjugationInvariant) {
  const SpinSystem sys(4);
  const auto p = parity_op(sys);
  for (const auto& q : build_all_charges(sys, imaginary_set(0.1))) {
    EXPECT_LT(pseudo_hermiticity_residual(q, p), 1e-14);
    EXPECT_GT(pt_residual(q, p), 0.1);
  }
}

TEST(Signature, DimerMatchesClosedFormC) {
  const double a = 0.5, b = 1.0;
  const auto h = dimer(a, b);
  const auto pt = pt_operators(h, kSwap);
  EXPECT_FALSE(pt.broken_phase);
  std::vector<int> s = pt.signature;
  std::sort(s.begin(), s.end());
  EXPECT_EQ(s, (std::vector<int>{-1, 1}));

  const double sa = a / b, ca = std::sqrt(1 - sa * sa);
  oracle::Mat c_ref(2, 2);
  c_ref << cplx{0, sa}, 1.0, 1.0, cplx{0, -sa};
  c_ref /= ca;
  const oracle::Mat c = oracle::to_mat(pt.c);
  EXPECT_LT(std::min((c - c_ref).norm(), (c + c_ref).norm()), 1e-12);

  const auto m = metric_rho(kSwap, pt.c, h);
  EXPECT_LT(m.intertwining_residual, 1e-12);
  EXPECT_LT(m.c_square_residual, 1e-12);
  EXPECT_LT(m.c_commutator_residual, 1e-12);
  const oracle::Mat rho_ref = oracle::to_mat(kSwap) * c_ref;
  const oracle::Mat rho = oracle::to_mat(m.rho);
  const cplx scale = rho(0, 0) / rho_ref(0, 0);
  EXPECT_LT((rho - scale * rho_ref).norm(), 1e-12);
}

TEST(Signature, BrokenDimerThrowsUnlessAllowed) {
  EXPECT_THROW(pt_operators(dimer(1.0, 0.5), kSwap), Error);
  SignatureOptions so;
  so.allow_broken = true;
  const auto pt = pt_operators(dimer(1.0, 0.5), kSwap, so);
  EXPECT_TRUE(pt.broken_phase);
}

TEST(Signature, HermitianDiagonalReadsParities) {
  const SpinSystem sys(2);
  const std::vector<double> d{0.1, 0.7, 1.3, 2.2};
  const auto h = OperatorMatrix::diagonal(std::span<const double>(d));
  const auto p = parity_op(sys);
  const auto pt = pt_operators(h, p);
  EXPECT_EQ(pt.signature, (std::vector<int>{1, -1, -1, 1}));
  EXPECT_LT(frobenius_norm(pt.c - p), 1e-14);
  const auto m = metric_rho(p, pt.c, h);
  EXPECT_LT(frobenius_norm(m.rho - OperatorMatrix::identity(4)), 1e-14);
  EXPECT_TRUE(m.positive);
}

TEST(Signature, ImaginarySetChargesWithBrokenPairs) {
  const SpinSystem sys(4);
  SignatureOptions so;
  so.allow_broken = true;
  for (const auto& q : build_all_charges(sys, imaginary_set(0.1))) {
    const auto pt = pt_operators(q, parity_op(sys), so);
    const auto m = metric_rho(pt.parity, pt.c, q);
    EXPECT_LT(m.intertwining_residual, 1e-8);
    EXPECT_LT(m.c_square_residual, 1e-8);
    EXPECT_LT(m.c_commutator_residual, 1e-8);
  }
}

TEST(Eta, IdentityAndSingleSite) {
  const SpinSystem sys(3);
  const auto e0 = eta_from_q(sys, {0, 0, 0});
  EXPECT_EQ(e0.eta, OperatorMatrix::identity(8));
  const SpinSystem one(1);
  const auto e = eta_from_q(one, {2 * std::log(2.0)});
  const auto sp = spin_ops(one, 1).plus;
  EXPECT_LT(frobenius_norm(e.eta * sp * e.eta_inverse - 0.5 * sp), 1e-15);
  EXPECT_LT(e.consistency_residual, 1e-15);
}

TEST(Eta, FlipFlopTransformsWithExponent) {
  const SpinSystem sys(3);
  const std::vector<double> q{0.3, -0.8, 1.1};
  const auto e = eta_from_q(sys, q);
  EXPECT_LT(e.bch_residual, 1e-14);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      if (i == j) continue;
      const oracle::Mat pm = oracle::splus(3, i) * oracle::sminus(3, j);
      const oracle::Mat lhs = oracle::to_mat(e.eta) * pm * oracle::to_mat(e.eta_inverse);
      const double f = std::exp(-(q[static_cast<std::size_t>(i - 1)] - q[static_cast<std::size_t>(j - 1)]) / 2);
      EXPECT_LT((lhs - f * pm).norm(), 1e-14);
    }
}

TEST(SolveQ, HermitianLimitAndImaginaryPair) {
  auto cs = build_couplings_xxz({Family::Rational, {0.0, 1.0}, 0.0, false});
  const auto zero = solve_q_xxz(cs);
  EXPECT_TRUE(zero.applicable);
  EXPECT_EQ(zero.residual, 0.0);
  for (double q : zero.q) EXPECT_EQ(q, 0.0);

  const double gamma = 0.4;
  cs.gamma_x(0, 1) = cplx{0, gamma};
  cs.gamma_x(1, 0) = cplx{0, -gamma};
  const auto sol = solve_q_xxz(cs);
  EXPECT_FALSE(sol.applicable);
  // min over x of gamma^2 (e^{2x} + e^{-2x}) is 2 gamma^2 at x = 0.
  EXPECT_NEAR(sol.residual, gamma * std::sqrt(2.0), 1e-8);
}

TEST(SolveQ, FieldRuleOnImaginarySet) {
  const auto r = q_from_field_rule(imaginary_set(0.1));
  ASSERT_EQ(r.q.size(), 4u);
  EXPECT_NEAR(std::exp(r.q[0]), std::sqrt(0.6) / 0.5, 1e-12);
  EXPECT_TRUE(std::isfinite(r.consistency_residual));
}

TEST(Counterpart, SimilarityPreservesSpectrum) {
  const SpinSystem sys(4);
  const auto q1 = build_charge(sys, imaginary_set(0.1), 1);
  const auto same = hermitian_counterpart(q1, eta_from_q(sys, {0, 0, 0, 0}));
  EXPECT_LT(frobenius_norm(same.h - q1), 1e-15);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto ref = eig_general(q1).eigenvalues;
  for (int trial = 0; trial < 5; ++trial) {
    const auto t = hermitian_counterpart(q1, eta_from_q(sys, {u(rng), u(rng), u(rng), u(rng)}));
    const auto ev = eig_general(t.h).eigenvalues;
    for (const auto& z : ev) {
      double nearest = 1e9;
      for (const auto& w : ref) nearest = std::min(nearest, std::abs(z - w));
      EXPECT_LT(nearest, 1e-8);
    }
  }
}

TEST(Counterpart, ClosedFormChargeDiscrepancyIsReported) {
  const SpinSystem sys(4);
  const auto cs = imaginary_set(0.1);
  const auto rule = q_from_field_rule(cs);
  const auto eta = eta_from_q(sys, rule.q);
  const auto q1 = build_charge(sys, cs, 1);
  const auto transformed = eta.eta_inverse * q1 * eta.eta;
  const double gap = frobenius_norm(transformed - closed_form_transformed_charge(sys, cs, 1, rule.q));
  EXPECT_GT(gap, 1e-3);
}

TEST(InnerProducts, Identities) {
  const SpinSystem sys(2);
  StateVector a(std::vector<cplx>{1.0, cplx{0, 1}, 0.5, -0.2});
  StateVector b(std::vector<cplx>{0.3, 1.0, cplx{0, -2}, 0.0});
  EXPECT_EQ(inner_rho(a, b, OperatorMatrix::identity(4)), inner(a, b));
  const auto p = parity_op(sys);
  EXPECT_NEAR(std::abs(expectation_cp(OperatorMatrix::identity(4), a, p, p) - 1.0), 0.0, 1e-15);
  const auto h = spin_ops(sys, 1).x + spin_ops(sys, 2).z;
  const cplx standard = sandwich(a, h, a) / inner(a, a);
  EXPECT_LT(std::abs(expectation_cp(h, a, p, p) - standard), 1e-15);
  EXPECT_THROW(weighted_expectation(h, StateVector(4), OperatorMatrix::identity(4)), Error);
}
