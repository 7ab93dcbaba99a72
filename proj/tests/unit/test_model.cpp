#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "ptrg/error.hpp"
#include "ptrg/linalg.hpp"
#include "ptrg/model.hpp"
#include "support/oracle.hpp"

using namespace ptrg;

namespace {

const std::vector<double> kEps{0.1, 0.3, 0.5, 0.7};

XYZFieldParams reference_params(double g, bool imaginary = true) {
  XYZFieldParams p;
  p.epsilon = kEps;
  p.g = g;
  p.delta = p.lambda = imaginary ? cplx{0, 0.5} : cplx{0.5, 0};
  return p;
}

double diff(const OperatorMatrix& a, const oracle::Mat& b) { return (oracle::to_mat(a) - b).norm(); }

}  // namespace

TEST(CouplingFamily, SpotValues) {
  const auto r = coupling_family(Family::Rational, 0.5, 0.0);
  EXPECT_DOUBLE_EQ(r.gx, 2.0);
  EXPECT_DOUBLE_EQ(r.gz, 2.0);
  const auto t = coupling_family(Family::Trigonometric, std::numbers::pi / 2, 0.0);
  EXPECT_NEAR(t.gx, 1.0, 1e-15);
  EXPECT_NEAR(t.gz, 0.0, 1e-15);
  EXPECT_NEAR(coupling_family(Family::Hyperbolic, 20.0, 0.0).gz, 1.0, 1e-3);
  EXPECT_THROW(coupling_family(Family::Rational, 0.3, 0.3), Error);
  EXPECT_THROW(coupling_family(Family::Trigonometric, std::numbers::pi, 0.0), Error);
  EXPECT_EQ(parse_family("trig"), Family::Trigonometric);
  EXPECT_THROW(parse_family("elliptic"), Error);
}

TEST(FieldsXYZ, ZeroNumerators) {
  XYZFieldParams p;
  p.epsilon = kEps;
  p.g = 0.4;
  const auto cs = build_fields_xyz(p);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(cs.bx[static_cast<std::size_t>(i)], cplx{});
    EXPECT_EQ(cs.by[static_cast<std::size_t>(i)], cplx{});
    EXPECT_EQ(cs.bz[static_cast<std::size_t>(i)], 1.0);
  }
}

TEST(FieldsXYZ, HandEvaluation) {
  const auto cs = build_fields_xyz(reference_params(0.1));
  EXPECT_LT(std::abs(cs.bx[0] - cplx{0, 0.5} / std::sqrt(0.6)), 1e-15);
  EXPECT_LT(std::abs(cs.gamma_x(0, 1) - 0.1 * std::sqrt(0.6 * 0.8) / (0.1 - 0.3)), 1e-15);
  const auto ref = oracle::xyz_model(kEps, 0.1, {0, 0.5}, {0, 0.5});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      EXPECT_LT(std::abs(cs.gamma_y(i, j) - ref.gy[i][j]), 1e-15);
      EXPECT_LT(std::abs(cs.gamma_z(i, j) - ref.gz[i][j]), 1e-15);
    }
}

TEST(FieldsXYZ, NonPositiveRadicand) {
  auto p = reference_params(0.1);
  p.beta_x = -1.0;
  EXPECT_THROW(build_fields_xyz(p), Error);
}

TEST(IntegrabilityXXZ, FamiliesSatisfyConditions) {
  for (Family f : {Family::Rational, Family::Trigonometric, Family::Hyperbolic}) {
    XXZParams p{f, kEps, 0.7, false};
    EXPECT_LT(check_integrability_xxz(build_couplings_xxz(p)).max(), 1e-10) << to_string(f);
  }
  XXZParams three{Family::Rational, {0.1, 0.3, 0.5}, 2.3, false};
  EXPECT_LT(check_integrability_xxz(build_couplings_xxz(three)).max(), 1e-12);
}

TEST(IntegrabilityXXZ, SymmetricViolation) {
  auto cs = build_couplings_xxz({Family::Rational, {0.1, 0.3}, 1.0, false});
  cs.gamma_x(0, 1) = cs.gamma_x(1, 0) = 1.0;
  EXPECT_DOUBLE_EQ(check_integrability_xxz(cs).antisymmetry_x, 2.0);
}

TEST(IntegrabilityXYZ, ImaginaryAndRealFieldSets) {
  for (double g : {0.1, 1.0}) {
    EXPECT_LT(check_integrability_xyz(build_fields_xyz(reference_params(g))).max(), 1e-10);
    EXPECT_LT(check_integrability_xyz(build_fields_xyz(reference_params(g, false))).max(), 1e-10);
  }
  auto broken = build_fields_xyz(reference_params(0.1));
  broken.gamma_z = OperatorMatrix(4);
  EXPECT_GT(check_integrability_xyz(broken).max(), 1e-3);
}

TEST(HamiltonianXXZ, FreeLimitAndSingleSite) {
  const SpinSystem sys(3);
  const auto h0 = build_hamiltonian_xxz(sys, build_couplings_xxz({Family::Rational, {0.1, 0.3, 0.5}, 0.0, false}));
  EXPECT_TRUE(h0.is_diagonal());
  EXPECT_NEAR(h0(0, 0).real(), 0.45, 1e-15);
  const SpinSystem one(1);
  const auto h1 = build_hamiltonian_xxz(one, build_couplings_xxz({Family::Rational, {0.4}, 3.0, false}));
  EXPECT_LT(diff(h1, 0.4 * oracle::spin(1, 1, 'z')), 1e-15);
}

TEST(HamiltonianXXZ, TwoSiteBruteForce) {
  const SpinSystem sys(2);
  const auto cs = build_couplings_xxz({Family::Rational, {0.0, 0.5}, 0.2, false});
  const auto h = build_hamiltonian_xxz(sys, cs);
  // gx_12 = gz_12 = 0.2 / (0 - 0.5) = -0.4 and the sum runs over both orders.
  const double gxy = -0.4, gz = -0.4;
  oracle::Mat ref = 0.5 * oracle::spin(2, 2, 'z');
  for (int k = 0; k < 2; ++k) {
    const double sx = k == 0 ? gxy : -gxy, sz = k == 0 ? gz : -gz;
    const int i = k == 0 ? 1 : 2, j = k == 0 ? 2 : 1;
    ref += sx * (oracle::splus(2, i) * oracle::sminus(2, j) + oracle::sminus(2, i) * oracle::splus(2, j));
    ref += sz * oracle::spin(2, i, 'z') * oracle::spin(2, j, 'z');
  }
  EXPECT_LT(diff(h, ref), 1e-14);
  EXPECT_LT(hermiticity_residual(h), 1e-15);
}

TEST(Charges, FreeLimit) {
  const SpinSystem sys(3);
  const auto cs = free_couplings({0.1, 0.2, 0.3});
  for (int i = 1; i <= 3; ++i) {
    const auto q = build_charge(sys, cs, i);
    EXPECT_LT(diff(q, oracle::spin(3, i, 'z')), 1e-15);
    const auto ev = hermitian_eigenvalues(q);
    EXPECT_EQ(std::count_if(ev.begin(), ev.end(), [](double x) { return std::abs(x - 0.5) < 1e-12; }), 4);
  }
}

TEST(Charges, MatchKroneckerOracle) {
  const SpinSystem sys(4);
  const auto cs = build_fields_xyz(reference_params(0.1));
  const auto ref = oracle::xyz_model(kEps, 0.1, {0, 0.5}, {0, 0.5});
  for (int i = 1; i <= 4; ++i) EXPECT_LT(diff(build_charge(sys, cs, i), oracle::charge(ref, i)), 1e-14);
  EXPECT_GT(hermiticity_residual(build_charge(sys, cs, 1)), 1e-3);
  const auto pauli = build_charge(sys, cs, 2, ChargeNormalization::Pauli);
  oracle::RawModel scaled = ref;
  for (auto* v : {&scaled.bx, &scaled.by, &scaled.bz})
    for (auto& x : *v) x *= 2.0;
  for (auto* m : {&scaled.gx, &scaled.gy, &scaled.gz})
    for (auto& row : *m)
      for (auto& x : row) x *= 4.0;
  EXPECT_LT(diff(pauli, oracle::charge(scaled, 2)), 1e-13);
}

TEST(Charges, XXZChargeIsFlipFlopForm) {
  const SpinSystem sys(3);
  const auto cs = build_couplings_xxz({Family::Hyperbolic, {0.1, 0.6, 1.4}, 0.5, false});
  for (int i = 1; i <= 3; ++i) {
    oracle::Mat ref = oracle::spin(3, i, 'z');
    for (int k = 1; k <= 3; ++k) {
      if (k == i) continue;
      const auto c = coupling_family(Family::Hyperbolic, cs.epsilon[static_cast<std::size_t>(i - 1)],
                                     cs.epsilon[static_cast<std::size_t>(k - 1)]);
      const double g = 0.5;
      ref += g * c.gx * 0.5 * (oracle::splus(3, i) * oracle::sminus(3, k) + oracle::sminus(3, i) * oracle::splus(3, k));
      ref += g * c.gz * oracle::spin(3, i, 'z') * oracle::spin(3, k, 'z');
    }
    EXPECT_LT(diff(build_charge(sys, cs, i), ref), 1e-14);
  }
}

TEST(Charges, HamiltonianFromWeights) {
  const SpinSystem sys(4);
  const auto qs = build_all_charges(sys, build_fields_xyz(reference_params(0.1)));
  EXPECT_EQ(build_hamiltonian_from_charges(qs, {1, 0, 0, 0}), qs[0]);
  EXPECT_EQ(frobenius_norm(build_hamiltonian_from_charges(qs, {0, 0, 0, 0})), 0.0);
  const auto h = build_hamiltonian_from_charges(qs, {1, 1, 1, 1});
  for (const auto& q : qs) EXPECT_LT(frobenius_norm(commutator(h, q)), 1e-10);
  EXPECT_THROW(build_hamiltonian_from_charges(qs, {1, 1}), Error);
}

TEST(CouplingSet, DistinctEpsilonEnforced) {
  XYZFieldParams p = reference_params(0.1);
  p.epsilon = {0.1, 0.1, 0.5, 0.7};
  try {
    build_fields_xyz(p);
    FAIL() << "expected validation error";
  } catch (const Error& e) {
    EXPECT_TRUE(e.is_validation());
    EXPECT_NE(std::string(e.what()).find("epsilon entries must be distinct"), std::string::npos);
  }
}
