#pragma once

// Independent reference constructions for the tests. Everything here is built
// from explicit Kronecker products of 2x2 matrices with Eigen, never from the
// library's operator builders.

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "ptrg/qops.hpp"

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline Mat sx() { return (Mat(2, 2) << 0, 1, 1, 0).finished(); }
inline Mat sy() { return (Mat(2, 2) << 0, cd(0, -1), cd(0, 1), 0).finished(); }
inline Mat sz() { return (Mat(2, 2) << 1, 0, 0, -1).finished(); }
inline Mat id2() { return Mat::Identity(2, 2); }

/// `local` on site `site` (1-based, site 1 leftmost factor) of an n-site chain.
inline Mat embed(int n, int site, const Mat& local) {
  Mat out = Mat::Identity(1, 1);
  for (int s = 1; s <= n; ++s) out = kron(out, s == site ? local : id2());
  return out;
}

inline Mat spin(int n, int site, char axis) {
  const Mat p = axis == 'x' ? sx() : axis == 'y' ? sy() : sz();
  return embed(n, site, 0.5 * p);
}

inline Mat splus(int n, int site) { return embed(n, site, (Mat(2, 2) << 0, 1, 0, 0).finished()); }
inline Mat sminus(int n, int site) { return embed(n, site, (Mat(2, 2) << 0, 0, 1, 0).finished()); }

inline Mat to_mat(const ptrg::OperatorMatrix& m) {
  Mat out(static_cast<Eigen::Index>(m.dim()), static_cast<Eigen::Index>(m.dim()));
  for (std::size_t r = 0; r < m.dim(); ++r)
    for (std::size_t c = 0; c < m.dim(); ++c) out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m(r, c);
  return out;
}

inline ptrg::OperatorMatrix from_mat(const Mat& m) {
  ptrg::OperatorMatrix out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = m(r, c);
  return out;
}

inline Vec to_vec(const ptrg::StateVector& v) {
  Vec out(static_cast<Eigen::Index>(v.dim()));
  for (std::size_t i = 0; i < v.dim(); ++i) out(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

/// Q_i = sum_a B^a_i S^a_i + sum_{k != i} G^a_ik S^a_i S^a_k from raw field/coupling arrays.
struct RawModel {
  int n = 0;
  std::vector<cd> bx, by, bz;
  std::vector<std::vector<cd>> gx, gy, gz;
};

inline Mat charge(const RawModel& m, int i) {
  const int n = m.n;
  const auto a = static_cast<std::size_t>(i - 1);
  Mat q = m.bx[a] * spin(n, i, 'x') + m.by[a] * spin(n, i, 'y') + m.bz[a] * spin(n, i, 'z');
  for (int k = 1; k <= n; ++k) {
    if (k == i) continue;
    const auto b = static_cast<std::size_t>(k - 1);
    q += m.gx[a][b] * spin(n, i, 'x') * spin(n, k, 'x');
    q += m.gy[a][b] * spin(n, i, 'y') * spin(n, k, 'y');
    q += m.gz[a][b] * spin(n, i, 'z') * spin(n, k, 'z');
  }
  return q;
}

/// Fields and couplings of the arbitrary-field XYZ parametrization evaluated by hand:
/// X = alpha_x eps + beta_x, Y = alpha_y eps + beta_y, B^x = delta / sqrt(X), B^y = lambda / sqrt(Y),
/// B^z = 1, G^x_ij = g sqrt(X_i Y_j) / (eps_i - eps_j), G^y_ij = g sqrt(Y_i X_j) / d,
/// G^z_ij = g sqrt(X_j Y_j) / d.
inline RawModel xyz_model(const std::vector<double>& eps, double g, cd delta, cd lambda, double ax = 1.0,
                          double ay = 1.0, double bx = 0.5, double by = 0.5) {
  RawModel m;
  m.n = static_cast<int>(eps.size());
  const auto n = eps.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = ax * eps[i] + bx;
    y[i] = ay * eps[i] + by;
    m.bx.push_back(delta / std::sqrt(x[i]));
    m.by.push_back(lambda / std::sqrt(y[i]));
    m.bz.push_back(1.0);
  }
  m.gx.assign(n, std::vector<cd>(n));
  m.gy = m.gz = m.gx;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const double d = eps[i] - eps[j];
      m.gx[i][j] = g * std::sqrt(x[i] * y[j]) / d;
      m.gy[i][j] = g * std::sqrt(y[i] * x[j]) / d;
      m.gz[i][j] = g * std::sqrt(x[j] * y[j]) / d;
    }
  return m;
}

/// prod_i sigma^z_i as a diagonal matrix (popcount parity).
inline Mat parity(int n) {
  Mat p = Mat::Identity(1, 1);
  for (int s = 0; s < n; ++s) p = kron(p, sz());
  return p;
}

inline double fro(const Mat& m) { return m.norm(); }

}  // namespace oracle
