#pragma once

// Operator kernel for spin-1/2 lattices.
//
// Basis convention (used by every module):
//   * site 1 is the most significant bit of the computational-basis index;
//   * local label |0> is spin-up (S^z = +1/2), |1> is spin-down.
// The all-|0> state is therefore the fully polarized up state, and sigma^-
// maps |0> to |1>. This is an interpretation: it is chosen so that
// lowering-operator damping acts nontrivially on |0...0>.

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

namespace ptrg {

using cplx = std::complex<double>;

inline constexpr int kMaxSites = 12;

class SpinSystem {
public:
  explicit SpinSystem(int site_count);

  int sites() const noexcept { return sites_; }
  std::size_t dim() const noexcept { return std::size_t{1} << sites_; }

  friend bool operator==(const SpinSystem&, const SpinSystem&) = default;

private:
  int sites_;
};

/// Dense square complex matrix, row-major.
class OperatorMatrix {
public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(std::size_t dim);
  OperatorMatrix(std::size_t dim, std::vector<cplx> entries);
  OperatorMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

  static OperatorMatrix identity(std::size_t dim);
  static OperatorMatrix zero(std::size_t dim) { return OperatorMatrix(dim); }
  static OperatorMatrix diagonal(std::span<const cplx> values);
  static OperatorMatrix diagonal(std::span<const double> values);

  std::size_t dim() const noexcept { return dim_; }
  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }

  std::span<cplx> data() noexcept { return data_; }
  std::span<const cplx> data() const noexcept { return data_; }

  bool is_finite() const;
  bool is_diagonal(double tol = 0.0) const;
  cplx trace() const;

  OperatorMatrix& operator+=(const OperatorMatrix& rhs);
  OperatorMatrix& operator-=(const OperatorMatrix& rhs);
  OperatorMatrix& operator*=(cplx s);

  friend bool operator==(const OperatorMatrix&, const OperatorMatrix&) = default;

private:
  std::size_t dim_ = 0;
  std::vector<cplx> data_;
};

class StateVector {
public:
  StateVector() = default;
  explicit StateVector(std::size_t dim) : amps_(dim) {}
  explicit StateVector(std::vector<cplx> amps) : amps_(std::move(amps)) {}

  /// Product basis state from a bitstring such as "0000" (site 1 first).
  static StateVector basis(const SpinSystem& sys, std::string_view bits);
  static StateVector basis_index(std::size_t dim, std::size_t index);

  std::size_t dim() const noexcept { return amps_.size(); }
  cplx& operator[](std::size_t i) { return amps_[i]; }
  const cplx& operator[](std::size_t i) const { return amps_[i]; }
  std::span<cplx> data() noexcept { return amps_; }
  std::span<const cplx> data() const noexcept { return amps_; }

  double norm() const;
  StateVector normalized() const;
  bool is_finite() const;

  StateVector& operator+=(const StateVector& rhs);
  StateVector& operator*=(cplx s);

private:
  std::vector<cplx> amps_;
};

/// Density matrix; construction validates Hermiticity, unit trace and
/// positivity at the given tolerances.
struct DensityTolerances {
  double hermiticity = 1e-10;
  double trace = 1e-10;
  double min_eigenvalue = -1e-8;
};

class DensityMatrix {
public:
  explicit DensityMatrix(OperatorMatrix rho, DensityTolerances tol = {});
  static DensityMatrix pure(const StateVector& psi);

  const OperatorMatrix& matrix() const noexcept { return rho_; }
  std::size_t dim() const noexcept { return rho_.dim(); }

private:
  OperatorMatrix rho_;
};

enum class Axis { X, Y, Z };

OperatorMatrix pauli(Axis axis);
OperatorMatrix raising_local();   // sigma^+ = |0><1|
OperatorMatrix lowering_local();  // sigma^- = |1><0|

/// Embeds a 2x2 `local` at site `site` (1-based).
OperatorMatrix site_operator(const SpinSystem& sys, int site, const OperatorMatrix& local);

/// local_a at site_a times local_b at site_b (distinct sites), built directly
/// as one Kronecker fold.
OperatorMatrix two_site_operator(const SpinSystem& sys, int site_a, const OperatorMatrix& local_a,
                                 int site_b, const OperatorMatrix& local_b);

struct SpinOps {
  OperatorMatrix x, y, z, plus, minus;
};

/// S^a = sigma^a / 2 and S^{+-} = S^x +- i S^y at site `site` (1-based).
SpinOps spin_ops(const SpinSystem& sys, int site);

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b);

struct PauliFactor {
  int site;  // 1-based
  Axis axis;
};

/// acc += coeff * sigma^{a_1}_{s_1} sigma^{a_2}_{s_2} ..., written straight
/// into the matrix in O(dim) work. Factors act on the ket right to left.
void add_pauli_string(OperatorMatrix& acc, const SpinSystem& sys, std::initializer_list<PauliFactor> factors,
                      cplx coeff);

OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b);
OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b);
OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix operator*(cplx s, OperatorMatrix a);
StateVector operator*(const OperatorMatrix& a, const StateVector& v);
StateVector operator+(StateVector a, const StateVector& b);
StateVector operator*(cplx s, StateVector v);

OperatorMatrix multiply(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix add(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix scale(const OperatorMatrix& a, cplx s);
OperatorMatrix dagger(const OperatorMatrix& a);
OperatorMatrix transpose(const OperatorMatrix& a);
OperatorMatrix conjugate_entrywise(const OperatorMatrix& a);
OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b);
OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b);
double frobenius_norm(const OperatorMatrix& a);
double max_abs(const OperatorMatrix& a);
/// exp(D) for diagonal D; rejects off-diagonal entries.
OperatorMatrix matrix_exponential_diagonal(const OperatorMatrix& d);

/// ||A - A^dagger||_F / ||A||_F (0 for the zero matrix).
double hermiticity_residual(const OperatorMatrix& a);

/// <a|b> with the bra conjugated.
cplx inner(const StateVector& a, const StateVector& b);
/// <a|M|b>.
cplx sandwich(const StateVector& a, const OperatorMatrix& m, const StateVector& b);

}  // namespace ptrg
