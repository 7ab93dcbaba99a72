#include "ptrg/qops.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ptrg/error.hpp"
#include "ptrg/kernels.hpp"
#include "ptrg/linalg.hpp"

namespace ptrg {

namespace {

void require_same_dim(std::size_t a, std::size_t b, const char* op) {
  if (a != b)
    fail(ErrorCode::DimensionMismatch,
         std::string(op) + ": dimension mismatch (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
}

std::size_t site_mask(const SpinSystem& sys, int site) {
  if (site < 1 || site > sys.sites())
    fail(ErrorCode::IndexOutOfRange,
         "site index " + std::to_string(site) + " outside [1, " + std::to_string(sys.sites()) + "]");
  return std::size_t{1} << (sys.sites() - site);
}

void require_local(const OperatorMatrix& local) {
  if (local.dim() != 2) fail(ErrorCode::DimensionMismatch, "local operator must be 2x2");
}

}  // namespace

SpinSystem::SpinSystem(int site_count) : sites_(site_count) {
  if (site_count < 1 || site_count > kMaxSites)
    fail(ErrorCode::Validation,
         "site count must be in [1, " + std::to_string(kMaxSites) + "], got " + std::to_string(site_count));
}

// ---- OperatorMatrix ---------------------------------------------------------

OperatorMatrix::OperatorMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}

OperatorMatrix::OperatorMatrix(std::size_t dim, std::vector<cplx> entries)
    : dim_(dim), data_(std::move(entries)) {
  if (data_.size() != dim_ * dim_) fail(ErrorCode::DimensionMismatch, "entry count does not match dim^2");
}

OperatorMatrix::OperatorMatrix(std::initializer_list<std::initializer_list<cplx>> rows)
    : dim_(rows.size()) {
  data_.reserve(dim_ * dim_);
  for (const auto& row : rows) {
    if (row.size() != dim_) fail(ErrorCode::DimensionMismatch, "matrix literal is not square");
    data_.insert(data_.end(), row.begin(), row.end());
  }
}

OperatorMatrix OperatorMatrix::identity(std::size_t dim) {
  OperatorMatrix m(dim);
  for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
  return m;
}

OperatorMatrix OperatorMatrix::diagonal(std::span<const cplx> values) {
  OperatorMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

OperatorMatrix OperatorMatrix::diagonal(std::span<const double> values) {
  OperatorMatrix m(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

bool OperatorMatrix::is_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

bool OperatorMatrix::is_diagonal(double tol) const {
  for (std::size_t r = 0; r < dim_; ++r)
    for (std::size_t c = 0; c < dim_; ++c)
      if (r != c && std::abs((*this)(r, c)) > tol) return false;
  return true;
}

cplx OperatorMatrix::trace() const {
  cplx t{};
  for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
  return t;
}

OperatorMatrix& OperatorMatrix::operator+=(const OperatorMatrix& rhs) {
  require_same_dim(dim_, rhs.dim_, "add");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  return *this;
}

OperatorMatrix& OperatorMatrix::operator-=(const OperatorMatrix& rhs) {
  require_same_dim(dim_, rhs.dim_, "subtract");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  return *this;
}

OperatorMatrix& OperatorMatrix::operator*=(cplx s) {
  for (auto& z : data_) z *= s;
  return *this;
}

// ---- StateVector ------------------------------------------------------------

StateVector StateVector::basis(const SpinSystem& sys, std::string_view bits) {
  if (bits.size() != static_cast<std::size_t>(sys.sites()))
    fail(ErrorCode::Validation, "bitstring length " + std::to_string(bits.size()) + " does not match site count " +
                                    std::to_string(sys.sites()));
  std::size_t index = 0;
  for (char ch : bits) {
    if (ch != '0' && ch != '1') fail(ErrorCode::Validation, "bitstring may contain only '0' and '1'");
    index = (index << 1) | static_cast<std::size_t>(ch == '1');
  }
  return basis_index(sys.dim(), index);
}

StateVector StateVector::basis_index(std::size_t dim, std::size_t index) {
  if (index >= dim) fail(ErrorCode::IndexOutOfRange, "basis index out of range");
  StateVector v(dim);
  v[index] = 1.0;
  return v;
}

double StateVector::norm() const {
  double s = 0.0;
  for (const auto& z : amps_) s += std::norm(z);
  return std::sqrt(s);
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) fail(ErrorCode::VanishingNorm, "cannot normalize the zero vector");
  StateVector out = *this;
  out *= 1.0 / n;
  return out;
}

bool StateVector::is_finite() const {
  return std::all_of(amps_.begin(), amps_.end(),
                     [](const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

StateVector& StateVector::operator+=(const StateVector& rhs) {
  require_same_dim(dim(), rhs.dim(), "vector add");
  for (std::size_t i = 0; i < amps_.size(); ++i) amps_[i] += rhs.amps_[i];
  return *this;
}

StateVector& StateVector::operator*=(cplx s) {
  for (auto& z : amps_) z *= s;
  return *this;
}

// ---- DensityMatrix ----------------------------------------------------------

DensityMatrix::DensityMatrix(OperatorMatrix rho, DensityTolerances tol) : rho_(std::move(rho)) {
  if (!rho_.is_finite()) fail(ErrorCode::Validation, "density matrix has non-finite entries");
  double herm = 0.0;
  for (std::size_t r = 0; r < rho_.dim(); ++r)
    for (std::size_t c = 0; c < rho_.dim(); ++c)
      herm = std::max(herm, std::abs(rho_(r, c) - std::conj(rho_(c, r))));
  if (herm > tol.hermiticity) fail(ErrorCode::Validation, "density matrix is not Hermitian");
  if (std::abs(rho_.trace() - 1.0) > tol.trace) fail(ErrorCode::Validation, "density matrix trace differs from 1");
  if (min_hermitian_eigenvalue(rho_) < tol.min_eigenvalue)
    fail(ErrorCode::PositivityLost, "density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const StateVector v = psi.normalized();
  OperatorMatrix m(v.dim());
  for (std::size_t r = 0; r < v.dim(); ++r)
    for (std::size_t c = 0; c < v.dim(); ++c) m(r, c) = v[r] * std::conj(v[c]);
  return DensityMatrix(std::move(m));
}

// ---- Spin operators ---------------------------------------------------------

OperatorMatrix pauli(Axis axis) {
  const cplx i{0.0, 1.0};
  switch (axis) {
    case Axis::X: return OperatorMatrix{{0.0, 1.0}, {1.0, 0.0}};
    case Axis::Y: return OperatorMatrix{{0.0, -i}, {i, 0.0}};
    case Axis::Z: return OperatorMatrix{{1.0, 0.0}, {0.0, -1.0}};
  }
  return {};
}

OperatorMatrix raising_local() { return OperatorMatrix{{0.0, 1.0}, {0.0, 0.0}}; }
OperatorMatrix lowering_local() { return OperatorMatrix{{0.0, 0.0}, {1.0, 0.0}}; }

OperatorMatrix site_operator(const SpinSystem& sys, int site, const OperatorMatrix& local) {
  require_local(local);
  const std::size_t mask = site_mask(sys, site);
  const std::size_t dim = sys.dim();
  OperatorMatrix out(dim);
  // Identity on every other factor: r and c agree off the site bit.
  for (std::size_t r = 0; r < dim; ++r) {
    const std::size_t rb = (r & mask) ? 1 : 0;
    const std::size_t rest = r & ~mask;
    for (std::size_t cb = 0; cb < 2; ++cb) {
      const cplx v = local(rb, cb);
      if (v != cplx{}) out(r, rest | (cb ? mask : 0)) = v;
    }
  }
  return out;
}

OperatorMatrix two_site_operator(const SpinSystem& sys, int site_a, const OperatorMatrix& local_a,
                                 int site_b, const OperatorMatrix& local_b) {
  require_local(local_a);
  require_local(local_b);
  const std::size_t ma = site_mask(sys, site_a);
  const std::size_t mb = site_mask(sys, site_b);
  if (ma == mb) fail(ErrorCode::Validation, "two_site_operator requires distinct sites");
  const std::size_t dim = sys.dim();
  OperatorMatrix out(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    const std::size_t ra = (r & ma) ? 1 : 0;
    const std::size_t rb = (r & mb) ? 1 : 0;
    const std::size_t rest = r & ~(ma | mb);
    for (std::size_t ca = 0; ca < 2; ++ca) {
      const cplx va = local_a(ra, ca);
      if (va == cplx{}) continue;
      for (std::size_t cb = 0; cb < 2; ++cb) {
        const cplx vb = local_b(rb, cb);
        if (vb == cplx{}) continue;
        out(r, rest | (ca ? ma : 0) | (cb ? mb : 0)) = va * vb;
      }
    }
  }
  return out;
}

SpinOps spin_ops(const SpinSystem& sys, int site) {
  SpinOps ops;
  ops.x = site_operator(sys, site, 0.5 * pauli(Axis::X));
  ops.y = site_operator(sys, site, 0.5 * pauli(Axis::Y));
  ops.z = site_operator(sys, site, 0.5 * pauli(Axis::Z));
  ops.plus = site_operator(sys, site, raising_local());
  ops.minus = site_operator(sys, site, lowering_local());
  return ops;
}

void add_pauli_string(OperatorMatrix& acc, const SpinSystem& sys, std::initializer_list<PauliFactor> factors,
                      cplx coeff) {
  require_same_dim(acc.dim(), sys.dim(), "add_pauli_string");
  std::vector<std::pair<std::size_t, Axis>> ops;
  for (const auto& f : factors) ops.emplace_back(site_mask(sys, f.site), f.axis);
  const cplx i_unit{0.0, 1.0};
  for (std::size_t c = 0; c < sys.dim(); ++c) {
    std::size_t r = c;
    cplx phase = coeff;
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
      const auto [mask, axis] = *it;
      const bool down = (r & mask) != 0;
      switch (axis) {
        case Axis::X: r ^= mask; break;
        case Axis::Y:
          phase *= down ? -i_unit : i_unit;
          r ^= mask;
          break;
        case Axis::Z:
          if (down) phase = -phase;
          break;
      }
    }
    acc(r, c) += phase;
  }
}

OperatorMatrix kron(const OperatorMatrix& a, const OperatorMatrix& b) {
  const std::size_t na = a.dim(), nb = b.dim();
  OperatorMatrix out(na * nb);
  for (std::size_t ar = 0; ar < na; ++ar)
    for (std::size_t ac = 0; ac < na; ++ac) {
      const cplx v = a(ar, ac);
      if (v == cplx{}) continue;
      for (std::size_t br = 0; br < nb; ++br)
        for (std::size_t bc = 0; bc < nb; ++bc) out(ar * nb + br, ac * nb + bc) = v * b(br, bc);
    }
  return out;
}

// ---- Algebra ----------------------------------------------------------------

OperatorMatrix multiply(const OperatorMatrix& a, const OperatorMatrix& b) {
  require_same_dim(a.dim(), b.dim(), "multiply");
  OperatorMatrix out(a.dim());
  kernels::multiply(a.data(), b.data(), out.data(), a.dim());
  return out;
}

OperatorMatrix add(const OperatorMatrix& a, const OperatorMatrix& b) { return a + b; }
OperatorMatrix scale(const OperatorMatrix& a, cplx s) { return s * a; }

OperatorMatrix operator+(OperatorMatrix a, const OperatorMatrix& b) { return a += b; }
OperatorMatrix operator-(OperatorMatrix a, const OperatorMatrix& b) { return a -= b; }
OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) { return multiply(a, b); }
OperatorMatrix operator*(cplx s, OperatorMatrix a) { return a *= s; }

StateVector operator*(const OperatorMatrix& a, const StateVector& v) {
  require_same_dim(a.dim(), v.dim(), "matvec");
  StateVector out(v.dim());
  kernels::matvec(a.data(), v.data(), out.data(), a.dim());
  return out;
}

StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
StateVector operator*(cplx s, StateVector v) { return v *= s; }

OperatorMatrix dagger(const OperatorMatrix& a) {
  OperatorMatrix out(a.dim());
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) out(c, r) = std::conj(a(r, c));
  return out;
}

OperatorMatrix transpose(const OperatorMatrix& a) {
  OperatorMatrix out(a.dim());
  for (std::size_t r = 0; r < a.dim(); ++r)
    for (std::size_t c = 0; c < a.dim(); ++c) out(c, r) = a(r, c);
  return out;
}

OperatorMatrix conjugate_entrywise(const OperatorMatrix& a) {
  OperatorMatrix out = a;
  for (auto& z : out.data()) z = std::conj(z);
  return out;
}

OperatorMatrix commutator(const OperatorMatrix& a, const OperatorMatrix& b) { return a * b - b * a; }
OperatorMatrix anticommutator(const OperatorMatrix& a, const OperatorMatrix& b) { return a * b + b * a; }

double frobenius_norm(const OperatorMatrix& a) {
  double s = 0.0;
  for (const auto& z : a.data()) s += std::norm(z);
  return std::sqrt(s);
}

double max_abs(const OperatorMatrix& a) {
  double m = 0.0;
  for (const auto& z : a.data()) m = std::max(m, std::abs(z));
  return m;
}

OperatorMatrix matrix_exponential_diagonal(const OperatorMatrix& d) {
  if (!d.is_diagonal()) fail(ErrorCode::Validation, "matrix_exponential_diagonal requires a diagonal matrix");
  OperatorMatrix out(d.dim());
  for (std::size_t i = 0; i < d.dim(); ++i) out(i, i) = std::exp(d(i, i));
  return out;
}

double hermiticity_residual(const OperatorMatrix& a) {
  const double n = frobenius_norm(a);
  if (n == 0.0) return 0.0;
  return frobenius_norm(a - dagger(a)) / n;
}

cplx inner(const StateVector& a, const StateVector& b) {
  require_same_dim(a.dim(), b.dim(), "inner");
  cplx s{};
  for (std::size_t i = 0; i < a.dim(); ++i) s += std::conj(a[i]) * b[i];
  return s;
}

cplx sandwich(const StateVector& a, const OperatorMatrix& m, const StateVector& b) { return inner(a, m * b); }

}  // namespace ptrg
