#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <utility>

#include <Eigen/Dense>

#include "beable/error.hpp"
#include "beable/tolerances.hpp"

namespace beable {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

/// Number of real coordinates of an n x n Hermitian matrix.
inline Index real_dim(Index n) { return n * n; }

/// Real coordinates of a Hermitian matrix in which the trace inner product
/// tr(AB) becomes the Euclidean dot product: the n diagonal entries, then
/// sqrt(2)*Re and sqrt(2)*Im of each strictly upper entry, row by row.
inline RealVector hermitian_coords(const ComplexMatrix& m) {
  const Index n = m.rows();
  RealVector c(real_dim(n));
  for (Index i = 0; i < n; ++i) c(i) = m(i, i).real();
  Index k = n;
  const double r2 = std::sqrt(2.0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      c(k++) = r2 * m(i, j).real();
      c(k++) = r2 * m(i, j).imag();
    }
  }
  return c;
}

inline ComplexMatrix matrix_from_coords(Index n, const RealVector& c) {
  if (c.size() != real_dim(n)) {
    throw DimensionMismatch("matrix_from_coords", c.size(), real_dim(n));
  }
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) m(i, i) = c(i);
  Index k = n;
  const double s = 1.0 / std::sqrt(2.0);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      const Complex z{s * c(k), s * c(k + 1)};
      m(i, j) = z;
      m(j, i) = std::conj(z);
      k += 2;
    }
  }
  return m;
}

/// A self-adjoint n x n complex matrix. Construction checks Hermiticity
/// against the global tolerance and stores the symmetrized matrix.
class HermitianOp {
public:
  explicit HermitianOp(const ComplexMatrix& m) {
    if (m.rows() == 0 || m.rows() != m.cols()) {
      throw ValidationError("HermitianOp: matrix must be square and non-empty, got " +
                            std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
    }
    if (!m.allFinite()) throw ValidationError("HermitianOp: non-finite entries");
    const double defect = (m - m.adjoint()).norm();
    const double scale = std::max(1.0, m.norm());
    if (defect > tol().herm * scale) {
      throw ValidationError("HermitianOp: matrix is not Hermitian (|M - M^dagger|_F = " +
                            std::to_string(defect) + ")");
    }
    mat_ = 0.5 * (m + m.adjoint());
  }

  static HermitianOp identity(Index n) { return trusted(ComplexMatrix::Identity(n, n)); }
  static HermitianOp zero(Index n) { return trusted(ComplexMatrix::Zero(n, n)); }

  static HermitianOp from_coords(Index n, const RealVector& c) {
    return trusted(matrix_from_coords(n, c));
  }

  static HermitianOp diagonal(const RealVector& d) {
    return trusted(d.cast<Complex>().asDiagonal());
  }

  /// Orthogonal projector onto the line through v.
  static HermitianOp projector(const ComplexVector& v) {
    const double nv = v.squaredNorm();
    if (nv == 0.0) throw ValidationError("HermitianOp::projector: zero vector");
    return trusted(v * v.adjoint() / nv);
  }

  /// Skips validation. For matrices that are Hermitian by construction.
  static HermitianOp trusted(ComplexMatrix m) {
    HermitianOp h;
    h.mat_ = std::move(m);
    return h;
  }

  Index dim() const { return mat_.rows(); }
  const ComplexMatrix& matrix() const { return mat_; }
  RealVector coords() const { return hermitian_coords(mat_); }
  double frobenius() const { return mat_.norm(); }
  double trace() const { return mat_.trace().real(); }

  HermitianOp operator+(const HermitianOp& o) const {
    check_same(o, "operator+");
    return trusted(mat_ + o.mat_);
  }
  HermitianOp operator-(const HermitianOp& o) const {
    check_same(o, "operator-");
    return trusted(mat_ - o.mat_);
  }
  HermitianOp operator-() const { return trusted(-mat_); }
  HermitianOp operator*(double r) const { return trusted(r * mat_); }
  friend HermitianOp operator*(double r, const HermitianOp& a) { return a * r; }

private:
  HermitianOp() = default;

  void check_same(const HermitianOp& o, std::string_view what) const {
    if (o.dim() != dim()) throw DimensionMismatch(what, dim(), o.dim());
  }

  ComplexMatrix mat_;
};

inline void require_same_dim(const HermitianOp& a, const HermitianOp& b, std::string_view what) {
  if (a.dim() != b.dim()) throw DimensionMismatch(what, a.dim(), b.dim());
}

/// Trace inner product tr(AB), real for Hermitian arguments.
inline double trace_inner(const HermitianOp& a, const HermitianOp& b) {
  require_same_dim(a, b, "trace_inner");
  return a.matrix().cwiseProduct(b.matrix().conjugate()).sum().real();
}

inline double frobenius_distance(const HermitianOp& a, const HermitianOp& b) {
  require_same_dim(a, b, "frobenius_distance");
  return (a.matrix() - b.matrix()).norm();
}

/// Symmetric (Jordan) product (AB + BA)/2.
inline HermitianOp jordan(const HermitianOp& a, const HermitianOp& b) {
  require_same_dim(a, b, "jordan");
  const ComplexMatrix ab = a.matrix() * b.matrix();
  return HermitianOp::trusted(0.5 * (ab + ab.adjoint()));
}

/// Antisymmetric (Lie) product (i/2)(AB - BA).
inline HermitianOp lie(const HermitianOp& a, const HermitianOp& b) {
  require_same_dim(a, b, "lie");
  const ComplexMatrix ab = a.matrix() * b.matrix();
#ifdef BEABLE_MUTATE_LIE_SIGN
  // Mutation-testing build only: deliberately wrong sign.
  return HermitianOp::trusted(-0.5 * kI * (ab - ab.adjoint()));
#else
  return HermitianOp::trusted(0.5 * kI * (ab - ab.adjoint()));
#endif
}

/// Real and imaginary parts of the (generally non-Hermitian) product AB,
/// so that AB = Re + i Im.
inline std::pair<HermitianOp, HermitianOp> re_im_product(const HermitianOp& a,
                                                         const HermitianOp& b) {
  return {jordan(a, b), -lie(a, b)};
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline HermitianOp kron(const HermitianOp& a, const HermitianOp& b) {
  return HermitianOp::trusted(kron(a.matrix(), b.matrix()));
}

} // namespace beable
