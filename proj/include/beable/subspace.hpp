#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SVD>

#include "beable/hermitian.hpp"

namespace beable {

/// Outcome of a projection-residual membership test.
struct Membership {
  bool member = false;
  double residual = 0.0;
  explicit operator bool() const { return member; }
};

/// Orthonormal basis (columns) of the null space of a real matrix: the
/// right singular vectors whose singular value is at most `threshold`.
inline RealMatrix null_space(const RealMatrix& m, double threshold) {
  const Index cols = m.cols();
  if (cols == 0) return RealMatrix(0, 0);
  if (m.rows() == 0) return RealMatrix::Identity(cols, cols);
  Eigen::JacobiSVD<RealMatrix> svd(m, Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  std::vector<Index> keep;
  for (Index k = 0; k < cols; ++k) {
    if (k >= s.size() || s(k) <= threshold) keep.push_back(k);
  }
  RealMatrix out(cols, static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Index>(k)) = svd.matrixV().col(keep[k]);
  return out;
}

inline ComplexMatrix null_space(const ComplexMatrix& m, double threshold) {
  const Index cols = m.cols();
  if (cols == 0) return ComplexMatrix(0, 0);
  if (m.rows() == 0) return ComplexMatrix::Identity(cols, cols);
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  std::vector<Index> keep;
  for (Index k = 0; k < cols; ++k) {
    if (k >= s.size() || s(k) <= threshold) keep.push_back(k);
  }
  ComplexMatrix out(cols, static_cast<Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) out.col(static_cast<Index>(k)) = svd.matrixV().col(keep[k]);
  return out;
}

/// A real linear subspace of the n x n Hermitian matrices, held as an
/// orthonormal basis under the trace inner product (in the coordinates of
/// hermitian_coords, stored column-wise).
class OperatorSpace {
public:
  explicit OperatorSpace(Index dim_h) : n_(dim_h), q_(real_dim(dim_h), 0) {}

  /// Caller guarantees orthonormal columns.
  static OperatorSpace from_orthonormal(Index dim_h, RealMatrix q) {
    if (q.rows() != real_dim(dim_h)) throw DimensionMismatch("OperatorSpace", q.rows(), real_dim(dim_h));
    OperatorSpace s(dim_h);
    s.q_ = std::move(q);
    return s;
  }

  /// Span of `ops`, built by Gram-Schmidt with the acceptance threshold.
  static OperatorSpace span(Index dim_h, const std::vector<HermitianOp>& ops) {
    OperatorSpace s(dim_h);
    for (const HermitianOp& op : ops) s.try_add(op);
    return s;
  }

  static OperatorSpace full(Index dim_h) {
    return from_orthonormal(dim_h, RealMatrix::Identity(real_dim(dim_h), real_dim(dim_h)));
  }

  Index dim_h() const { return n_; }
  Index dim() const { return q_.cols(); }
  const RealMatrix& coords() const { return q_; }

  HermitianOp element(Index k) const { return HermitianOp::from_coords(n_, q_.col(k)); }

  std::vector<HermitianOp> basis() const {
    std::vector<HermitianOp> out;
    out.reserve(static_cast<std::size_t>(dim()));
    for (Index k = 0; k < dim(); ++k) out.push_back(element(k));
    return out;
  }

  /// Element sum_k c_k b_k.
  HermitianOp combination(const RealVector& c) const {
    return HermitianOp::from_coords(n_, q_ * c);
  }

  /// Expansion coefficients of the orthogonal projection of `a`.
  RealVector components(const HermitianOp& a) const {
    check(a);
    return q_.transpose() * a.coords();
  }

  HermitianOp project(const HermitianOp& a) const { return combination(components(a)); }

  double residual(const HermitianOp& a) const {
    check(a);
    const RealVector x = a.coords();
    return (x - q_ * (q_.transpose() * x)).norm();
  }

  Membership member(const HermitianOp& a) const {
    const double r = residual(a);
    return {r <= tol().sub * std::max(1.0, a.frobenius()), r};
  }

  /// Adds the component of `a` orthogonal to the span when it exceeds the
  /// acceptance threshold. Two Gram-Schmidt passes.
  bool try_add(const HermitianOp& a) {
    check(a);
    const RealVector x = a.coords();
    const double scale = std::max(1.0, x.norm());
    RealVector r = x - q_ * (q_.transpose() * x);
    r -= q_ * (q_.transpose() * r);
    const double nr = r.norm();
    if (nr <= tol().accept * scale) return false;
    q_.conservativeResize(Eigen::NoChange, q_.cols() + 1);
    q_.col(q_.cols() - 1) = r / nr;
    return true;
  }

  /// Worst membership residual of the other space's basis in this one.
  double containment_residual(const OperatorSpace& other) const {
    if (other.n_ != n_) throw DimensionMismatch("OperatorSpace", n_, other.n_);
    if (other.dim() == 0) return 0.0;
    const RealMatrix r = other.q_ - q_ * (q_.transpose() * other.q_);
    return r.colwise().norm().maxCoeff();
  }

  bool contains(const OperatorSpace& other) const {
    return containment_residual(other) <= tol().sub;
  }

  bool span_equal(const OperatorSpace& other) const {
    return dim() == other.dim() && contains(other) && other.contains(*this);
  }

  /// Largest principal-angle residual between two spaces of equal dimension;
  /// infinity when the dimensions differ.
  double span_distance(const OperatorSpace& other) const {
    if (dim() != other.dim()) return std::numeric_limits<double>::infinity();
    return std::max(containment_residual(other), other.containment_residual(*this));
  }

private:
  void check(const HermitianOp& a) const {
    if (a.dim() != n_) throw DimensionMismatch("OperatorSpace", n_, a.dim());
  }

  Index n_;
  RealMatrix q_;
};

/// Intersection of two subspaces of the same operator space.
inline OperatorSpace intersect(const OperatorSpace& a, const OperatorSpace& b) {
  if (a.dim_h() != b.dim_h()) throw DimensionMismatch("intersect", a.dim_h(), b.dim_h());
  const RealMatrix& qa = a.coords();
  const RealMatrix& qb = b.coords();
  const RealMatrix outside = qa - qb * (qb.transpose() * qa);
  const RealMatrix n = null_space(outside, tol().accept);
  return OperatorSpace::from_orthonormal(a.dim_h(), qa * n);
}

/// Orthogonal complement of `sub` inside `parent`.
inline OperatorSpace complement(const OperatorSpace& parent, const OperatorSpace& sub) {
  if (parent.dim_h() != sub.dim_h()) throw DimensionMismatch("complement", parent.dim_h(), sub.dim_h());
  const RealMatrix overlap = sub.coords().transpose() * parent.coords();
  const RealMatrix n = null_space(overlap, tol().accept);
  return OperatorSpace::from_orthonormal(parent.dim_h(), parent.coords() * n);
}

/// Vector sum of two subspaces.
inline OperatorSpace sum(const OperatorSpace& a, const OperatorSpace& b) {
  OperatorSpace out = a;
  for (const HermitianOp& x : b.basis()) out.try_add(x);
  return out;
}

} // namespace beable
