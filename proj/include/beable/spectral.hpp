#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "beable/hermitian.hpp"

namespace beable {

/// Eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as the columns of a unitary matrix.
struct SpectralDecomposition {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

/// A group of numerically degenerate eigenvalues.
struct EigenCluster {
  double value = 0.0;           ///< mean of the member eigenvalues
  std::vector<Index> columns;   ///< eigenvector columns spanning the eigenspace
};

namespace detail {

/// Cyclic Jacobi sweeps on a Hermitian matrix. On return `a` is diagonal
/// (up to roundoff) and `v` holds the accumulated unitary rotations.
inline void jacobi_hermitian(ComplexMatrix& a, ComplexMatrix& v, int max_sweeps = 100) {
  const Index n = a.rows();
  v = ComplexMatrix::Identity(n, n);
  const double eps = std::numeric_limits<double>::epsilon();

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Index p = 0; p < n; ++p)
      for (Index q = p + 1; q < n; ++q) off += std::norm(a(p, q));
    const double total = a.squaredNorm();
    if (off == 0.0 || off <= eps * eps * total) return;

    const double negligible = eps * eps * std::sqrt(total);
    for (Index p = 0; p < n; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const Complex apq = a(p, q);
        const double mag = std::abs(apq);
        if (mag <= negligible) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        const Complex phase = apq / mag;
        const double app = a(p, p).real();
        const double aqq = a(q, q).real();
        const double theta = (aqq - app) / (2.0 * mag);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        }
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;

        // G = D R with D = diag(1, conj(phase)) making a(p,q) real.
        const Complex gpp = c;
        const Complex gpq = s;
        const Complex gqp = -s * std::conj(phase);
        const Complex gqq = c * std::conj(phase);

        const ComplexVector colp = a.col(p);
        const ComplexVector colq = a.col(q);
        a.col(p) = colp * gpp + colq * gqp;
        a.col(q) = colp * gpq + colq * gqq;
        const Eigen::RowVectorXcd rowp = a.row(p);
        const Eigen::RowVectorXcd rowq = a.row(q);
        a.row(p) = std::conj(gpp) * rowp + std::conj(gqp) * rowq;
        a.row(q) = std::conj(gpq) * rowp + std::conj(gqq) * rowq;
        a(p, q) = a(q, p) = 0.0;
        a(p, p) = a(p, p).real();
        a(q, q) = a(q, q).real();

        const ComplexVector vp = v.col(p);
        const ComplexVector vq = v.col(q);
        v.col(p) = vp * gpp + vq * gqp;
        v.col(q) = vp * gpq + vq * gqq;
      }
    }
  }
  throw NumericalError("decompose: Jacobi iteration did not converge in " +
                       std::to_string(max_sweeps) + " sweeps");
}

/// Multiplies v by a unit phase so its first component of magnitude above
/// the cutoff is real and positive.
inline void canonicalize_phase(Eigen::Ref<ComplexVector> v, double cutoff = 1e-10) {
  for (Index i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > cutoff) {
      v *= std::conj(v(i)) / m;
      v(i) = m;
      return;
    }
  }
}

/// Lexicographic order on (Re, Im) pairs, larger entries first.
inline bool lex_greater(const ComplexVector& x, const ComplexVector& y) {
  for (Index i = 0; i < x.size(); ++i) {
    if (x(i).real() != y(i).real()) return x(i).real() > y(i).real();
    if (x(i).imag() != y(i).imag()) return x(i).imag() > y(i).imag();
  }
  return false;
}

inline std::vector<std::pair<Index, Index>> cluster_ranges(const RealVector& sorted, double gap) {
  std::vector<std::pair<Index, Index>> ranges;
  Index start = 0;
  for (Index i = 1; i <= sorted.size(); ++i) {
    if (i == sorted.size() || sorted(i) - sorted(i - 1) >= gap) {
      ranges.emplace_back(start, i);
      start = i;
    }
  }
  return ranges;
}

inline double cluster_gap(const RealVector& eigenvalues) {
  const double norm = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  return norm == 0.0 ? std::numeric_limits<double>::infinity() : tol().cluster * norm;
}

} // namespace detail

/// Spectral decomposition by cyclic Jacobi rotations. Eigenvalues come
/// out ascending; inside a degenerate cluster eigenvectors are ordered
/// lexicographically after each is given a canonical phase.
inline SpectralDecomposition decompose(const HermitianOp& op) {
  ComplexMatrix a = op.matrix();
  ComplexMatrix v;
  detail::jacobi_hermitian(a, v);
  const Index n = a.rows();

  RealVector raw = a.diagonal().real();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index i, Index j) { return raw(i) < raw(j); });

  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Index k = 0; k < n; ++k) {
    out.eigenvalues(k) = raw(order[static_cast<std::size_t>(k)]);
    out.eigenvectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
    detail::canonicalize_phase(out.eigenvectors.col(k));
  }

  for (auto [lo, hi] : detail::cluster_ranges(out.eigenvalues, detail::cluster_gap(out.eigenvalues))) {
    if (hi - lo < 2) continue;
    std::vector<Index> idx(static_cast<std::size_t>(hi - lo));
    std::iota(idx.begin(), idx.end(), lo);
    std::stable_sort(idx.begin(), idx.end(), [&](Index i, Index j) {
      return detail::lex_greater(out.eigenvectors.col(i), out.eigenvectors.col(j));
    });
    const ComplexMatrix block = out.eigenvectors.middleCols(lo, hi - lo);
    const RealVector vals = out.eigenvalues.segment(lo, hi - lo);
    for (Index k = 0; k < hi - lo; ++k) {
      out.eigenvectors.col(lo + k) = block.col(idx[static_cast<std::size_t>(k)] - lo);
      out.eigenvalues(lo + k) = vals(idx[static_cast<std::size_t>(k)] - lo);
    }
  }

  const double scale = op.frobenius();
  const ComplexMatrix& u = out.eigenvectors;
  const double recon =
      (u * out.eigenvalues.cast<Complex>().asDiagonal() * u.adjoint() - op.matrix()).norm();
  const double unitary = (u.adjoint() * u - ComplexMatrix::Identity(n, n)).norm();
  if (recon > tol().eig * std::max(scale, 1e-300) && recon > 0.0) {
    throw NumericalError("decompose: reconstruction error " + std::to_string(recon));
  }
  if (unitary > tol().eig) {
    throw NumericalError("decompose: eigenvectors not orthonormal (" + std::to_string(unitary) + ")");
  }
  return out;
}

/// Groups consecutive eigenvalues separated by less than `gap`.
inline std::vector<EigenCluster> clusters(const SpectralDecomposition& sd, double gap) {
  std::vector<EigenCluster> out;
  for (auto [lo, hi] : detail::cluster_ranges(sd.eigenvalues, gap)) {
    EigenCluster c;
    c.value = sd.eigenvalues.segment(lo, hi - lo).mean();
    for (Index k = lo; k < hi; ++k) c.columns.push_back(k);
    out.push_back(std::move(c));
  }
  return out;
}

/// Groups eigenvalues whose consecutive gap is below tol().cluster * op norm.
inline std::vector<EigenCluster> clusters(const SpectralDecomposition& sd) {
  return clusters(sd, detail::cluster_gap(sd.eigenvalues));
}

/// Orthonormal basis (as columns) of one cluster's eigenspace.
inline ComplexMatrix cluster_basis(const SpectralDecomposition& sd, const EigenCluster& c) {
  ComplexMatrix q(sd.eigenvectors.rows(), static_cast<Index>(c.columns.size()));
  for (std::size_t k = 0; k < c.columns.size(); ++k) q.col(static_cast<Index>(k)) = sd.eigenvectors.col(c.columns[k]);
  return q;
}

inline HermitianOp cluster_projector(const SpectralDecomposition& sd, const EigenCluster& c) {
  const ComplexMatrix q = cluster_basis(sd, c);
  return HermitianOp::trusted(q * q.adjoint());
}

/// Operator norm: the largest eigenvalue magnitude.
inline double op_norm(const HermitianOp& a) {
  return decompose(a).eigenvalues.cwiseAbs().maxCoeff();
}

/// Functional calculus U f(Lambda) U^dagger. f is evaluated once per
/// eigenvalue cluster; a cluster within the degeneracy threshold of zero
/// is evaluated at exactly zero.
inline HermitianOp op_function(const HermitianOp& a, const std::function<double(double)>& f) {
  const SpectralDecomposition sd = decompose(a);
  const double gap = detail::cluster_gap(sd.eigenvalues);
  ComplexMatrix out = ComplexMatrix::Zero(a.dim(), a.dim());
  for (const EigenCluster& c : clusters(sd)) {
    const double x = std::abs(c.value) < gap ? 0.0 : c.value;
    double fx;
    try {
      fx = f(x);
    } catch (const std::exception& e) {
      throw ValidationError("op_function: function undefined at eigenvalue " + std::to_string(x) +
                            " (" + e.what() + ")");
    }
    if (!std::isfinite(fx)) {
      throw ValidationError("op_function: function undefined at eigenvalue " + std::to_string(x));
    }
    const ComplexMatrix q = cluster_basis(sd, c);
    out += fx * q * q.adjoint();
  }
  return HermitianOp::trusted(0.5 * (out + out.adjoint()));
}

} // namespace beable
