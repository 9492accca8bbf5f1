#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/QR>

#include "beable/hermitian.hpp"

namespace beable {

using Rng = std::mt19937_64;

/// Independent stream `stream` derived from `seed`.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

inline RealVector gaussian_vector(Rng& rng, Index n) {
  std::normal_distribution<double> g;
  RealVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

inline ComplexVector random_vector(Rng& rng, Index n) {
  std::normal_distribution<double> g;
  ComplexVector v(n);
  for (Index i = 0; i < n; ++i) {
    const double re = g(rng);
    v(i) = Complex(re, g(rng));
  }
  return v;
}

inline ComplexVector random_unit_vector(Rng& rng, Index n) { return random_vector(rng, n).normalized(); }

inline ComplexMatrix random_complex_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> g;
  ComplexMatrix m(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) {
      const double re = g(rng);
      m(i, j) = Complex(re, g(rng));
    }
  }
  return m;
}

/// Hermitian matrix with independent Gaussian entries.
inline HermitianOp random_hermitian(Rng& rng, Index n) {
  const ComplexMatrix g = random_complex_matrix(rng, n, n);
  return HermitianOp::trusted(0.5 * (g + g.adjoint()));
}

/// Haar-distributed unitary via QR with phase-corrected R diagonal.
inline ComplexMatrix random_unitary(Rng& rng, Index n) {
  const Eigen::HouseholderQR<ComplexMatrix> qr(random_complex_matrix(rng, n, n));
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < n; ++i) {
    const double m = std::abs(r(i, i));
    if (m > 0.0) q.col(i) *= r(i, i) / m;
  }
  return q;
}

/// Density matrix G G^dagger / tr of rank `rank`.
inline ComplexMatrix random_density(Rng& rng, Index n, Index rank) {
  const ComplexMatrix g = random_complex_matrix(rng, n, rank);
  ComplexMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline Index uniform_index(Rng& rng, Index lo, Index hi) {
  std::uniform_int_distribution<Index> d(lo, hi);
  return d(rng);
}

} // namespace beable
