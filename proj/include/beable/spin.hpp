#pragma once

#include <array>
#include <cmath>
#include <string>

#include "beable/spectral.hpp"

namespace beable {

/// Standard spin-1 component matrices in the S_z = +1, 0, -1 basis.
inline std::array<HermitianOp, 3> spin1_matrices() {
  const double r = 1.0 / std::sqrt(2.0);
  ComplexMatrix x(3, 3), y(3, 3), z(3, 3);
  x << 0, r, 0, r, 0, r, 0, r, 0;
  y << 0, -kI * r, 0, kI * r, 0, -kI * r, 0, kI * r, 0;
  z << 1, 0, 0, 0, 0, 0, 0, 0, -1;
  return {HermitianOp(x), HermitianOp(y), HermitianOp(z)};
}

/// Worst violation of [Sx,Sy] = i Sz and its cyclic versions.
inline double spin_relation_residual(const HermitianOp& sx, const HermitianOp& sy, const HermitianOp& sz) {
  require_same_dim(sx, sy, "spin_relation_residual");
  require_same_dim(sx, sz, "spin_relation_residual");
  auto comm = [](const HermitianOp& a, const HermitianOp& b) {
    return ComplexMatrix(a.matrix() * b.matrix() - b.matrix() * a.matrix());
  };
  double worst = (comm(sx, sy) - kI * sz.matrix()).norm();
  worst = std::max(worst, (comm(sy, sz) - kI * sx.matrix()).norm());
  worst = std::max(worst, (comm(sz, sx) - kI * sy.matrix()).norm());
  return worst;
}

/// Unit vector spanning the kernel of a spin component, phase-fixed so its
/// first nonzero entry is real and positive.
inline ComplexVector zero_eigenvector(const HermitianOp& s) {
  const SpectralDecomposition sd = decompose(s);
  const double gap = tol().cluster * std::max(1.0, op_norm(s));
  for (const EigenCluster& c : clusters(sd)) {
    if (std::abs(c.value) > gap) continue;
    if (c.columns.size() != 1) throw ValidationError("zero_eigenvector: kernel is not one-dimensional");
    return sd.eigenvectors.col(c.columns.front());
  }
  throw ValidationError("zero_eigenvector: operator has no zero eigenvalue");
}

/// Two spin-1 singlet, -3^{-1/2} (|x0 x0> - |y0 y0> + |z0 z0>), with |n0>
/// the S_n = 0 eigenvectors. Validates the spin commutation relations.
inline ComplexVector spin1_singlet(const HermitianOp& sx, const HermitianOp& sy, const HermitianOp& sz) {
  const double r = spin_relation_residual(sx, sy, sz);
  if (r > 1e-12) {
    throw ValidationError("spin1_singlet: operators violate [Sx,Sy] = i Sz (residual " + std::to_string(r) + ")");
  }
  if (sx.dim() != 3) throw DimensionMismatch("spin1_singlet", 3, sx.dim());
  const ComplexVector x = zero_eigenvector(sx), y = zero_eigenvector(sy), z = zero_eigenvector(sz);
  const ComplexVector psi = -(kron(x, x) - kron(y, y) + kron(z, z)) / std::sqrt(3.0);
  return psi;
}

} // namespace beable
