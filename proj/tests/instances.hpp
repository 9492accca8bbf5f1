#pragma once

// Random instances and brute-force oracles shared by the unit tests and the
// acceptance binary.

#include <Eigen/Eigenvalues>

#include "beable/beable.hpp"

namespace beable::testing {

inline HermitianOp sigma_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return HermitianOp(m);
}

inline HermitianOp sigma_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return HermitianOp(m);
}

inline HermitianOp sigma_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return HermitianOp(m);
}

inline HermitianOp basis_projector(Index n, Index k) {
  ComplexVector e = ComplexVector::Zero(n);
  e(k) = 1.0;
  return HermitianOp::projector(e);
}

inline ComplexVector basis_vector(Index n, Index k) {
  ComplexVector e = ComplexVector::Zero(n);
  e(k) = 1.0;
  return e;
}

inline double dist(const HermitianOp& a, const HermitianOp& b) { return frobenius_distance(a, b); }

/// Block-diagonal algebra in a random basis: full Hermitian blocks of the
/// given sizes.
inline Segalgebra block_algebra(Rng& rng, const std::vector<Index>& sizes, std::vector<HermitianOp>* units = nullptr) {
  Index n = 0;
  for (Index s : sizes) n += s;
  const ComplexMatrix u = random_unitary(rng, n);
  std::vector<HermitianOp> gens;
  Index off = 0;
  for (Index s : sizes) {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    m.block(off, off, s, s) = random_hermitian(rng, s).matrix();
    gens.push_back(HermitianOp::trusted(u * m * u.adjoint()));
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e.block(off, off, s, s).setIdentity();
    gens.push_back(HermitianOp::trusted(u * e * u.adjoint()));
    if (units) units->push_back(gens.back());
    if (s > 1) {
      m.block(off, off, s, s) = random_hermitian(rng, s).matrix();
      gens.push_back(HermitianOp::trusted(u * m * u.adjoint()));
    }
    off += s;
  }
  return generate(n, gens);
}


/// Commutative algebra spanned by a random partition of a random
/// orthonormal basis into `parts` spectral projectors.
inline Segalgebra random_commutative(Rng& rng, Index n, Index parts) {
  const ComplexMatrix u = random_unitary(rng, n);
  std::vector<Index> label(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) label[static_cast<std::size_t>(k)] = k < parts ? k : uniform_index(rng, 0, parts - 1);
  std::vector<HermitianOp> projectors;
  for (Index p = 0; p < parts; ++p) {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (Index k = 0; k < n; ++k)
      if (label[static_cast<std::size_t>(k)] == p) m += u.col(k) * u.col(k).adjoint();
    projectors.push_back(HermitianOp::trusted(0.5 * (m + m.adjoint())));
  }
  return generate(n, projectors);
}

/// Random element of an algebra.
inline HermitianOp random_element(Rng& rng, const Segalgebra& s) {
  return s.space().combination(gaussian_vector(rng, s.dim()));
}

/// Null space of the quadratic form x -> omega((sum x_k b_k)^2) - shift,
/// from an eigendecomposition of its Gram matrix. Independent of the
/// support-projector kernel used by the library.
inline OperatorSpace quadratic_kernel(const AlgState& w, const Segalgebra& s, bool centered) {
  const auto& b = s.basis();
  const Index d = s.dim();
  RealMatrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      const auto& bi = b[static_cast<std::size_t>(i)];
      const auto& bj = b[static_cast<std::size_t>(j)];
      g(i, j) = evaluate(w, jordan(bi, bj));
      if (centered) g(i, j) -= evaluate(w, bi) * evaluate(w, bj);
    }
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(g);
  OperatorSpace out(s.dim_h());
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  for (Index k = 0; k < d; ++k)
    if (es.eigenvalues()(k) < 1e-9 * scale) out.try_add(s.space().combination(es.eigenvectors().col(k)));
  return out;
}

/// Brute-force beable decision: state ideal from the quadratic form
/// omega(A^2), then every Lie product of the basis tested against it.
inline bool oracle_beable(const AlgState& w, const Segalgebra& b) {
  const OperatorSpace ideal = quadratic_kernel(w, b, false);
  const auto& basis = b.basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    for (std::size_t j = i + 1; j < basis.size(); ++j) {
      const HermitianOp l = lie(basis[i], basis[j]);
      if (ideal.residual(l) > 1e-7 * std::max(1.0, l.frobenius())) return false;
    }
  }
  return true;
}

/// Orthonormal family of `size` vectors in C^n and a target in their span
/// with random nonzero overlaps.
inline EigenFamily random_family(Rng& rng, Index n, Index size) {
  const ComplexMatrix u = random_unitary(rng, n);
  std::vector<ComplexVector> vs;
  ComplexVector target = ComplexVector::Zero(n);
  std::uniform_real_distribution<double> amp(0.3, 1.0), phase(0.0, 6.283185307179586);
  for (Index k = 0; k < size; ++k) {
    vs.push_back(u.col(k));
    target += u.col(k) * std::polar(amp(rng), phase(rng));
  }
  return EigenFamily(std::move(vs), target.normalized());
}

/// Random (algebra, state) pair of mixed provenance: commutative algebras,
/// definite sets, block algebras, family algebras, with states that are
/// sometimes adapted to the algebra and sometimes generic.
struct BeableInstance {
  Segalgebra algebra;
  AlgState state;
};

inline BeableInstance random_beable_instance(Rng& rng, Index n) {
  auto generic = [&] { return AlgState::from_density(random_density(rng, n, uniform_index(rng, 1, n))); };
  switch (uniform_index(rng, 0, 5)) {
  case 0:
    return {random_commutative(rng, n, uniform_index(rng, 1, n)), generic()};
  case 1: {
    const AlgState w = generic();
    return {definite_set(w, Segalgebra::full(n)), w};
  }
  case 2: {
    // definite set of one state, probed by a state supported inside it
    const Index r = uniform_index(rng, 1, n);
    const ComplexMatrix u = random_unitary(rng, n);
    const ComplexMatrix g = u.leftCols(r) * random_complex_matrix(rng, r, r);
    ComplexMatrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    const AlgState outer = AlgState::from_density(0.5 * (rho + rho.adjoint()));
    const Segalgebra d = definite_set(outer, Segalgebra::full(n));
    const ComplexVector v = u.leftCols(r) * random_vector(rng, r);
    return {d, uniform_index(rng, 0, 1) ? AlgState::from_vector(v) : generic()};
  }
  case 3: {
    std::vector<Index> sizes;
    Index m = 0;
    while (m < n) {
      const Index s = uniform_index(rng, 1, n - m);
      sizes.push_back(s);
      m += s;
    }
    return {block_algebra(rng, sizes), generic()};
  }
  case 4: {
    const EigenFamily fam = random_family(rng, n, uniform_index(rng, 1, n));
    const Segalgebra b = family_algebra(fam);
    return {b, uniform_index(rng, 0, 2) ? AlgState::from_vector(fam.target()) : generic()};
  }
  default:
    return {Segalgebra::full(n), uniform_index(rng, 0, 1) ? AlgState::from_vector(random_vector(rng, n)) : generic()};
  }
}

} // namespace beable::testing
