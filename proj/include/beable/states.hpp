#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "beable/joint_diag.hpp"
#include "beable/segalgebra.hpp"
#include "beable/spectral.hpp"

namespace beable {

/// A state given by a density matrix, omega(A) = tr(rho A).
class AlgState {
public:
  /// Vector state |v><v| / <v|v>. Rejects vectors of norm below 1e-12.
  static AlgState from_vector(const ComplexVector& v) {
    if (v.size() == 0) throw ValidationError("AlgState: empty state vector");
    if (!v.allFinite()) throw ValidationError("AlgState: non-finite state vector");
    const double norm = v.norm();
    if (norm < 1e-12) throw ValidationError("AlgState: state vector is numerically zero");
    const ComplexVector u = v / norm;
    AlgState s(u * u.adjoint());
    s.vector_ = u;
    return s;
  }

  static AlgState from_density(const ComplexMatrix& rho) {
    const HermitianOp h(rho);
    return AlgState(h.matrix());
  }

  static AlgState maximally_mixed(Index n) {
    return AlgState(ComplexMatrix::Identity(n, n) / static_cast<double>(n));
  }

  Index dim() const { return rho_.rows(); }
  const ComplexMatrix& rho() const { return rho_; }
  HermitianOp density() const { return HermitianOp::trusted(rho_); }

  /// Unit state vector when the state was built from one.
  const std::optional<ComplexVector>& vector() const { return vector_; }

  const RealVector& eigenvalues() const { return eigenvalues_; }

  /// Orthonormal basis of the range of rho (eigenvalues above tol().psd).
  const ComplexMatrix& support() const { return support_; }
  Index rank() const { return support_.cols(); }
  bool is_faithful() const { return rank() == dim(); }

private:
  explicit AlgState(ComplexMatrix rho) : rho_(std::move(rho)) {
    const HermitianOp h = HermitianOp::trusted(rho_);
    const SpectralDecomposition sd = decompose(h);
    eigenvalues_ = sd.eigenvalues;
    if (eigenvalues_.minCoeff() < -tol().psd) {
      throw ValidationError("AlgState: density matrix is not positive (min eigenvalue " +
                            std::to_string(eigenvalues_.minCoeff()) + ")");
    }
    const double tr = rho_.trace().real();
    if (std::abs(tr - 1.0) > tol().psd) {
      throw ValidationError("AlgState: density matrix trace is " + std::to_string(tr) + ", expected 1");
    }
    std::vector<Index> keep;
    for (Index k = 0; k < eigenvalues_.size(); ++k)
      if (eigenvalues_(k) > tol().psd) keep.push_back(k);
    support_.resize(rho_.rows(), static_cast<Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) support_.col(static_cast<Index>(k)) = sd.eigenvectors.col(keep[k]);
  }

  ComplexMatrix rho_;
  RealVector eigenvalues_;
  ComplexMatrix support_;
  std::optional<ComplexVector> vector_;
};

/// omega(A) = tr(rho A).
inline double evaluate(const AlgState& w, const HermitianOp& a) {
  if (w.dim() != a.dim()) throw DimensionMismatch("evaluate", w.dim(), a.dim());
  const Complex z = w.rho().cwiseProduct(a.matrix().transpose()).sum();
  if (std::abs(z.imag()) > 1e-12 * std::max(1.0, a.frobenius())) {
    throw NumericalError("evaluate: expectation value has imaginary part " + std::to_string(z.imag()));
  }
  return z.real();
}

/// A real-valued homomorphism on a Segalgebra, stored as its values on the
/// algebra basis.
class DispersionFreeState {
public:
  /// Validates val(I) = 1, val(b_i o b_j) = val(b_i) val(b_j) and
  /// val(b_i . b_j) = 0 on the basis; throws ValidationError otherwise.
  DispersionFreeState(Segalgebra algebra, RealVector values)
      : algebra_(std::move(algebra)), values_(std::move(values)) {
    if (values_.size() != algebra_.dim()) {
      throw DimensionMismatch("DispersionFreeState", values_.size(), algebra_.dim());
    }
    const double r = homomorphism_residual(algebra_);
    if (r > tol().df) {
      throw ValidationError("DispersionFreeState: not a homomorphism (residual " + std::to_string(r) + ")");
    }
  }

  const Segalgebra& algebra() const { return algebra_; }
  const RealVector& values() const { return values_; }

  double operator()(const HermitianOp& a) const {
    const Membership m = member(algebra_, a);
    if (!m) {
      throw PreconditionError("DispersionFreeState: operator is outside the algebra (residual " +
                              std::to_string(m.residual) + ")");
    }
    return value_unchecked(a);
  }

  /// Worst violation of val(I) = 1 and multiplicativity on the basis of
  /// `on`, which must be contained in the state's algebra.
  double homomorphism_residual(const Segalgebra& on) const {
    if (!algebra_.space().contains(on.space())) {
      throw PreconditionError("DispersionFreeState: algebra is not contained in the state's domain");
    }
    double worst = std::abs(value_unchecked(HermitianOp::identity(on.dim_h())) - 1.0);
    const auto& b = on.basis();
    std::vector<double> v(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) v[i] = value_unchecked(b[i]);
    for (std::size_t i = 0; i < b.size(); ++i) {
      for (std::size_t j = i; j < b.size(); ++j) {
        worst = std::max(worst, std::abs(value_unchecked(jordan(b[i], b[j])) - v[i] * v[j]));
        if (i != j) worst = std::max(worst, std::abs(value_unchecked(lie(b[i], b[j]))));
      }
    }
    return worst;
  }

private:
  double value_unchecked(const HermitianOp& a) const { return algebra_.space().components(a).dot(values_); }

  Segalgebra algebra_;
  RealVector values_;
};

/// Finite mixture of dispersion-free states.
struct MixtureDecomposition {
  struct Component {
    double weight;
    DispersionFreeState state;
  };
  std::vector<Component> components;
  double dropped_mass = 0.0;           ///< weight removed by the floor before renormalizing
  double reconstruction_error = 0.0;   ///< max over the basis of |sum w_k val_k(b) - omega(b)|

  double value(const HermitianOp& a) const {
    double s = 0.0;
    for (const auto& c : components) s += c.weight * c.state(a);
    return s;
  }
};

namespace detail {

/// Real coordinates of a complex n x m matrix: real parts then imaginary.
inline RealVector realify(const ComplexMatrix& m) {
  RealVector out(2 * m.size());
  Index k = 0;
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out(k++) = m(i, j).real();
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) out(k++) = m(i, j).imag();
  return out;
}

inline void require_state_dim(const AlgState& w, const Segalgebra& s, std::string_view what) {
  if (w.dim() != s.dim_h()) throw DimensionMismatch(what, w.dim(), s.dim_h());
}

/// Kernel, in algebra coordinates, of A -> (A - shift(A) I) P where P is
/// the support projector of the state.
template <typename Shift>
OperatorSpace support_kernel(const AlgState& w, const Segalgebra& s, Shift shift) {
  const ComplexMatrix& supp = w.support();
  const Index n = s.dim_h();
  RealMatrix m(2 * n * supp.cols(), s.dim());
  for (Index k = 0; k < s.dim(); ++k) {
    const HermitianOp& b = s.basis(k);
    const ComplexMatrix shifted = b.matrix() - shift(b) * ComplexMatrix::Identity(n, n);
    m.col(k) = realify(shifted * supp);
  }
  const RealMatrix kernel = null_space(m, tol().accept);
  return OperatorSpace::from_orthonormal(n, s.space().coords() * kernel);
}

} // namespace detail

/// The state ideal {A in B : omega(A^2) = 0}, computed as the kernel of
/// A -> A P with P the support projector of rho. It is a two-sided ideal of
/// B whenever B is quasicommutative relative to it, not in general.
inline IdealSubspace state_ideal(const AlgState& w, const Segalgebra& b) {
  detail::require_state_dim(w, b, "state_ideal");
  if (w.is_faithful()) return IdealSubspace::zero(b);
  OperatorSpace kernel = detail::support_kernel(w, b, [](const HermitianOp&) { return 0.0; });
  return IdealSubspace::state_kernel(b, std::move(kernel), "state_ideal");
}

/// The definite set {A in S : A - omega(A) I in I_omega}, the largest
/// subalgebra on which omega is dispersion-free.
inline Segalgebra definite_set(const AlgState& w, const Segalgebra& s) {
  detail::require_state_dim(w, s, "definite_set");
  OperatorSpace kernel = detail::support_kernel(w, s, [&](const HermitianOp& b) { return evaluate(w, b); });
  return detail::computed_algebra(std::move(kernel), "definite_set");
}

inline bool is_dispersion_free(const AlgState& w, const Segalgebra& b) {
  return definite_set(w, b).dim() == b.dim();
}

inline bool is_dispersion_free(const DispersionFreeState& chi, const Segalgebra& b) {
  return chi.homomorphism_residual(b) <= tol().df;
}

namespace detail {

struct CharacterBlock {
  RealVector values;     ///< on the algebra basis
  ComplexMatrix support; ///< joint eigenvectors carrying this character
};

inline std::vector<CharacterBlock> character_blocks(const Segalgebra& c) {
  if (!is_commutative(c)) {
    throw PreconditionError("characters: algebra is not commutative (residual " +
                            std::to_string(commutativity_residual(c)) + ")");
  }
  std::vector<CharacterBlock> out;
  for (JointEigenspace& js : joint_eigenspaces(c.dim_h(), c.basis())) {
    auto same = std::find_if(out.begin(), out.end(), [&](const CharacterBlock& cb) {
      return (cb.values - js.values).cwiseAbs().maxCoeff() <= tol().df;
    });
    if (same != out.end()) {
      ComplexMatrix merged(c.dim_h(), same->support.cols() + js.basis.cols());
      merged << same->support, js.basis;
      same->support = std::move(merged);
    } else {
      out.push_back({js.values, std::move(js.basis)});
    }
  }
  std::sort(out.begin(), out.end(), [](const CharacterBlock& x, const CharacterBlock& y) {
    return std::lexicographical_compare(x.values.begin(), x.values.end(), y.values.begin(), y.values.end());
  });
  return out;
}

} // namespace detail

/// All characters of a commutative Segalgebra, one per joint eigenspace of
/// its basis, ordered lexicographically by their value vectors.
inline std::vector<DispersionFreeState> characters(const Segalgebra& c) {
  std::vector<DispersionFreeState> out;
  for (auto& cb : detail::character_blocks(c)) out.emplace_back(c, std::move(cb.values));
  return out;
}

/// Restriction of omega to a commutative algebra as a mixture of its
/// characters; weight of a character = tr(rho P) for the projector P onto
/// its joint eigenspace.
inline MixtureDecomposition decompose_state(const AlgState& w, const Segalgebra& c) {
  detail::require_state_dim(w, c, "decompose_state");
  MixtureDecomposition mix;
  double kept = 0.0;
  std::vector<std::pair<double, RealVector>> parts;
  for (auto& cb : detail::character_blocks(c)) {
    const double weight = (cb.support.adjoint() * w.rho() * cb.support).trace().real();
    if (weight < tol().weight_floor) {
      mix.dropped_mass += std::max(weight, 0.0);
      continue;
    }
    kept += weight;
    parts.emplace_back(weight, std::move(cb.values));
  }
  for (auto& [weight, values] : parts) mix.components.push_back({weight / kept, DispersionFreeState(c, std::move(values))});

  for (const HermitianOp& b : c.basis()) {
    mix.reconstruction_error = std::max(mix.reconstruction_error, std::abs(mix.value(b) - evaluate(w, b)));
  }
  if (mix.reconstruction_error > tol().df) {
    throw NumericalError("decompose_state: mixture misses the state by " + std::to_string(mix.reconstruction_error));
  }
  return mix;
}

/// A character of a commutative quotient S/I, pulled back to S.
struct QuotientCharacter {
  DispersionFreeState state;  ///< on the parent algebra, vanishing on the ideal
  HermitianOp idempotent;     ///< representative of the minimal idempotent carrying it
};

/// Characters of a commutative quotient found by simultaneously
/// diagonalizing its multiplication operators y -> hat(r_k o y).
inline std::vector<QuotientCharacter> quotient_characters(const QuotientAlgebra& q) {
  if (!q.is_commutative()) {
    throw PreconditionError("quotient_characters: quotient is not commutative (residual " +
                            std::to_string(q.commutativity_residual()) + ")");
  }
  const Index m = q.dim();
  const auto reps = q.representatives().basis();
  std::vector<HermitianOp> mult;
  mult.reserve(reps.size());
  for (const HermitianOp& r : reps) mult.push_back(HermitianOp::trusted(q.multiplication_operator(r).cast<Complex>()));

  const RealVector unit = q.hat_coords(HermitianOp::identity(q.parent().dim_h()));
  const Segalgebra& parent = q.parent();
  RealMatrix parent_hat(m, parent.dim());
  for (Index i = 0; i < parent.dim(); ++i) parent_hat.col(i) = q.hat_coords(parent.basis(i));

  std::vector<QuotientCharacter> out;
  for (const JointEigenspace& js : joint_eigenspaces(m, mult)) {
    const RealVector idem = (js.basis * (js.basis.adjoint() * unit.cast<Complex>())).real();
    RealVector values = parent_hat.transpose() * js.values;
    out.push_back({DispersionFreeState(parent, std::move(values)), q.representatives().combination(idem)});
  }
  return out;
}

} // namespace beable
