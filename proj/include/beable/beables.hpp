#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "beable/random.hpp"
#include "beable/segalgebra.hpp"
#include "beable/spectral.hpp"
#include "beable/states.hpp"

namespace beable {

/// Outcome of a beable-status decision for an algebra and a state.
struct BeableVerdict {
  bool has_status = false;
  IdealSubspace ideal;                              ///< state ideal of the restricted state
  double quasicommutativity_residual = 0.0;         ///< worst Lie product residual against the ideal
  std::optional<HermitianOp> witness;               ///< Lie product outside the ideal (negative verdicts)
  double witness_dispersion = 0.0;                  ///< omega(W^2) for the witness
  std::optional<MixtureDecomposition> decomposition;  ///< positive verdicts
};

/// Decides whether omega restricted to B is a mixture of dispersion-free
/// states on B: exactly when every Lie product of B falls in the state
/// ideal of omega on B. Positive verdicts carry the mixture, built from the
/// characters of the commutative quotient B/I and weighted by omega on the
/// minimal idempotents.
inline BeableVerdict has_beable_status(const Segalgebra& b, const AlgState& w) {
  IdealSubspace ideal = state_ideal(w, b);
  const double residual = quasicommutativity_residual(b, ideal.space());
  BeableVerdict v{residual <= tol().sub, ideal, residual, std::nullopt, 0.0, std::nullopt};

  if (!v.has_status) {
    const auto& basis = b.basis();
    double best = -1.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (std::size_t j = i + 1; j < basis.size(); ++j) {
        HermitianOp l = lie(basis[i], basis[j]);
        const double disp = evaluate(w, jordan(l, l));
        if (disp > best) {
          best = disp;
          v.witness = std::move(l);
        }
      }
    }
    v.witness_dispersion = best;
    return v;
  }

  const QuotientAlgebra q = quotient(b, ideal);
  MixtureDecomposition mix;
  std::vector<std::pair<double, DispersionFreeState>> parts;
  double kept = 0.0;
  for (QuotientCharacter& qc : quotient_characters(q)) {
    const double weight = evaluate(w, qc.idempotent);
    if (weight < -tol().df) {
      throw NumericalError("has_beable_status: negative mixture weight " + std::to_string(weight));
    }
    if (weight < tol().weight_floor) {
      mix.dropped_mass += std::max(weight, 0.0);
      continue;
    }
    kept += weight;
    parts.emplace_back(weight, std::move(qc.state));
  }
  for (auto& [weight, state] : parts) mix.components.push_back({weight / kept, std::move(state)});
  for (const HermitianOp& x : b.basis()) {
    mix.reconstruction_error = std::max(mix.reconstruction_error, std::abs(mix.value(x) - evaluate(w, x)));
  }
  if (mix.reconstruction_error > tol().df) {
    throw NumericalError("has_beable_status: mixture misses the state by " +
                         std::to_string(mix.reconstruction_error));
  }
  v.decomposition = std::move(mix);
  return v;
}

/// Intersection of the definite sets of a family of states. Requires the
/// intersection of their state ideals to lie in the state ideal of omega;
/// the result then has beable status for omega.
inline Segalgebra intersect_definite_sets(const std::vector<AlgState>& states, const AlgState& w,
                                          const Segalgebra& s) {
  if (states.empty()) throw PreconditionError("intersect_definite_sets: empty family of states");
  OperatorSpace ideals = state_ideal(states.front(), s).space();
  OperatorSpace definite = definite_set(states.front(), s).space();
  for (std::size_t k = 1; k < states.size(); ++k) {
    ideals = intersect(ideals, state_ideal(states[k], s).space());
    definite = intersect(definite, definite_set(states[k], s).space());
  }
  const IdealSubspace target = state_ideal(w, s);
  const double outside = target.space().containment_residual(ideals);
  if (outside > tol().sub) {
    throw PreconditionError(
        "intersect_definite_sets: intersection of the family's state ideals is not contained in the "
        "state ideal of omega (residual " + std::to_string(outside) + ")");
  }
  Segalgebra out = detail::computed_algebra(std::move(definite), "intersect_definite_sets");
  if (!has_beable_status(out, w).has_status) {
    throw NumericalError("intersect_definite_sets: result lacks beable status");
  }
  return out;
}

/// Orthonormal vectors |v_x> together with a target |v> in their span that
/// overlaps every member.
class EigenFamily {
public:
  EigenFamily(std::vector<ComplexVector> vectors, ComplexVector target)
      : vectors_(std::move(vectors)), target_(std::move(target)) {
    const double ft = tol().fam;
    if (vectors_.empty()) throw ValidationError("EigenFamily: empty family");
    const Index n = target_.size();
    if (std::abs(target_.norm() - 1.0) > ft) throw ValidationError("EigenFamily: target is not a unit vector");
    target_.normalize();
    for (const ComplexVector& x : vectors_) {
      if (x.size() != n) throw DimensionMismatch("EigenFamily", n, x.size());
      if (std::abs(x.norm() - 1.0) > ft) throw ValidationError("EigenFamily: member is not a unit vector");
    }
    for (ComplexVector& x : vectors_) x.normalize();
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
      for (std::size_t j = i + 1; j < vectors_.size(); ++j) {
        if (std::abs(vectors_[i].dot(vectors_[j])) > ft) {
          throw ValidationError("EigenFamily: members are not mutually orthogonal");
        }
      }
    }
    if (span_residual() > ft) throw ValidationError("EigenFamily: target is not in the span of the family");
    if (min_overlap() <= ft) throw ValidationError("EigenFamily: target is orthogonal to a member");
  }

  const std::vector<ComplexVector>& vectors() const { return vectors_; }
  const ComplexVector& target() const { return target_; }
  Index dim() const { return target_.size(); }
  std::size_t size() const { return vectors_.size(); }

  /// Distance of the target from its projection onto the family's span.
  double span_residual() const {
    ComplexVector p = ComplexVector::Zero(dim());
    for (const ComplexVector& x : vectors_) p += x * x.dot(target_);
    return (target_ - p).norm();
  }

  double min_overlap() const {
    double m = std::numeric_limits<double>::infinity();
    for (const ComplexVector& x : vectors_) m = std::min(m, std::abs(x.dot(target_)));
    return m;
  }

private:
  std::vector<ComplexVector> vectors_;
  ComplexVector target_;
};

/// All Hermitian matrices having every vector of `vectors` as an eigenvector.
inline Segalgebra eigenvector_algebra(Index n, const std::vector<ComplexVector>& vectors) {
  const OperatorSpace all = OperatorSpace::full(n);
  RealMatrix m(2 * n * static_cast<Index>(vectors.size()), real_dim(n));
  for (Index k = 0; k < real_dim(n); ++k) {
    const ComplexMatrix e = all.element(k).matrix();
    RealVector col(m.rows());
    Index off = 0;
    for (const ComplexVector& x : vectors) {
      const ComplexVector ex = e * x;
      const ComplexVector perp = ex - x * x.dot(ex);
      col.segment(off, 2 * n) = detail::realify(perp);
      off += 2 * n;
    }
    m.col(k) = col;
  }
  const RealMatrix kernel = null_space(m, tol().accept);
  return detail::computed_algebra(OperatorSpace::from_orthonormal(n, kernel), "eigenvector_algebra");
}

/// The algebra B of Hermitian operators having each family member as an
/// eigenvector: a maximal beable subalgebra for the family's target.
inline Segalgebra family_algebra(const EigenFamily& fam) {
  return eigenvector_algebra(fam.dim(), fam.vectors());
}

/// Family and algebra built from a state vector and a preferred observable.
struct BubDefinite {
  EigenFamily family;
  Segalgebra algebra;
  std::vector<double> eigenvalues;    ///< preferred-observable eigenvalue of each kept member
  std::vector<double> probabilities;  ///< <v|R_i|v> of each kept member
  double discarded_mass = 0.0;        ///< total probability of eigenspaces below the floor
};

/// Projects |v> onto the eigenspaces of R that it populates above the
/// probability floor, renormalizes the projections, and returns the
/// algebra of operators sharing all of them as eigenvectors.
inline BubDefinite bub_definite(const ComplexVector& v, const HermitianOp& r) {
  if (v.size() != r.dim()) throw DimensionMismatch("bub_definite", v.size(), r.dim());
  if (std::abs(v.norm() - 1.0) > tol().fam) throw ValidationError("bub_definite: state vector is not a unit vector");
  const ComplexVector u = v.normalized();
  const SpectralDecomposition sd = decompose(r);
  std::vector<ComplexVector> members;
  std::vector<double> values, probs;
  double discarded = 0.0;
  for (const EigenCluster& c : clusters(sd)) {
    const ComplexMatrix q = cluster_basis(sd, c);
    const ComplexVector proj = q * (q.adjoint() * u);
    const double p = proj.squaredNorm();
    if (p <= tol().proj_floor) {
      discarded += p;
      continue;
    }
    members.push_back(proj / std::sqrt(p));
    values.push_back(c.value);
    probs.push_back(p);
  }
  EigenFamily fam(std::move(members), u);
  Segalgebra algebra = family_algebra(fam);
  return {std::move(fam), std::move(algebra), std::move(values), std::move(probs), discarded};
}

/// Randomized maximality certificate.
struct MaximalityCertificate {
  bool maximal = true;
  int trials_run = 0;
  std::optional<HermitianOp> extension;  ///< adjoined operator that kept beable status
  Index extended_dim = 0;                ///< dimension of the algebra it generated
};

namespace detail {

/// Hermitian A for which every Lie product A . b_k annihilates the support
/// of the state: the linear necessary condition for adjoining A to a
/// beable algebra without losing beable status.
inline OperatorSpace first_order_extensions(const Segalgebra& b, const AlgState& w) {
  const Index n = b.dim_h();
  const OperatorSpace all = OperatorSpace::full(n);
  const ComplexMatrix& supp = w.support();
  const Index block = 2 * n * supp.cols();
  RealMatrix m(block * b.dim(), real_dim(n));
  for (Index k = 0; k < real_dim(n); ++k) {
    const HermitianOp e = all.element(k);
    for (Index j = 0; j < b.dim(); ++j) m.col(k).segment(j * block, block) = realify(lie(e, b.basis(j)).matrix() * supp);
  }
  return OperatorSpace::from_orthonormal(n, null_space(m, tol().accept));
}

} // namespace detail

/// Adjoins random operators outside B and regenerates; B is reported
/// maximal when no trial keeps beable status. Even trials draw from the
/// operators passing the linear necessary condition for keeping beable
/// status (when that space exceeds B), odd trials from all Hermitian
/// operators. Trial t uses its own generator seeded from (seed, t).
inline MaximalityCertificate check_maximality(const Segalgebra& b, const AlgState& w, int trials,
                                              std::uint64_t seed) {
  if (!has_beable_status(b, w).has_status) {
    throw PreconditionError("check_maximality: algebra lacks beable status for the state");
  }
  const Index n = b.dim_h();
  const OperatorSpace outside_full = complement(OperatorSpace::full(n), b.space());
  MaximalityCertificate cert;
  if (outside_full.dim() == 0) return cert;
  const OperatorSpace candidates = complement(detail::first_order_extensions(b, w), b.space());

  for (int t = 0; t < trials; ++t) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(t));
    const OperatorSpace& pool = (t % 2 == 0 && candidates.dim() > 0) ? candidates : outside_full;
    const HermitianOp a = pool.combination(gaussian_vector(rng, pool.dim()));
    std::vector<HermitianOp> seeds = b.basis();
    seeds.push_back(a);
    const Segalgebra extended = generate(n, seeds);
    cert.trials_run = t + 1;
    if (has_beable_status(extended, w).has_status) {
      cert.maximal = false;
      cert.extension = a;
      cert.extended_dim = extended.dim();
      return cert;
    }
  }
  return cert;
}

/// Recovers the eigenvector family of a maximal beable algebra for |v>.
/// The common kernel S of all Lie products of B is invariant under B; the
/// family is the set of normalized projections of |v> onto the joint
/// eigenspaces of B restricted to S that |v> populates. Throws
/// PreconditionError when the family's algebra is strictly larger than B.
inline EigenFamily recover_family(const Segalgebra& b, const ComplexVector& v) {
  const Index n = b.dim_h();
  if (v.size() != n) throw DimensionMismatch("recover_family", n, v.size());
  const ComplexVector u = v.normalized();
  if (!has_beable_status(b, AlgState::from_vector(u)).has_status) {
    throw PreconditionError("recover_family: algebra lacks beable status for the vector state");
  }

  OperatorSpace lies(n);
  const auto& basis = b.basis();
  for (std::size_t i = 0; i < basis.size(); ++i)
    for (std::size_t j = i + 1; j < basis.size(); ++j) lies.try_add(lie(basis[i], basis[j]));
  ComplexMatrix stacked(n * lies.dim(), n);
  for (Index k = 0; k < lies.dim(); ++k) stacked.middleRows(k * n, n) = lies.element(k).matrix();
  const ComplexMatrix s = lies.dim() ? null_space(stacked, tol().accept) : ComplexMatrix::Identity(n, n);

  const ComplexMatrix outside = ComplexMatrix::Identity(n, n) - s * s.adjoint();
  if ((outside * u).norm() > tol().fam) {
    throw PreconditionError("recover_family: state vector is not annihilated by the Lie products");
  }
  std::vector<HermitianOp> restricted;
  for (const HermitianOp& x : basis) {
    const double leak = (outside * x.matrix() * s).norm();
    if (leak > tol().accept * std::max(1.0, x.frobenius())) {
      throw NumericalError("recover_family: common kernel of Lie products is not invariant (leak " +
                           std::to_string(leak) + ")");
    }
    const ComplexMatrix m = s.adjoint() * x.matrix() * s;
    restricted.push_back(HermitianOp::trusted(0.5 * (m + m.adjoint())));
  }

  std::vector<ComplexVector> members;
  for (const JointEigenspace& js : joint_eigenspaces(s.cols(), restricted)) {
    const ComplexMatrix q = s * js.basis;
    ComplexVector p = q * (q.adjoint() * u);
    const double norm = p.norm();
    if (norm <= tol().fam) continue;
    p /= norm;
    detail::canonicalize_phase(p);
    members.push_back(std::move(p));
  }
  EigenFamily fam(std::move(members), u);

  const Segalgebra rebuilt = family_algebra(fam);
  if (!rebuilt.space().contains(b.space())) {
    throw NumericalError("recover_family: recovered family does not reproduce the algebra");
  }
  if (rebuilt.dim() > b.dim()) {
    throw PreconditionError("recover_family: algebra is not maximal (family algebra has dimension " +
                            std::to_string(rebuilt.dim()) + " > " + std::to_string(b.dim()) + ")");
  }
  return fam;
}

/// Result of checking beable status across a full set of states.
struct ForcedCommutativity {
  bool all_beable = true;
  bool commutative = false;
  bool faithful_shortcut = false;            ///< a faithful state was present
  std::optional<std::size_t> failing_state;  ///< index of the first state without beable status
  std::optional<HermitianOp> witness;
};

/// States separate `parent` when only A = 0 has omega(A) = 0 for all of them.
inline bool is_full_set(const std::vector<AlgState>& states, const Segalgebra& parent) {
  if (states.empty()) return false;
  RealMatrix f(static_cast<Index>(states.size()), parent.dim());
  for (std::size_t i = 0; i < states.size(); ++i)
    for (Index j = 0; j < parent.dim(); ++j) f(static_cast<Index>(i), j) = evaluate(states[i], parent.basis(j));
  return null_space(f, tol().accept).cols() == 0;
}

/// Checks beable status of B for every state. A full set of states (or
/// any faithful state, whose state ideal is zero) forces B to be
/// commutative whenever all verdicts are positive.
inline ForcedCommutativity forced_commutativity(const Segalgebra& b, const std::vector<AlgState>& states,
                                                const Segalgebra& parent) {
  ForcedCommutativity out;
  for (const AlgState& w : states) {
    if (w.dim() != b.dim_h()) throw DimensionMismatch("forced_commutativity", b.dim_h(), w.dim());
  }
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (states[i].is_faithful()) {
      out.faithful_shortcut = true;
      order.push_back(i);
    }
  }
  if (!out.faithful_shortcut && !is_full_set(states, parent)) {
    throw PreconditionError("forced_commutativity: states do not form a full set");
  }
  for (std::size_t i = 0; i < states.size(); ++i)
    if (!states[i].is_faithful()) order.push_back(i);

  for (std::size_t i : order) {
    BeableVerdict v = has_beable_status(b, states[i]);
    if (!v.has_status) {
      out.all_beable = false;
      out.failing_state = i;
      out.witness = std::move(v.witness);
      break;
    }
  }
  out.commutative = is_commutative(b);
  if (out.all_beable && !out.commutative) {
    throw NumericalError("forced_commutativity: noncommutative algebra has beable status for a full set");
  }
  return out;
}

inline ForcedCommutativity forced_commutativity(const Segalgebra& b, const std::vector<AlgState>& states) {
  return forced_commutativity(b, states, Segalgebra::full(b.dim_h()));
}

} // namespace beable
