#pragma once

#include <memory>
#include <string>
#include <vector>

#include "beable/hermitian.hpp"
#include "beable/subspace.hpp"

namespace beable {

/// Worst residual of all pairwise Jordan and Lie products of the basis of
/// `space` against `space` itself.
inline double closure_residual(const OperatorSpace& space) {
  const std::vector<HermitianOp> b = space.basis();
  double worst = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i; j < b.size(); ++j) {
      worst = std::max(worst, space.residual(jordan(b[i], b[j])));
      if (i != j) worst = std::max(worst, space.residual(lie(b[i], b[j])));
    }
  }
  return worst;
}

/// A finite-dimensional Segalgebra: a real subspace of Hermitian matrices
/// containing the identity and closed under the Jordan and Lie products.
/// Immutable; copies share storage.
class Segalgebra {
public:
  /// Checks every invariant and throws ValidationError on failure.
  static Segalgebra from_space(OperatorSpace space) {
    const Index n = space.dim_h();
    const RealMatrix gram = space.coords().transpose() * space.coords();
    const double gram_err = (gram - RealMatrix::Identity(space.dim(), space.dim())).norm();
    if (gram_err > tol().sub) {
      throw ValidationError("Segalgebra: basis is not orthonormal (Gram error " + std::to_string(gram_err) + ")");
    }
    const Membership id = space.member(HermitianOp::identity(n));
    if (!id) {
      throw ValidationError("Segalgebra: identity not in span (residual " + std::to_string(id.residual) + ")");
    }
    const double closure = closure_residual(space);
    if (closure > tol().sub) {
      throw ValidationError("Segalgebra: not closed under Jordan/Lie products (residual " +
                            std::to_string(closure) + ")");
    }
    return Segalgebra(std::move(space));
  }

  /// Orthonormalizes `ops` (the identity is not added) and validates.
  static Segalgebra from_basis(Index dim_h, const std::vector<HermitianOp>& ops) {
    return from_space(OperatorSpace::span(dim_h, ops));
  }

  /// All Hermitian n x n matrices.
  static Segalgebra full(Index n) { return Segalgebra(OperatorSpace::full(n)); }

  /// Real multiples of the identity.
  static Segalgebra scalars(Index n) {
    return Segalgebra(OperatorSpace::span(n, {HermitianOp::identity(n)}));
  }

  /// Real diagonal matrices.
  static Segalgebra diagonal(Index n) {
    RealMatrix q = RealMatrix::Zero(real_dim(n), n);
    for (Index i = 0; i < n; ++i) q(i, i) = 1.0;
    return Segalgebra(OperatorSpace::from_orthonormal(n, std::move(q)));
  }

  Index dim_h() const { return data_->space.dim_h(); }
  Index dim() const { return data_->space.dim(); }
  const OperatorSpace& space() const { return data_->space; }
  const std::vector<HermitianOp>& basis() const { return data_->basis; }
  const HermitianOp& basis(Index k) const { return data_->basis[static_cast<std::size_t>(k)]; }

private:
  struct Data {
    OperatorSpace space;
    std::vector<HermitianOp> basis;
  };

  explicit Segalgebra(OperatorSpace space) {
    auto basis = space.basis();
    data_ = std::make_shared<const Data>(Data{std::move(space), std::move(basis)});
  }

  std::shared_ptr<const Data> data_;
};

namespace detail {

/// Wraps an internally computed space, reporting invariant failures as
/// numerical errors rather than input errors.
inline Segalgebra computed_algebra(OperatorSpace space, std::string_view where) {
  try {
    return Segalgebra::from_space(std::move(space));
  } catch (const ValidationError& e) {
    throw NumericalError(std::string(where) + ": computed subspace failed Segalgebra invariants: " + e.what());
  }
}

inline void require_dim(const Segalgebra& s, Index n, std::string_view what) {
  if (s.dim_h() != n) throw DimensionMismatch(what, s.dim_h(), n);
}

} // namespace detail

/// Smallest Segalgebra containing the seeds and the identity. Each round
/// forms all Jordan and Lie products involving a direction added in the
/// previous round; it stops when a round adds nothing.
inline Segalgebra generate(Index dim_h, const std::vector<HermitianOp>& seeds) {
  OperatorSpace s(dim_h);
  s.try_add(HermitianOp::identity(dim_h));
  for (const HermitianOp& seed : seeds) {
    if (seed.dim() != dim_h) throw DimensionMismatch("generate", dim_h, seed.dim());
    const double norm = seed.frobenius();
    if (norm > 0.0) s.try_add(seed * (1.0 / norm));
  }

  Index done = 0;
  while (done < s.dim()) {
    const Index current = s.dim();
    const std::vector<HermitianOp> b = s.basis();
    for (Index j = done; j < current; ++j) {
      for (Index i = 0; i <= j; ++i) {
        const auto& bi = b[static_cast<std::size_t>(i)];
        const auto& bj = b[static_cast<std::size_t>(j)];
        s.try_add(jordan(bi, bj));
        if (i != j) s.try_add(lie(bi, bj));
      }
    }
    done = current;
  }
  return detail::computed_algebra(std::move(s), "generate");
}

inline Segalgebra generate(const std::vector<HermitianOp>& seeds) {
  if (seeds.empty()) throw ValidationError("generate: need a dimension when no seeds are given");
  return generate(seeds.front().dim(), seeds);
}

inline Membership member(const Segalgebra& s, const HermitianOp& a) {
  detail::require_dim(s, a.dim(), "member");
  return s.space().member(a);
}

/// Largest Frobenius norm of a Lie product of two basis elements.
inline double commutativity_residual(const Segalgebra& s) {
  double worst = 0.0;
  const auto& b = s.basis();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = i + 1; j < b.size(); ++j) worst = std::max(worst, lie(b[i], b[j]).frobenius());
  return worst;
}

inline bool is_commutative(const Segalgebra& s) { return commutativity_residual(s) <= tol().sub; }

/// Worst residual of Jordan and Lie products of the algebra basis with the
/// candidate basis, measured against the candidate span.
inline double ideal_residual(const Segalgebra& s, const OperatorSpace& candidate) {
  double worst = 0.0;
  const auto cb = candidate.basis();
  for (const HermitianOp& x : s.basis()) {
    for (const HermitianOp& a : cb) {
      worst = std::max(worst, candidate.residual(jordan(x, a)));
      worst = std::max(worst, candidate.residual(lie(x, a)));
    }
  }
  return worst;
}

/// True when `candidate` is a proper ideal of `s`. Throws PreconditionError
/// when the candidate does not lie inside `s`.
inline bool is_ideal(const Segalgebra& s, const OperatorSpace& candidate) {
  detail::require_dim(s, candidate.dim_h(), "is_ideal");
  const double outside = s.space().containment_residual(candidate);
  if (outside > tol().sub) {
    throw PreconditionError("is_ideal: candidate subspace is not contained in the algebra (residual " +
                            std::to_string(outside) + ")");
  }
  if (candidate.member(HermitianOp::identity(s.dim_h()))) return false;
  return ideal_residual(s, candidate) <= tol().sub;
}

/// A proper ideal of a Segalgebra.
///
/// State ideals are stored through `state_kernel`, which only requires a
/// subspace of the parent excluding the identity: {A : A P = 0} is closed
/// under left multiplication but need not be invariant under Jordan and Lie
/// products with the whole parent. `two_sided()` reports which case holds.
class IdealSubspace {
public:
  /// Validates that `space` is a proper ideal of `parent`.
  IdealSubspace(Segalgebra parent, OperatorSpace space) : parent_(std::move(parent)), space_(std::move(space)) {
    if (!is_ideal(parent_, space_)) throw PreconditionError("IdealSubspace: subspace is not a proper ideal");
  }

  static IdealSubspace zero(Segalgebra parent) {
    const Index n = parent.dim_h();
    return IdealSubspace(std::move(parent), OperatorSpace(n), true);
  }

  /// For subspaces that are ideals by construction; invariants are checked
  /// and failures reported as numerical errors.
  static IdealSubspace computed(Segalgebra parent, OperatorSpace space, std::string_view where) {
    try {
      return IdealSubspace(std::move(parent), std::move(space));
    } catch (const PreconditionError& e) {
      throw NumericalError(std::string(where) + ": " + e.what());
    }
  }

  /// Kernel of a state: a subspace of `parent` without the identity.
  static IdealSubspace state_kernel(Segalgebra parent, OperatorSpace space, std::string_view where) {
    const double outside = parent.space().containment_residual(space);
    if (outside > tol().sub || space.member(HermitianOp::identity(parent.dim_h()))) {
      throw NumericalError(std::string(where) + ": kernel is not a proper subspace of the algebra");
    }
    const bool two = ideal_residual(parent, space) <= tol().sub;
    return IdealSubspace(std::move(parent), std::move(space), two);
  }

  const Segalgebra& parent() const { return parent_; }
  const OperatorSpace& space() const { return space_; }
  Index dim() const { return space_.dim(); }
  bool two_sided() const { return two_sided_; }

private:
  IdealSubspace(Segalgebra parent, OperatorSpace space, bool two_sided)
      : parent_(std::move(parent)), space_(std::move(space)), two_sided_(two_sided) {}

  Segalgebra parent_;
  OperatorSpace space_;
  bool two_sided_ = true;
};

/// Worst residual of the algebra's Lie products against the ideal.
inline double quasicommutativity_residual(const Segalgebra& s, const OperatorSpace& ideal) {
  double worst = 0.0;
  const auto& b = s.basis();
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i + 1; j < b.size(); ++j) {
      const HermitianOp l = lie(b[i], b[j]);
      worst = std::max(worst, ideal.residual(l) / std::max(1.0, l.frobenius()));
    }
  }
  return worst;
}

/// S is I-quasicommutative when every Lie product of S lies in I.
inline bool is_quasicommutative(const Segalgebra& s, const IdealSubspace& ideal) {
  return quasicommutativity_residual(s, ideal.space()) <= tol().sub;
}

/// Smallest subspace of `s` containing `generators` and invariant under
/// Jordan and Lie multiplication by `s`. May contain the identity.
inline OperatorSpace ideal_closure(const Segalgebra& s, const std::vector<HermitianOp>& generators) {
  OperatorSpace out(s.dim_h());
  for (const HermitianOp& g : generators) {
    const double norm = g.frobenius();
    if (norm > 0.0) out.try_add(s.space().project(g) * (1.0 / norm));
  }
  Index done = 0;
  while (done < out.dim()) {
    const Index current = out.dim();
    for (Index k = done; k < current; ++k) {
      const HermitianOp a = out.element(k);
      for (const HermitianOp& x : s.basis()) {
        out.try_add(jordan(x, a));
        out.try_add(lie(x, a));
      }
    }
    done = current;
  }
  return out;
}

/// The quotient S/I, represented on the orthogonal complement of I inside
/// S. The hat map is the orthogonal projection onto that complement.
class QuotientAlgebra {
public:
  const Segalgebra& parent() const { return parent_; }
  const IdealSubspace& ideal() const { return ideal_; }
  const OperatorSpace& representatives() const { return reps_; }
  Index dim() const { return reps_.dim(); }

  HermitianOp hat(const HermitianOp& a) const { return reps_.project(a); }

  /// Coordinates of hat(a) on the representative basis.
  RealVector hat_coords(const HermitianOp& a) const { return reps_.components(a); }

  HermitianOp identity() const { return hat(HermitianOp::identity(parent_.dim_h())); }
  HermitianOp jordan(const HermitianOp& x, const HermitianOp& y) const { return hat(beable::jordan(x, y)); }
  HermitianOp lie(const HermitianOp& x, const HermitianOp& y) const { return hat(beable::lie(x, y)); }

  double commutativity_residual() const {
    double worst = 0.0;
    const auto r = reps_.basis();
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = i + 1; j < r.size(); ++j) worst = std::max(worst, lie(r[i], r[j]).frobenius());
    return worst;
  }

  bool is_commutative() const { return commutativity_residual() <= tol().sub; }

  /// Matrix of y -> hat(x o y) on the representative basis. Symmetric
  /// under the trace inner product.
  RealMatrix multiplication_operator(const HermitianOp& x) const {
    const auto r = reps_.basis();
    RealMatrix m(dim(), dim());
    for (Index k = 0; k < dim(); ++k) m.col(k) = hat_coords(beable::jordan(x, r[static_cast<std::size_t>(k)]));
    return 0.5 * (m + m.transpose());
  }

private:
  friend QuotientAlgebra quotient(const Segalgebra&, const IdealSubspace&);
  QuotientAlgebra(Segalgebra parent, IdealSubspace ideal, OperatorSpace reps)
      : parent_(std::move(parent)), ideal_(std::move(ideal)), reps_(std::move(reps)) {}

  Segalgebra parent_;
  IdealSubspace ideal_;
  OperatorSpace reps_;
};

inline QuotientAlgebra quotient(const Segalgebra& s, const IdealSubspace& ideal) {
  if (s.space().span_distance(ideal.parent().space()) > tol().sub) {
    throw PreconditionError("quotient: ideal belongs to a different algebra");
  }
  if (!is_ideal(s, ideal.space())) throw PreconditionError("quotient: subspace is not a proper ideal");
  return QuotientAlgebra(s, ideal, complement(s.space(), ideal.space()));
}

/// Both the real and imaginary part of every basis product lie in the span.
/// For a subspace containing the identity this is the finite-dimensional
/// form of "S + iS is a C*-algebra".
inline bool complexified_closure_check(const OperatorSpace& space) {
  const std::vector<HermitianOp> b = space.basis();
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = i; j < b.size(); ++j) {
      const auto [re, im] = re_im_product(b[i], b[j]);
      if (!space.member(re) || !space.member(im)) return false;
    }
  }
  return true;
}

inline bool complexified_closure_check(const Segalgebra& s) { return complexified_closure_check(s.space()); }

} // namespace beable
