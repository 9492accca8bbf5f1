#include "test_support.hpp"

using namespace beable;
using namespace beable::testing;

namespace {

/// Brute-force closure oracle: repeatedly spans all products of a spanning
/// set (not an orthonormal basis) until the rank stops growing. Independent
/// of the round-based generator.
Index brute_force_closure_dim(Index n, std::vector<HermitianOp> ops) {
  ops.push_back(HermitianOp::identity(n));
  auto rank_of = [&](const std::vector<HermitianOp>& xs) {
    RealMatrix m(real_dim(n), static_cast<Index>(xs.size()));
    for (std::size_t k = 0; k < xs.size(); ++k) m.col(static_cast<Index>(k)) = xs[k].coords().normalized();
    Eigen::ColPivHouseholderQR<RealMatrix> qr(m);
    qr.setThreshold(1e-9);
    return qr.rank();
  };
  Index rank = rank_of(ops);
  while (true) {
    std::vector<HermitianOp> next = ops;
    for (std::size_t i = 0; i < ops.size(); ++i)
      for (std::size_t j = 0; j < ops.size(); ++j) {
        next.push_back(jordan(ops[i], ops[j]));
        next.push_back(lie(ops[i], ops[j]));
      }
    // thin the spanning set back to a basis to keep sizes bounded
    OperatorSpace s = OperatorSpace::span(n, next);
    std::vector<HermitianOp> thinned = s.basis();
    const Index r = rank_of(thinned);
    if (r == rank) return r;
    rank = r;
    ops = std::move(thinned);
  }
}

HermitianOp p1() { return basis_projector(2, 1); }

} // namespace

TEST_CASE("generate", "[segalgebra]") {
  SECTION("no seeds gives the scalars") {
    const auto s = generate(3, {});
    CHECK(s.dim() == 1);
    CHECK(member(s, HermitianOp::identity(3)));
  }
  SECTION("sigma_x and sigma_y close to all 2x2 Hermitians") {
    const auto s = generate({sigma_x(), sigma_y()});
    CHECK(s.dim() == 4);
    CHECK(s.dim() == brute_force_closure_dim(2, {sigma_x(), sigma_y()}));
    const auto m = member(s, sigma_z());
    CHECK(m.member);
    CHECK(m.residual < 1e-14);
  }
  SECTION("a nondegenerate diagonal matrix generates the diagonals") {
    RealVector d(3);
    d << 1, 2, 3;
    const auto s = generate({HermitianOp::diagonal(d)});
    CHECK(s.dim() == 3);
    CHECK(s.space().span_equal(Segalgebra::diagonal(3).space()));
    CHECK(is_commutative(s));
  }
  SECTION("matches the brute-force closure on random seeds") {
    Rng rng = make_rng(41);
    for (int t = 0; t < 20; ++t) {
      const Index n = uniform_index(rng, 2, 4);
      // low-rank seeds give a spread of algebra sizes
      std::vector<HermitianOp> seeds;
      const Index k = uniform_index(rng, 1, 2);
      for (Index i = 0; i < k; ++i) {
        if (uniform_index(rng, 0, 1)) {
          seeds.push_back(HermitianOp::projector(random_vector(rng, n)));
        } else {
          seeds.push_back(random_hermitian(rng, n));
        }
      }
      CHECK(generate(n, seeds).dim() == brute_force_closure_dim(n, seeds));
    }
  }
  SECTION("generate is idempotent") {
    Rng rng = make_rng(42);
    for (int t = 0; t < 30; ++t) {
      const Index n = uniform_index(rng, 2, 6);
      std::vector<HermitianOp> seeds{HermitianOp::projector(random_vector(rng, n))};
      if (t % 3 == 0) seeds.push_back(random_hermitian(rng, n));
      const auto s = generate(n, seeds);
      const auto again = generate(n, s.basis());
      CHECK(s.space().span_distance(again.space()) < 1e-9);
      CHECK(complexified_closure_check(s));
    }
  }
}

TEST_CASE("Segalgebra invariants are enforced on construction", "[segalgebra]") {
  const auto sx = sigma_x(), sy = sigma_y();
  CHECK_THROWS_AS(Segalgebra::from_basis(2, {HermitianOp::identity(2), sx, sy}), ValidationError);
  CHECK_THROWS_AS(Segalgebra::from_basis(2, {sx}), ValidationError);
  CHECK_NOTHROW(Segalgebra::from_basis(2, {HermitianOp::identity(2), sx}));
}

TEST_CASE("member", "[segalgebra]") {
  CHECK_FALSE(member(Segalgebra::scalars(2), sigma_x()));
  Rng rng = make_rng(1);
  for (int t = 0; t < 10; ++t) {
    const Index n = uniform_index(rng, 1, 5);
    CHECK(member(generate(n, {random_hermitian(rng, n)}), HermitianOp::identity(n)));
  }
  CHECK_THROWS_AS(member(Segalgebra::scalars(2), HermitianOp::identity(3)), DimensionMismatch);
}

TEST_CASE("is_commutative", "[segalgebra]") {
  CHECK(is_commutative(Segalgebra::diagonal(3)));
  CHECK_FALSE(is_commutative(generate({sigma_x(), sigma_y()})));
  CHECK(is_commutative(Segalgebra::scalars(4)));
}

TEST_CASE("is_ideal", "[segalgebra]") {
  const auto full = Segalgebra::full(2);
  const auto diag = Segalgebra::diagonal(2);
  const auto line = OperatorSpace::span(2, {p1()});
  CHECK_FALSE(is_ideal(full, line));
  CHECK(is_ideal(diag, line));
  CHECK(is_ideal(full, OperatorSpace(2)));
  CHECK(is_ideal(diag, OperatorSpace(2)));
  // the identity never spans a proper ideal
  CHECK_FALSE(is_ideal(diag, OperatorSpace::span(2, {HermitianOp::identity(2)})));
  CHECK_THROWS_AS(is_ideal(diag, OperatorSpace::span(2, {sigma_x()})), PreconditionError);
  CHECK_THROWS_AS(IdealSubspace(full, line), PreconditionError);
}

TEST_CASE("is_quasicommutative", "[segalgebra]") {
  const auto diag = Segalgebra::diagonal(3);
  CHECK(is_quasicommutative(diag, IdealSubspace(diag, OperatorSpace::span(3, {basis_projector(3, 0)}))));
  CHECK(is_quasicommutative(diag, IdealSubspace::zero(diag)));

  const auto full = Segalgebra::full(2);
  CHECK_FALSE(is_quasicommutative(full, IdealSubspace::zero(full)));

  // H(2) (+) R (+) R: Lie products live in the H(2) block, which is an ideal
  ComplexMatrix e = ComplexMatrix::Zero(4, 4);
  e.block(0, 0, 2, 2).setIdentity();
  std::vector<HermitianOp> gens{HermitianOp::trusted(e), basis_projector(4, 2)};
  for (const auto& p : {sigma_x(), sigma_y()}) {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m.block(0, 0, 2, 2) = p.matrix();
    gens.push_back(HermitianOp::trusted(m));
  }
  const auto s = generate(4, gens);
  REQUIRE(s.dim() == 6);
  std::vector<HermitianOp> block;
  for (const auto& p : {sigma_x(), sigma_y(), sigma_z(), HermitianOp::identity(2)}) {
    ComplexMatrix m = ComplexMatrix::Zero(4, 4);
    m.block(0, 0, 2, 2) = p.matrix();
    block.push_back(HermitianOp::trusted(m));
  }
  const IdealSubspace ideal(s, OperatorSpace::span(4, block));
  CHECK(is_quasicommutative(s, ideal));
  // the traceless part alone is not an ideal: sigma_x o sigma_x = block identity
  std::vector<HermitianOp> traceless(block.begin(), block.begin() + 3);
  CHECK_FALSE(is_ideal(s, OperatorSpace::span(4, traceless)));
}

TEST_CASE("quotient", "[segalgebra]") {
  SECTION("by the zero ideal") {
    const auto full = Segalgebra::full(2);
    const auto q = quotient(full, IdealSubspace::zero(full));
    CHECK(q.dim() == 4);
    CHECK_FALSE(q.is_commutative());
  }
  SECTION("diagonal 2x2 by span{|1><1|}") {
    const auto diag = Segalgebra::diagonal(2);
    const auto q = quotient(diag, IdealSubspace(diag, OperatorSpace::span(2, {p1()})));
    CHECK(q.dim() == 1);
    CHECK(q.is_commutative());
    CHECK(dist(q.identity(), basis_projector(2, 0)) < 1e-14);
  }
  SECTION("homomorphism and commutativity equivalence on random block algebras") {
    Rng rng = make_rng(77);
    int quasi = 0, not_quasi = 0;
    for (int t = 0; t < 40; ++t) {
      std::vector<Index> sizes;
      Index n = 0;
      while (n < 2 || (n < 4 && uniform_index(rng, 0, 1))) {
        const Index s = uniform_index(rng, 1, 2);
        sizes.push_back(s);
        n += s;
      }
      std::vector<HermitianOp> units;
      const auto s = block_algebra(rng, sizes, &units);
      // the ideal is the sum of a proper subset of the blocks
      std::vector<HermitianOp> kept;
      bool small_quotient = true;
      const std::size_t dropped = static_cast<std::size_t>(uniform_index(rng, 0, Index(units.size()) - 1));
      for (std::size_t k = 0; k < units.size(); ++k) {
        if (k == dropped || uniform_index(rng, 0, 1)) {
          small_quotient = small_quotient && sizes[k] == 1;
        } else {
          kept.push_back(units[k]);
        }
      }
      const IdealSubspace ideal(s, ideal_closure(s, kept));
      const auto q = quotient(s, ideal);
      const bool qc = is_quasicommutative(s, ideal);
      CHECK(qc == small_quotient);
      CHECK(q.is_commutative() == qc);
      (qc ? quasi : not_quasi)++;

      // hat(A o B) = hat(A) o hat(B) in the quotient, likewise for Lie
      const auto a = s.space().combination(gaussian_vector(rng, s.dim()));
      const auto b = s.space().combination(gaussian_vector(rng, s.dim()));
      CHECK(dist(q.hat(jordan(a, b)), q.jordan(q.hat(a), q.hat(b))) < 1e-9);
      CHECK(dist(q.hat(lie(a, b)), q.lie(q.hat(a), q.hat(b))) < 1e-9);
      CHECK(dist(q.jordan(q.identity(), q.hat(a)), q.hat(a)) < 1e-9);
    }
    CHECK(quasi > 0);
    CHECK(not_quasi > 0);
  }
  SECTION("a non-ideal is rejected") {
    const auto full = Segalgebra::full(2);
    CHECK_THROWS_AS(IdealSubspace(full, OperatorSpace::span(2, {p1()})), PreconditionError);
  }
}

TEST_CASE("ideal closure and monotonicity", "[segalgebra]") {
  Rng rng = make_rng(13);
  for (int t = 0; t < 20; ++t) {
    std::vector<HermitianOp> units;
    const auto s = block_algebra(rng, {1, 2, 1}, &units);
    const IdealSubspace i_small(s, ideal_closure(s, {units[0]}));
    const IdealSubspace i_big(s, ideal_closure(s, {units[0], units[1]}));
    CHECK(i_small.dim() == 1);
    CHECK(i_big.dim() == 5);
    CHECK(i_big.space().contains(i_small.space()));
    CHECK_FALSE(is_quasicommutative(s, i_small));
    CHECK(is_quasicommutative(s, i_big));

    // closure of a random element of the big ideal stays inside it
    const auto a = i_big.space().combination(gaussian_vector(rng, i_big.dim()));
    const OperatorSpace j = ideal_closure(s, {a});
    CHECK(i_big.space().contains(j));
    CHECK(is_ideal(s, j));
    CHECK_FALSE(ideal_closure(s, {units[0] + units[2]}).member(HermitianOp::identity(4)).member);
    CHECK(ideal_closure(s, {units[0] + units[1] + units[2] * 0.5}).member(HermitianOp::identity(4)).member);
  }
}

TEST_CASE("complexified_closure_check", "[segalgebra]") {
  CHECK(complexified_closure_check(generate({sigma_x(), sigma_y()})));
  CHECK_FALSE(complexified_closure_check(OperatorSpace::span(2, {HermitianOp::identity(2), sigma_x(), sigma_y()})));
  CHECK(complexified_closure_check(Segalgebra::scalars(3)));
}

TEST_CASE("functional calculus stays in the generated algebra", "[segalgebra][property]") {
  Rng rng = make_rng(99);
  for (int t = 0; t < 30; ++t) {
    const Index n = uniform_index(rng, 2, 6);
    const auto a = random_hermitian(rng, n);
    const auto f = op_function(a, [](double x) { return std::tanh(x) + std::exp(-x * x); });
    CHECK((f.matrix() * a.matrix() - a.matrix() * f.matrix()).norm() < 1e-10 * f.frobenius() * a.frobenius());
    CHECK(member(generate(n, {a}), f));
  }
}
