#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "beable/beables.hpp"
#include "beable/random.hpp"
#include "beable/spin.hpp"

namespace beable {

/// Pass count and worst residual of one property suite.
struct SuiteResult {
  std::string name;
  double tolerance = 0.0;
  int trials = 0;
  int passed = 0;
  double worst_residual = 0.0;
  std::string first_failure;

  bool ok() const { return passed == trials; }
};

struct TheoremReport {
  std::vector<SuiteResult> suites;
  bool all_passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.ok(); });
  }
};

/// Outcome of a single trial: a residual compared against the suite
/// tolerance, and a flag for checks that are not residual-shaped.
struct TrialOutcome {
  double residual = 0.0;
  bool ok = true;
  std::string note;
};

namespace detail {

/// Block-diagonal algebra in a random unitary frame. `units` receives the
/// block identities.
inline Segalgebra random_block_algebra(Rng& rng, const std::vector<Index>& sizes,
                                       std::vector<HermitianOp>* units = nullptr) {
  Index n = 0;
  for (Index s : sizes) n += s;
  const ComplexMatrix u = random_unitary(rng, n);
  std::vector<HermitianOp> gens;
  Index off = 0;
  for (Index s : sizes) {
    ComplexMatrix e = ComplexMatrix::Zero(n, n);
    e.block(off, off, s, s).setIdentity();
    gens.push_back(HermitianOp::trusted(u * e * u.adjoint()));
    if (units) units->push_back(gens.back());
    for (int k = 0; k < (s > 1 ? 2 : 0); ++k) {
      ComplexMatrix m = ComplexMatrix::Zero(n, n);
      m.block(off, off, s, s) = random_hermitian(rng, s).matrix();
      gens.push_back(HermitianOp::trusted(u * m * u.adjoint()));
    }
    off += s;
  }
  return generate(n, gens);
}

inline std::vector<Index> random_partition(Rng& rng, Index n) {
  std::vector<Index> sizes;
  Index m = 0;
  while (m < n) {
    const Index s = uniform_index(rng, 1, n - m);
    sizes.push_back(s);
    m += s;
  }
  return sizes;
}

inline Segalgebra random_commutative(Rng& rng, Index n) {
  const ComplexMatrix u = random_unitary(rng, n);
  const Index parts = uniform_index(rng, 1, n);
  std::vector<HermitianOp> projectors;
  for (Index p = 0; p < parts; ++p) {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    for (Index k = p; k < n; k += parts) m += u.col(k) * u.col(k).adjoint();
    projectors.push_back(HermitianOp::trusted(0.5 * (m + m.adjoint())));
  }
  return generate(n, projectors);
}

inline AlgState random_state(Rng& rng, Index n) {
  return AlgState::from_density(random_density(rng, n, uniform_index(rng, 1, n)));
}

inline HermitianOp random_element(Rng& rng, const Segalgebra& s) {
  return s.space().combination(gaussian_vector(rng, s.dim()));
}

inline EigenFamily random_family(Rng& rng, Index n, Index size) {
  const ComplexMatrix u = random_unitary(rng, n);
  std::uniform_real_distribution<double> amp(0.3, 1.0), phase(0.0, 2.0 * std::acos(-1.0));
  std::vector<ComplexVector> vs;
  ComplexVector target = ComplexVector::Zero(n);
  for (Index k = 0; k < size; ++k) {
    vs.push_back(u.col(k));
    target += u.col(k) * std::polar(amp(rng), phase(rng));
  }
  return EigenFamily(std::move(vs), target.normalized());
}

/// Kernel of the quadratic form x -> omega(A_x^2) (centered: minus
/// omega(A_x)^2) over the algebra coordinates, via its Gram matrix.
inline OperatorSpace quadratic_kernel(const AlgState& w, const Segalgebra& s, bool centered) {
  const auto& b = s.basis();
  const Index d = s.dim();
  RealMatrix g(d, d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = i; j < d; ++j) {
      const auto& bi = b[static_cast<std::size_t>(i)];
      const auto& bj = b[static_cast<std::size_t>(j)];
      g(i, j) = evaluate(w, jordan(bi, bj));
      if (centered) g(i, j) -= evaluate(w, bi) * evaluate(w, bj);
      g(j, i) = g(i, j);
    }
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(g);
  const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  OperatorSpace out(s.dim_h());
  for (Index k = 0; k < d; ++k)
    if (es.eigenvalues()(k) < 1e-9 * scale) out.try_add(s.space().combination(es.eigenvectors().col(k)));
  return out;
}

/// Beable status decided without the library path: state ideal from the
/// quadratic form, then Lie products tested against it.
inline bool brute_force_beable(const AlgState& w, const Segalgebra& b) {
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

inline double mixture_error(const MixtureDecomposition& mix, const Segalgebra& b, const AlgState& w) {
  double worst = 0.0;
  for (const HermitianOp& x : b.basis()) worst = std::max(worst, std::abs(mix.value(x) - evaluate(w, x)));
  return worst;
}

/// Distance of x from the spectrum of a.
inline double spectrum_distance(const HermitianOp& a, double x) {
  return (decompose(a).eigenvalues.array() - x).abs().minCoeff();
}

/// Runs `trial` for each dimension and trial index with a generator
/// seeded from (seed, suite, dimension, trial).
class SuiteRunner {
public:
  SuiteRunner(std::uint64_t seed, std::vector<Index> dims) : seed_(seed), dims_(std::move(dims)) {}

  template <typename Trial>
  SuiteResult run(std::string name, double tolerance, int trials, Trial trial, Index min_dim = 1) {
    SuiteResult r{std::move(name), tolerance, 0, 0, 0.0, {}};
    const std::uint64_t suite = next_suite_++;
    for (Index n : dims_) {
      if (n < min_dim) continue;
      for (int t = 0; t < trials; ++t) {
        Rng rng = make_rng(seed_, (suite << 40) ^ (static_cast<std::uint64_t>(n) << 24) ^ static_cast<std::uint64_t>(t));
        record(r, n, t, [&] { return trial(rng, n); });
      }
    }
    return r;
  }

  /// A suite that does not depend on the dimension list.
  template <typename Trial>
  SuiteResult run_once(std::string name, double tolerance, Trial trial) {
    SuiteResult r{std::move(name), tolerance, 0, 0, 0.0, {}};
    const std::uint64_t suite = next_suite_++;
    Rng rng = make_rng(seed_, suite << 40);
    record(r, 0, 0, [&] { return trial(rng); });
    return r;
  }

private:
  template <typename Body>
  static void record(SuiteResult& r, Index n, int t, Body body) {
    ++r.trials;
    TrialOutcome out;
    try {
      out = body();
    } catch (const std::exception& e) {
      out = {0.0, false, e.what()};
    }
    r.worst_residual = std::max(r.worst_residual, out.residual);
    const bool pass = out.ok && out.residual <= r.tolerance && std::isfinite(out.residual);
    if (pass) {
      ++r.passed;
    } else if (r.first_failure.empty()) {
      r.first_failure = "dim " + std::to_string(n) + " trial " + std::to_string(t) + ": " +
                        (out.note.empty() ? "residual " + std::to_string(out.residual) : out.note);
    }
  }

  std::uint64_t seed_;
  std::vector<Index> dims_;
  std::uint64_t next_suite_ = 1;
};

} // namespace detail

/// Pauli worked examples: sigma_x o sigma_y = 0, Jordan and Lie
/// non-associativity, sigma_x . sigma_y = -sigma_z.
inline double pauli_identity_residual() {
  ComplexMatrix mx(2, 2), my(2, 2), mz(2, 2);
  mx << 0, 1, 1, 0;
  my << 0, -kI, kI, 0;
  mz << 1, 0, 0, -1;
  const HermitianOp sx(mx), sy(my), sz(mz);
  double worst = jordan(sx, sy).frobenius();
  worst = std::max(worst, frobenius_distance(jordan(jordan(sx, sx), sy), sy));
  worst = std::max(worst, jordan(sx, jordan(sx, sy)).frobenius());
  worst = std::max(worst, frobenius_distance(lie(sx, sy), -sz));
  worst = std::max(worst, frobenius_distance(lie(sx, lie(sx, sy)), -sy));
  worst = std::max(worst, lie(lie(sx, sx), sy).frobenius());
  return worst;
}

/// Singlet bub-definite check: state norm error and the worst mismatch of
/// the mixture against the state over the algebra basis.
struct SingletCheck {
  double norm_error = 0.0;
  double reconstruction_error = 0.0;
  bool has_status = false;
  Index algebra_dim = 0;
};

inline SingletCheck singlet_check() {
  const auto [sx, sy, sz] = spin1_matrices();
  const ComplexVector psi = spin1_singlet(sx, sy, sz);
  SingletCheck out;
  out.norm_error = std::abs(psi.norm() - 1.0);
  const HermitianOp r = kron(jordan(sz, sz), HermitianOp::identity(3));
  const BubDefinite bub = bub_definite(psi, r);
  const AlgState w = AlgState::from_vector(psi);
  const BeableVerdict v = has_beable_status(bub.algebra, w);
  out.has_status = v.has_status;
  out.algebra_dim = bub.algebra.dim();
  out.reconstruction_error = v.decomposition ? detail::mixture_error(*v.decomposition, bub.algebra, w) : 1.0;
  return out;
}

/// Runs every property suite over the given Hilbert-space dimensions with
/// `trials` random instances per dimension. Deterministic in `seed`.
inline TheoremReport verify_theorems(const std::vector<Index>& dims, int trials, std::uint64_t seed) {
  using namespace detail;
  for (Index n : dims)
    if (n < 1) throw ValidationError("verify_theorems: dimensions must be positive");
  if (trials < 1) throw ValidationError("verify_theorems: trials must be positive");
  SuiteRunner run(seed, dims);
  TheoremReport rep;
  auto add = [&](SuiteResult r) { rep.suites.push_back(std::move(r)); };

  add(run.run_once("pauli-identities", 1e-12, [](Rng&) { return TrialOutcome{pauli_identity_residual()}; }));

  add(run.run("product-identities", 1e-10, trials, [](Rng& rng, Index n) {
    const HermitianOp a = random_hermitian(rng, n), b = random_hermitian(rng, n);
    const ComplexMatrix ab = a.matrix() * b.matrix();
    const double scale = std::max(1.0, ab.norm());
    double r = (ab - (jordan(a, b).matrix() - kI * lie(a, b).matrix())).norm() / scale;
    const double na = op_norm(a);
    r = std::max(r, std::abs(op_norm(jordan(a, a)) - na * na) / std::max(1.0, na * na));
    r = std::max(r, frobenius_distance(lie(a, b), -lie(b, a)) / scale);
    return TrialOutcome{r};
  }));

  add(run.run("closure-equivalence", 0.0, trials, [](Rng& rng, Index n) {
    const Segalgebra s = random_block_algebra(rng, random_partition(rng, n));
    bool ok = complexified_closure_check(s);
    if (n >= 2) {
      const OperatorSpace open =
          OperatorSpace::span(n, {HermitianOp::identity(n), random_hermitian(rng, n), random_hermitian(rng, n)});
      ok = ok && !complexified_closure_check(open);
    }
    return TrialOutcome{0.0, ok, ok ? "" : "closure check disagrees with construction"};
  }));

  add(run.run("generate-idempotence", 1e-9, trials, [](Rng& rng, Index n) {
    const Segalgebra s = generate(n, {random_hermitian(rng, n), random_element(rng, random_commutative(rng, n))});
    const Segalgebra again = generate(n, s.basis());
    return TrialOutcome{again.space().span_distance(s.space()), again.dim() == s.dim()};
  }));

  add(run.run("quotient-homomorphism", 1e-9, trials, [](Rng& rng, Index n) {
    std::vector<HermitianOp> units;
    const std::vector<Index> sizes = random_partition(rng, n);
    const Segalgebra s = random_block_algebra(rng, sizes, &units);
    std::vector<HermitianOp> kept;
    bool small = true;
    for (std::size_t k = 0; k < units.size(); ++k) {
      if (k == 0 || uniform_index(rng, 0, 1)) {
        small = small && sizes[k] == 1;
      } else {
        kept.push_back(units[k]);
      }
    }
    const QuotientAlgebra q = quotient(s, IdealSubspace(s, ideal_closure(s, kept)));
    const HermitianOp a = random_element(rng, s), b = random_element(rng, s);
    double r = frobenius_distance(q.hat(jordan(a, b)), q.jordan(q.hat(a), q.hat(b)));
    r = std::max(r, frobenius_distance(q.hat(lie(a, b)), q.lie(q.hat(a), q.hat(b))));
    r /= std::max(1.0, a.frobenius() * b.frobenius());
    const bool qc = is_quasicommutative(s, q.ideal());
    return TrialOutcome{r, qc == q.is_commutative() && qc == small};
  }));

  add(run.run("characters", 1e-8, trials, [](Rng& rng, Index n) {
    // characters of a commutative algebra, and the characters carried by a
    // beable decomposition of a noncommutative definite set
    std::vector<std::pair<DispersionFreeState, Segalgebra>> pool;
    const Segalgebra c = random_commutative(rng, n);
    for (DispersionFreeState& chi : characters(c)) pool.emplace_back(std::move(chi), c);
    const AlgState w = random_state(rng, n);
    const Segalgebra d = definite_set(w, Segalgebra::full(n));
    const BeableVerdict v = has_beable_status(d, w);
    if (!v.decomposition) return TrialOutcome{0.0, false, "definite set lacks beable status"};
    for (const auto& comp : v.decomposition->components) pool.emplace_back(comp.state, d);

    double mult = 0.0, lie_part = 0.0, spec = 0.0;
    for (const auto& [chi, alg] : pool) {
      const HermitianOp a = random_element(rng, alg), b = random_element(rng, alg);
      mult = std::max(mult, std::abs(chi(jordan(a, b)) - chi(a) * chi(b)));
      lie_part = std::max(lie_part, std::abs(chi(lie(a, b))));
      spec = std::max(spec, spectrum_distance(a, chi(a)));
    }
    return TrialOutcome{std::max({mult, lie_part, spec}), mult < 1e-9 && lie_part < 1e-9 && spec < 1e-8};
  }));

  add(run.run("characters-separate", 0.0, trials, [](Rng& rng, Index n) {
    const Segalgebra c = random_commutative(rng, n);
    const auto chars = characters(c);
    RealMatrix values(static_cast<Index>(chars.size()), c.dim());
    for (std::size_t k = 0; k < chars.size(); ++k) values.row(static_cast<Index>(k)) = chars[k].values().transpose();
    bool ok = null_space(values, 1e-8).cols() == 0;
    if (n >= 2) {
      const Segalgebra s = generate(n, {random_hermitian(rng, n), random_hermitian(rng, n)});
      try {
        characters(s);
        ok = false;
      } catch (const PreconditionError&) {
      }
      // dispersion-free states of a noncommutative beable algebra vanish on
      // its Lie products
      const AlgState w = AlgState::from_vector(random_vector(rng, n));
      const Segalgebra d = definite_set(w, Segalgebra::full(n));
      const BeableVerdict v = has_beable_status(d, w);
      for (const auto& comp : v.decomposition->components) {
        const HermitianOp a = random_element(rng, d), b = random_element(rng, d);
        ok = ok && std::abs(comp.state(lie(a, b))) < 1e-9;
      }
    }
    return TrialOutcome{0.0, ok, ok ? "" : "separation or vanishing check failed"};
  }));

  add(run.run("state-ideal", 1e-9, trials, [](Rng& rng, Index n) {
    const Segalgebra s = uniform_index(rng, 0, 1) ? Segalgebra::full(n) : random_block_algebra(rng, random_partition(rng, n));
    const AlgState w = random_state(rng, n);
    const IdealSubspace ideal = state_ideal(w, s);
    double r = ideal.space().span_distance(quadratic_kernel(w, s, false));
    const auto basis = ideal.space().basis();
    for (std::size_t i = 0; i < basis.size(); ++i) {
      r = std::max(r, std::abs(evaluate(w, basis[i])));
      for (std::size_t j = i; j < basis.size(); ++j) {
        const HermitianOp sum = basis[i] + basis[j];
        r = std::max(r, std::abs(evaluate(w, jordan(sum, sum))));
      }
    }
    bool ok = !ideal.space().member(HermitianOp::identity(n));
    // two-sided whenever the algebra is quasicommutative relative to it
    if (is_quasicommutative(s, ideal)) ok = ok && ideal.two_sided();
    const Segalgebra d = definite_set(w, s);
    ok = ok && state_ideal(w, d).two_sided();
    return TrialOutcome{r, ok};
  }));

  add(run.run("definite-set", 1e-9, trials, [](Rng& rng, Index n) {
    const Segalgebra s = uniform_index(rng, 0, 2) ? Segalgebra::full(n) : random_block_algebra(rng, random_partition(rng, n));
    const AlgState w = random_state(rng, n);
    const Segalgebra d = definite_set(w, s);
    double r = d.space().span_distance(quadratic_kernel(w, s, true));
    r = std::max(r, d.space().residual(HermitianOp::identity(n)));
    r = std::max(r, d.space().containment_residual(state_ideal(w, s).space()));
    if (w.vector()) {
      for (const HermitianOp& a : d.basis()) {
        const ComplexVector& v = *w.vector();
        const ComplexVector av = a.matrix() * v;
        r = std::max(r, (av - v * v.dot(av)).norm());
      }
    }
    return TrialOutcome{r};
  }));

  add(run.run("commutative-decomposition", 1e-9, trials, [](Rng& rng, Index n) {
    const Segalgebra c = random_commutative(rng, n);
    const AlgState w = random_state(rng, n);
    return TrialOutcome{mixture_error(decompose_state(w, c), c, w)};
  }));

  add(run.run("beable-oracle", 1e-9, trials, [](Rng& rng, Index n) {
    Segalgebra b = Segalgebra::full(n);
    AlgState w = random_state(rng, n);
    switch (uniform_index(rng, 0, 4)) {
    case 0: b = random_commutative(rng, n); break;
    case 1: b = definite_set(w, Segalgebra::full(n)); break;
    case 2: b = random_block_algebra(rng, random_partition(rng, n)); break;
    case 3: {
      const EigenFamily fam = random_family(rng, n, uniform_index(rng, 1, n));
      b = family_algebra(fam);
      if (uniform_index(rng, 0, 1)) w = AlgState::from_vector(fam.target());
      break;
    }
    default: break;
    }
    const BeableVerdict v = has_beable_status(b, w);
    const bool agree = v.has_status == brute_force_beable(w, b);
    const double r = v.decomposition ? mixture_error(*v.decomposition, b, w) : 0.0;
    return TrialOutcome{r, agree && (!v.has_status || v.decomposition.has_value()),
                        agree ? "" : "verdict disagrees with brute force"};
  }));

  add(run.run("definite-set-beable", 1e-9, trials, [](Rng& rng, Index n) {
    const AlgState w = random_state(rng, n);
    const Segalgebra d = definite_set(w, Segalgebra::full(n));
    const BeableVerdict v = has_beable_status(d, w);
    return TrialOutcome{v.decomposition ? mixture_error(*v.decomposition, d, w) : 1.0, v.has_status};
  }));

  add(run.run("intersection-beable", 1e-9, trials, [](Rng& rng, Index n) {
    const EigenFamily fam = random_family(rng, n, uniform_index(rng, 1, n));
    std::vector<AlgState> states;
    for (const ComplexVector& x : fam.vectors()) states.push_back(AlgState::from_vector(x));
    const AlgState w = AlgState::from_vector(fam.target());
    const Segalgebra b = intersect_definite_sets(states, w, Segalgebra::full(n));
    return TrialOutcome{b.space().span_distance(family_algebra(fam).space())};
  }));

  add(run.run("bub-definite", 1e-9, trials, [](Rng& rng, Index n) {
    const ComplexMatrix u = random_unitary(rng, n);
    RealVector d(n);
    for (Index k = 0; k < n; ++k) d(k) = static_cast<double>(uniform_index(rng, 0, 2));
    const HermitianOp r = HermitianOp::trusted(u * d.cast<Complex>().asDiagonal() * u.adjoint());
    const ComplexVector v = random_unit_vector(rng, n);
    const BubDefinite bub = bub_definite(v, r);
    const AlgState w = AlgState::from_vector(v);
    const BeableVerdict verdict = has_beable_status(bub.algebra, w);
    double res = verdict.decomposition ? mixture_error(*verdict.decomposition, bub.algebra, w) : 1.0;
    // eigenstate case
    const ComplexVector e = u.col(uniform_index(rng, 0, n - 1));
    const BubDefinite eig = bub_definite(e, r);
    res = std::max(res, eig.algebra.space().span_distance(definite_set(AlgState::from_vector(e), Segalgebra::full(n)).space()));
    // nondegenerate preferred observable with full support
    const BubDefinite nd = bub_definite(v, random_hermitian(rng, n));
    return TrialOutcome{res, verdict.has_status && is_commutative(nd.algebra)};
  }));

  add(run.run("maximality", 0.0, 1, [&](Rng& rng, Index n) {
    const EigenFamily fam = random_family(rng, n, uniform_index(rng, 1, n));
    const AlgState w = AlgState::from_vector(fam.target());
    const MaximalityCertificate cert = check_maximality(family_algebra(fam), w, trials, rng());
    bool ok = cert.maximal && cert.trials_run == (n == 1 ? 0 : trials);
    if (n >= 2) ok = ok && !check_maximality(Segalgebra::scalars(n), w, trials, rng()).maximal;
    return TrialOutcome{0.0, ok, ok ? "" : "maximality certificate wrong"};
  }));

  add(run.run("family-round-trip", 1e-9, trials, [](Rng& rng, Index n) {
    const EigenFamily fam = random_family(rng, n, uniform_index(rng, 1, n));
    const Segalgebra b = family_algebra(fam);
    const EigenFamily back = recover_family(b, fam.target());
    return TrialOutcome{family_algebra(back).space().span_distance(b.space()), back.size() == fam.size()};
  }));

  add(run.run("faithful-commutativity", 1e-9, trials, [](Rng& rng, Index n) {
    const AlgState w = AlgState::from_density(random_density(rng, n, n));
    const Segalgebra b = generate(n, {random_hermitian(rng, n), random_hermitian(rng, n)});
    const bool status = has_beable_status(b, w).has_status;
    const Segalgebra d = definite_set(w, Segalgebra::full(n));
    return TrialOutcome{d.space().span_distance(Segalgebra::scalars(n).space()), status == is_commutative(b)};
  }, 2));

  add(run.run("full-set-commutativity", 0.0, trials, [](Rng& rng, Index n) {
    std::vector<AlgState> states;
    for (Index k = 0; k < n * n; ++k) states.push_back(AlgState::from_vector(random_vector(rng, n)));
    const ForcedCommutativity com = forced_commutativity(random_commutative(rng, n), states);
    const ForcedCommutativity non = forced_commutativity(generate(n, {random_hermitian(rng, n), random_hermitian(rng, n)}), states);
    const bool ok = com.all_beable && com.commutative && !non.all_beable && !non.commutative;
    return TrialOutcome{0.0, ok, ok ? "" : "full set did not force commutativity"};
  }, 2));

  add(run.run_once("singlet", 1e-9, [](Rng&) {
    const SingletCheck c = singlet_check();
    return TrialOutcome{std::max(c.norm_error, c.reconstruction_error), c.has_status};
  }));

  return rep;
}

} // namespace beable
