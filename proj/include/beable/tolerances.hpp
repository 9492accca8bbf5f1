#pragma once

namespace beable {

/// Numerical thresholds used across the library. All are relative to
/// max(1, norm) of the quantity being tested unless stated otherwise.
struct Tolerances {
  double herm = 1e-9;         ///< Hermiticity of loaded matrices
  double eig = 1e-9;          ///< spectral decomposition reconstruction
  double cluster = 1e-8;      ///< eigenvalue gap (times op norm) merged into one cluster
  double sub = 1e-9;          ///< subspace membership residual
  double accept = 1e-8;       ///< new direction accepted during closure / rank decisions
  double df = 1e-8;           ///< dispersion-free checks and character deduplication
  double psd = 1e-10;         ///< density matrix positivity, trace and support
  double weight_floor = 1e-12;
  double proj_floor = 1e-12;
  double fam = 1e-8;          ///< eigenvector family orthonormality decisions
};

/// Process-wide tolerance settings. Set them before starting work; the
/// library only ever reads them.
inline Tolerances& global_tolerances() {
  static Tolerances t;
  return t;
}

inline const Tolerances& tol() { return global_tolerances(); }

/// Overrides the global tolerances for the lifetime of the object.
class ScopedTolerances {
public:
  explicit ScopedTolerances(const Tolerances& t) : saved_(global_tolerances()) {
    global_tolerances() = t;
  }
  ~ScopedTolerances() { global_tolerances() = saved_; }
  ScopedTolerances(const ScopedTolerances&) = delete;
  ScopedTolerances& operator=(const ScopedTolerances&) = delete;

private:
  Tolerances saved_;
};

} // namespace beable
