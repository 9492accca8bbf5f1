#pragma once

#include <algorithm>
#include <vector>

#include "beable/spectral.hpp"

namespace beable {

/// A common eigenspace of a commuting family.
struct JointEigenspace {
  ComplexMatrix basis;  ///< orthonormal columns
  RealVector values;    ///< eigenvalue of each family member on the space
};

/// Simultaneous diagonalization by recursive eigenspace refinement: each
/// operator in turn is restricted to every current block, diagonalized
/// there, and the block split along its eigenvalue clusters. The cluster
/// gap is tol().cluster times the operator norm of the full operator.
///
/// Throws PreconditionError when some operator is not scalar on a final
/// block, i.e. the family does not commute.
inline std::vector<JointEigenspace> joint_eigenspaces(Index n, const std::vector<HermitianOp>& ops) {
  std::vector<ComplexMatrix> blocks{ComplexMatrix::Identity(n, n)};
  for (const HermitianOp& a : ops) {
    if (a.dim() != n) throw DimensionMismatch("joint_eigenspaces", n, a.dim());
    const double norm = op_norm(a);
    if (norm == 0.0) continue;
    const double gap = tol().cluster * norm;
    std::vector<ComplexMatrix> refined;
    for (const ComplexMatrix& q : blocks) {
      if (q.cols() == 1) {
        refined.push_back(q);
        continue;
      }
      ComplexMatrix m = q.adjoint() * a.matrix() * q;
      const SpectralDecomposition sd = decompose(HermitianOp::trusted(0.5 * (m + m.adjoint())));
      for (const EigenCluster& c : clusters(sd, gap)) refined.push_back(q * cluster_basis(sd, c));
    }
    blocks = std::move(refined);
  }

  std::vector<JointEigenspace> out;
  out.reserve(blocks.size());
  for (ComplexMatrix& q : blocks) {
    JointEigenspace js;
    js.values.resize(static_cast<Index>(ops.size()));
    for (std::size_t k = 0; k < ops.size(); ++k) {
      const ComplexMatrix m = q.adjoint() * ops[k].matrix() * q;
      const double value = m.trace().real() / static_cast<double>(q.cols());
      const double defect =
          (ops[k].matrix() * q - value * q).norm() / std::max(1.0, ops[k].frobenius());
      if (defect > tol().df) {
        throw PreconditionError("joint_eigenspaces: operators do not commute (defect " +
                                std::to_string(defect) + ")");
      }
      js.values(static_cast<Index>(k)) = value;
    }
    js.basis = std::move(q);
    out.push_back(std::move(js));
  }
  return out;
}

} // namespace beable
