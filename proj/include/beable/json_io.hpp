#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "beable/beables.hpp"
#include "beable/states.hpp"

namespace beable {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

namespace detail {

inline double json_number(const Json& j, std::string_view what) {
  if (!j.is_number()) throw ValidationError(std::string(what) + ": expected a number");
  return j.get<double>();
}

inline Complex json_complex(const Json& j, std::string_view what) {
  if (!j.is_array() || j.size() != 2) throw ValidationError(std::string(what) + ": expected an [re, im] pair");
  return {json_number(j[0], what), json_number(j[1], what)};
}

} // namespace detail

/// Row-major nested arrays of [re, im] pairs.
inline OrderedJson to_json(const ComplexMatrix& m) {
  OrderedJson rows = OrderedJson::array();
  for (Index i = 0; i < m.rows(); ++i) {
    OrderedJson row = OrderedJson::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline OrderedJson to_json(const HermitianOp& a) { return to_json(a.matrix()); }

inline OrderedJson to_json(const ComplexVector& v) {
  OrderedJson out = OrderedJson::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

inline OrderedJson to_json(const RealVector& v) {
  OrderedJson out = OrderedJson::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

inline ComplexMatrix matrix_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("matrix literal: expected a non-empty array of rows");
  const Index n = static_cast<Index>(j.size());
  ComplexMatrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != n) {
      throw ValidationError("matrix literal: row " + std::to_string(i) + " does not have " + std::to_string(n) +
                            " entries");
    }
    for (Index k = 0; k < n; ++k) m(i, k) = detail::json_complex(row[static_cast<std::size_t>(k)], "matrix literal");
  }
  return m;
}

inline HermitianOp hermitian_from_json(const Json& j) { return HermitianOp(matrix_from_json(j)); }

inline ComplexVector vector_from_json(const Json& j) {
  if (!j.is_array() || j.empty()) throw ValidationError("vector literal: expected a non-empty array");
  ComplexVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = detail::json_complex(j[i], "vector literal");
  return v;
}

/// {"kind":"vector","v":[...]} or {"kind":"density","rho":[[...]]}.
inline AlgState state_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ValidationError("state literal: expected an object with \"kind\"");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "vector") {
    if (!j.contains("v")) throw ValidationError("state literal: vector state needs \"v\"");
    return AlgState::from_vector(vector_from_json(j.at("v")));
  }
  if (kind == "density") {
    if (!j.contains("rho")) throw ValidationError("state literal: density state needs \"rho\"");
    return AlgState::from_density(matrix_from_json(j.at("rho")));
  }
  throw ValidationError("state literal: unknown kind \"" + kind + "\"");
}

inline OrderedJson to_json(const AlgState& w) {
  if (w.vector()) return {{"kind", "vector"}, {"v", to_json(*w.vector())}};
  return {{"kind", "density"}, {"rho", to_json(w.rho())}};
}

inline OrderedJson to_json(const Segalgebra& s) {
  OrderedJson basis = OrderedJson::array();
  for (const HermitianOp& b : s.basis()) basis.push_back(to_json(b));
  return {{"dim_h", s.dim_h()}, {"basis", std::move(basis)}};
}

/// Re-validates the basis as a Segalgebra.
inline Segalgebra segalgebra_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("dim_h") || !j.contains("basis")) {
    throw ValidationError("segalgebra: expected {dim_h, basis}");
  }
  const Index n = j.at("dim_h").get<Index>();
  std::vector<HermitianOp> basis;
  for (const Json& b : j.at("basis")) {
    basis.push_back(hermitian_from_json(b));
    if (basis.back().dim() != n) throw DimensionMismatch("segalgebra basis", n, basis.back().dim());
  }
  return Segalgebra::from_basis(n, basis);
}

/// Components are labeled by their value vectors on the algebra basis.
inline OrderedJson to_json(const MixtureDecomposition& mix) {
  OrderedJson comps = OrderedJson::array();
  for (const auto& c : mix.components) comps.push_back({{"weight", c.weight}, {"values", to_json(c.state.values())}});
  return comps;
}

inline OrderedJson to_json(const BeableVerdict& v) {
  OrderedJson out{{"has_status", v.has_status},
                  {"ideal_dim", v.ideal.dim()},
                  {"quasicommutativity_residual", v.quasicommutativity_residual}};
  if (v.witness) {
    out["witness"] = to_json(*v.witness);
    out["witness_dispersion"] = v.witness_dispersion;
  }
  if (v.decomposition) {
    out["decomposition"] = to_json(*v.decomposition);
    out["reconstruction_error"] = v.decomposition->reconstruction_error;
    out["dropped_mass"] = v.decomposition->dropped_mass;
  }
  return out;
}

inline OrderedJson to_json(const EigenFamily& fam) {
  OrderedJson vs = OrderedJson::array();
  for (const ComplexVector& x : fam.vectors()) vs.push_back(to_json(x));
  return {{"vectors", std::move(vs)}, {"target", to_json(fam.target())}};
}

} // namespace beable
