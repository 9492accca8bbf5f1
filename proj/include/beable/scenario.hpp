#pragma once

#include <chrono>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "beable/json_io.hpp"
#include "beable/spin.hpp"
#include "beable/theorems.hpp"

namespace beable {

inline const std::vector<std::string>& scenario_commands() {
  static const std::vector<std::string> names{"generate", "check-beable", "bub-definite", "family",
                                              "maximal",  "decompose",    "verify-theorems"};
  return names;
}

/// Malformed JSON text, with the 1-based position of the problem.
class ParseError : public ValidationError {
public:
  ParseError(std::string_view source, std::size_t line, std::size_t column, std::string_view detail)
      : ValidationError(std::string(source) + ":" + std::to_string(line) + ":" + std::to_string(column) +
                        ": malformed JSON: " + std::string(detail)),
        line(line), column(column) {}
  std::size_t line, column;
};

inline Json parse_json_text(const std::string& text, std::string_view source) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t end = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string detail = e.what();
    if (const auto pos = detail.find("syntax error"); pos != std::string::npos) detail = detail.substr(pos);
    throw ParseError(source, line, column, detail);
  }
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

/// Applies {"sub": 1e-9, ...} on top of `base`.
inline Tolerances apply_tolerance_overrides(Tolerances base, const Json& j) {
  if (j.is_null()) return base;
  if (!j.is_object()) throw ValidationError("tol_overrides: expected an object");
  const std::map<std::string, double Tolerances::*> fields{
      {"herm", &Tolerances::herm},     {"eig", &Tolerances::eig},
      {"cluster", &Tolerances::cluster}, {"sub", &Tolerances::sub},
      {"accept", &Tolerances::accept}, {"df", &Tolerances::df},
      {"psd", &Tolerances::psd},       {"weight_floor", &Tolerances::weight_floor},
      {"proj_floor", &Tolerances::proj_floor}, {"fam", &Tolerances::fam}};
  for (const auto& [key, value] : j.items()) {
    const auto it = fields.find(key);
    if (it == fields.end()) throw ValidationError("tol_overrides: unknown tolerance \"" + key + "\"");
    const double v = detail::json_number(value, "tol_overrides");
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("tol_overrides: \"" + key + "\" must be positive");
    base.*(it->second) = v;
  }
  return base;
}

inline OrderedJson to_json(const Tolerances& t) {
  return {{"herm", t.herm}, {"eig", t.eig},   {"cluster", t.cluster},           {"sub", t.sub},
          {"accept", t.accept}, {"df", t.df}, {"psd", t.psd}, {"weight_floor", t.weight_floor},
          {"proj_floor", t.proj_floor}, {"fam", t.fam}};
}

/// A validated scenario file.
///
/// Operator expressions: a matrix literal, the name of another operator,
/// {"kron": [e, ...]}, {"square": e}, {"sum": [e, ...]}, {"scale": [c, e]},
/// {"identity": k}. `local_operators` may have any dimension and serve as
/// building blocks; every entry of `operators` must act on C^dim_h.
class Scenario {
public:
  static Scenario from_json(const Json& j) {
    try {
      return Scenario(j);
    } catch (const Json::exception& e) {
      throw ValidationError(std::string("scenario: ") + e.what());
    }
  }

  Index dim_h() const { return dim_h_; }
  const std::string& command() const { return command_; }
  void set_command(std::string c) {
    check_command(c);
    if (dim_h_ == 0 && c != "verify-theorems") throw ValidationError("scenario: command \"" + c + "\" needs dim_h");
    command_ = std::move(c);
  }
  const Json& params() const { return params_; }
  const Json& source() const { return source_; }
  const Json& tol_overrides() const { return tol_overrides_; }
  const std::optional<AlgState>& state() const { return state_; }

  const AlgState& require_state(std::string_view who) const {
    if (!state_) throw ValidationError(std::string(who) + ": scenario has no state");
    return *state_;
  }

  const ComplexVector& require_vector_state(std::string_view who) const {
    const AlgState& w = require_state(who);
    if (!w.vector()) throw ValidationError(std::string(who) + ": needs a vector state");
    return *w.vector();
  }

  /// Evaluates an operator expression.
  HermitianOp op(const Json& expr) const {
    std::set<std::string> active;
    return eval(expr, active);
  }

  /// Evaluates an expression that must act on C^dim_h.
  HermitianOp system_op(const Json& expr, std::string_view who) const {
    HermitianOp a = op(expr);
    if (a.dim() != dim_h_) throw DimensionMismatch(who, dim_h_, a.dim());
    return a;
  }

  /// Algebra selector: "full", "diagonal", "definite-set", or a list of
  /// seed expressions to generate from.
  Segalgebra algebra(const Json& sel, std::string_view who) const {
    if (sel.is_string()) {
      const std::string s = sel.get<std::string>();
      if (s == "full") return Segalgebra::full(dim_h_);
      if (s == "diagonal") return Segalgebra::diagonal(dim_h_);
      if (s == "definite-set") return definite_set(require_state(who), Segalgebra::full(dim_h_));
      throw ValidationError(std::string(who) + ": unknown algebra \"" + s + "\"");
    }
    if (sel.is_array()) {
      std::vector<HermitianOp> seeds;
      for (const Json& e : sel) seeds.push_back(system_op(e, who));
      return generate(dim_h_, seeds);
    }
    throw ValidationError(std::string(who) + ": algebra must be a name or a list of seeds");
  }

  EigenFamily family(const Json& list, std::string_view who) const {
    if (!list.is_array() || list.empty()) throw ValidationError(std::string(who) + ": family must be a non-empty list");
    std::vector<ComplexVector> vs;
    for (const Json& e : list) {
      ComplexVector v = vector_from_json(e);
      if (v.size() != dim_h_) throw DimensionMismatch(who, dim_h_, v.size());
      const double norm = v.norm();
      if (norm < 1e-12) throw ValidationError(std::string(who) + ": family member is numerically zero");
      vs.push_back(v / norm);
    }
    return EigenFamily(std::move(vs), require_vector_state(who));
  }

private:
  Scenario(const Json& j) : source_(j) {
    if (!j.is_object()) throw ValidationError("scenario: expected a JSON object");
    if (!j.contains("command")) throw ValidationError("scenario: missing \"command\"");
    command_ = j.at("command").get<std::string>();
    check_command(command_);
    params_ = j.value("params", Json::object());
    if (!params_.is_object()) throw ValidationError("scenario: \"params\" must be an object");
    tol_overrides_ = j.value("tol_overrides", Json());
    const ScopedTolerances scope(apply_tolerance_overrides(global_tolerances(), tol_overrides_));

    if (command_ == "verify-theorems" && !j.contains("dim_h")) return;
    if (!j.contains("dim_h")) throw ValidationError("scenario: missing \"dim_h\"");
    dim_h_ = j.at("dim_h").get<Index>();
    if (dim_h_ < 1) throw ValidationError("scenario: dim_h must be positive");
    if (j.contains("local_operators")) local_ = j.at("local_operators");
    if (j.contains("operators")) named_ = j.at("operators");
    if (!local_.is_null() && !local_.is_object()) throw ValidationError("scenario: \"local_operators\" must be an object");
    if (!named_.is_null() && !named_.is_object()) throw ValidationError("scenario: \"operators\" must be an object");
    if (named_.is_object()) {
      for (const auto& [name, expr] : named_.items()) {
        const HermitianOp a = op(Json(name));
        if (a.dim() != dim_h_) throw DimensionMismatch("operator \"" + name + "\"", dim_h_, a.dim());
      }
    }
    if (j.contains("state")) state_ = load_state(j.at("state"));
  }

  static void check_command(const std::string& c) {
    const auto& all = scenario_commands();
    if (std::find(all.begin(), all.end(), c) == all.end()) throw ValidationError("unknown command \"" + c + "\"");
  }

  AlgState load_state(const Json& s) const {
    if (s.is_object() && s.value("kind", "") == "spin1-singlet") {
      const Json names = s.value("spin", Json::array({"Sx", "Sy", "Sz"}));
      if (!names.is_array() || names.size() != 3) throw ValidationError("spin1-singlet: \"spin\" must name three operators");
      const ComplexVector psi = spin1_singlet(op(names[0]), op(names[1]), op(names[2]));
      if (psi.size() != dim_h_) throw DimensionMismatch("spin1-singlet", dim_h_, psi.size());
      return AlgState::from_vector(psi);
    }
    AlgState w = state_from_json(s);
    if (w.dim() != dim_h_) throw DimensionMismatch("state", dim_h_, w.dim());
    return w;
  }

  HermitianOp eval(const Json& e, std::set<std::string>& active) const {
    if (e.is_string()) {
      const std::string name = e.get<std::string>();
      const Json* def = nullptr;
      if (named_.is_object() && named_.contains(name)) def = &named_.at(name);
      else if (local_.is_object() && local_.contains(name)) def = &local_.at(name);
      if (!def) throw ValidationError("unknown operator \"" + name + "\"");
      if (!active.insert(name).second) throw ValidationError("operator \"" + name + "\" refers to itself");
      HermitianOp a = eval(*def, active);
      active.erase(name);
      return a;
    }
    if (e.is_array()) return hermitian_from_json(e);
    if (e.is_object() && e.size() == 1) {
      const auto& [key, arg] = *e.items().begin();
      if (key == "identity") {
        const Index k = arg.get<Index>();
        if (k < 1) throw ValidationError("identity: dimension must be positive");
        return HermitianOp::identity(k);
      }
      if (key == "square") {
        const HermitianOp a = eval(arg, active);
        return jordan(a, a);
      }
      if (key == "kron" || key == "sum") {
        if (!arg.is_array() || arg.empty()) throw ValidationError(key + ": expected a non-empty list");
        HermitianOp acc = eval(arg[0], active);
        for (std::size_t i = 1; i < arg.size(); ++i) {
          const HermitianOp b = eval(arg[i], active);
          acc = key == "kron" ? kron(acc, b) : acc + b;
        }
        return acc;
      }
      if (key == "scale") {
        if (!arg.is_array() || arg.size() != 2) throw ValidationError("scale: expected [c, expr]");
        return eval(arg[1], active) * detail::json_number(arg[0], "scale");
      }
      throw ValidationError("unknown operator expression \"" + key + "\"");
    }
    throw ValidationError("operator expression: expected a matrix literal, a name or a one-key object");
  }

  Json source_;
  Index dim_h_ = 0;
  std::string command_;
  Json params_;
  Json tol_overrides_;
  Json local_;
  Json named_;
  std::optional<AlgState> state_;
};

/// Report of one scenario run. `payload` is deterministic for fixed input,
/// seed and tolerances; timings are kept apart.
struct Report {
  OrderedJson payload;
  OrderedJson timings_ms = OrderedJson::object();
  bool suites_failed = false;

  OrderedJson full() const {
    OrderedJson out = payload;
    out["timings_ms"] = timings_ms;
    return out;
  }
};

struct RunOptions {
  std::uint64_t seed = 42;
  std::optional<double> tol;
  Index max_dim = 8;
  std::optional<std::vector<Index>> dims;
  std::optional<int> trials;
};

namespace detail {

class PhaseTimer {
public:
  explicit PhaseTimer(OrderedJson& sink) : sink_(sink) {}
  template <typename F>
  auto operator()(const std::string& phase, F f) {
    const auto start = std::chrono::steady_clock::now();
    auto out = f();
    sink_[phase] = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return out;
  }

private:
  OrderedJson& sink_;
};

inline OrderedJson run_generate(const Scenario& sc, OrderedJson& res) {
  const Json seeds = sc.params().value("seeds", Json::array());
  std::vector<HermitianOp> ops;
  for (const Json& e : seeds) ops.push_back(sc.system_op(e, "generate"));
  const Segalgebra s = generate(sc.dim_h(), ops);
  res["closure"] = closure_residual(s.space());
  res["commutativity"] = commutativity_residual(s);
  return {{"algebra_dim", s.dim()},
          {"commutative", is_commutative(s)},
          {"complexified_closure", complexified_closure_check(s)},
          {"algebra", to_json(s)}};
}

inline OrderedJson run_check_beable(const Scenario& sc, OrderedJson& res) {
  const Segalgebra b = sc.algebra(sc.params().value("algebra", Json("full")), "check-beable");
  const BeableVerdict v = has_beable_status(b, sc.require_state("check-beable"));
  res["quasicommutativity"] = v.quasicommutativity_residual;
  res["reconstruction"] = v.decomposition ? v.decomposition->reconstruction_error : 0.0;
  res["witness_dispersion"] = v.witness_dispersion;
  OrderedJson out{{"algebra_dim", b.dim()}, {"commutative", is_commutative(b)}};
  out["verdict"] = to_json(v);
  return out;
}

inline OrderedJson run_decompose(const Scenario& sc, OrderedJson& res) {
  const Segalgebra c = sc.algebra(sc.params().value("algebra", Json("diagonal")), "decompose");
  const MixtureDecomposition mix = decompose_state(sc.require_state("decompose"), c);
  res["reconstruction"] = mix.reconstruction_error;
  res["dropped_mass"] = mix.dropped_mass;
  return {{"algebra_dim", c.dim()}, {"characters", characters(c).size()}, {"decomposition", to_json(mix)}};
}

inline OrderedJson run_bub(const Scenario& sc, OrderedJson& res) {
  if (!sc.params().contains("preferred")) throw ValidationError("bub-definite: params.preferred is required");
  const HermitianOp r = sc.system_op(sc.params().at("preferred"), "bub-definite");
  const ComplexVector& v = sc.require_vector_state("bub-definite");
  const BubDefinite bub = bub_definite(v, r);
  const BeableVerdict verdict = has_beable_status(bub.algebra, sc.require_state("bub-definite"));
  OrderedJson members = OrderedJson::array();
  for (std::size_t k = 0; k < bub.family.size(); ++k) {
    members.push_back({{"eigenvalue", bub.eigenvalues[k]},
                       {"probability", bub.probabilities[k]},
                       {"vector", to_json(bub.family.vectors()[k])}});
  }
  res["reconstruction"] = verdict.decomposition ? verdict.decomposition->reconstruction_error : 0.0;
  res["quasicommutativity"] = verdict.quasicommutativity_residual;
  res["family_span"] = bub.family.span_residual();
  res["discarded_mass"] = bub.discarded_mass;
  OrderedJson out{{"family", std::move(members)},
                  {"algebra_dim", bub.algebra.dim()},
                  {"commutative", is_commutative(bub.algebra)},
                  {"has_status", verdict.has_status}};
  out["verdict"] = to_json(verdict);
  return out;
}

inline OrderedJson run_family(const Scenario& sc, OrderedJson& res) {
  const EigenFamily fam = sc.family(sc.params().value("family", Json()), "family");
  const Segalgebra b = family_algebra(fam);
  const BeableVerdict v = has_beable_status(b, sc.require_state("family"));
  const EigenFamily back = recover_family(b, fam.target());
  const double trip = family_algebra(back).space().span_distance(b.space());
  res["round_trip"] = trip;
  res["min_overlap"] = fam.min_overlap();
  res["span"] = fam.span_residual();
  res["reconstruction"] = v.decomposition ? v.decomposition->reconstruction_error : 0.0;
  return {{"algebra_dim", b.dim()},
          {"has_status", v.has_status},
          {"recovered_size", back.size()},
          {"round_trip", trip <= tol().sub},
          {"recovered", to_json(back)}};
}

inline OrderedJson run_maximal(const Scenario& sc, std::uint64_t seed, OrderedJson& res) {
  const Json& p = sc.params();
  const Segalgebra b = p.contains("family") ? family_algebra(sc.family(p.at("family"), "maximal"))
                                           : sc.algebra(p.value("algebra", Json("definite-set")), "maximal");
  const int trials = p.value("trials", 200);
  if (trials < 0) throw ValidationError("maximal: trials must be non-negative");
  const MaximalityCertificate cert = check_maximality(b, sc.require_state("maximal"), trials, seed);
  res["trials_run"] = cert.trials_run;
  OrderedJson out{{"algebra_dim", b.dim()}, {"maximal", cert.maximal}, {"trials_run", cert.trials_run}};
  if (cert.extension) {
    out["extension"] = to_json(*cert.extension);
    out["extended_dim"] = cert.extended_dim;
  }
  return out;
}

} // namespace detail

inline OrderedJson to_json(const TheoremReport& rep) {
  OrderedJson suites = OrderedJson::array();
  for (const SuiteResult& s : rep.suites) {
    OrderedJson j{{"name", s.name},       {"trials", s.trials},
                  {"passed", s.passed},   {"worst_residual", s.worst_residual},
                  {"tolerance", s.tolerance}, {"ok", s.ok()}};
    if (!s.first_failure.empty()) j["first_failure"] = s.first_failure;
    suites.push_back(std::move(j));
  }
  return {{"all_passed", rep.all_passed()}, {"suites", std::move(suites)}};
}

/// Runs a validated scenario under the tolerances it requests (and the
/// global override in `opt`). Throws the library's errors unchanged.
inline Report run_scenario(const Scenario& sc, const RunOptions& opt) {
  Tolerances t = apply_tolerance_overrides(Tolerances{}, sc.tol_overrides());
  if (opt.tol) {
    if (!(*opt.tol > 0.0)) throw ValidationError("--tol must be positive");
    t.sub = t.df = t.fam = *opt.tol;
  }
  ScopedTolerances scope(t);

  Report rep;
  OrderedJson residuals = OrderedJson::object();
  detail::PhaseTimer timed(rep.timings_ms);
  const std::string& cmd = sc.command();
  OrderedJson results = timed("run", [&]() -> OrderedJson {
    if (cmd == "generate") return detail::run_generate(sc, residuals);
    if (cmd == "check-beable") return detail::run_check_beable(sc, residuals);
    if (cmd == "decompose") return detail::run_decompose(sc, residuals);
    if (cmd == "bub-definite") return detail::run_bub(sc, residuals);
    if (cmd == "family") return detail::run_family(sc, residuals);
    if (cmd == "maximal") return detail::run_maximal(sc, opt.seed, residuals);
    std::vector<Index> dims = opt.dims.value_or(sc.params().value("dims", std::vector<Index>{2, 3, 4}));
    const int trials = opt.trials.value_or(sc.params().value("trials", 20));
    for (Index n : dims) {
      if (n > opt.max_dim) {
        throw ValidationError("verify-theorems: dimension " + std::to_string(n) + " exceeds --max-dim " +
                              std::to_string(opt.max_dim));
      }
    }
    const TheoremReport tr = verify_theorems(dims, trials, opt.seed);
    rep.suites_failed = !tr.all_passed();
    double worst = 0.0;
    for (const SuiteResult& s : tr.suites) worst = std::max(worst, s.worst_residual);
    residuals["worst"] = worst;
    OrderedJson out = to_json(tr);
    out["dims"] = dims;
    out["trials"] = trials;
    return out;
  });

  rep.payload = OrderedJson{{"schema", "beable-report/1"},
                            {"command", cmd},
                            {"seed", opt.seed},
                            {"tolerances", to_json(t)},
                            {"scenario", sc.source()},
                            {"results", std::move(results)},
                            {"residuals", std::move(residuals)}};
  return rep;
}

} // namespace beable
