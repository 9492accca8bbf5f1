#include <cmath>

#include "beable/scenario.hpp"
#include "test_support.hpp"

using namespace beable;
using namespace beable::testing;
using Catch::Matchers::WithinAbs;

namespace {

Scenario corpus(const std::string& name) {
  return Scenario::from_json(load_json_file(std::string(BEABLE_CORPUS_DIR) + "/" + name + ".json"));
}

OrderedJson run(const std::string& name) { return run_scenario(corpus(name), RunOptions{}).payload["results"]; }

Json small_scenario() {
  return Json::parse(R"({
    "command": "generate",
    "dim_h": 4,
    "local_operators": {
      "x": [[[0,0],[1,0]],[[1,0],[0,0]]],
      "z": [[[1,0],[0,0]],[[0,0],[-1,0]]]
    },
    "operators": {
      "xz": {"kron": ["x", "z"]},
      "mix": {"sum": [{"scale": [2, "xz"]}, {"identity": 4}]}
    },
    "params": {"seeds": ["mix"]}
  })");
}

} // namespace

TEST_CASE("corpus: pauli", "[scenario]") {
  const OrderedJson r = run("pauli");
  CHECK(r["algebra_dim"] == 4);
  CHECK(r["commutative"] == false);
  CHECK(r["complexified_closure"] == true);
}

TEST_CASE("corpus: singlet", "[scenario]") {
  const Scenario sc = corpus("singlet");
  REQUIRE(sc.dim_h() == 9);
  const ComplexVector& psi = sc.require_vector_state("test");
  CHECK_THAT(psi.norm(), WithinAbs(1.0, 1e-12));
  const double r = 1.0 / std::sqrt(3.0);
  for (Index k = 0; k < 9; ++k) {
    const double expected = (k == 2 || k == 6) ? r : (k == 4 ? -r : 0.0);
    CHECK(std::abs(psi(k) - Complex(expected, 0.0)) < 1e-12);
  }

  const OrderedJson res = run_scenario(sc, RunOptions{}).payload["results"];
  CHECK(res["has_status"] == true);
  CHECK(res["algebra_dim"] == 51);
  CHECK(res["verdict"]["ideal_dim"] == 49);
  CHECK(res["verdict"]["reconstruction_error"].get<double>() < 1e-9);
  REQUIRE(res["family"].size() == 2);
  std::vector<double> probs;
  for (const auto& m : res["family"]) probs.push_back(m["probability"].get<double>());
  std::sort(probs.begin(), probs.end());
  CHECK_THAT(probs[0], WithinAbs(1.0 / 3.0, 1e-12));
  CHECK_THAT(probs[1], WithinAbs(2.0 / 3.0, 1e-12));
}

TEST_CASE("corpus: faithful", "[scenario]") {
  const OrderedJson r = run("faithful");
  CHECK(r["verdict"]["has_status"] == false);
  CHECK(r["verdict"]["ideal_dim"] == 0);
  CHECK(r["verdict"].contains("witness"));
}

TEST_CASE("corpus: bub eigenstate", "[scenario]") {
  const Scenario sc = corpus("bub-eigenstate");
  const OrderedJson r = run_scenario(sc, RunOptions{}).payload["results"];
  CHECK(r["algebra_dim"] == 5);
  CHECK(r["has_status"] == true);
  const Segalgebra d = definite_set(sc.require_state("test"), Segalgebra::full(3));
  CHECK(d.dim() == 5);
}

TEST_CASE("corpus: maximal family", "[scenario]") {
  const OrderedJson r = run("maximal-family");
  CHECK(r["maximal"] == true);
  CHECK(r["trials_run"] == 200);

  Scenario sc = corpus("maximal-family");
  sc.set_command("family");
  const OrderedJson f = run_scenario(sc, RunOptions{}).payload["results"];
  CHECK(f["round_trip"] == true);
  CHECK(f["recovered_size"] == 2);
}

TEST_CASE("corpus: diagonal bohm", "[scenario]") {
  const OrderedJson r = run("diagonal-bohm");
  CHECK(r["verdict"]["has_status"] == true);
  REQUIRE(r["verdict"]["decomposition"].size() == 4);
  for (const auto& c : r["verdict"]["decomposition"]) CHECK_THAT(c["weight"].get<double>(), WithinAbs(0.25, 1e-12));
}

TEST_CASE("payloads are deterministic", "[scenario]") {
  for (const char* name : {"pauli", "singlet", "maximal-family"}) {
    const Scenario sc = corpus(name);
    CHECK(run_scenario(sc, RunOptions{}).payload.dump() == run_scenario(sc, RunOptions{}).payload.dump());
  }
}

TEST_CASE("verify-theorems scenario", "[scenario]") {
  const Scenario sc = Scenario::from_json(Json{{"command", "verify-theorems"}});
  RunOptions opt;
  opt.dims = std::vector<Index>{2};
  opt.trials = 1;
  opt.seed = 0;
  const Report rep = run_scenario(sc, opt);
  CHECK_FALSE(rep.suites_failed);
  CHECK(rep.payload["results"]["all_passed"] == true);
  CHECK(rep.payload["schema"] == "beable-report/1");
  CHECK(rep.payload["seed"] == 0);

  opt.dims = std::vector<Index>{9};
  CHECK_THROWS_AS(run_scenario(sc, opt), ValidationError);
  opt.dims = std::vector<Index>{2};
  opt.tol = -1.0;
  CHECK_THROWS_AS(run_scenario(sc, opt), ValidationError);
}

TEST_CASE("operator expressions", "[scenario]") {
  const Scenario sc = Scenario::from_json(small_scenario());
  const HermitianOp xz = sc.op(Json("xz"));
  CHECK(dist(xz, kron(sigma_x(), sigma_z())) == 0.0);
  const HermitianOp mix = sc.op(Json("mix"));
  CHECK(dist(mix, xz * 2.0 + HermitianOp::identity(4)) < 1e-15);
  CHECK(dist(sc.op(Json{{"square", "x"}}), HermitianOp::identity(2)) < 1e-15);
  CHECK_THROWS_AS(sc.system_op(Json("x"), "test"), DimensionMismatch);
  CHECK_THROWS_AS(sc.op(Json("nope")), ValidationError);
  CHECK_THROWS_AS(sc.op(Json{{"cube", "x"}}), ValidationError);
  CHECK_THROWS_AS(sc.op(Json{{"kron", Json::array()}}), ValidationError);
  CHECK_THROWS_AS(sc.op(Json{{"scale", {"two", "x"}}}), ValidationError);

  const OrderedJson r = run_scenario(sc, RunOptions{}).payload["results"];
  CHECK(r["algebra_dim"] == 2);
  CHECK(r["commutative"] == true);
}

TEST_CASE("scenario validation", "[scenario]") {
  Json j = small_scenario();
  j["operators"]["loop"] = {{"sum", {"loop", "xz"}}};
  CHECK_THROWS_AS(Scenario::from_json(j), ValidationError);

  j = small_scenario();
  j["operators"]["small"] = "x";
  CHECK_THROWS_AS(Scenario::from_json(j), DimensionMismatch);

  j = small_scenario();
  j["command"] = "explode";
  CHECK_THROWS_AS(Scenario::from_json(j), ValidationError);

  j = small_scenario();
  j.erase("dim_h");
  CHECK_THROWS_AS(Scenario::from_json(j), ValidationError);

  j = small_scenario();
  j["dim_h"] = "four";
  CHECK_THROWS_AS(Scenario::from_json(j), ValidationError);

  j = small_scenario();
  j["state"] = {{"kind", "vector"}, {"v", {{1, 0}, {0, 0}}}};
  CHECK_THROWS_AS(Scenario::from_json(j), DimensionMismatch);

  j = small_scenario();
  j["tol_overrides"] = {{"bogus", 1.0}};
  CHECK_THROWS_AS(Scenario::from_json(j), ValidationError);

  CHECK_THROWS_AS(Scenario::from_json(Json::array()), ValidationError);
  Scenario sc = Scenario::from_json(Json{{"command", "verify-theorems"}});
  CHECK_THROWS_AS(sc.set_command("generate"), ValidationError);
}

TEST_CASE("spin-1 singlet needs spin matrices", "[scenario]") {
  Json j = load_json_file(std::string(BEABLE_CORPUS_DIR) + "/singlet.json");
  REQUIRE_NOTHROW(Scenario::from_json(j));

  // swapping two components breaks [Sx,Sy] = i Sz
  Json swapped = j;
  swapped["state"]["spin"] = {"Sy", "Sx", "Sz"};
  CHECK_THROWS_AS(Scenario::from_json(swapped), ValidationError);

  Json scaled = j;
  scaled["local_operators"]["Sz"] = {{"scale", {2, scaled["local_operators"]["Sz"]}}};
  CHECK_THROWS_AS(Scenario::from_json(scaled), ValidationError);

  const auto [sx, sy, sz] = spin1_matrices();
  CHECK(spin_relation_residual(sx, sy, sz) < 1e-15);
  CHECK_THROWS_AS(zero_eigenvector(HermitianOp::identity(3)), ValidationError);
  CHECK_THROWS_AS(spin1_singlet(sigma_x() * 0.5, sigma_y() * 0.5, sigma_z() * 0.5), DimensionMismatch);
}

TEST_CASE("tolerance overrides apply to the run", "[scenario]") {
  Json j = small_scenario();
  j["tol_overrides"] = {{"sub", 1e-7}};
  const Scenario sc = Scenario::from_json(j);
  const OrderedJson p = run_scenario(sc, RunOptions{}).payload;
  CHECK(p["tolerances"]["sub"] == 1e-7);
  RunOptions opt;
  opt.tol = 1e-6;
  const OrderedJson q = run_scenario(sc, opt).payload;
  CHECK(q["tolerances"]["sub"] == 1e-6);
  CHECK(q["tolerances"]["df"] == 1e-6);
  CHECK(q["tolerances"]["fam"] == 1e-6);
  CHECK(global_tolerances().sub == Tolerances{}.sub);
}
