#include "beable/scenario.hpp"
#include "test_support.hpp"

using namespace beable;
using namespace beable::testing;

TEST_CASE("matrix and vector literals round trip", "[io]") {
  Rng rng = make_rng(5);
  for (int t = 0; t < 10; ++t) {
    const Index n = uniform_index(rng, 1, 5);
    const HermitianOp a = random_hermitian(rng, n);
    const Json j = Json::parse(to_json(a).dump());
    CHECK(dist(hermitian_from_json(j), a) == 0.0);

    const ComplexVector v = random_vector(rng, n);
    CHECK((vector_from_json(Json::parse(to_json(v).dump())) - v).norm() == 0.0);
  }
}

TEST_CASE("state literals", "[io]") {
  Rng rng = make_rng(6);
  const ComplexVector v = random_unit_vector(rng, 3);
  const AlgState pure = state_from_json(Json::parse(to_json(AlgState::from_vector(v)).dump()));
  REQUIRE(pure.vector());
  CHECK((*pure.vector() - v).norm() < 1e-15);

  const AlgState mixed = AlgState::from_density(random_density(rng, 3, 2));
  const AlgState back = state_from_json(Json::parse(to_json(mixed).dump()));
  CHECK_FALSE(back.vector());
  CHECK((back.rho() - mixed.rho()).norm() < 1e-15);

  CHECK_THROWS_AS(state_from_json(Json{{"kind", "thermal"}}), ValidationError);
  CHECK_THROWS_AS(state_from_json(Json{{"kind", "vector"}}), ValidationError);
  CHECK_THROWS_AS(state_from_json(Json::array()), ValidationError);
  // not unit trace
  CHECK_THROWS_AS(state_from_json(Json::parse(R"({"kind":"density","rho":[[[2,0]]]})")), ValidationError);
}

TEST_CASE("malformed literals are rejected", "[io]") {
  CHECK_THROWS_AS(matrix_from_json(Json::array()), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[[1,0],[0,0]],[[0,0]]]")), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse("[[[1,0,0]]]")), ValidationError);
  CHECK_THROWS_AS(matrix_from_json(Json::parse(R"([[["1",0]]])")), ValidationError);
  CHECK_THROWS_AS(vector_from_json(Json::parse("[1, 2]")), ValidationError);
  // off-diagonal entries not conjugate
  CHECK_THROWS_AS(hermitian_from_json(Json::parse("[[[0,0],[0,1]],[[0,1],[0,0]]]")), ValidationError);
}

TEST_CASE("segalgebra literal is re-validated", "[io]") {
  Rng rng = make_rng(7);
  const Segalgebra s = generate(3, {random_hermitian(rng, 3)});
  const Segalgebra back = segalgebra_from_json(Json::parse(to_json(s).dump()));
  CHECK(back.space().span_distance(s.space()) < 1e-12);

  // span{I, sigma_x, sigma_y} is not closed
  Json open{{"dim_h", 2},
            {"basis", {to_json(HermitianOp::identity(2)), to_json(sigma_x()), to_json(sigma_y())}}};
  CHECK_THROWS_AS(segalgebra_from_json(Json::parse(open.dump())), ValidationError);
  Json wrong_dim{{"dim_h", 3}, {"basis", {to_json(HermitianOp::identity(2))}}};
  CHECK_THROWS_AS(segalgebra_from_json(Json::parse(wrong_dim.dump())), DimensionMismatch);
  CHECK_THROWS_AS(segalgebra_from_json(Json{{"basis", Json::array()}}), ValidationError);
}

TEST_CASE("verdict JSON fields", "[io]") {
  const AlgState up = AlgState::from_vector(basis_vector(2, 0));
  const OrderedJson pos = to_json(has_beable_status(Segalgebra::diagonal(2), up));
  CHECK(pos["has_status"] == true);
  CHECK(pos.contains("decomposition"));
  CHECK(pos.contains("reconstruction_error"));
  CHECK_FALSE(pos.contains("witness"));
  REQUIRE(pos["decomposition"].size() == 1);
  CHECK(pos["decomposition"][0]["weight"].get<double>() == Catch::Approx(1.0));

  ComplexMatrix rho(2, 2);
  rho << 0.7, 0, 0, 0.3;
  const OrderedJson neg = to_json(has_beable_status(Segalgebra::full(2), AlgState::from_density(rho)));
  CHECK(neg["has_status"] == false);
  CHECK(neg["ideal_dim"] == 0);
  CHECK(neg.contains("witness"));
  CHECK(neg["witness_dispersion"].get<double>() > 1e-3);
  CHECK_FALSE(neg.contains("decomposition"));
}

TEST_CASE("parse errors carry line and column", "[io]") {
  const std::string text = "{\n  \"command\": \"generate\",\n  \"dim_h\": 2,\n  \"params\": {\"seeds\": [1, ]}\n}\n";
  try {
    parse_json_text(text, "bad.json");
    FAIL("no parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 4);
    CHECK(e.column == 27);
    CHECK(std::string(e.what()).rfind("bad.json:4:27:", 0) == 0);
  }
  CHECK_THROWS_AS(parse_json_text("", "empty.json"), ParseError);
  CHECK_THROWS_AS(load_json_file("/nonexistent/scenario.json"), ValidationError);
}

TEST_CASE("tolerance overrides", "[io]") {
  const Tolerances base;
  const Tolerances t = apply_tolerance_overrides(base, Json{{"sub", 1e-7}, {"fam", 1e-6}});
  CHECK(t.sub == 1e-7);
  CHECK(t.fam == 1e-6);
  CHECK(t.df == base.df);
  CHECK(apply_tolerance_overrides(base, Json()).sub == base.sub);
  CHECK_THROWS_AS(apply_tolerance_overrides(base, Json{{"subb", 1e-7}}), ValidationError);
  CHECK_THROWS_AS(apply_tolerance_overrides(base, Json{{"sub", -1.0}}), ValidationError);
  CHECK_THROWS_AS(apply_tolerance_overrides(base, Json{{"sub", "small"}}), ValidationError);
  CHECK_THROWS_AS(apply_tolerance_overrides(base, Json::array()), ValidationError);

  const OrderedJson j = to_json(t);
  CHECK(j["sub"] == 1e-7);
  CHECK(j.size() == 10);
}
