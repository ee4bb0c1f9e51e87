#include <fstream>

#include "doctest.h"
#include "qtp/json_io.hpp"
#include "qtp/linalg.hpp"
#include "qtp/pure.hpp"
#include "test_support.hpp"

using namespace qtp;
using namespace qtp::json_io;

TEST_SUITE("json_io") {

TEST_CASE("matrices round trip bit-exactly") {
  const Matrix m = linalg::haar_random_unitary(3, 10).mat() * 0.7;
  const json j = matrix_to_json(m);
  CHECK(j["rows"] == 3);
  CHECK(j["cols"] == 3);
  const Matrix back = matrix_from_json(j);
  CHECK(max_abs_diff(m, back) == 0.0);

  // dump -> parse -> dump is byte stable (shortest round-trip decimals)
  const std::string once = j.dump();
  const std::string twice = json::parse(once).dump();
  CHECK(once == twice);
}

TEST_CASE("vectors use the single-column matrix format") {
  const Vector v = linalg::haar_random_state(4, 11).vec();
  const json j = vector_to_json(v);
  CHECK(j["cols"] == 1);
  CHECK(max_abs_diff(vector_from_json(j), v) == 0.0);
  // a genuine matrix is rejected as a vector
  json wide = matrix_to_json(Matrix::Identity(2, 2));
  CHECK_THROWS_AS(vector_from_json(wide), ParseError);
}

TEST_CASE("density operators keep their dims") {
  const auto chi = linalg::random_density(6, 12, {2, 3});
  const json j = density_to_json(chi);
  const auto back = density_from_json(j);
  CHECK(max_abs_diff(chi.mat(), back.mat()) == 0.0);
  CHECK(back.dims() == std::vector<int>{2, 3});
}

TEST_CASE("malformed documents raise ParseError") {
  json j = matrix_to_json(Matrix::Identity(2, 2));
  j.erase("im");
  CHECK_THROWS_AS(matrix_from_json(j), ParseError);

  json short_re = matrix_to_json(Matrix::Identity(2, 2));
  short_re["re"] = {1.0, 0.0, 0.0};
  CHECK_THROWS_AS(matrix_from_json(short_re), ParseError);

  json text = matrix_to_json(Matrix::Identity(2, 2));
  text["re"][0] = "one";
  CHECK_THROWS_AS(matrix_from_json(text), ParseError);

  json dens = density_to_json(linalg::random_density(4, 1, {2, 2}));
  dens["dims"] = {3, 2};
  CHECK_THROWS_AS(density_from_json(dens), ValidationError);
}

TEST_CASE("ensembles round trip") {
  states::EnsembleSpec spec;
  spec.members.push_back({0.4, linalg::haar_random_state(4, 2)});
  spec.members.push_back({0.6, linalg::haar_random_state(4, 3)});
  const auto back = ensemble_from_json(ensemble_to_json(spec));
  REQUIRE(back.members.size() == 2);
  CHECK(back.members[0].weight == 0.4);
  CHECK(max_abs_diff(back.members[1].state.vec(),
                     spec.members[1].state.vec()) == 0.0);
}

TEST_CASE("phase tables round trip") {
  const auto c = pure::PhaseTable::fourier(3, 2);
  const json j = phase_table_to_json(c);
  CHECK(j["n1"] == 3);
  CHECK(j["n2"] == 2);
  const auto back = phase_table_from_json(j);
  for (int s = 0; s < 3; ++s)
    for (int i = 0; i < 3; ++i)
      for (int t = 0; t < 2; ++t)
        CHECK(std::abs(back.at(s, i, t) - c.at(s, i, t)) == 0.0);
}

TEST_CASE("file helpers save and load") {
  testutil::TempFile f("roundtrip");
  const json j = matrix_to_json(linalg::haar_random_unitary(2, 5).mat());
  save_json_file(f.path(), j);
  CHECK(load_json_file(f.path()) == j);

  CHECK_THROWS_AS(load_json_file("/nonexistent/qtp.json"), ParseError);

  testutil::TempFile g("garbage");
  std::ofstream(g.path()) << "{not json";
  CHECK_THROWS_AS(load_json_file(g.path()), ParseError);
}

}  // TEST_SUITE
