#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "studentrisk/dataset.hpp"
#include "studentrisk/error.hpp"
#include "support/builders.hpp"

using namespace studentrisk;
using testsupport::make_schema;

namespace {

Schema two_predictor_schema() { return make_schema(2, 4); }

}  // namespace

TEST_CASE("schema validation rejects structural violations") {
  SUBCASE("no variables") {
    Schema s;
    CHECK_THROWS_AS(s.validate(), InputError);
  }
  SUBCASE("duplicate names") {
    Schema s = two_predictor_schema();
    s.variables[1].name = "x1";
    CHECK_THROWS_AS(s.validate(), InputError);
  }
  SUBCASE("missing outcome") {
    Schema s = two_predictor_schema();
    s.variables.pop_back();
    CHECK_THROWS_AS(s.validate(), InputError);
  }
  SUBCASE("two outcomes") {
    Schema s = two_predictor_schema();
    s.variables[0].role = VarRole::Outcome;
    s.variables[0].kind = VarKind::Binary;
    s.variables[0].levels = {0, 1};
    s.variables[0].missing_allowed = false;
    CHECK_THROWS_AS(s.validate(), InputError);
  }
  SUBCASE("outcome with wrong levels") {
    Schema s = two_predictor_schema();
    s.variables.back().levels = {1, 2};
    CHECK_THROWS_AS(s.validate(), InputError);
  }
  SUBCASE("outcome allowing missing") {
    Schema s = two_predictor_schema();
    s.variables.back().missing_allowed = true;
    CHECK_THROWS_AS(s.validate(), InputError);
  }
  SUBCASE("binary with three levels") {
    Schema s = two_predictor_schema();
    s.variables[0].kind = VarKind::Binary;
    s.variables[0].levels = {1, 2, 3};
    CHECK_THROWS_AS(s.validate(), InputError);
  }
  SUBCASE("non-increasing levels") {
    Schema s = two_predictor_schema();
    s.variables[0].levels = {1, 3, 2, 4};
    CHECK_THROWS_AS(s.validate(), InputError);
  }
}

TEST_CASE("schema JSON round-trips") {
  Schema s = two_predictor_schema();
  s.variables[0].kind = VarKind::ContinuousRaw;
  s.variables[0].levels.clear();
  Schema back = Schema::from_json(s.to_json_string());
  REQUIRE(back.variables.size() == s.variables.size());
  for (std::size_t i = 0; i < s.variables.size(); ++i) {
    CHECK(back.variables[i].name == s.variables[i].name);
    CHECK(back.variables[i].kind == s.variables[i].kind);
    CHECK(back.variables[i].levels == s.variables[i].levels);
    CHECK(back.variables[i].role == s.variables[i].role);
    CHECK(back.variables[i].missing_allowed == s.variables[i].missing_allowed);
  }
}

TEST_CASE("CSV parsing enforces the schema") {
  Schema s = two_predictor_schema();
  SUBCASE("well-formed input round-trips") {
    std::istringstream csv("x1,x2,success\n1,4,1\nNA,2,0\n3,NA,1\n");
    Dataset d = Dataset::from_csv(csv, s);
    REQUIRE(d.n_rows() == 3);
    CHECK(d.cell(0, 0) == Cell(1.0));
    CHECK_FALSE(d.cell(1, 0).has_value());
    CHECK(d.missing_count() == 2);
    CHECK(d.to_csv_string() == "x1,x2,success\n1,4,1\nNA,2,0\n3,NA,1\n");
  }
  SUBCASE("header must match schema order") {
    std::istringstream csv("x2,x1,success\n1,1,0\n");
    CHECK_THROWS_AS(Dataset::from_csv(csv, s), InputError);
  }
  SUBCASE("off-level value names row and column") {
    std::istringstream csv("x1,x2,success\n1,2,1\n9,2,0\n");
    try {
      Dataset::from_csv(csv, s);
      FAIL("expected a parse error");
    } catch (const InputError& e) {
      const std::string what = e.what();
      CHECK(what.find("x1") != std::string::npos);
      CHECK(what.find('2') != std::string::npos);
    }
  }
  SUBCASE("missing outcome cell is rejected") {
    std::istringstream csv("x1,x2,success\n1,2,NA\n");
    CHECK_THROWS_AS(Dataset::from_csv(csv, s), InputError);
  }
  SUBCASE("ragged row is rejected") {
    std::istringstream csv("x1,x2,success\n1,2\n");
    CHECK_THROWS_AS(Dataset::from_csv(csv, s), InputError);
  }
  SUBCASE("empty body is rejected") {
    std::istringstream csv("x1,x2,success\n");
    CHECK_THROWS_AS(Dataset::from_csv(csv, s), InputError);
  }
}

TEST_CASE("set_cell validates against the column spec") {
  Dataset d(two_predictor_schema(), 2);
  d.set_cell(0, 0, 3.0);
  CHECK(d.cell(0, 0) == Cell(3.0));
  CHECK_THROWS_AS(d.set_cell(0, 0, 7.0), InputError);
  CHECK_THROWS_AS(d.set_cell(0, 2, std::nullopt), InputError);
}

TEST_CASE("subset copies the requested rows in order") {
  Schema s = two_predictor_schema();
  std::istringstream csv("x1,x2,success\n1,1,0\n2,2,1\n3,3,0\n4,4,1\n");
  Dataset d = Dataset::from_csv(csv, s);
  Dataset sub = d.subset({1, 3});
  REQUIRE(sub.n_rows() == 2);
  CHECK(sub.cell(0, 0) == Cell(2.0));
  CHECK(sub.cell(1, 0) == Cell(4.0));
  CHECK(sub.outcome_labels() == std::vector<int>{1, 1});
}

TEST_CASE("values requires observed cells") {
  Schema s = two_predictor_schema();
  std::istringstream csv("x1,x2,success\n1,NA,0\n2,2,1\n");
  Dataset d = Dataset::from_csv(csv, s);
  CHECK_THROWS_AS(d.values({0, 1}), InputError);
  Matrix m = d.values({0});
  REQUIRE(m.rows == 2);
  CHECK(m.at(1, 0) == 2.0);
}

TEST_CASE("normalize z-scores with sample stddev") {
  Schema s = two_predictor_schema();
  std::istringstream csv("x1,x2,success\n1,2,0\n2,2,1\n3,2,0\n");
  Dataset d = Dataset::from_csv(csv, s);
  auto [m, params] = normalize(d, {0, 1});
  CHECK(m.at(0, 0) == doctest::Approx(-1.0));
  CHECK(m.at(1, 0) == doctest::Approx(0.0));
  CHECK(m.at(2, 0) == doctest::Approx(1.0));
  CHECK(params.mean[0] == doctest::Approx(2.0));
  CHECK(params.stddev[0] == doctest::Approx(1.0));
  SUBCASE("constant column maps to zero and is flagged") {
    CHECK(params.constant[1]);
    CHECK(m.at(0, 1) == 0.0);
    CHECK(m.at(2, 1) == 0.0);
  }
  SUBCASE("apply_value reproduces the training transform") {
    CHECK(params.apply_value(3.0, 0) == doctest::Approx(1.0));
    CHECK(params.apply_value(99.0, 1) == 0.0);
  }
}

TEST_CASE("normalize passes missing cells through as NaN") {
  Schema s = two_predictor_schema();
  std::istringstream csv("x1,x2,success\n1,1,0\nNA,2,1\n3,3,0\n");
  Dataset d = Dataset::from_csv(csv, s);
  auto [m, params] = normalize(d, {0});
  CHECK(std::isnan(m.at(1, 0)));
  CHECK(m.at(0, 0) == doctest::Approx(-std::sqrt(0.5)));
}

TEST_CASE("discretize recodes into equal-frequency bins") {
  SUBCASE("distinct values spread over the bins") {
    std::vector<Cell> v{10.0, 20.0, 30.0, 40.0};
    auto codes = discretize(v, 4);
    CHECK(codes[0] == 1);
    CHECK(codes[1] == 2);
    CHECK(codes[2] == 3);
    CHECK(codes[3] == 4);
  }
  SUBCASE("ties share a bin via minimum rank") {
    std::vector<Cell> v{5.0, 5.0, 5.0, 9.0, 9.0};
    auto codes = discretize(v, 4);
    CHECK(codes[0] == codes[1]);
    CHECK(codes[1] == codes[2]);
    CHECK(codes[3] == codes[4]);
    CHECK(*codes[3] > *codes[0]);
  }
  SUBCASE("missing passes through") {
    std::vector<Cell> v{1.0, std::nullopt, 3.0, 4.0, 5.0};
    auto codes = discretize(v, 4);
    CHECK_FALSE(codes[1].has_value());
  }
  SUBCASE("constant column is an error") {
    std::vector<Cell> v{2.0, 2.0, 2.0};
    CHECK_THROWS_AS(discretize(v, 4), InputError);
  }
  SUBCASE("bin count outside 4..5 is an error") {
    std::vector<Cell> v{1.0, 2.0, 3.0};
    CHECK_THROWS_AS(discretize(v, 3), InputError);
    CHECK_THROWS_AS(discretize(v, 6), InputError);
  }
}

TEST_CASE("load_dataset reads schema sidecar plus CSV") {
  Schema s = two_predictor_schema();
  std::istringstream schema_json(s.to_json_string());
  std::istringstream csv("x1,x2,success\n1,2,1\n");
  Dataset d = load_dataset(csv, schema_json);
  CHECK(d.n_rows() == 1);
  CHECK(d.cell(0, 1) == Cell(2.0));
}
