#include "choquet/choquet_c.h"

#include <doctest.h>

#include <cstring>
#include <string>

TEST_CASE("scenario runs through the C interface") {
  chq_options o;
  chq_options_init(&o);
  char* report = nullptr;
  int code = -1;
  REQUIRE(chq_run_scenario(R"({"version":"1","checks":[]})", &o, nullptr, &report, &code) == CHQ_OK);
  CHECK(code == 0);
  CHECK(std::string(report).find("\"checks\": []") != std::string::npos);
  chq_string_free(report);

  o.pretty = 1;
  REQUIRE(chq_run_demo("collinear-core", &o, &report, &code) == CHQ_OK);
  CHECK(code == 0);
  CHECK(std::string(report).find("PASS") != std::string::npos);
  chq_string_free(report);

  CHECK(chq_run_demo("nope", &o, &report, &code) == CHQ_E_INVALID_ARGUMENT);
  CHECK(std::string(chq_last_error()).find("collinear-core") != std::string::npos);
  CHECK(chq_status_exit_code(CHQ_E_INVALID_ARGUMENT) == 2);
  CHECK(chq_status_exit_code(CHQ_E_INTERNAL) == 3);

  char* names = nullptr;
  REQUIRE(chq_demo_list(&names) == CHQ_OK);
  CHECK(std::string(names) == "example-1-1\ncollinear-core\ncoordinate-list\n");
  chq_string_free(names);

  CHECK(chq_run_scenario(R"({"capacity":{"kind":"explicit","atoms":1,"table":["0","7/0"]}})", &o, nullptr, &report,
                         &code) == CHQ_E_PARSE);
  CHECK(std::strlen(chq_last_error()) > 0);
  CHECK(chq_run_scenario(nullptr, &o, nullptr, &report, &code) == CHQ_E_NULL_ARGUMENT);
}

TEST_CASE("capacity handles") {
  chq_capacity* mu = nullptr;
  REQUIRE(chq_capacity_from_json(R"({"kind":"product_section","gamma":"sqrt"})", &mu) == CHQ_OK);
  double v = 0.0;
  REQUIRE(chq_capacity_evaluate(mu, R"({"rects":[["0","1/4","0","1"]]})", &v) == CHQ_OK);
  CHECK(v == doctest::Approx(0.5));
  REQUIRE(chq_capacity_total(mu, &v) == CHQ_OK);
  CHECK(v == doctest::Approx(1.0));
  int passed = 0;
  REQUIRE(chq_capacity_check(mu, "submodular", 3, 200, 1e-9, &passed) == CHQ_OK);
  CHECK(passed == 1);
  CHECK(chq_capacity_check(mu, "convex", 3, 10, 1e-9, &passed) == CHQ_E_INVALID_ARGUMENT);
  CHECK(chq_capacity_evaluate(mu, R"({"atoms":[0]})", &v) == CHQ_E_PARSE);
  chq_capacity_free(mu);
  CHECK(chq_capacity_from_json(R"({"kind":"explicit","atoms":2,"table":["0","1"]})", &mu) != CHQ_OK);
  CHECK(mu == nullptr);
}

TEST_CASE("economy handles") {
  chq_economy* eco = nullptr;
  REQUIRE(chq_economy_from_json(R"({"blocks":[
      {"mass":1,"endowment":[1,1],"preference":{"kind":"cobb_douglas","alpha":[0.5,0.5]}},
      {"mass":1,"endowment":[2,2],"preference":{"kind":"cobb_douglas","alpha":[0.5,0.5]}}]})",
                                &eco) == CHQ_OK);
  size_t r = 0, n = 0;
  REQUIRE(chq_economy_shape(eco, &r, &n) == CHQ_OK);
  CHECK(r == 2);
  CHECK(n == 2);
  const double e[] = {1, 1, 2, 2};
  const double shuffled[] = {0.5, 2, 2.5, 1};
  int flag = -1;
  REQUIRE(chq_economy_feasible(eco, shuffled, &flag) == CHQ_OK);
  CHECK(flag == 1);
  REQUIRE(chq_economy_core_check(eco, shuffled, &flag) == CHQ_OK);
  CHECK(flag == 0);
  REQUIRE(chq_economy_core_check(eco, e, &flag) == CHQ_OK);
  CHECK(flag == 1);
  double p[2] = {0, 0};
  REQUIRE(chq_economy_walras(eco, e, nullptr, p, &flag) == CHQ_OK);
  CHECK(flag == 1);
  CHECK(p[0] == doctest::Approx(0.5));
  const double skew[] = {0.9, 0.1};
  REQUIRE(chq_economy_walras(eco, e, skew, nullptr, &flag) == CHQ_OK);
  CHECK(flag == 0);
  double masses[2] = {-1, -1};
  REQUIRE(chq_economy_oracle(eco, shuffled, 1, 16, &flag, masses) == CHQ_OK);
  CHECK(flag == 1);
  CHECK(masses[1] == doctest::Approx(1.0));
  REQUIRE(chq_economy_oracle(eco, e, 0, 16, &flag, nullptr) == CHQ_OK);
  CHECK(flag == 0);
  chq_economy_free(eco);
  CHECK(chq_economy_from_json(R"({"blocks":[]})", &eco) == CHQ_E_PARSE);
}
