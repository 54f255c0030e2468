#include <doctest.h>

#include <cstring>
#include <string>
#include <vector>

#include <json.hpp>

#include "spectel/spectel.h"

namespace {

std::string take(char* s) {
  std::string out(s);
  spectel_string_free(s);
  return out;
}

} // namespace

TEST_CASE("version and defaults") {
  CHECK(std::strlen(spectel_version()) > 0);
  const spectel_tolerances tol = spectel_default_tolerances();
  CHECK(tol.telescope == 1e-9);
  CHECK(tol.psd == 1e-10);
  const spectel_cube_options o = spectel_default_cube_options();
  CHECK(o.steps == 2000000);
}

TEST_CASE("target lifecycle and errors") {
  const size_t axes[] = {2, 2};
  const double probs[] = {0.1, 0.3, 0.2, 0.4};
  spectel_target* t = nullptr;
  REQUIRE(spectel_target_create(axes, 2, probs, 4, &t) == SPECTEL_OK);
  CHECK(spectel_target_dims(t) == 2);
  char* json = nullptr;
  REQUIRE(spectel_target_to_json(t, &json) == SPECTEL_OK);
  const auto parsed = nlohmann::json::parse(take(json));
  CHECK(parsed["axes"] == nlohmann::json::array({2, 2}));
  spectel_target_free(t);

  spectel_target* bad = nullptr;
  CHECK(spectel_target_from_json("{\"axes\": [2, 2], \"probs\": [0.1", &bad) == SPECTEL_ERR_PARSE);
  CHECK(std::strlen(spectel_last_error()) > 0);
  CHECK(bad == nullptr);
  CHECK(spectel_target_from_json("{\"axes\": [2, 2], \"probs\": [0.1, 0.1, 0.1, 0.1]}", &bad) == SPECTEL_ERR_DOMAIN);
  CHECK(spectel_target_create(nullptr, 2, probs, 4, &bad) == SPECTEL_ERR_INVALID_ARGUMENT);
  CHECK(spectel_target_dims(nullptr) == 0);
  spectel_target_free(nullptr);
}

TEST_CASE("finite verification through the C API") {
  spectel_target* t = nullptr;
  REQUIRE(spectel_target_from_json(
              "{\"axes\": [2, 2, 2], \"probs\": [0.05, 0.1, 0.15, 0.2, 0.1, 0.1, 0.1, 0.2]}", &t) == SPECTEL_OK);
  const spectel_target* list[] = {t};
  char* report = nullptr;
  int pass = 0;
  REQUIRE(spectel_verify_finite(list, 1, 1, 9, nullptr, &report, &pass) == SPECTEL_OK);
  const auto j = nlohmann::json::parse(take(report));
  CHECK(pass == 1);
  CHECK(j["pass"] == true);
  CHECK(j["seed"] == 9);

  spectel_tolerances tol = spectel_default_tolerances();
  tol.lemma = 0.0;
  CHECK(spectel_verify_finite(list, 1, 1, 9, &tol, &report, &pass) == SPECTEL_ERR_DOMAIN);
  spectel_target_free(t);
}

TEST_CASE("random sweep and state cap") {
  const size_t axes[] = {2, 3, 2};
  char* report = nullptr;
  int pass = 0;
  REQUIRE(spectel_verify_finite_random(4, axes, 3, 2, 5, nullptr, &report, &pass) == SPECTEL_OK);
  CHECK(pass == 1);
  CHECK(nlohmann::json::parse(take(report))["targets"].size() == 4);

  const size_t big[] = {150, 150};
  std::vector<double> probs(22500, 1.0 / 22500.0);
  spectel_target* t = nullptr;
  REQUIRE(spectel_target_create(big, 2, probs.data(), probs.size(), &t) == SPECTEL_OK);
  const spectel_target* list[] = {t};
  CHECK(spectel_verify_finite(list, 1, 1, 0, nullptr, &report, &pass) == SPECTEL_ERR_RESOURCE);
  spectel_target_free(t);
}

TEST_CASE("cube verification errors map to status codes") {
  spectel_cube_options o = spectel_default_cube_options();
  char* report = nullptr;
  int pass = 0;
  o.n = 2;
  CHECK(spectel_verify_cube(&o, &report, &pass) == SPECTEL_ERR_DOMAIN);
  o.n = 4;
  o.steps = 10;
  CHECK(spectel_verify_cube(&o, &report, &pass) == SPECTEL_ERR_STATISTICAL);
  CHECK(std::string(spectel_last_error()).find("insufficient") != std::string::npos);
}

TEST_CASE("samplers are deterministic per seed") {
  spectel_target* t = nullptr;
  REQUIRE(spectel_target_from_json("{\"axes\": [3, 2], \"probs\": [0.1, 0.2, 0.3, 0.1, 0.2, 0.1]}", &t) == SPECTEL_OK);
  auto run = [&](uint64_t seed) {
    spectel_sampler* s = nullptr;
    REQUIRE(spectel_sampler_finite(t, 1, seed, &s) == SPECTEL_OK);
    std::string trace;
    for (int k = 0; k < 100; ++k) {
      REQUIRE(spectel_sampler_step(s, 1) == SPECTEL_OK);
      char* line = nullptr;
      REQUIRE(spectel_sampler_state_json(s, &line) == SPECTEL_OK);
      trace += take(line);
    }
    spectel_sampler_free(s);
    return trace;
  };
  CHECK(run(3) == run(3));
  CHECK(run(3) != run(4));

  spectel_sampler* s = nullptr;
  CHECK(spectel_sampler_finite(t, 3, 0, &s) == SPECTEL_ERR_DOMAIN);
  spectel_target_free(t);
}

TEST_CASE("corner sampler respects the support") {
  spectel_sampler* s = nullptr;
  REQUIRE(spectel_sampler_cube(4, 1, &s) == SPECTEL_OK);
  CHECK(spectel_sampler_dims(s) == 4);
  double x[4];
  for (int k = 0; k < 5000; ++k) {
    REQUIRE(spectel_sampler_step(s, 1) == SPECTEL_OK);
    REQUIRE(spectel_sampler_state(s, x, 4) == SPECTEL_OK);
    double sum = 0.0;
    for (double v : x) {
      CHECK(v > 0.0);
      sum += v;
    }
    CHECK(sum < 1.0);
  }
  CHECK(spectel_sampler_state(s, x, 2) == SPECTEL_ERR_INVALID_ARGUMENT);
  spectel_sampler_free(s);
}

TEST_CASE("report merge") {
  const char* reports[] = {"{\"pass\": true, \"seed\": 1}", "{\"pass\": true, \"seed\": 2}"};
  char* merged = nullptr;
  int pass = 0;
  REQUIRE(spectel_report_merge(reports, 2, &merged, &pass) == SPECTEL_OK);
  CHECK(pass == 1);
  spectel_string_free(merged);
  const char* broken[] = {"{\"pass\": tru"};
  CHECK(spectel_report_merge(broken, 1, &merged, &pass) == SPECTEL_ERR_PARSE);
}
