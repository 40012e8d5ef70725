#include <string>

#include "doctest.h"
#include "ivse/config.hpp"

using namespace ivse;

namespace {
std::string error_of(const std::string& text) {
  try {
    (void)parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("mode is mandatory and must be known") {
  CHECK(error_of("{}").find("mode") != std::string::npos);
  CHECK(error_of(R"({"mode":"explode"})").find("mode") != std::string::npos);
  for (const char* m : {"simulate", "euler", "compare", "kappa", "oracle", "verify"})
    CHECK(to_string(parse_mode(m)) == m);
}

TEST_CASE("defaults resolve per mode") {
  const auto sim = parse_config(std::string(R"({"mode":"simulate","amplitude":-1})"));
  CHECK(sim.amplitude == -1.0);
  CHECK(*sim.n_r == 128);
  CHECK(*sim.r_min == 1.0);
  CHECK(*sim.cfl == 0.1);
  const auto eul = parse_config(std::string(R"({"mode":"euler"})"));
  CHECK(*eul.n_r == 256);
  CHECK(*eul.r_min == 0.0);
  CHECK(*eul.cfl == 0.4);
  const auto echoed = sim.to_json();
  CHECK(echoed.at("n_z") == 128);
  CHECK(echoed.at("mode") == "simulate");
}

TEST_CASE("constraint violations name the key") {
  CHECK(error_of(R"({"mode":"simulate","amplitude":1})").find("amplitude") != std::string::npos);
  CHECK(error_of(R"({"mode":"simulate","n_r":1})").find("n_r") != std::string::npos);
  CHECK(error_of(R"({"mode":"simulate","cfl":-0.1})").find("cfl") != std::string::npos);
  CHECK(error_of(R"({"mode":"simulate","rule_order":"high"})").find("rule_order") != std::string::npos);
  CHECK(error_of(R"({"mode":"simulate","colour":"red"})").find("colour") != std::string::npos);
  CHECK(error_of(R"({"mode":"simulate","grid":{"n":4}})").find("grid") != std::string::npos);
  CHECK(error_of("[1,2]") != "");
  CHECK(error_of("{not json") != "");
}

TEST_CASE("overrides and hashing") {
  nlohmann::json obj = {{"mode", "kappa"}};
  apply_override(obj, "n_r=64");
  apply_override(obj, "stepper=rk4");
  apply_override(obj, "output_dir=some/dir");
  CHECK(obj["n_r"] == 64);
  CHECK(obj["stepper"] == "rk4");
  CHECK_THROWS_AS(apply_override(obj, "no_equals_sign"), ConfigError);
  const auto a = parse_config(obj);
  const auto b = parse_config(obj);
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  apply_override(obj, "n_r=65");
  CHECK(config_hash(parse_config(obj)) != config_hash(a));
}
